"""
Searching with quantized reader feedback
========================================

The RIS tries pairs one at a time and the reader answers with a quantized
contrast. Coarse feedback or a short budget can stop short of the true best.
"""

from ambris.codebook import build_codebook, phase_grid
from ambris.config import default_config_text, parse_config
from ambris.search import Quantizer, contrast_upper_bound, evaluate_grid, feedback_search

cfg = parse_config(default_config_text())
s = cfg.scenario
cb, pg = build_codebook(s), phase_grid(cfg.phases)
truth = evaluate_grid(s, cb, pg)
print(f"exhaustive best: beam {truth.best_beam}, phase {truth.best_phase}, BER {truth.best_ber:.3g}")

rmax = contrast_upper_bound(cfg.channels, s.tag_reflection)
for bits in (1, 2, 4, 8, 12):
    for budget in (256, 1024):
        r = feedback_search(s, cb, pg, Quantizer(bits, rmax), budget)
        true_ber = truth.ber[r.best_beam - 1, r.best_phase]
        print(f"bits {bits:2d} budget {budget:4d}: beam {r.best_beam:2d} phase {r.best_phase:2d} "
              f"true BER {true_ber:.3g}")
