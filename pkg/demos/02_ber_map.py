"""
BER over all (beam, common phase) pairs
=======================================

Evaluate all 64 x 16 pairs with sigma calibrated so the link without RIS sits
at a BER of 5.37e-2, then show which pairs beat that reference.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ambris.codebook import build_codebook, phase_grid
from ambris.config import default_config_text, parse_config
from ambris.search import evaluate_grid

cfg = parse_config(default_config_text())
s = cfg.scenario
r = evaluate_grid(s, build_codebook(s), phase_grid(cfg.phases))
print(f"reference BER {r.ref_ber:.4g}; best pair beam {r.best_beam}, "
      f"delta {360 * r.best_phase / cfg.phases:.1f} deg, BER {r.best_ber:.3g}")

# %%
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
extent = [0, 360, r.ber.shape[0] + 0.5, 0.5]
im = ax1.imshow(np.log10(r.ber), aspect="auto", extent=extent, cmap="viridis_r")
fig.colorbar(im, ax=ax1, label="log10 BER")
ax1.set_xlabel("common phase shift (deg)")
ax1.set_ylabel("beam index")
ax2.imshow(np.sign(r.ref_ber - r.ber), aspect="auto", extent=extent, cmap="cividis")
ax2.set_title("better (yellow) / worse (blue) than no RIS")
ax2.set_xlabel("common phase shift (deg)")
fig.tight_layout()
fig.savefig("ber_map.png", dpi=120)
print("wrote ber_map.png")
