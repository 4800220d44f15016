"""
Reflected field maps
====================

Sample the RIS-reflected field on a fine grid over the desk for the hot-spot
beam (it targets the tag) and for the strongest coherent-spot beam.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ambris.codebook import build_codebook
from ambris.config import default_config_text, parse_config
from ambris.fieldmap import map_peak, reflected_field_map
from ambris.geometry import DeskGrid
from ambris.metrics import BeamType, classify_beam

cfg = parse_config(default_config_text())
s, cs = cfg.scenario, cfg.channels
cb = build_codebook(s)
classes = {n: classify_beam(cs, cb.beam(n)) for n in range(1, cb.num_beams + 1)}
hot = [n for n, c in classes.items() if c.kind is BeamType.HOT_SPOT]
coherent = sorted((n for n, c in classes.items() if c.kind is BeamType.COHERENT_SPOT),
                  key=lambda n: abs(classes[n].leakage_ratio - 1))
print("hot-spot beams:", hot)
print("coherent-spot beams:", sorted(coherent))

# %%
# A 1 cm grid covering the desk and a margin around it.
fine = DeskGrid(origin=[0.15, -0.3, 0.0], axis_u=[1, 0, 0], axis_v=[0, 1, 0],
                spacing=0.01, nx=61, ny=61)
beams = hot[:1] + coherent[:1]
fig, axes = plt.subplots(1, len(beams), figsize=(5 * len(beams), 4))
axes = list(axes) if len(beams) > 1 else [axes]
for ax, n in zip(axes, beams):
    fm = reflected_field_map(s, cb.beam(n), fine, workers=4)
    i, j, peak = map_peak(fm)
    ext = [fine.origin[1], fine.origin[1] + 0.6, fine.origin[0] + 0.6, fine.origin[0]]
    im = ax.imshow(fm.values, extent=ext, vmin=peak - 40, vmax=peak)
    ax.plot(s.tag_pos[1], s.tag_pos[0], "r^", label="tag")
    ax.plot(s.reader_pos[1], s.reader_pos[0], "ws", label="reader")
    ax.set_title(f"beam {n} ({classes[n].kind.value})")
    ax.set_xlabel("y (m)")
    ax.set_ylabel("x (m)")
    ax.legend(loc="lower right")
    fig.colorbar(im, ax=ax, label="dB")
fig.tight_layout()
fig.savefig("field_maps.png", dpi=120)
print("wrote field_maps.png")
