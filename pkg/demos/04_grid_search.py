"""Hyperparameter grid search over a small synthetic corpus.

Sweeps the correction angle, normalization mode and poseline fallback,
then prints the leaderboard (best mP@1 first). Canvases are re-extracted
only when an extraction parameter changes.
"""

from compcanvas import GridSpec, grid_search
from compcanvas.synthetic import SyntheticSpec, generate_synthetic_corpus

scenes, _ = generate_synthetic_corpus(
    SyntheticSpec(images_per_class=8, jitter_sigma=12.0, drop_prob=0.03, seed=6)
)

spec = GridSpec(
    correction_deg=(0.0, 20.0),
    norm_mode=("none", "image", "ar"),
    poseline_fallback=(False, True),
)
print(f"evaluating {spec.size()} combinations on {len(scenes)} images...")

results = grid_search(spec, scenes)
print(f"\n{'rho':>5} {'norm':>6} {'fallback':>9} {'mP@1':>7} {'mAP':>7}")
for cell, report in results:
    print(f"{cell['correction_deg']:5.0f} {cell['norm_mode']:>6} "
          f"{str(cell['poseline_fallback']):>9} {report.mp1:7.3f} {report.mean_ap:7.3f}")
