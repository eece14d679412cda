"""Canvas similarity vs the neck-normalized pose-distance baseline.

Evaluates both rankers on the same noisy corpus: the pose baseline
matches near-duplicates well but has no composition abstraction, so the
canvas method should lead on class-level retrieval.
"""

from compcanvas import ExtractParams, build_index, evaluate
from compcanvas.evaluation import prepare_scenes
from compcanvas.normalize import NormMode
from compcanvas.synthetic import SyntheticSpec, generate_synthetic_corpus

scenes, _ = generate_synthetic_corpus(
    SyntheticSpec(images_per_class=12, jitter_sigma=15.0, drop_prob=0.05, seed=42)
)
index = build_index(prepare_scenes(scenes), ExtractParams(poseline_fallback=True))

print("composition canvas (ar norm, fallback on):")
print(evaluate(index, norm_mode=NormMode.ACTION_REGION).table())

for mode in ("min", "bipart"):
    print(f"\npose baseline, {mode} distance:")
    print(evaluate(index, baseline="latp", latp_mode=mode).table())

print("\npose baseline, min distance with robust verification:")
report = evaluate(index, baseline="latp", latp_mode="min", latp_robust=True)
print(report.table())
for note in report.notes:
    print(f"({note})")
