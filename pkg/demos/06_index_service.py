"""Persist an index, query it, and export cluster features.

Also prints the commands to launch the HTTP service and the explorer UI
against the same index file.
"""

import tempfile
from pathlib import Path

from compcanvas import ExtractParams, QueryRequest, build_index, load_index, query, save_index
from compcanvas.evaluation import export_cluster_features, prepare_scenes
from compcanvas.normalize import NormMode
from compcanvas.synthetic import SyntheticSpec, generate_synthetic_corpus

scenes, labels = generate_synthetic_corpus(
    SyntheticSpec(images_per_class=6, jitter_sigma=10.0, drop_prob=0.02, seed=19)
)
index = build_index(prepare_scenes(scenes), ExtractParams(poseline_fallback=True))

workdir = Path(tempfile.mkdtemp(prefix="compcanvas_demo_"))
index_path = workdir / "corpus.iccx"
save_index(index, str(index_path))
reloaded = load_index(str(index_path))
assert reloaded == index
print(f"index round-trip OK: {index_path} ({index_path.stat().st_size} bytes, {len(index)} images)")

qid = index.image_ids[0]
results = query(reloaded, QueryRequest(query_id=qid, k=5, norm_mode=NormMode.ACTION_REGION))
print(f"\ntop-5 for {qid} ({labels[qid]}):")
for rec in results.records:
    print(f"  {rec.target_id:20s} label={labels[rec.target_id]:11s} r_cr={rec.r_cr:.3f}")

csv_path = workdir / "cluster_features.csv"
csv_path.write_text(export_cluster_features(index))
print(f"\n7-D cluster feature vectors -> {csv_path}")

print(
    "\nto serve this index over HTTP:\n"
    f"  compcanvas serve --index {index_path} --port 8410\n"
    "then open the explorer UI (see frontend/README.md) or try:\n"
    "  curl localhost:8410/api/params"
)
