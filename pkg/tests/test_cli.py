import json

import pytest

from compcanvas.cli import main
from compcanvas.index import load_index


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """Shared synth corpus + index built through the CLI itself."""
    root = tmp_path_factory.mktemp("cli")
    kp = root / "kp.json"
    idx = root / "idx.iccx"
    assert main(["synth", "--out", str(kp), "--per-class", "4",
                 "--jitter", "8", "--drop", "0.02", "--seed", "13"]) == 0
    assert main(["index", "--keypoints", str(kp), "--out", str(idx),
                 "--fallback-poseline"]) == 0
    return root, kp, idx


def test_synth_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["synth", "--out", str(a), "--seed", "4", "--per-class", "2"])
    main(["synth", "--out", str(b), "--seed", "4", "--per-class", "2"])
    assert a.read_bytes() == b.read_bytes()


def test_extract_writes_canvases(workdir, tmp_path, capsys):
    _, kp, _ = workdir
    out = tmp_path / "canvases.json"
    assert main(["extract", "--keypoints", str(kp), "--out", str(out),
                 "--fallback-poseline"]) == 0
    data = json.loads(out.read_text())
    assert len(data) == 20
    assert all(c["canvas_version"] == 1 for c in data)


def test_index_params_recorded(workdir):
    _, _, idx = workdir
    index = load_index(str(idx))
    assert index.params.poseline_fallback is True
    assert len(index) == 20


def test_query_outputs_ranked_json(workdir, capsys):
    _, _, idx = workdir
    index = load_index(str(idx))
    qid = index.image_ids[0]
    assert main(["query", "--index", str(idx), "--query-id", qid,
                 "--k", "3", "--norm", "ar"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["query_id"] == qid
    assert len(data["records"]) == 3


def test_evaluate_prints_table(workdir, tmp_path, capsys):
    _, _, idx = workdir
    report_path = tmp_path / "report.json"
    csv_path = tmp_path / "cluster.csv"
    assert main(["evaluate", "--index", str(idx), "--norm", "ar",
                 "--json", str(report_path), "--cluster-csv", str(csv_path)]) == 0
    out = capsys.readouterr().out
    assert "mP@1" in out
    report = json.loads(report_path.read_text())
    assert report["query_count"] == 20
    assert csv_path.read_text().startswith("image_id,mean,std,median")


def test_evaluate_latp_baseline(workdir, capsys):
    _, _, idx = workdir
    assert main(["evaluate", "--index", str(idx), "--baseline", "latp",
                 "--latp-mode", "min"]) == 0
    assert "mP@1" in capsys.readouterr().out


def test_gridsearch(workdir, tmp_path, capsys):
    _, kp, _ = workdir
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"norm_mode": ["none", "ar"], "poseline_fallback": [True]}))
    out = tmp_path / "results.json"
    assert main(["gridsearch", "--keypoints", str(kp), "--grid", str(grid),
                 "--out", str(out)]) == 0
    results = json.loads(out.read_text())
    assert len(results) == 2
    assert {r["params"]["norm_mode"] for r in results} == {"none", "ar"}


def test_render_overlays_and_match(workdir, tmp_path, capsys):
    _, _, idx = workdir
    index = load_index(str(idx))
    ids = index.image_ids
    out = tmp_path / "svgs"
    assert main(["render", "--index", str(idx), "--out", str(out),
                 "--ids", ids[0], "--match-target", ids[1], "--norm", "ar"]) == 0
    assert (out / f"{ids[0]}.svg").exists()
    assert (out / f"{ids[0]}__{ids[1]}.svg").exists()


def test_render_unknown_id_fails(workdir, tmp_path):
    _, _, idx = workdir
    with pytest.raises(SystemExit):
        main(["render", "--index", str(idx), "--out", str(tmp_path / "x"), "--ids", "ghost"])
