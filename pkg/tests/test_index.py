import math
import struct

import numpy as np
import pytest

from compcanvas.canvas import ExtractParams
from compcanvas.index import (
    IndexBuildError,
    IndexIntegrityError,
    IndexVersionError,
    QueryError,
    QueryRequest,
    attach_features,
    build_index,
    feature_distance,
    load_index,
    query,
    save_index,
)
from compcanvas.normalize import NormMode
from compcanvas.pose import PoseScene
from compcanvas.similarity import CombineMode, SimilarityParams, SortMethod
from compcanvas.synthetic import SyntheticSpec, generate_synthetic_corpus
from .conftest import make_pose, random_scene, standing_points


@pytest.fixture(scope="module")
def corpus():
    spec = SyntheticSpec(images_per_class=4, jitter_sigma=8.0, drop_prob=0.02, seed=11)
    scenes, labels = generate_synthetic_corpus(spec)
    return scenes, labels


@pytest.fixture(scope="module")
def index(corpus):
    scenes, _ = corpus
    return build_index(scenes, ExtractParams(poseline_fallback=True))


class TestBuild:
    def test_empty_corpus(self):
        idx = build_index([], ExtractParams())
        assert len(idx) == 0

    def test_cardinality_and_caches(self, index, corpus):
        scenes, labels = corpus
        assert len(index) == len(scenes)
        entry = index.entries[index.image_ids[0]]
        assert set(entry.normalized) == set(NormMode)
        assert index.labels == {s.image_id: s.class_label for s in scenes}

    def test_duplicate_id_rejected(self, corpus):
        scenes, _ = corpus
        with pytest.raises(IndexBuildError, match=scenes[0].image_id):
            build_index([scenes[0], scenes[0]], ExtractParams())

    def test_fingerprint_tracks_params(self, corpus):
        scenes, _ = corpus
        a = build_index(scenes[:2], ExtractParams())
        b = build_index(scenes[:2], ExtractParams(correction_deg=25.0))
        assert a.params_fingerprint != b.params_fingerprint


class TestPersistence:
    def test_round_trip_small(self, tmp_path, corpus):
        scenes, _ = corpus
        idx = build_index(scenes[:1], ExtractParams(poseline_fallback=True))
        path = tmp_path / "one.iccx"
        save_index(idx, str(path))
        assert load_index(str(path)) == idx

    def test_round_trip_full(self, tmp_path, index):
        path = tmp_path / "full.iccx"
        save_index(index, str(path))
        loaded = load_index(str(path))
        assert loaded == index
        # floats bit-identical
        for image_id in index.image_ids:
            a = index.entries[image_id].canvas
            b = loaded.entries[image_id].canvas
            for pa, pb in zip(a.poselines, b.poselines):
                assert pa.top == pb.top and pa.bottom == pb.bottom

    def test_round_trip_with_features(self, tmp_path, index):
        table = {image_id: [float(i), 1.0] for i, image_id in enumerate(index.image_ids)}
        withf = attach_features(index, table, "euclidean")
        path = tmp_path / "feat.iccx"
        save_index(withf, str(path))
        assert load_index(str(path)) == withf

    def test_version_mismatch(self, tmp_path, index):
        path = tmp_path / "v.iccx"
        save_index(index, str(path))
        raw = bytearray(path.read_bytes())
        raw[4:8] = struct.pack("<I", 999)
        path.write_bytes(bytes(raw))
        with pytest.raises(IndexVersionError, match="999"):
            load_index(str(path))

    def test_truncated_file(self, tmp_path, index):
        path = tmp_path / "t.iccx"
        save_index(index, str(path))
        path.write_bytes(path.read_bytes()[:-40])
        with pytest.raises(IndexIntegrityError):
            load_index(str(path))

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "b.iccx"
        path.write_bytes(b"NOPE" + b"\x00" * 100)
        with pytest.raises(IndexIntegrityError, match="magic"):
            load_index(str(path))


class TestFeatures:
    def test_euclidean_identity(self, index):
        table = {image_id: [1.0, 2.0] for image_id in index.image_ids}
        idx = attach_features(index, table, "euclidean")
        a, b = idx.image_ids[:2]
        assert feature_distance(idx, a, b) == 0.0

    def test_neg_cosine_orthogonal(self, index):
        ids = index.image_ids
        table = {image_id: [1.0, 0.0] for image_id in ids}
        table[ids[1]] = [0.0, 1.0]
        idx = attach_features(index, table, "neg_cosine")
        assert feature_distance(idx, ids[0], ids[1]) == pytest.approx(1.0)

    def test_dimension_mismatch(self, index):
        ids = index.image_ids
        table = {image_id: [1.0, 0.0] for image_id in ids}
        table[ids[2]] = [1.0]
        with pytest.raises(ValueError, match=ids[2]):
            attach_features(index, table, "euclidean")

    def test_unknown_id(self, index):
        with pytest.raises(ValueError, match="ghost"):
            attach_features(index, {"ghost": [1.0]}, "euclidean")

    def test_missing_vector_at_query_time(self, index):
        ids = index.image_ids
        table = {image_id: [1.0, 0.0] for image_id in ids[:3]}
        idx = attach_features(index, table, "euclidean")
        req = QueryRequest(
            query_id=ids[0], k=5, norm_mode=NormMode.NONE,
            similarity=SimilarityParams(combine_mode=CombineMode.MULTIPLICATIVE),
        )
        with pytest.raises(QueryError, match="missing"):
            query(idx, req)


class TestQuery:
    def test_self_excluded(self, index):
        qid = index.image_ids[0]
        res = query(index, QueryRequest(query_id=qid, k=len(index)))
        assert qid not in [r.target_id for r in res.records]
        assert len(res.records) == len(index) - 1

    def test_k_truncates(self, index):
        res = query(index, QueryRequest(query_id=index.image_ids[0], k=3))
        assert len(res.records) == 3

    def test_unknown_id(self, index):
        with pytest.raises(QueryError, match="ghost"):
            query(index, QueryRequest(query_id="ghost"))

    def test_exact_duplicate_ranks_first(self, corpus):
        scenes, _ = corpus
        dup = PoseScene(
            image_id="zz_duplicate", width=scenes[0].width, height=scenes[0].height,
            poses=scenes[0].poses, class_label=scenes[0].class_label,
        )
        idx = build_index(list(scenes) + [dup], ExtractParams(poseline_fallback=True))
        for mode in NormMode:
            res = query(idx, QueryRequest(query_id=scenes[0].image_id, k=3, norm_mode=mode))
            assert res.records[0].target_id == "zz_duplicate"
            assert res.records[0].r_cr == 1.0

    def test_inline_scene(self, index, corpus):
        scenes, _ = corpus
        inline = PoseScene(
            image_id="inline_probe", width=scenes[0].width, height=scenes[0].height,
            poses=scenes[0].poses,
        )
        res = query(index, QueryRequest(scene=inline, k=1, norm_mode=NormMode.ACTION_REGION))
        assert res.records[0].target_id == scenes[0].image_id
        assert res.records[0].r_cr == 1.0

    def test_degenerate_bbox_defers_to_bbox_queries(self):
        # a perfectly vertical figure: poselines exist but the keypoint
        # bbox has zero width, which must only break bbox-mode queries
        pts = [(500.0, 100.0 + 10.0 * j) for j in range(18)]
        pose = make_pose(pts)
        scene = PoseScene(image_id="vertical", width=1000, height=1000, poses=(pose,))
        other = PoseScene(
            image_id="normal", width=1000, height=1000,
            poses=(make_pose(standing_points()),),
        )
        idx = build_index([scene, other], ExtractParams(poseline_fallback=True))
        res = query(idx, QueryRequest(query_id="normal", k=1, norm_mode=NormMode.ACTION_REGION))
        assert res.records[0].target_id == "vertical"
        from compcanvas.normalize import DegenerateBboxError

        with pytest.raises(DegenerateBboxError, match="vertical"):
            query(idx, QueryRequest(query_id="normal", k=1, norm_mode=NormMode.BBOX))

    def test_results_independent_of_insertion_order(self, corpus):
        scenes, _ = corpus
        params = ExtractParams(poseline_fallback=True)
        a = build_index(list(scenes), params)
        b = build_index(list(reversed(scenes)), params)
        qa = query(a, QueryRequest(query_id=scenes[0].image_id, k=10, norm_mode=NormMode.ACTION_REGION))
        qb = query(b, QueryRequest(query_id=scenes[0].image_id, k=10, norm_mode=NormMode.ACTION_REGION))
        assert [r.target_id for r in qa.records] == [r.target_id for r in qb.records]

    def test_query_results_survive_round_trip(self, tmp_path, index):
        path = tmp_path / "rt.iccx"
        save_index(index, str(path))
        loaded = load_index(str(path))
        req = QueryRequest(query_id=index.image_ids[0], k=10, norm_mode=NormMode.ACTION_REGION)
        before = query(index, req)
        after = query(loaded, req)
        assert [r.target_id for r in before.records] == [r.target_id for r in after.records]
        assert [r.r_cr for r in before.records] == [r.r_cr for r in after.records]

    def test_latp_baseline_query(self, index):
        res = query(
            index,
            QueryRequest(query_id=index.image_ids[0], k=5, baseline="latp", latp_mode="min"),
        )
        assert len(res.records) == 5
        values = [r.r_a for r in res.records]
        assert values == sorted(values)

    def test_fusion_query_sorts_by_combi(self, index):
        rng = np.random.default_rng(3)
        table = {image_id: rng.normal(size=4).tolist() for image_id in index.image_ids}
        idx = attach_features(index, table, "euclidean")
        req = QueryRequest(
            query_id=idx.image_ids[0], k=len(idx),
            norm_mode=NormMode.ACTION_REGION,
            similarity=SimilarityParams(combine_mode=CombineMode.MULTIPLICATIVE),
        )
        res = query(idx, req)
        values = [r.r_combi1 for r in res.records]
        assert values == sorted(values)

    def test_request_validation(self):
        with pytest.raises(ValueError):
            QueryRequest(query_id=None, scene=None)
        with pytest.raises(ValueError):
            QueryRequest(query_id="x", k=0)
