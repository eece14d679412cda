import numpy as np
import pytest

from compcanvas.canvas import ExtractParams, extract_canvas
from compcanvas.normalize import DegenerateBboxError, NormMode, normalize
from compcanvas.pose import Keypoint, Pose, PoseScene
from .conftest import make_pose, random_scene, standing_points


def _canvas_with_poselines(segments, width=1000, height=500, regions=(), kp_bounds=None):
    """Hand-built canvas: poselines and optional region centers only."""
    from compcanvas.canvas import ActionRegion, CompositionCanvas, Poseline

    poselines = tuple(
        Poseline(top=t, bottom=b, is_fallback=False, pose_index=i)
        for i, (t, b) in enumerate(segments)
    )
    region_objs = tuple(
        ActionRegion(
            polygons=(((c[0] - 1, c[1] - 1), (c[0] + 1, c[1] - 1), (c[0] + 1, c[1] + 1), (c[0] - 1, c[1] + 1)),),
            center=c,
            contributing_poses=frozenset({0, 1}),
        )
        for c in regions
    )
    return CompositionCanvas(
        image_id="hand", width=width, height=height,
        poselines=poselines, rays=(), cones=(), regions=region_objs, action_lines=(),
        params=ExtractParams(), kp_bounds=kp_bounds,
    )


class TestModes:
    def test_none_passthrough(self):
        canvas = _canvas_with_poselines([((100.0, 50.0), (100.0, 300.0))])
        out = normalize(canvas, "none")
        assert out.mode is NormMode.NONE
        assert len(out.sets) == 1
        assert out.sets[0].poselines == (((100.0, 50.0), (100.0, 300.0)),)

    def test_image_divides_by_dims(self):
        canvas = _canvas_with_poselines([((100.0, 50.0), (100.0, 300.0))])
        out = normalize(canvas, NormMode.IMAGE)
        assert out.sets[0].poselines[0] == ((0.1, 0.1), (0.1, 0.6))

    def test_bbox_normalization(self):
        canvas = _canvas_with_poselines(
            [((100.0, 50.0), (100.0, 300.0))], kp_bounds=(100.0, 50.0, 300.0, 550.0)
        )
        out = normalize(canvas, "bbox")
        assert out.sets[0].poselines[0] == ((0.0, 0.0), (0.0, 0.5))

    def test_bbox_degenerate_raises(self):
        canvas = _canvas_with_poselines(
            [((100.0, 50.0), (100.0, 300.0))], kp_bounds=(100.0, 50.0, 100.0, 550.0)
        )
        with pytest.raises(DegenerateBboxError):
            normalize(canvas, "bbox")

    def test_ar_subtracts_center(self):
        canvas = _canvas_with_poselines(
            [((300.0, 250.0), (300.0, 400.0))], regions=[(200.0, 200.0)]
        )
        out = normalize(canvas, "ar")
        assert out.sets[0].poselines[0] == ((100.0, 50.0), (100.0, 200.0))
        assert out.sets[0].frame_tag == (200.0, 200.0)

    def test_ar_one_set_per_region(self):
        canvas = _canvas_with_poselines(
            [((300.0, 250.0), (300.0, 400.0))], regions=[(200.0, 200.0), (400.0, 100.0)]
        )
        out = normalize(canvas, "ar")
        assert len(out.sets) == 2

    def test_ar_fallback_centers_on_midpoint_mean(self):
        canvas = _canvas_with_poselines(
            [((0.0, 0.0), (0.0, 100.0)), ((200.0, 0.0), (200.0, 100.0))]
        )
        out = normalize(canvas, "ar")
        assert len(out.sets) == 1
        # midpoints (0,50) and (200,50) -> mean center (100,50)
        assert out.sets[0].frame_tag == (100.0, 50.0)
        assert out.sets[0].poselines[0] == ((-100.0, -50.0), (-100.0, 50.0))

    def test_ar_empty_canvas(self):
        canvas = _canvas_with_poselines([])
        out = normalize(canvas, "ar")
        assert len(out.sets) == 1
        assert out.sets[0].poselines == ()


class TestInvariances:
    def test_image_norm_scale_invariant(self, rng):
        scene = random_scene(rng, image_id="inv", width=1200, height=900)
        params = ExtractParams(poseline_fallback=True)
        base = normalize(extract_canvas(scene, params), "image")
        s = 3.0
        scaled_scene = PoseScene(
            image_id="inv", width=int(1200 * s), height=int(900 * s),
            poses=tuple(
                Pose(keypoints=tuple(Keypoint(k.x * s, k.y * s, k.confidence) for k in p.keypoints))
                for p in scene.poses
            ),
        )
        scaled = normalize(extract_canvas(scaled_scene, params), "image")
        for sa, sb in zip(base.sets, scaled.sets):
            for pa, pb in zip(sa.poselines, sb.poselines):
                assert pb[0] == pytest.approx(pa[0], abs=1e-9)
                assert pb[1] == pytest.approx(pa[1], abs=1e-9)

    def test_image_norm_counterexample_canvases_coincide(self):
        # Two canvases with genuinely different aspect layouts collapse to
        # identical normalized sets: the known distortion of min-max image
        # normalization.
        wide = _canvas_with_poselines(
            [((20.0, 10.0), (20.0, 90.0)), ((180.0, 10.0), (180.0, 90.0))],
            width=200, height=100,
        )
        tall = _canvas_with_poselines(
            [((10.0, 20.0), (10.0, 180.0)), ((90.0, 20.0), (90.0, 180.0))],
            width=100, height=200,
        )
        a = np.asarray(normalize(wide, "image").sets[0].poselines)
        b = np.asarray(normalize(tall, "image").sets[0].poselines)
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_bbox_norm_translation_and_scale_invariant(self, rng):
        params = ExtractParams(poseline_fallback=True)
        for i in range(20):
            scene = random_scene(rng, image_id=f"bb{i}")
            base = normalize(extract_canvas(scene, params), "bbox")
            s, dx, dy = 2.0, 333.0, -41.0
            moved = PoseScene(
                image_id=scene.image_id, width=int(scene.width * s) + 500,
                height=int(scene.height * s) + 500,
                poses=tuple(
                    Pose(keypoints=tuple(
                        Keypoint(k.x * s + dx, k.y * s + dy, k.confidence) for k in p.keypoints
                    ))
                    for p in scene.poses
                ),
            )
            other = normalize(extract_canvas(moved, params), "bbox")
            for sa, sb in zip(base.sets, other.sets):
                for pa, pb in zip(sa.poselines, sb.poselines):
                    assert pb[0] == pytest.approx(pa[0], abs=1e-9)
                    assert pb[1] == pytest.approx(pa[1], abs=1e-9)

    def test_ar_norm_translation_invariant(self, rng):
        params = ExtractParams(poseline_fallback=True)
        for i in range(20):
            scene = random_scene(rng, image_id=f"ar{i}", width=3000, height=3000)
            base = normalize(extract_canvas(scene, params), "ar")
            dx, dy = 101.0, 77.0
            moved = PoseScene(
                image_id=scene.image_id, width=scene.width, height=scene.height,
                poses=tuple(
                    Pose(keypoints=tuple(
                        Keypoint(k.x + dx, k.y + dy, k.confidence) for k in p.keypoints
                    ))
                    for p in scene.poses
                ),
            )
            other = normalize(extract_canvas(moved, params), "ar")
            assert len(base.sets) == len(other.sets)
            for sa, sb in zip(base.sets, other.sets):
                for pa, pb in zip(sa.poselines, sb.poselines):
                    assert pb[0] == pytest.approx(pa[0], abs=1e-6)
                    assert pb[1] == pytest.approx(pa[1], abs=1e-6)

    def test_set_cardinality_contract(self, rng):
        params = ExtractParams(poseline_fallback=True)
        for i in range(10):
            scene = random_scene(rng, image_id=f"card{i}")
            canvas = extract_canvas(scene, params)
            for mode in ("none", "image", "bbox"):
                assert len(normalize(canvas, mode).sets) == 1
            ar = normalize(canvas, "ar")
            assert len(ar.sets) == max(len(canvas.regions), 1)
