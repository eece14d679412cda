import numpy as np
import pytest

from compcanvas.canvas import ExtractParams
from compcanvas.pose import Keypoint, Pose, PoseScene


def make_pose(points, confidence=0.9, invalid=()):
    """Pose from 18 (x, y) pairs; indices in `invalid` get zero confidence."""
    assert len(points) == 18
    return Pose(
        keypoints=tuple(
            Keypoint(float(x), float(y), 0.0 if i in invalid else confidence)
            for i, (x, y) in enumerate(points)
        )
    )


def standing_points(cx=500.0, top=200.0, h=400.0, face=1.0):
    """Plausible standing-figure keypoint layout (COCO-18 order)."""
    offs = [
        (0.12 * face, 0.0),        # nose
        (0.0, 0.15),               # neck
        (-0.11, 0.16), (-0.13, 0.33), (-0.14, 0.48),   # right arm
        (0.11, 0.16), (0.13, 0.33), (0.14, 0.48),      # left arm
        (-0.07, 0.53), (-0.08, 0.75), (-0.08, 0.97),   # right leg
        (0.07, 0.53), (0.08, 0.75), (0.08, 0.97),      # left leg
        (0.10 * face - 0.03, -0.03), (0.10 * face + 0.03, -0.03),  # eyes
        (0.08 * face - 0.05, -0.01), (0.08 * face + 0.05, -0.01),  # ears
    ]
    return [(cx + ox * h, top + oy * h) for ox, oy in offs]


def random_scene(rng, n_poses=None, image_id="scene", width=1000, height=1000):
    """Random multi-figure scene with plausible anatomy."""
    n = n_poses if n_poses is not None else int(rng.integers(1, 5))
    poses = []
    for _ in range(n):
        cx = float(rng.uniform(150, width - 150))
        top = float(rng.uniform(80, height * 0.5))
        h = float(rng.uniform(150, 450))
        face = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.4, 1.0))
        pts = standing_points(cx, top, h, face)
        jitter = rng.normal(0, 4.0, size=(18, 2))
        poses.append(make_pose([(x + dx, y + dy) for (x, y), (dx, dy) in zip(pts, jitter)]))
    return PoseScene(image_id=image_id, width=width, height=height, poses=tuple(poses))


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def baseline_params():
    return ExtractParams()


@pytest.fixture
def fallback_params():
    return ExtractParams(poseline_fallback=True)
