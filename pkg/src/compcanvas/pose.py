"""Pose-keypoint ingestion: parsing, validation, derived anchor joints.

Keypoint files are UTF-8 JSON: a top-level array of image entries, each
``{"image_id": str, "width": int, "height": int, "class_label": str|null,
"poses": [{"keypoints": [[x, y, c] * 18]}]}``. Skeletons use the COCO-18
ordering (0 nose, 1 neck, 2 r-shoulder, 3 r-elbow, 4 r-wrist, 5 l-shoulder,
6 l-elbow, 7 l-wrist, 8 r-hip, 9 r-knee, 10 r-ankle, 11 l-hip, 12 l-knee,
13 l-ankle, 14 r-eye, 15 l-eye, 16 r-ear, 17 l-ear).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable

from .geometry import Point, vdist

NUM_KEYPOINTS = 18

NOSE, NECK = 0, 1
R_HIP, L_HIP = 8, 11
R_ANKLE, L_ANKLE = 10, 13

DEFAULT_CONF_THRESHOLD = 0.1

KEYPOINT_NAMES = (
    "nose", "neck",
    "r_shoulder", "r_elbow", "r_wrist",
    "l_shoulder", "l_elbow", "l_wrist",
    "r_hip", "r_knee", "r_ankle",
    "l_hip", "l_knee", "l_ankle",
    "r_eye", "l_eye", "r_ear", "l_ear",
)

# Limb pairs for skeleton rendering (COCO-18 indices).
SKELETON_LIMBS = (
    (NECK, 2), (2, 3), (3, 4),
    (NECK, 5), (5, 6), (6, 7),
    (NECK, R_HIP), (R_HIP, 9), (9, R_ANKLE),
    (NECK, L_HIP), (L_HIP, 12), (12, L_ANKLE),
    (NOSE, NECK), (NOSE, 14), (14, 16), (NOSE, 15), (15, 17),
)


class KeypointParseError(ValueError):
    """Malformed keypoint file syntax."""


class KeypointSchemaError(ValueError):
    """Structurally valid JSON that violates the keypoint schema."""


@dataclass(frozen=True, slots=True)
class Keypoint:
    x: float
    y: float
    confidence: float

    def is_valid(self, conf_threshold: float) -> bool:
        return self.confidence > conf_threshold

    @property
    def point(self) -> Point:
        return (self.x, self.y)


@dataclass(frozen=True, slots=True)
class Pose:
    """One detected figure: exactly 18 ordered keypoints."""

    keypoints: tuple[Keypoint, ...]

    def __post_init__(self) -> None:
        if len(self.keypoints) != NUM_KEYPOINTS:
            raise KeypointSchemaError(
                f"pose has {len(self.keypoints)} keypoints, expected {NUM_KEYPOINTS}"
            )

    def valid_points(self, conf_threshold: float) -> list[Point]:
        return [k.point for k in self.keypoints if k.is_valid(conf_threshold)]


@dataclass(frozen=True, slots=True)
class PoseScene:
    image_id: str
    width: int
    height: int
    poses: tuple[Pose, ...]
    class_label: str | None = None


@dataclass(frozen=True, slots=True)
class DerivedJoints:
    """Anatomical anchors computed from the valid keypoints of one pose.

    mid_hip / ankle_mid are midpoints of the valid left/right joints, or the
    single valid one. neck_nose_len is present iff both nose and neck are
    valid. single_hip / single_ankle record when an anchor came from only
    one side (kept for debugging, not used by the extraction itself).
    """

    nose: Point | None = None
    neck: Point | None = None
    mid_hip: Point | None = None
    ankle_mid: Point | None = None
    neck_nose_len: float | None = None
    single_hip: bool = False
    single_ankle: bool = False


def _pair_midpoint(
    pose: Pose, idx_a: int, idx_b: int, conf_threshold: float
) -> tuple[Point | None, bool]:
    a, b = pose.keypoints[idx_a], pose.keypoints[idx_b]
    a_ok, b_ok = a.is_valid(conf_threshold), b.is_valid(conf_threshold)
    if a_ok and b_ok:
        return ((a.x + b.x) / 2.0, (a.y + b.y) / 2.0), False
    if a_ok:
        return a.point, True
    if b_ok:
        return b.point, True
    return None, False


def derive_joints(pose: Pose, conf_threshold: float = DEFAULT_CONF_THRESHOLD) -> DerivedJoints:
    """Compute the (nose, neck, mid-hip, mid-ankle) anchors of a pose.

    Pure: only keypoints above the confidence threshold contribute, and
    raising the threshold can only remove anchors.
    """
    nose_kp = pose.keypoints[NOSE]
    neck_kp = pose.keypoints[NECK]
    nose = nose_kp.point if nose_kp.is_valid(conf_threshold) else None
    neck = neck_kp.point if neck_kp.is_valid(conf_threshold) else None
    mid_hip, single_hip = _pair_midpoint(pose, R_HIP, L_HIP, conf_threshold)
    ankle_mid, single_ankle = _pair_midpoint(pose, R_ANKLE, L_ANKLE, conf_threshold)
    neck_nose_len = vdist(nose, neck) if nose is not None and neck is not None else None
    return DerivedJoints(
        nose=nose,
        neck=neck,
        mid_hip=mid_hip,
        ankle_mid=ankle_mid,
        neck_nose_len=neck_nose_len,
        single_hip=single_hip,
        single_ankle=single_ankle,
    )


def parse_keypoint_file(data: bytes | str) -> list[PoseScene]:
    """Parse a keypoint file into scenes, preserving entry order.

    Raises KeypointParseError for malformed JSON (with line/column) and
    KeypointSchemaError for entries violating the schema (naming the
    offending image_id where known).
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise KeypointParseError(f"keypoint file is not UTF-8: {exc}") from exc
    else:
        text = data
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise KeypointParseError(
            f"malformed keypoint JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, list):
        raise KeypointSchemaError("top level must be an array of image entries")
    return [_parse_scene(entry, i) for i, entry in enumerate(raw)]


def _parse_scene(entry: object, index: int) -> PoseScene:
    if not isinstance(entry, dict):
        raise KeypointSchemaError(f"entry {index} is not an object")
    try:
        image_id = entry["image_id"]
        width = entry["width"]
        height = entry["height"]
        raw_poses = entry["poses"]
    except KeyError as exc:
        raise KeypointSchemaError(f"entry {index} missing field {exc}") from exc
    if not isinstance(image_id, str):
        raise KeypointSchemaError(f"entry {index}: image_id must be a string")
    if not isinstance(width, int) or not isinstance(height, int) or width <= 0 or height <= 0:
        raise KeypointSchemaError(f"{image_id}: width/height must be positive integers")
    class_label = entry.get("class_label")
    if class_label is not None and not isinstance(class_label, str):
        raise KeypointSchemaError(f"{image_id}: class_label must be a string or null")
    if not isinstance(raw_poses, list):
        raise KeypointSchemaError(f"{image_id}: poses must be an array")
    poses = tuple(_parse_pose(p, image_id) for p in raw_poses)
    return PoseScene(
        image_id=image_id, width=width, height=height, poses=poses, class_label=class_label
    )


def _parse_pose(raw: object, image_id: str) -> Pose:
    if not isinstance(raw, dict) or "keypoints" not in raw:
        raise KeypointSchemaError(f"{image_id}: pose entries need a 'keypoints' field")
    kps = raw["keypoints"]
    if not isinstance(kps, list) or len(kps) != NUM_KEYPOINTS:
        n = len(kps) if isinstance(kps, list) else "non-list"
        raise KeypointSchemaError(
            f"{image_id}: pose has {n} keypoints, expected {NUM_KEYPOINTS}"
        )
    parsed = []
    for j, triplet in enumerate(kps):
        if not isinstance(triplet, (list, tuple)) or len(triplet) != 3:
            raise KeypointSchemaError(f"{image_id}: keypoint {j} must be an [x, y, c] triplet")
        try:
            x, y, c = (float(v) for v in triplet)
        except (TypeError, ValueError) as exc:
            raise KeypointSchemaError(f"{image_id}: keypoint {j} is not numeric") from exc
        if not (math.isfinite(x) and math.isfinite(y)):
            raise KeypointSchemaError(f"{image_id}: keypoint {j} has non-finite coordinates")
        if not math.isfinite(c) or c < 0.0 or c > 1.0:
            raise KeypointSchemaError(f"{image_id}: keypoint {j} confidence outside [0, 1]")
        parsed.append(Keypoint(x, y, c))
    return Pose(keypoints=tuple(parsed))


def scene_to_dict(scene: PoseScene) -> dict:
    return {
        "image_id": scene.image_id,
        "width": scene.width,
        "height": scene.height,
        "class_label": scene.class_label,
        "poses": [
            {"keypoints": [[k.x, k.y, k.confidence] for k in pose.keypoints]}
            for pose in scene.poses
        ],
    }


def serialize_scenes(scenes: Iterable[PoseScene]) -> str:
    """Inverse of parse_keypoint_file: parse(serialize(x)) == x."""
    return json.dumps([scene_to_dict(s) for s in scenes], indent=1)


def scale_scene(scene: PoseScene, factor: float) -> PoseScene:
    """Uniformly scale all keypoints and the stated image dimensions."""
    poses = tuple(
        Pose(
            keypoints=tuple(
                Keypoint(k.x * factor, k.y * factor, k.confidence) for k in pose.keypoints
            )
        )
        for pose in scene.poses
    )
    return PoseScene(
        image_id=scene.image_id,
        width=max(1, round(scene.width * factor)),
        height=max(1, round(scene.height * factor)),
        poses=poses,
        class_label=scene.class_label,
    )


def rescale_to_longest_side(scene: PoseScene, target: int = 1000) -> PoseScene:
    """Rescale so the longer image side equals `target` pixels.

    Keeps pixel-space distance thresholds comparable across corpora of
    mixed resolutions.
    """
    longest = max(scene.width, scene.height)
    if longest == target:
        return scene
    return scale_scene(scene, target / longest)
