"""Poseline normalization for cross-image comparison.

Four modes:

* ``none`` passes raw pixel coordinates through;
* ``image`` min-max normalizes by the stated image width/height;
* ``bbox`` min-max normalizes by the bounding box of all valid keypoints;
* ``ar`` subtracts each action-region center, producing one poseline set
  per region (pixel units preserved).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .canvas import CompositionCanvas
from .geometry import Point


class NormMode(str, Enum):
    NONE = "none"
    IMAGE = "image"
    BBOX = "bbox"
    ACTION_REGION = "ar"


class DegenerateBboxError(ValueError):
    """Keypoint bounding box has zero width or height."""


@dataclass(frozen=True, slots=True)
class PoselineSet:
    """Normalized (top, bottom) segments; frame_tag is the subtracted
    action center when the mode uses one."""

    poselines: tuple[tuple[Point, Point], ...]
    frame_tag: Point | None = None


@dataclass(frozen=True, slots=True)
class NormalizedCanvas:
    image_id: str
    sets: tuple[PoselineSet, ...]
    mode: NormMode


def _segments(canvas: CompositionCanvas) -> list[tuple[Point, Point]]:
    return [(p.top, p.bottom) for p in canvas.poselines]


def normalize(canvas: CompositionCanvas, mode: NormMode | str) -> NormalizedCanvas:
    """Normalized poseline sets of a canvas under the given mode.

    Raises DegenerateBboxError when bbox mode meets a zero-extent keypoint
    box, and ValueError for nonpositive image dimensions in image mode.
    """
    mode = NormMode(mode)
    segs = _segments(canvas)

    if mode is NormMode.NONE:
        sets = (PoselineSet(poselines=tuple(segs)),)
    elif mode is NormMode.IMAGE:
        if canvas.width <= 0 or canvas.height <= 0:
            raise ValueError(f"{canvas.image_id}: image dimensions must be positive")
        w, h = float(canvas.width), float(canvas.height)
        sets = (
            PoselineSet(
                poselines=tuple(
                    ((t[0] / w, t[1] / h), (b[0] / w, b[1] / h)) for t, b in segs
                )
            ),
        )
    elif mode is NormMode.BBOX:
        if not segs:
            sets = (PoselineSet(poselines=()),)
        else:
            if canvas.kp_bounds is None:
                raise DegenerateBboxError(f"{canvas.image_id}: no valid keypoints for bbox")
            bx, by, mx, my = canvas.kp_bounds
            bw, bh = mx - bx, my - by
            if bw == 0.0 or bh == 0.0:
                raise DegenerateBboxError(
                    f"{canvas.image_id}: keypoint bbox degenerate ({bw} x {bh})"
                )
            sets = (
                PoselineSet(
                    poselines=tuple(
                        (((t[0] - bx) / bw, (t[1] - by) / bh), ((b[0] - bx) / bw, (b[1] - by) / bh))
                        for t, b in segs
                    )
                ),
            )
    else:  # action region
        centers = [r.center for r in canvas.regions]
        if not centers:
            # No interaction detected: fall back to one set centered on the
            # mean poseline midpoint so single-figure images stay queryable.
            if segs:
                mx = sum((t[0] + b[0]) / 2.0 for t, b in segs) / len(segs)
                my = sum((t[1] + b[1]) / 2.0 for t, b in segs) / len(segs)
                centers = [(mx, my)]
            else:
                return NormalizedCanvas(
                    image_id=canvas.image_id, sets=(PoselineSet(poselines=()),), mode=mode
                )
        sets = tuple(
            PoselineSet(
                poselines=tuple(
                    ((t[0] - c[0], t[1] - c[1]), (b[0] - c[0], b[1] - c[1])) for t, b in segs
                ),
                frame_tag=c,
            )
            for c in centers
        )

    return NormalizedCanvas(image_id=canvas.image_id, sets=sets, mode=mode)
