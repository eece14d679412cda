"""Composition-canvas extraction.

Turns the poses of a scene into abstract compositional elements:

* poselines: one segment per figure from head region to lower body, with a
  fallback extension of the neck-nose segment when the lower body is missing;
* bisection rays: approximate body orientation per figure, the interior
  bisector at the neck of the nose and mid-hip directions, rotated toward
  the nose by a fixed correction angle;
* view cones: convex triangles/trapezoids along each ray, sized by the
  figure's neck-nose length so small characters get small cones;
* action regions: merged pairwise cone intersections, one centroid each;
* action lines: one image-spanning line per region along the mean direction
  of the contributing rays.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, asdict

from .geometry import (
    Point,
    Polygon,
    clip_convex,
    clip_line_to_rect,
    cross,
    dot,
    ensure_ccw,
    fold_axial,
    mean_direction,
    perp,
    polygon_area,
    polygon_centroid,
    rotate,
    unit,
    vadd,
    vscale,
    vsub,
)
from .pose import DEFAULT_CONF_THRESHOLD, DerivedJoints, PoseScene, derive_joints

CANVAS_VERSION = 1

# Intersection pieces below this area (px^2) are treated as empty.
AREA_EPSILON = 1e-6

# Bisector is considered degenerate when |u + v| falls below this.
_DEGENERATE_BISECTOR_EPS = 1e-9


@dataclass(frozen=True, slots=True)
class ExtractParams:
    """Hyperparameters of the canvas extraction.

    Angles in degrees. The defaults are the untuned baseline settings:
    correction 20, cone opening 80, cone scale 10, cone base scale 0,
    fallbacks off.
    """

    correction_deg: float = 20.0
    cone_opening_deg: float = 80.0
    cone_scale: float = 10.0
    cone_base_scale: float = 0.0
    poseline_fallback: bool = False
    bisection_fallback: bool = False
    fallback_multiplier: float = 3.0
    conf_threshold: float = DEFAULT_CONF_THRESHOLD

    def __post_init__(self) -> None:
        if not (0.0 <= self.cone_opening_deg < 180.0):
            raise ValueError("cone_opening_deg must be in [0, 180)")
        if self.cone_scale <= 0.0:
            raise ValueError("cone_scale must be positive")
        if self.cone_base_scale < 0.0:
            raise ValueError("cone_base_scale must be nonnegative")
        if self.fallback_multiplier <= 0.0:
            raise ValueError("fallback_multiplier must be positive")

    def fingerprint(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True, slots=True)
class Poseline:
    top: Point
    bottom: Point
    is_fallback: bool
    pose_index: int


@dataclass(frozen=True, slots=True)
class BisectionRay:
    origin: Point
    direction: Point  # unit vector
    pose_index: int


@dataclass(frozen=True, slots=True)
class ConePolygon:
    vertices: tuple[Point, ...]  # 3 or 4, counter-clockwise
    pose_index: int
    axis: BisectionRay
    length: float


@dataclass(frozen=True, slots=True)
class ActionRegion:
    polygons: tuple[tuple[Point, ...], ...]
    center: Point
    contributing_poses: frozenset[int]


@dataclass(frozen=True, slots=True)
class ActionLine:
    p1: Point
    p2: Point
    region_index: int
    degenerate_direction: bool = False


@dataclass(frozen=True, slots=True)
class CompositionCanvas:
    image_id: str
    width: int
    height: int
    poselines: tuple[Poseline, ...]
    rays: tuple[BisectionRay, ...]
    cones: tuple[ConePolygon, ...]
    regions: tuple[ActionRegion, ...]
    action_lines: tuple[ActionLine, ...]
    params: ExtractParams
    # Bounding box (min_x, min_y, max_x, max_y) of all valid keypoints;
    # None when the scene has none. Retained so bbox normalization does not
    # need the source scene.
    kp_bounds: tuple[float, float, float, float] | None = None


def make_poseline(joints: DerivedJoints, params: ExtractParams, pose_index: int = 0) -> Poseline | None:
    """Body-axis segment for one figure.

    Regular construction: head anchor (nose, else neck) down to the ankle
    midpoint. When the lower body is missing and the fallback is enabled,
    extend the neck-nose segment downward by `fallback_multiplier` times
    its length instead. Returns None when neither construction applies.
    """
    top = joints.nose if joints.nose is not None else joints.neck
    if top is not None and joints.ankle_mid is not None:
        if top == joints.ankle_mid:
            return None
        return Poseline(top=top, bottom=joints.ankle_mid, is_fallback=False, pose_index=pose_index)
    if params.poseline_fallback and joints.nose is not None and joints.neck is not None:
        down = vsub(joints.neck, joints.nose)
        bottom = vadd(joints.neck, vscale(down, params.fallback_multiplier))
        if joints.nose == bottom:
            return None
        return Poseline(top=joints.nose, bottom=bottom, is_fallback=True, pose_index=pose_index)
    return None


def make_bisection_ray(
    joints: DerivedJoints, params: ExtractParams, pose_index: int = 0
) -> BisectionRay | None:
    """Approximate body orientation: bisector of nose/mid-hip at the neck.

    The raw bisector points slightly below the true body direction, so it
    is rotated by the correction angle toward the nose. A straight body
    (nose opposite mid-hip) has no bisector; with the bisection fallback
    enabled, the perpendicular to the hip direction on the nose's side is
    used instead (correction angle not applied there).
    """
    if joints.nose is None or joints.neck is None or joints.mid_hip is None:
        return None
    if joints.nose == joints.neck or joints.mid_hip == joints.neck:
        return None
    u = unit(vsub(joints.nose, joints.neck))
    v = unit(vsub(joints.mid_hip, joints.neck))
    s = vadd(u, v)
    if math.hypot(s[0], s[1]) < _DEGENERATE_BISECTOR_EPS:
        if not params.bisection_fallback:
            return None
        side = joints.nose[0] - joints.neck[0]
        cand = perp(v)
        if (side > 0.0 and cand[0] < 0.0) or (side < 0.0 and cand[0] > 0.0):
            cand = (-cand[0], -cand[1])
        elif side == 0.0 and cand[0] < 0.0:
            cand = (-cand[0], -cand[1])
        return BisectionRay(origin=joints.neck, direction=unit(cand), pose_index=pose_index)
    raw = unit(s)
    angle = math.radians(params.correction_deg)
    if cross(raw, u) < 0.0:
        angle = -angle
    direction = rotate(raw, angle)
    return BisectionRay(origin=joints.neck, direction=direction, pose_index=pose_index)


def build_cone(ray: BisectionRay, neck_nose_len: float, params: ExtractParams) -> ConePolygon:
    """Truncated view cone along a ray, sized by the figure's head length.

    Length = cone_scale * neck_nose_len; the near edge half-width is
    cone_base_scale * neck_nose_len (zero collapses it to an apex) and the
    far edge widens by tan(opening/2) per unit length. Vertices are
    counter-clockwise.
    """
    if neck_nose_len <= 0.0:
        raise ValueError("neck_nose_len must be positive")
    length = params.cone_scale * neck_nose_len
    w0 = params.cone_base_scale * neck_nose_len
    w1 = w0 + length * math.tan(math.radians(params.cone_opening_deg) / 2.0)
    d = ray.direction
    n = perp(d)
    far = vadd(ray.origin, vscale(d, length))
    far_minus = vsub(far, vscale(n, w1))
    far_plus = vadd(far, vscale(n, w1))
    if w0 == 0.0:
        vertices = (ray.origin, far_minus, far_plus)
    else:
        near_minus = vsub(ray.origin, vscale(n, w0))
        near_plus = vadd(ray.origin, vscale(n, w0))
        vertices = (near_minus, far_minus, far_plus, near_plus)
    return ConePolygon(
        vertices=tuple(ensure_ccw(list(vertices))),
        pose_index=ray.pose_index,
        axis=ray,
        length=length,
    )


def intersect_cones(cones: list[ConePolygon] | tuple[ConePolygon, ...]) -> list[ActionRegion]:
    """Action regions from pairwise cone intersections.

    Every unordered pair of cones from distinct poses is clipped; pieces
    below AREA_EPSILON are dropped. Pieces whose polygons mutually overlap
    with positive area are merged transitively into one region whose center
    is the area-weighted centroid of its pieces.
    """
    pieces: list[tuple[Polygon, int, int]] = []
    for i in range(len(cones)):
        for j in range(i + 1, len(cones)):
            if cones[i].pose_index == cones[j].pose_index:
                continue
            piece = clip_convex(list(cones[i].vertices), list(cones[j].vertices))
            if len(piece) >= 3 and polygon_area(piece) >= AREA_EPSILON:
                pieces.append((piece, cones[i].pose_index, cones[j].pose_index))
    if not pieces:
        return []

    # Union-find over pieces; overlap = positive-area mutual intersection.
    parent = list(range(len(pieces)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in range(len(pieces)):
        for b in range(a + 1, len(pieces)):
            overlap = clip_convex(pieces[a][0], pieces[b][0])
            if len(overlap) >= 3 and polygon_area(overlap) >= AREA_EPSILON:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[rb] = ra

    groups: dict[int, list[int]] = {}
    for idx in range(len(pieces)):
        groups.setdefault(find(idx), []).append(idx)

    regions = []
    for root in sorted(groups):
        members = groups[root]
        polys = tuple(tuple(pieces[m][0]) for m in members)
        total = 0.0
        cx = cy = 0.0
        contributors: set[int] = set()
        for m in members:
            poly, pi, pj = pieces[m]
            a = polygon_area(poly)
            c = polygon_centroid(poly)
            total += a
            cx += a * c[0]
            cy += a * c[1]
            contributors.update((pi, pj))
        regions.append(
            ActionRegion(
                polygons=polys,
                center=(cx / total, cy / total),
                contributing_poses=frozenset(contributors),
            )
        )
    return regions


def make_action_lines(
    regions: list[ActionRegion] | tuple[ActionRegion, ...],
    rays: list[BisectionRay] | tuple[BisectionRay, ...],
    width: float,
    height: float,
) -> list[ActionLine]:
    """One line per region through its center, along the mean contributing
    ray direction (folded to an undirected axis), clipped to the image.

    Cancelling directions fall back to a horizontal line, flagged on the
    result.
    """
    by_pose = {ray.pose_index: ray for ray in rays}
    lines = []
    for idx, region in enumerate(regions):
        dirs = [
            by_pose[p].direction for p in sorted(region.contributing_poses) if p in by_pose
        ]
        mean = mean_direction(dirs) if dirs else None
        degenerate = mean is None
        direction = fold_axial(mean) if mean is not None else (1.0, 0.0)
        seg = clip_line_to_rect(region.center, direction, width, height)
        if seg is None:
            continue
        lines.append(
            ActionLine(p1=seg[0], p2=seg[1], region_index=idx, degenerate_direction=degenerate)
        )
    return lines


def _keypoint_bounds(scene: PoseScene, conf_threshold: float) -> tuple[float, float, float, float] | None:
    xs: list[float] = []
    ys: list[float] = []
    for pose in scene.poses:
        for p in pose.valid_points(conf_threshold):
            xs.append(p[0])
            ys.append(p[1])
    if not xs:
        return None
    return (min(xs), min(ys), max(xs), max(ys))


def extract_canvas(scene: PoseScene, params: ExtractParams) -> CompositionCanvas:
    """Full canvas of a scene: poselines, rays, cones, regions, lines.

    Deterministic; figures whose constructions all fail simply contribute
    nothing.
    """
    poselines = []
    rays = []
    cones = []
    for idx, pose in enumerate(scene.poses):
        joints = derive_joints(pose, params.conf_threshold)
        line = make_poseline(joints, params, pose_index=idx)
        if line is not None:
            poselines.append(line)
        ray = make_bisection_ray(joints, params, pose_index=idx)
        if ray is not None and joints.neck_nose_len and joints.neck_nose_len > 0.0:
            cones.append(build_cone(ray, joints.neck_nose_len, params))
        if ray is not None:
            rays.append(ray)
    regions = intersect_cones(cones)
    action_lines = make_action_lines(regions, rays, float(scene.width), float(scene.height))
    return CompositionCanvas(
        image_id=scene.image_id,
        width=scene.width,
        height=scene.height,
        poselines=tuple(poselines),
        rays=tuple(rays),
        cones=tuple(cones),
        regions=tuple(regions),
        action_lines=tuple(action_lines),
        params=params,
        kp_bounds=_keypoint_bounds(scene, params.conf_threshold),
    )


def canvas_to_dict(canvas: CompositionCanvas) -> dict:
    """JSON-ready representation, version-tagged."""
    return {
        "canvas_version": CANVAS_VERSION,
        "image_id": canvas.image_id,
        "width": canvas.width,
        "height": canvas.height,
        "poselines": [
            {
                "top": list(p.top),
                "bottom": list(p.bottom),
                "is_fallback": p.is_fallback,
                "pose_index": p.pose_index,
            }
            for p in canvas.poselines
        ],
        "rays": [
            {"origin": list(r.origin), "direction": list(r.direction), "pose_index": r.pose_index}
            for r in canvas.rays
        ],
        "cones": [
            {
                "vertices": [list(v) for v in c.vertices],
                "pose_index": c.pose_index,
                "axis": {
                    "origin": list(c.axis.origin),
                    "direction": list(c.axis.direction),
                    "pose_index": c.axis.pose_index,
                },
                "length": c.length,
            }
            for c in canvas.cones
        ],
        "regions": [
            {
                "polygons": [[list(v) for v in poly] for poly in r.polygons],
                "center": list(r.center),
                "contributing_poses": sorted(r.contributing_poses),
            }
            for r in canvas.regions
        ],
        "action_lines": [
            {
                "p1": list(ln.p1),
                "p2": list(ln.p2),
                "region_index": ln.region_index,
                "degenerate_direction": ln.degenerate_direction,
            }
            for ln in canvas.action_lines
        ],
        "params": asdict(canvas.params),
        "kp_bounds": list(canvas.kp_bounds) if canvas.kp_bounds is not None else None,
    }


def canvas_from_dict(data: dict) -> CompositionCanvas:
    version = data.get("canvas_version")
    if version != CANVAS_VERSION:
        raise ValueError(f"unsupported canvas_version {version!r}")

    def pt(v) -> Point:
        return (float(v[0]), float(v[1]))

    poselines = tuple(
        Poseline(pt(p["top"]), pt(p["bottom"]), bool(p["is_fallback"]), int(p["pose_index"]))
        for p in data["poselines"]
    )
    rays = tuple(
        BisectionRay(pt(r["origin"]), pt(r["direction"]), int(r["pose_index"]))
        for r in data["rays"]
    )
    cones = tuple(
        ConePolygon(
            vertices=tuple(pt(v) for v in c["vertices"]),
            pose_index=int(c["pose_index"]),
            axis=BisectionRay(
                pt(c["axis"]["origin"]), pt(c["axis"]["direction"]), int(c["axis"]["pose_index"])
            ),
            length=float(c["length"]),
        )
        for c in data["cones"]
    )
    regions = tuple(
        ActionRegion(
            polygons=tuple(tuple(pt(v) for v in poly) for poly in r["polygons"]),
            center=pt(r["center"]),
            contributing_poses=frozenset(int(p) for p in r["contributing_poses"]),
        )
        for r in data["regions"]
    )
    action_lines = tuple(
        ActionLine(
            pt(ln["p1"]), pt(ln["p2"]), int(ln["region_index"]), bool(ln["degenerate_direction"])
        )
        for ln in data["action_lines"]
    )
    bounds = data.get("kp_bounds")
    return CompositionCanvas(
        image_id=data["image_id"],
        width=int(data["width"]),
        height=int(data["height"]),
        poselines=poselines,
        rays=rays,
        cones=cones,
        regions=regions,
        action_lines=action_lines,
        params=ExtractParams(**data["params"]),
        kp_bounds=tuple(float(v) for v in bounds) if bounds is not None else None,
    )
