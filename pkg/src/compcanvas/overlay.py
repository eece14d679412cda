"""SVG overlays for canvases and query-target match explanations.

Color conventions: poselines green, view cones magenta with translucent
fill, action regions translucent cyan, action centers solid cyan circles,
action lines yellow. Fallback poselines are dashed. Output is plain SVG
text with one ``<g>`` per element class so viewers can toggle layers.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .canvas import CompositionCanvas
from .pose import SKELETON_LIMBS, PoseScene
from .similarity import SimilarityRecord

COLOR_POSELINE = "#00a000"
COLOR_CONE = "#ff00ff"
COLOR_ACTION_LINE = "#ffd700"
COLOR_ACTION_CENTER = "#00ffff"
COLOR_SKELETON = "#ff6600"
COLOR_CONNECTOR = "#3070ff"
COLOR_CONNECTOR_BEST = "#ff2020"

CENTER_RADIUS = 8.0


@dataclass(frozen=True, slots=True)
class OverlayOptions:
    poselines: bool = True
    cones: bool = True
    regions: bool = True
    centers: bool = True
    lines: bool = True
    latp_skeletons: bool = False
    stroke_width: float = 3.0
    opacity: float = 0.35
    image_href: str | None = None  # background artwork, referenced not embedded

    def __post_init__(self) -> None:
        if not any(
            (self.poselines, self.cones, self.regions, self.centers, self.lines, self.latp_skeletons)
        ):
            raise ValueError("at least one element class must be enabled")


def _fmt(value: float) -> str:
    return f"{value:.3f}".rstrip("0").rstrip(".")


def _points_attr(points) -> str:
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)


def _svg_root(width: float, height: float) -> ET.Element:
    return ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "viewBox": f"0 0 {_fmt(width)} {_fmt(height)}",
            "width": _fmt(width),
            "height": _fmt(height),
        },
    )


def _canvas_group(canvas: CompositionCanvas, options: OverlayOptions, scene: PoseScene | None) -> ET.Element:
    group = ET.Element("g", {"class": "canvas-overlay", "data-image-id": canvas.image_id})
    sw = _fmt(options.stroke_width)
    if options.image_href:
        ET.SubElement(
            group,
            "image",
            {"href": options.image_href, "x": "0", "y": "0",
             "width": _fmt(canvas.width), "height": _fmt(canvas.height)},
        )
    if options.latp_skeletons and scene is not None:
        skel = ET.SubElement(group, "g", {"class": "skeletons", "stroke": COLOR_SKELETON,
                                          "stroke-width": _fmt(options.stroke_width * 0.6),
                                          "fill": "none"})
        threshold = canvas.params.conf_threshold
        for pose in scene.poses:
            for a, b in SKELETON_LIMBS:
                ka, kb = pose.keypoints[a], pose.keypoints[b]
                if ka.is_valid(threshold) and kb.is_valid(threshold):
                    ET.SubElement(skel, "line", {
                        "x1": _fmt(ka.x), "y1": _fmt(ka.y), "x2": _fmt(kb.x), "y2": _fmt(kb.y),
                    })
    if options.poselines:
        g = ET.SubElement(group, "g", {"class": "poselines", "stroke": COLOR_POSELINE,
                                       "stroke-width": sw, "fill": "none"})
        for line in sorted(canvas.poselines, key=lambda p: p.pose_index):
            attrs = {
                "class": "poseline",
                "x1": _fmt(line.top[0]), "y1": _fmt(line.top[1]),
                "x2": _fmt(line.bottom[0]), "y2": _fmt(line.bottom[1]),
                "data-pose-index": str(line.pose_index),
            }
            if line.is_fallback:
                attrs["stroke-dasharray"] = "8 6"
            ET.SubElement(g, "line", attrs)
    if options.cones:
        g = ET.SubElement(group, "g", {"class": "cones", "stroke": COLOR_CONE,
                                       "stroke-width": sw, "fill": COLOR_CONE,
                                       "fill-opacity": _fmt(options.opacity * 0.5)})
        for cone in canvas.cones:
            ET.SubElement(g, "polygon", {
                "class": "cone",
                "points": _points_attr(cone.vertices),
                "data-pose-index": str(cone.pose_index),
            })
    if options.regions:
        g = ET.SubElement(group, "g", {"class": "regions", "stroke": "none",
                                       "fill": COLOR_ACTION_CENTER,
                                       "fill-opacity": _fmt(options.opacity)})
        for idx, region in enumerate(canvas.regions):
            for poly in region.polygons:
                ET.SubElement(g, "polygon", {
                    "class": "region",
                    "points": _points_attr(poly),
                    "data-region-index": str(idx),
                })
    if options.centers:
        g = ET.SubElement(group, "g", {"class": "centers", "fill": COLOR_ACTION_CENTER})
        for idx, region in enumerate(canvas.regions):
            ET.SubElement(g, "circle", {
                "class": "center",
                "cx": _fmt(region.center[0]), "cy": _fmt(region.center[1]),
                "r": _fmt(CENTER_RADIUS),
                "data-region-index": str(idx),
            })
    if options.lines:
        g = ET.SubElement(group, "g", {"class": "action-lines", "stroke": COLOR_ACTION_LINE,
                                       "stroke-width": sw, "fill": "none"})
        for line in canvas.action_lines:
            ET.SubElement(g, "line", {
                "class": "action-line",
                "x1": _fmt(line.p1[0]), "y1": _fmt(line.p1[1]),
                "x2": _fmt(line.p2[0]), "y2": _fmt(line.p2[1]),
                "data-region-index": str(line.region_index),
            })
    return group


def render_overlay(
    canvas: CompositionCanvas,
    options: OverlayOptions | None = None,
    scene: PoseScene | None = None,
) -> str:
    """SVG document of one canvas's compositional elements.

    Deterministic: identical input yields byte-identical output. The scene
    is only needed for the skeleton layer.
    """
    options = options or OverlayOptions()
    root = _svg_root(canvas.width, canvas.height)
    root.append(_canvas_group(canvas, options, scene))
    return ET.tostring(root, encoding="unicode")


def render_match(
    canvas_q: CompositionCanvas,
    canvas_t: CompositionCanvas,
    record: SimilarityRecord,
    options: OverlayOptions | None = None,
    scene_q: PoseScene | None = None,
    scene_t: PoseScene | None = None,
    gap: float = 40.0,
) -> str:
    """Side-by-side panels with connectors between matched poselines.

    Each connector is labeled with its distance; the minimum-distance pair
    is highlighted. The record must have been produced from these two
    canvases.
    """
    if record.query_id != canvas_q.image_id or record.target_id != canvas_t.image_id:
        raise ValueError(
            f"record is for {record.query_id!r}->{record.target_id!r}, "
            f"not {canvas_q.image_id!r}->{canvas_t.image_id!r}"
        )
    for qi, ti in record.matched.pairs:
        if qi >= len(canvas_q.poselines) or ti >= len(canvas_t.poselines):
            raise ValueError("matched poseline index out of range for these canvases")
    options = options or OverlayOptions()
    width = canvas_q.width + gap + canvas_t.width
    height = max(canvas_q.height, canvas_t.height)
    root = _svg_root(width, height)

    panel_q = ET.SubElement(root, "g", {"class": "panel panel-query"})
    panel_q.append(_canvas_group(canvas_q, options, scene_q))
    panel_t = ET.SubElement(
        root, "g", {"class": "panel panel-target",
                    "transform": f"translate({_fmt(canvas_q.width + gap)} 0)"}
    )
    panel_t.append(_canvas_group(canvas_t, options, scene_t))

    connectors = ET.SubElement(root, "g", {"class": "connectors",
                                           "stroke-width": _fmt(options.stroke_width * 0.6)})
    best = min(range(len(record.matched.distances)), key=record.matched.distances.__getitem__, default=None) \
        if record.matched.distances else None
    offset_x = canvas_q.width + gap
    for n, ((qi, ti), dist) in enumerate(zip(record.matched.pairs, record.matched.distances)):
        pq = canvas_q.poselines[qi]
        pt = canvas_t.poselines[ti]
        mq = ((pq.top[0] + pq.bottom[0]) / 2.0, (pq.top[1] + pq.bottom[1]) / 2.0)
        mt = ((pt.top[0] + pt.bottom[0]) / 2.0 + offset_x, (pt.top[1] + pt.bottom[1]) / 2.0)
        color = COLOR_CONNECTOR_BEST if n == best else COLOR_CONNECTOR
        conn = ET.SubElement(connectors, "g", {"class": "connector" + (" connector-best" if n == best else "")})
        ET.SubElement(conn, "line", {
            "x1": _fmt(mq[0]), "y1": _fmt(mq[1]), "x2": _fmt(mt[0]), "y2": _fmt(mt[1]),
            "stroke": color, "stroke-dasharray": "4 4",
        })
        label = ET.SubElement(conn, "text", {
            "x": _fmt((mq[0] + mt[0]) / 2.0), "y": _fmt((mq[1] + mt[1]) / 2.0 - 6.0),
            "fill": color, "font-size": "20", "text-anchor": "middle",
        })
        label.text = f"{dist:.1f}"
    return ET.tostring(root, encoding="unicode")
