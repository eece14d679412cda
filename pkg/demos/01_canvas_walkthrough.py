"""Walk through canvas extraction on a tiny two-figure scene.

Builds a scene of two figures facing each other, extracts the full
composition canvas, prints every element, and writes an SVG overlay
next to this script.
"""

from pathlib import Path

from compcanvas import ExtractParams, OverlayOptions, PoseScene, extract_canvas, render_overlay
from compcanvas.synthetic import FigurePlacement, figure_keypoints
from compcanvas.pose import Keypoint, Pose


def figure(placement):
    return Pose(keypoints=tuple(Keypoint(x, y, 0.9) for x, y in figure_keypoints(placement)))


scene = PoseScene(
    image_id="walkthrough",
    width=1000,
    height=1000,
    poses=(
        figure(FigurePlacement(cx=330, top_y=280, height=420, facing=1.0)),
        figure(FigurePlacement(cx=670, top_y=300, height=400, facing=-1.0)),
    ),
)

params = ExtractParams(poseline_fallback=True)
canvas = extract_canvas(scene, params)

print(f"scene {scene.image_id}: {len(scene.poses)} poses")
for line in canvas.poselines:
    kind = "fallback" if line.is_fallback else "regular"
    print(f"  poseline[{line.pose_index}] {kind}: top={line.top} bottom={line.bottom}")
for ray in canvas.rays:
    print(f"  body direction[{ray.pose_index}]: origin={ray.origin} dir=({ray.direction[0]:.3f},{ray.direction[1]:.3f})")
for cone in canvas.cones:
    print(f"  cone[{cone.pose_index}]: {len(cone.vertices)} vertices, length {cone.length:.0f}px")
for i, region in enumerate(canvas.regions):
    print(f"  action region {i}: center=({region.center[0]:.0f},{region.center[1]:.0f}) "
          f"poses={sorted(region.contributing_poses)}")
for line in canvas.action_lines:
    print(f"  action line {line.region_index}: {line.p1} -> {line.p2}")

out = Path(__file__).with_suffix(".svg")
out.write_text(render_overlay(canvas, OverlayOptions(), scene=scene))
print(f"overlay written to {out}")
