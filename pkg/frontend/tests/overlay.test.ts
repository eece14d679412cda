import { describe, expect, test } from "vitest";

import { applyOverlayToggles, hiddenClasses } from "../src/overlay.js";
import { defaultToggles } from "../src/state.js";

const SAMPLE_SVG = `
<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 100 100">
  <g class="canvas-overlay">
    <g class="poselines"><line class="poseline" x1="1" y1="1" x2="2" y2="2"/></g>
    <g class="cones"><polygon class="cone" points="0,0 1,0 1,1"/></g>
    <g class="regions"><polygon class="region" points="0,0 1,0 1,1"/></g>
    <g class="centers"><circle class="center" cx="5" cy="5" r="2"/></g>
    <g class="action-lines"><line class="action-line" x1="0" y1="5" x2="9" y2="5"/></g>
  </g>
</svg>`;

function host(): HTMLElement {
  const div = document.createElement("div");
  div.innerHTML = SAMPLE_SVG;
  return div;
}

describe("overlay layer toggles", () => {
  test("toggling one class hides exactly that group", () => {
    const container = host();
    const toggles = { ...defaultToggles(), cones: false };
    applyOverlayToggles(container, toggles);
    expect(hiddenClasses(container)).toEqual(["cones"]);
    const cones = container.querySelector("g.cones") as SVGGElement;
    expect(cones.style.display).toBe("none");
    for (const cls of ["poselines", "regions", "centers", "action-lines"]) {
      expect((container.querySelector(`g.${cls}`) as SVGGElement).style.display).not.toBe("none");
    }
  });

  test("element contents are untouched by toggling", () => {
    const container = host();
    const before = container.querySelector("g.cones")!.innerHTML;
    applyOverlayToggles(container, { ...defaultToggles(), cones: false });
    expect(container.querySelector("g.cones")!.innerHTML).toBe(before);
    expect(container.querySelectorAll(".cone")).toHaveLength(1);
    expect(container.querySelectorAll(".poseline")).toHaveLength(1);
  });

  test("re-enabling restores visibility", () => {
    const container = host();
    applyOverlayToggles(container, { ...defaultToggles(), lines: false });
    expect(hiddenClasses(container)).toEqual(["action-lines"]);
    applyOverlayToggles(container, defaultToggles());
    expect(hiddenClasses(container)).toEqual([]);
  });

  test("unknown toggle names are ignored", () => {
    const container = host();
    applyOverlayToggles(container, { sparkles: false } as never);
    expect(hiddenClasses(container)).toEqual([]);
  });
});
