/** Layer visibility on rendered overlay SVGs.
 *
 * The service draws each element family inside one <g> with a stable
 * class; toggling a layer only flips that group's display property, so
 * every other element is untouched and nothing is re-fetched.
 */

import { ELEMENT_SVG_CLASS, type OverlayToggles } from "./types.js";

export function applyOverlayToggles(container: Element, toggles: OverlayToggles): void {
  for (const [name, svgClass] of Object.entries(ELEMENT_SVG_CLASS)) {
    const on = toggles[name];
    if (on === undefined) continue;
    for (const group of Array.from(container.querySelectorAll(`g.${svgClass}`))) {
      (group as SVGGElement).style.display = on ? "" : "none";
    }
  }
}

/** Element-family classes currently hidden inside a container. */
export function hiddenClasses(container: Element): string[] {
  const hidden: string[] = [];
  for (const svgClass of Object.values(ELEMENT_SVG_CLASS)) {
    const groups = Array.from(container.querySelectorAll(`g.${svgClass}`));
    if (groups.length && groups.every((g) => (g as SVGGElement).style.display === "none")) {
      hidden.push(svgClass);
    }
  }
  return hidden;
}
