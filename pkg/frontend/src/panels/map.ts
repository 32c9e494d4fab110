// Map panel: one dot per merged event position, sized by event count.
// The dot holding a selected event renders red.

import { MapDot } from "../types.js";
import { newSvg, svgElement } from "./svg.js";

const WIDTH = 720;
const HEIGHT = 360;

function projectX(lon: number): number {
  return ((lon + 180) / 360) * WIDTH;
}

function projectY(lat: number): number {
  return ((90 - lat) / 180) * HEIGHT;
}

export function renderMap(container: HTMLElement, dots: MapDot[]): SVGSVGElement {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const svg = newSvg(doc, WIDTH, HEIGHT);
  svg.setAttribute("class", "map");
  svg.appendChild(
    svgElement(doc, "rect", { x: 0, y: 0, width: WIDTH, height: HEIGHT, class: "map-sea" }),
  );
  const maxCount = Math.max(1, ...dots.map((d) => d.event_count));
  for (const dot of dots) {
    const r = 3 + 9 * Math.sqrt(dot.event_count / maxCount);
    const el = svgElement(doc, "circle", {
      cx: projectX(dot.position[0]).toFixed(1),
      cy: projectY(dot.position[1]).toFixed(1),
      r: r.toFixed(1),
      class: dot.contains_selected ? "dot selected" : "dot",
      "data-count": dot.event_count,
    });
    const title = svgElement(doc, "title");
    title.textContent = `${dot.event_count} events`;
    el.appendChild(title);
    svg.appendChild(el);
  }
  container.appendChild(svg);
  return svg;
}
