// Earth-view panel: hex columns on an orthographic globe. Column height is
// the station count; color is the bin's dominant country. Selecting a bin
// hands it back so the store can restrict the event list.

import { HexBin } from "../types.js";
import { colorForKey, newSvg, svgElement } from "./svg.js";

export interface GlobeView {
  lon0: number;
  lat0: number;
}

const R = 170;
const CX = 200;
const CY = 200;

function project(lon: number, lat: number, view: GlobeView): { x: number; y: number; visible: boolean } {
  const rad = Math.PI / 180;
  const phi = lat * rad;
  const lam = (lon - view.lon0) * rad;
  const phi0 = view.lat0 * rad;
  const cosc = Math.sin(phi0) * Math.sin(phi) + Math.cos(phi0) * Math.cos(phi) * Math.cos(lam);
  const x = CX + R * Math.cos(phi) * Math.sin(lam);
  const y = CY - R * (Math.cos(phi0) * Math.sin(phi) - Math.sin(phi0) * Math.cos(phi) * Math.cos(lam));
  return { x, y, visible: cosc > 0 };
}

function dominantCountry(bin: HexBin): string {
  let best = "";
  let bestCount = -1;
  for (const code of Object.keys(bin.country_breakdown).sort()) {
    const count = bin.country_breakdown[code];
    if (count > bestCount) {
      best = code;
      bestCount = count;
    }
  }
  return best;
}

export function renderGlobe(
  container: HTMLElement,
  bins: HexBin[],
  view: GlobeView,
  onSelect: (bin: HexBin) => void,
): SVGSVGElement {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const svg = newSvg(doc, 400, 400);
  svg.setAttribute("class", "globe");
  svg.appendChild(
    svgElement(doc, "circle", { cx: CX, cy: CY, r: R, class: "globe-sea" }),
  );
  // Graticule for orientation.
  for (let lon = -150; lon <= 180; lon += 30) {
    const path: string[] = [];
    for (let lat = -85; lat <= 85; lat += 5) {
      const p = project(lon, lat, view);
      if (p.visible) path.push(`${path.length ? "L" : "M"}${p.x.toFixed(1)},${p.y.toFixed(1)}`);
    }
    if (path.length > 1) {
      svg.appendChild(svgElement(doc, "path", { d: path.join(""), class: "graticule" }));
    }
  }
  const maxCount = Math.max(1, ...bins.map((b) => b.station_count));
  for (const bin of bins) {
    const p = project(bin.center[0], bin.center[1], view);
    if (!p.visible) continue;
    const height = 6 + (34 * bin.station_count) / maxCount;
    const column = svgElement(doc, "g", { class: "hex-column" });
    const bar = svgElement(doc, "rect", {
      x: p.x - 3,
      y: p.y - height,
      width: 6,
      height,
      fill: colorForKey(dominantCountry(bin)),
      class: "hex-bar",
    });
    const base = svgElement(doc, "circle", { cx: p.x, cy: p.y, r: 2.5, class: "hex-base" });
    column.setAttribute("data-center", `${bin.center[0]},${bin.center[1]}`);
    column.setAttribute("data-count", String(bin.station_count));
    const title = svgElement(doc, "title");
    title.textContent = `${bin.station_count} stations (${Object.keys(bin.country_breakdown).join(", ")})`;
    column.appendChild(title);
    column.appendChild(bar);
    column.appendChild(base);
    column.addEventListener("click", () => onSelect(bin));
    svg.appendChild(column);
  }
  container.appendChild(svg);
  return svg;
}
