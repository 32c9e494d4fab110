// Visualization panel renderers: bar, histogram, scatter, and the PCA
// scatter. All numbers come straight from /v1 responses.

import { BarEntry, HistBin, PcaResponse, ScatterPoint } from "../types.js";
import { newSvg, svgElement } from "./svg.js";

const W = 520;
const H = 300;
const PAD = { left: 56, right: 12, top: 16, bottom: 58 };

export function renderBarChart(container: HTMLElement, bars: BarEntry[]): SVGSVGElement {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const svg = newSvg(doc, W, H);
  svg.setAttribute("class", "bar-chart");
  const maxCount = Math.max(1, ...bars.map((b) => b.count));
  const innerW = W - PAD.left - PAD.right;
  const innerH = H - PAD.top - PAD.bottom;
  const step = bars.length ? innerW / bars.length : innerW;
  bars.forEach((bar, i) => {
    const height = (bar.count / maxCount) * innerH;
    const x = PAD.left + i * step;
    svg.appendChild(
      svgElement(doc, "rect", {
        x: (x + step * 0.12).toFixed(1),
        y: (PAD.top + innerH - height).toFixed(1),
        width: (step * 0.76).toFixed(1),
        height: height.toFixed(1),
        class: "bar",
        "data-label": bar.label,
        "data-count": bar.count,
      }),
    );
    const value = svgElement(doc, "text", {
      x: (x + step / 2).toFixed(1),
      y: (PAD.top + innerH - height - 4).toFixed(1),
      class: "bar-value",
      "text-anchor": "middle",
    });
    value.textContent = String(bar.count);
    svg.appendChild(value);
    const label = svgElement(doc, "text", {
      x: (x + step / 2).toFixed(1),
      y: H - PAD.bottom + 14,
      class: "bar-label",
      "text-anchor": "end",
      transform: `rotate(-35 ${(x + step / 2).toFixed(1)} ${H - PAD.bottom + 14})`,
    });
    label.textContent = bar.label;
    svg.appendChild(label);
  });
  container.appendChild(svg);
  return svg;
}

export function renderHistogram(container: HTMLElement, bins: HistBin[]): SVGSVGElement {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const svg = newSvg(doc, W, H);
  svg.setAttribute("class", "histogram");
  const maxCount = Math.max(1, ...bins.map((b) => b.count));
  const innerW = W - PAD.left - PAD.right;
  const innerH = H - PAD.top - PAD.bottom;
  const step = bins.length ? innerW / bins.length : innerW;
  bins.forEach((bin, i) => {
    const height = (bin.count / maxCount) * innerH;
    svg.appendChild(
      svgElement(doc, "rect", {
        x: (PAD.left + i * step).toFixed(1),
        y: (PAD.top + innerH - height).toFixed(1),
        width: Math.max(step - 1, 1).toFixed(1),
        height: height.toFixed(1),
        class: "hist-bin",
        "data-count": bin.count,
      }),
    );
    const label = svgElement(doc, "text", {
      x: (PAD.left + i * step).toFixed(1),
      y: H - PAD.bottom + 14,
      class: "hist-label",
    });
    label.textContent = bin.start.toFixed(bin.end - bin.start >= 10 ? 0 : 2);
    svg.appendChild(label);
  });
  container.appendChild(svg);
  return svg;
}

interface ScatterOptions {
  highlighted?: Set<string>;
  xLabel?: string;
  yLabel?: string;
}

export function renderScatter(
  container: HTMLElement,
  points: ScatterPoint[],
  options: ScatterOptions = {},
): SVGSVGElement {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const svg = newSvg(doc, W, H);
  svg.setAttribute("class", "scatter");
  if (!points.length) {
    container.appendChild(svg);
    return svg;
  }
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(...ys);
  const yMax = Math.max(...ys);
  const innerW = W - PAD.left - PAD.right;
  const innerH = H - PAD.top - PAD.bottom;
  const sx = (x: number) =>
    PAD.left + (xMax === xMin ? innerW / 2 : ((x - xMin) / (xMax - xMin)) * innerW);
  const sy = (y: number) =>
    PAD.top + (yMax === yMin ? innerH / 2 : innerH - ((y - yMin) / (yMax - yMin)) * innerH);
  const highlighted = options.highlighted ?? new Set<string>();
  for (const point of points) {
    const starred = highlighted.has(point.event_id);
    svg.appendChild(
      svgElement(doc, "circle", {
        cx: sx(point.x).toFixed(1),
        cy: sy(point.y).toFixed(1),
        r: starred ? 5 : 2.5,
        class: starred ? "pt highlighted" : "pt",
        "data-event-id": point.event_id,
      }),
    );
  }
  for (const [text, x, y] of [
    [options.xLabel ?? "", W / 2, H - 8],
    [options.yLabel ?? "", 14, H / 2],
  ] as [string, number, number][]) {
    if (!text) continue;
    const label = svgElement(doc, "text", {
      x,
      y,
      class: "axis-label",
      "text-anchor": "middle",
    });
    label.textContent = text;
    svg.appendChild(label);
  }
  container.appendChild(svg);
  return svg;
}

export function renderPcaScatter(
  container: HTMLElement,
  pca: PcaResponse,
  highlighted?: Set<string>,
): SVGSVGElement {
  const points = pca.points.map((p) => ({ event_id: p.event_id, x: p.xy[0], y: p.xy[1] }));
  const [ev0, ev1] = pca.explained_variance;
  return renderScatter(container, points, {
    highlighted,
    xLabel: `component 1 (var ${ev0.toFixed(3)})`,
    yLabel: `component 2 (var ${ev1.toFixed(3)})`,
  });
}
