// Tiny SVG helpers shared by the panels.

export const SVG_NS = "http://www.w3.org/2000/svg";

export function svgElement<K extends keyof SVGElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = doc.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

export function newSvg(doc: Document, width: number, height: number): SVGSVGElement {
  const svg = svgElement(doc, "svg", {
    width,
    height,
    viewBox: `0 0 ${width} ${height}`,
    xmlns: SVG_NS,
  });
  return svg;
}

/** Serialize a rendered plot for SVG download. */
export function serializeSvg(svg: SVGSVGElement): string {
  return new XMLSerializer().serializeToString(svg);
}

export function colorForKey(key: string): string {
  // Stable categorical color from a small palette.
  let hash = 0;
  for (let i = 0; i < key.length; i++) {
    hash = (hash * 31 + key.charCodeAt(i)) >>> 0;
  }
  const palette = [
    "#4d7fb3", "#c0604d", "#5aa469", "#b08c3e", "#7d5ba6",
    "#3e8f8a", "#ba5b86", "#6a7f3a", "#946b4a", "#50708c",
  ];
  return palette[hash % palette.length];
}
