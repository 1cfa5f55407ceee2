/** Nested two-ring glyph: outer sectors are level-0 topic similarities,
 * inner sectors the selected topic's subtopic similarities. Sector angle
 * is proportional to similarity. */

import { colorFor, ringSectors, sectorPath } from "./viewmodel.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface GlyphRings {
  outer: { key: string; ordinal: number; s: number }[];
  inner: { key: string; ordinal: number; s: number }[];
}

export function renderGlyph(
  doc: Document,
  cx: number,
  cy: number,
  radius: number,
  rings: GlyphRings,
): SVGGElement {
  const group = doc.createElementNS(SVG_NS, "g") as SVGGElement;
  group.setAttribute("class", "ring-glyph");

  const ordinalByKey = new Map<string, number>();
  for (const entry of [...rings.outer, ...rings.inner]) {
    ordinalByKey.set(entry.key, entry.ordinal);
  }

  const draw = (
    entries: { key: string; s: number }[],
    r: number,
    className: string,
  ): void => {
    for (const sector of ringSectors(entries)) {
      const path = doc.createElementNS(SVG_NS, "path");
      path.setAttribute("class", className);
      path.setAttribute("d", sectorPath(cx, cy, r, sector));
      path.setAttribute("fill", colorFor(ordinalByKey.get(sector.key) ?? 0));
      path.dataset.key = sector.key;
      path.dataset.s = sector.s.toFixed(6);
      group.appendChild(path);
    }
  };

  draw(rings.outer, radius, "outer-sector");
  // Separator disc keeps the inner ring legible over the outer sectors.
  const separator = doc.createElementNS(SVG_NS, "circle");
  separator.setAttribute("cx", String(cx));
  separator.setAttribute("cy", String(cy));
  separator.setAttribute("r", String(radius * 0.62));
  separator.setAttribute("fill", "#ffffff");
  group.appendChild(separator);
  draw(rings.inner, radius * 0.52, "inner-sector");

  return group;
}
