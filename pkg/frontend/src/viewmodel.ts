/** Pure view-model helpers: everything here is testable without a DOM. */

// Ten-entry categorical palette; topic color is palette[ordinal % 10].
export const PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#e15759",
  "#76b7b2",
  "#59a14f",
  "#edc948",
  "#b07aa1",
  "#ff9da7",
  "#9c755f",
  "#bab0ac",
] as const;

export function colorFor(ordinal: number): string {
  return PALETTE[((ordinal % PALETTE.length) + PALETTE.length) % PALETTE.length]!;
}

/** Map a pixel interval on the brush strip to an inclusive seq range. */
export function brushToRange(
  pxFrom: number,
  pxTo: number,
  width: number,
  nodeCount: number,
): [number, number] {
  if (nodeCount === 0) return [0, 0];
  const lo = Math.min(pxFrom, pxTo);
  const hi = Math.max(pxFrom, pxTo);
  const scale = (px: number) => Math.floor((px / Math.max(width, 1)) * nodeCount);
  const clamp = (i: number) => Math.max(0, Math.min(nodeCount - 1, i));
  return [clamp(scale(lo)), clamp(scale(hi))];
}

export interface Sector {
  startAngle: number;
  endAngle: number;
  s: number;
  key: string;
}

/**
 * Split the full circle into sectors with angle proportional to each
 * entry's similarity. Non-positive similarities get a minimal sliver so
 * membership stays visible without distorting the ring.
 */
export function ringSectors(entries: { key: string; s: number }[]): Sector[] {
  if (entries.length === 0) return [];
  const floor = 1e-3;
  const weights = entries.map((e) => Math.max(e.s, floor));
  const total = weights.reduce((a, b) => a + b, 0);
  const sectors: Sector[] = [];
  let angle = -Math.PI / 2;
  entries.forEach((entry, i) => {
    const span = (weights[i]! / total) * 2 * Math.PI;
    sectors.push({ startAngle: angle, endAngle: angle + span, s: entry.s, key: entry.key });
    angle += span;
  });
  return sectors;
}

/** SVG path for one sector of a filled disc of the given radius. */
export function sectorPath(cx: number, cy: number, r: number, sector: Sector): string {
  const full = sector.endAngle - sector.startAngle >= 2 * Math.PI - 1e-9;
  if (full) {
    // Single-sector rings degenerate to a circle; draw it as two arcs.
    return (
      `M ${cx} ${cy - r} ` +
      `A ${r} ${r} 0 1 1 ${cx} ${cy + r} ` +
      `A ${r} ${r} 0 1 1 ${cx} ${cy - r} Z`
    );
  }
  const x1 = cx + r * Math.cos(sector.startAngle);
  const y1 = cy + r * Math.sin(sector.startAngle);
  const x2 = cx + r * Math.cos(sector.endAngle);
  const y2 = cy + r * Math.sin(sector.endAngle);
  const large = sector.endAngle - sector.startAngle > Math.PI ? 1 : 0;
  return `M ${cx} ${cy} L ${x1} ${y1} A ${r} ${r} 0 ${large} 1 ${x2} ${y2} Z`;
}

const clamp01 = (v: number) => Math.max(0, Math.min(1, v));

/** Edge width and opacity both grow with similarity. */
export function edgeStyle(s: number): { width: number; opacity: number } {
  return { width: 0.5 + 2.5 * clamp01(s), opacity: 0.25 + 0.65 * clamp01(s) };
}

/** Font size for a word-cloud term, scaled by weight relative to the max. */
export function termFontSize(weight: number, maxWeight: number): number {
  if (maxWeight <= 0) return 11;
  return 11 + 17 * clamp01(weight / maxWeight);
}

export interface TimelineScale {
  x(seq: number): number;
  y(row: number): number;
}

export function timelineScale(
  nodeCount: number,
  rowCount: number,
  width: number,
  height: number,
  margin = 24,
): TimelineScale {
  const xSpan = Math.max(nodeCount - 1, 1);
  const ySpan = Math.max(rowCount - 1, 1);
  return {
    x: (seq) => margin + (seq / xSpan) * (width - 2 * margin),
    y: (row) => margin + (row / ySpan) * (height - 2 * margin),
  };
}
