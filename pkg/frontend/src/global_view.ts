/** Global timeline: node dots by (seq, topic row), connecting polyline,
 * dashed forgotten line, topic legend, brush strip, and search markers. */

import type { ConversationDoc, GlobalGeometry, SearchHit, TopicDoc } from "./api.js";
import { brushToRange, colorFor, timelineScale } from "./viewmodel.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface GlobalViewDelegate {
  onBrush(from: number, to: number): void;
  onSelectTopic(topicId: string): void;
  onSelectNode(nodeId: string): void;
}

const WIDTH = 760;
const HEIGHT = 300;
const BRUSH_HEIGHT = 46;

export class GlobalView {
  private readonly svg: SVGSVGElement;
  private readonly brushSvg: SVGSVGElement;
  private readonly legend: HTMLElement;
  private marks = new Map<string, SVGCircleElement>();
  private seqById = new Map<string, number>();
  private brushPixels: [number, number] | null = null;
  private nodeCount = 0;

  constructor(
    private readonly root: HTMLElement,
    private readonly delegate: GlobalViewDelegate,
  ) {
    root.dataset.panel = "global";
    root.innerHTML = "";
    const doc = root.ownerDocument;

    this.legend = doc.createElement("div");
    this.legend.className = "legend";
    root.appendChild(this.legend);

    this.svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
    this.svg.setAttribute("class", "content-view");
    root.appendChild(this.svg);

    this.brushSvg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.brushSvg.setAttribute("viewBox", `0 0 ${WIDTH} ${BRUSH_HEIGHT}`);
    this.brushSvg.setAttribute("class", "brush-view");
    root.appendChild(this.brushSvg);
    this.wireBrush();
  }

  render(geometry: GlobalGeometry, conversation: ConversationDoc, topics: TopicDoc[]): void {
    this.root.dataset.version = String(geometry.analysis_version);
    this.nodeCount = geometry.nodes.length;
    this.seqById = new Map(conversation.nodes.map((n) => [n.id, n.seq_index]));
    const summaries = new Map(conversation.nodes.map((n) => [n.id, n.summary]));
    const ordinalByTopic = new Map(geometry.topics.map((t) => [t.id, t.ordinal]));
    const primaryByNode = new Map(conversation.nodes.map((n) => [n.id, n.primary_topic]));
    const rowCount = Math.max(geometry.topics.length, 1);
    const scale = timelineScale(this.nodeCount, rowCount, WIDTH, HEIGHT);

    this.svg.innerHTML = "";
    this.marks.clear();
    const doc = this.svg.ownerDocument;

    // Connecting polyline through consecutive nodes.
    const points = geometry.nodes
      .map((n) => `${scale.x(n.x)},${scale.y(n.row)}`)
      .join(" ");
    if (geometry.nodes.length > 1) {
      const line = doc.createElementNS(SVG_NS, "polyline");
      line.setAttribute("class", "timeline-path");
      line.setAttribute("points", points);
      line.setAttribute("fill", "none");
      this.svg.appendChild(line);
    }

    // Dashed forgotten line: everything strictly left of it is out of budget.
    const boundary = Math.min(geometry.forgotten_boundary, Math.max(this.nodeCount - 1, 0));
    const boundaryX = scale.x(boundary) - (geometry.forgotten_boundary > 0 ? 8 : 12);
    const forgotten = doc.createElementNS(SVG_NS, "line");
    forgotten.setAttribute("class", "forgotten-line");
    forgotten.setAttribute("x1", String(boundaryX));
    forgotten.setAttribute("x2", String(boundaryX));
    forgotten.setAttribute("y1", "4");
    forgotten.setAttribute("y2", String(HEIGHT - 4));
    forgotten.setAttribute("stroke-dasharray", "6 4");
    forgotten.dataset.boundary = String(geometry.forgotten_boundary);
    this.svg.appendChild(forgotten);

    for (const node of geometry.nodes) {
      const mark = doc.createElementNS(SVG_NS, "circle") as SVGCircleElement;
      mark.setAttribute("class", "node-mark");
      mark.setAttribute("cx", String(scale.x(node.x)));
      mark.setAttribute("cy", String(scale.y(node.row)));
      mark.setAttribute("r", "6");
      const primary = primaryByNode.get(node.id) ?? null;
      const ordinal = primary !== null ? (ordinalByTopic.get(primary) ?? 0) : 0;
      mark.setAttribute("fill", colorFor(ordinal));
      mark.dataset.nodeId = node.id;
      mark.dataset.seq = String(node.x);
      const tooltip = doc.createElementNS(SVG_NS, "title");
      tooltip.textContent = summaries.get(node.id) || node.id;
      mark.appendChild(tooltip);
      mark.addEventListener("click", () => this.delegate.onSelectNode(node.id));
      this.svg.appendChild(mark);
      this.marks.set(node.id, mark);
    }

    this.renderLegend(topics);
    this.renderBrushStrip(geometry);
  }

  private renderLegend(topics: TopicDoc[]): void {
    this.legend.innerHTML = "";
    for (const topic of topics.filter((t) => t.level === 0)) {
      const item = this.legend.ownerDocument.createElement("button");
      item.className = "legend-item";
      item.dataset.topicId = topic.id;
      item.textContent = topic.label;
      item.style.borderColor = colorFor(topic.ordinal);
      item.addEventListener("click", () => this.delegate.onSelectTopic(topic.id));
      this.legend.appendChild(item);
    }
  }

  private renderBrushStrip(geometry: GlobalGeometry): void {
    this.brushSvg.innerHTML = "";
    const doc = this.brushSvg.ownerDocument;
    const rowCount = Math.max(geometry.topics.length, 1);
    const scale = timelineScale(this.nodeCount, rowCount, WIDTH, BRUSH_HEIGHT, 6);
    const ordinalByRow = new Map(geometry.topics.map((t) => [t.row, t.ordinal]));

    const strip = doc.createElementNS(SVG_NS, "rect");
    strip.setAttribute("class", "brush-strip");
    strip.setAttribute("x", "0");
    strip.setAttribute("y", "0");
    strip.setAttribute("width", String(WIDTH));
    strip.setAttribute("height", String(BRUSH_HEIGHT));
    strip.setAttribute("fill", "transparent");
    this.brushSvg.appendChild(strip);

    for (const node of geometry.nodes) {
      const dot = doc.createElementNS(SVG_NS, "circle");
      dot.setAttribute("class", "brush-dot");
      dot.setAttribute("cx", String(scale.x(node.x)));
      dot.setAttribute("cy", String(scale.y(node.row)));
      dot.setAttribute("r", "2");
      dot.setAttribute("fill", colorFor(ordinalByRow.get(node.row) ?? 0));
      this.brushSvg.appendChild(dot);
    }

    const selection = doc.createElementNS(SVG_NS, "rect");
    selection.setAttribute("class", "brush-selection");
    selection.setAttribute("y", "0");
    selection.setAttribute("height", String(BRUSH_HEIGHT));
    selection.setAttribute("x", "0");
    selection.setAttribute("width", "0");
    this.brushSvg.appendChild(selection);
    if (this.brushPixels) {
      this.drawSelection(this.brushPixels[0], this.brushPixels[1]);
    }
  }

  private wireBrush(): void {
    let dragFrom: number | null = null;
    const pixelX = (event: MouseEvent): number => {
      const rect = (this.brushSvg as unknown as Element).getBoundingClientRect();
      const width = rect.width || WIDTH;
      return ((event.clientX - rect.left) / width) * WIDTH;
    };
    this.brushSvg.addEventListener("mousedown", (event) => {
      dragFrom = pixelX(event as MouseEvent);
    });
    this.brushSvg.addEventListener("mousemove", (event) => {
      if (dragFrom !== null) this.drawSelection(dragFrom, pixelX(event as MouseEvent));
    });
    this.brushSvg.addEventListener("mouseup", (event) => {
      if (dragFrom === null) return;
      const to = pixelX(event as MouseEvent);
      this.drawSelection(dragFrom, to);
      const [from, until] = brushToRange(dragFrom, to, WIDTH, this.nodeCount);
      dragFrom = null;
      this.delegate.onBrush(from, until);
    });
  }

  private drawSelection(pxFrom: number, pxTo: number): void {
    this.brushPixels = [pxFrom, pxTo];
    const selection = this.brushSvg.querySelector(".brush-selection");
    if (!selection) return;
    selection.setAttribute("x", String(Math.min(pxFrom, pxTo)));
    selection.setAttribute("width", String(Math.abs(pxTo - pxFrom)));
  }

  /** Red rings on search hits; stronger hits get wider rings. */
  showSearchMarks(hits: SearchHit[], forgottenBoundary: number): void {
    for (const old of Array.from(this.svg.querySelectorAll(".search-mark"))) {
      old.remove();
    }
    const doc = this.svg.ownerDocument;
    for (const hit of hits) {
      const mark = this.marks.get(hit.node_id);
      if (!mark) continue;
      const ring = doc.createElementNS(SVG_NS, "circle");
      ring.setAttribute("class", "search-mark");
      ring.setAttribute("cx", mark.getAttribute("cx")!);
      ring.setAttribute("cy", mark.getAttribute("cy")!);
      ring.setAttribute("r", String(8 + hit.highlight_level));
      ring.setAttribute("fill", "none");
      ring.setAttribute("stroke", "#d62728");
      ring.setAttribute("stroke-width", String(hit.highlight_level));
      ring.dataset.nodeId = hit.node_id;
      const seq = this.seqById.get(hit.node_id) ?? 0;
      if (seq < forgottenBoundary) {
        ring.classList.add("pre-forgotten");
      }
      this.svg.appendChild(ring);
    }
  }

  /** Tint node marks by the hovered word-cloud term's per-node level. */
  showTermLevels(levels: Record<string, number>): void {
    for (const [nodeId, mark] of this.marks) {
      const level = levels[nodeId] ?? 0;
      mark.dataset.termLevel = String(level);
      mark.setAttribute("fill-opacity", String(level === 0 ? 0.25 : 0.4 + 0.2 * level));
    }
  }

  clearTermLevels(): void {
    for (const mark of this.marks.values()) {
      delete mark.dataset.termLevel;
      mark.setAttribute("fill-opacity", "1");
    }
  }
}
