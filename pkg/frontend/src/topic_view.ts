/** Per-topic graph: nested ring glyphs connected by similarity-weighted
 * edges, in force or grid layout, with a threshold slider. */

import type { ConversationDoc, LayoutPayload, TopicDoc } from "./api.js";
import { renderGlyph } from "./glyph.js";
import { edgeStyle } from "./viewmodel.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 560;
const HEIGHT = 460;

export interface TopicViewDelegate {
  onControlsChanged(mode: "force" | "grid", threshold: number, key: string): void;
  onSelectNode(nodeId: string): void;
}

export class TopicView {
  private readonly svg: SVGSVGElement;
  private readonly title: HTMLElement;
  private readonly modeSelect: HTMLSelectElement;
  private readonly keySelect: HTMLSelectElement;
  private readonly thresholdInput: HTMLInputElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly delegate: TopicViewDelegate,
  ) {
    root.dataset.panel = "topic";
    root.innerHTML = "";
    const doc = root.ownerDocument;

    this.title = doc.createElement("div");
    this.title.className = "topic-title";
    this.title.textContent = "Pick a topic from the legend";
    root.appendChild(this.title);

    const controls = doc.createElement("div");
    controls.className = "topic-controls";

    this.modeSelect = doc.createElement("select");
    this.modeSelect.className = "mode-toggle";
    for (const mode of ["force", "grid"]) {
      const option = doc.createElement("option");
      option.value = mode;
      option.textContent = mode;
      this.modeSelect.appendChild(option);
    }

    this.keySelect = doc.createElement("select");
    this.keySelect.className = "grid-key";
    for (const key of ["time", "degree", "subtopic"]) {
      const option = doc.createElement("option");
      option.value = key;
      option.textContent = key;
      this.keySelect.appendChild(option);
    }

    this.thresholdInput = doc.createElement("input");
    this.thresholdInput.type = "range";
    this.thresholdInput.className = "threshold-slider";
    this.thresholdInput.min = "-1";
    this.thresholdInput.max = "1";
    this.thresholdInput.step = "0.05";
    this.thresholdInput.value = "0.5";

    const notify = () =>
      this.delegate.onControlsChanged(
        this.modeSelect.value as "force" | "grid",
        Number(this.thresholdInput.value),
        this.keySelect.value,
      );
    this.modeSelect.addEventListener("change", notify);
    this.keySelect.addEventListener("change", notify);
    this.thresholdInput.addEventListener("change", notify);

    controls.appendChild(this.modeSelect);
    controls.appendChild(this.keySelect);
    controls.appendChild(this.thresholdInput);
    root.appendChild(controls);

    this.svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
    this.svg.setAttribute("class", "topic-graph");
    root.appendChild(this.svg);
  }

  render(payload: LayoutPayload, conversation: ConversationDoc, topic: TopicDoc | null): void {
    this.root.dataset.version = String(payload.analysis_version);
    this.root.dataset.topicId = payload.topic_id;
    this.title.textContent = topic
      ? `${topic.label} — ${payload.mode} layout, threshold ${payload.threshold}`
      : payload.topic_id;
    const summaries = new Map(conversation.nodes.map((n) => [n.id, n.summary]));

    this.svg.innerHTML = "";
    const doc = this.svg.ownerDocument;

    // Fit layout coordinates into the viewBox.
    const xs = payload.nodes.map((n) => n.x);
    const ys = payload.nodes.map((n) => n.y);
    const minX = Math.min(...xs, 0);
    const maxX = Math.max(...xs, 1);
    const minY = Math.min(...ys, 0);
    const maxY = Math.max(...ys, 1);
    const pad = 40;
    const sx = (x: number) =>
      pad + ((x - minX) / Math.max(maxX - minX, 1e-9)) * (WIDTH - 2 * pad);
    const sy = (y: number) =>
      pad + ((y - minY) / Math.max(maxY - minY, 1e-9)) * (HEIGHT - 2 * pad);

    const position = new Map(payload.nodes.map((n) => [n.id, [sx(n.x), sy(n.y)] as const]));

    for (const edge of payload.edges) {
      const a = position.get(edge.a);
      const b = position.get(edge.b);
      if (!a || !b) continue;
      const { width, opacity } = edgeStyle(edge.s);
      const line = doc.createElementNS(SVG_NS, "line");
      line.setAttribute("class", "graph-edge");
      line.setAttribute("x1", String(a[0]));
      line.setAttribute("y1", String(a[1]));
      line.setAttribute("x2", String(b[0]));
      line.setAttribute("y2", String(b[1]));
      line.setAttribute("stroke", "#5b6470");
      line.setAttribute("stroke-width", width.toFixed(2));
      line.setAttribute("stroke-opacity", opacity.toFixed(2));
      line.dataset.s = edge.s.toFixed(6);
      this.svg.appendChild(line);
    }

    for (const node of payload.nodes) {
      const [cx, cy] = position.get(node.id)!;
      const glyph = renderGlyph(doc, cx, cy, 14, {
        outer: node.outer_ring.map((e) => ({
          key: e.topic,
          ordinal: topicOrdinal(e.topic),
          s: e.s,
        })),
        inner: node.inner_ring.map((e) => ({
          key: e.subtopic,
          ordinal: topicOrdinal(e.subtopic),
          s: e.s,
        })),
      });
      glyph.dataset.nodeId = node.id;
      glyph.classList.add("graph-node");
      const tooltip = doc.createElementNS(SVG_NS, "title");
      tooltip.textContent = summaries.get(node.id) || node.id;
      glyph.appendChild(tooltip);
      glyph.addEventListener("click", () => this.delegate.onSelectNode(node.id));
      this.svg.appendChild(glyph);
    }

    function topicOrdinal(topicId: string): number {
      // Topic ids are "t<ordinal>" by construction; fall back to 0.
      const parsed = Number(topicId.replace(/^t/, ""));
      return Number.isFinite(parsed) ? parsed : 0;
    }
  }

  setControls(mode: "force" | "grid", threshold: number, key: string): void {
    this.modeSelect.value = mode;
    this.thresholdInput.value = String(threshold);
    this.keySelect.value = key;
  }

  clear(message: string): void {
    this.title.textContent = message;
    this.svg.innerHTML = "";
    delete this.root.dataset.topicId;
  }
}
