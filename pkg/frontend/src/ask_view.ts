/** Context-associated Q&A: node detail, the context list (ring glyphs),
 * and the ask box with debounced relevant-node highlighting. */

import type { ConversationDoc, NodeDoc, TopicsPayload } from "./api.js";
import { renderGlyph } from "./glyph.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface AskViewDelegate {
  onQuestionInput(question: string): void;
  onSubmit(question: string): void;
  onToggleContext(nodeId: string): void;
}

export class AskView {
  private readonly detail: HTMLElement;
  private readonly contextList: HTMLElement;
  private readonly question: HTMLTextAreaElement;
  private readonly submit: HTMLButtonElement;
  private readonly answer: HTMLElement;
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly delegate: AskViewDelegate,
    private readonly debounceMs = 250,
  ) {
    root.dataset.panel = "ask";
    root.innerHTML = "";
    const doc = root.ownerDocument;

    this.detail = doc.createElement("div");
    this.detail.className = "qa-detail";
    this.detail.textContent = "Click a node to read its Q&A.";
    root.appendChild(this.detail);

    const contextHeading = doc.createElement("div");
    contextHeading.className = "context-heading";
    contextHeading.textContent = "Context list";
    root.appendChild(contextHeading);

    this.contextList = doc.createElement("div");
    this.contextList.className = "context-list";
    root.appendChild(this.contextList);

    this.question = doc.createElement("textarea");
    this.question.className = "ask-input";
    this.question.placeholder = "Ask with the selected context…";
    this.question.addEventListener("input", () => {
      if (this.debounceTimer !== null) clearTimeout(this.debounceTimer);
      this.debounceTimer = setTimeout(() => {
        this.delegate.onQuestionInput(this.question.value);
      }, this.debounceMs);
    });
    root.appendChild(this.question);

    this.submit = doc.createElement("button");
    this.submit.className = "ask-submit";
    this.submit.textContent = "Ask";
    this.submit.addEventListener("click", () => {
      if (this.question.value.trim()) this.delegate.onSubmit(this.question.value.trim());
    });
    root.appendChild(this.submit);

    this.answer = doc.createElement("div");
    this.answer.className = "ask-answer";
    root.appendChild(this.answer);
  }

  setVersion(version: number): void {
    this.root.dataset.version = String(version);
  }

  showNode(node: NodeDoc, inContext: boolean): void {
    const doc = this.root.ownerDocument;
    this.detail.innerHTML = "";
    this.detail.dataset.nodeId = node.id;

    const question = doc.createElement("p");
    question.className = "qa-question";
    question.textContent = `Q: ${node.question}`;
    const answer = doc.createElement("p");
    answer.className = "qa-answer";
    answer.textContent = node.answer ? `A: ${node.answer}` : "A: (pending)";
    const summary = doc.createElement("p");
    summary.className = "qa-summary";
    summary.textContent = node.summary ? `Summary: ${node.summary}` : "";

    const toggle = doc.createElement("button");
    toggle.className = "context-toggle";
    toggle.textContent = inContext ? "Remove from context" : "Add to context";
    toggle.addEventListener("click", () => this.delegate.onToggleContext(node.id));

    this.detail.append(question, answer, summary, toggle);
  }

  renderContextList(
    contextIds: string[],
    conversation: ConversationDoc,
    topics: TopicsPayload,
  ): void {
    this.contextList.innerHTML = "";
    const doc = this.contextList.ownerDocument;
    const ordinalByTopic = new Map(topics.topics.map((t) => [t.id, t.ordinal]));
    const byId = new Map(conversation.nodes.map((n) => [n.id, n]));
    for (const nodeId of contextIds) {
      const node = byId.get(nodeId);
      if (!node) continue;
      const item = doc.createElement("div");
      item.className = "context-item";
      item.dataset.nodeId = nodeId;

      const svg = doc.createElementNS(SVG_NS, "svg");
      svg.setAttribute("viewBox", "0 0 32 32");
      svg.setAttribute("class", "context-glyph");
      svg.appendChild(
        renderGlyph(doc, 16, 16, 13, {
          outer: node.memberships.map(([topicId, s]) => ({
            key: topicId,
            ordinal: ordinalByTopic.get(topicId) ?? 0,
            s,
          })),
          inner: [],
        }),
      );
      item.appendChild(svg);

      const label = doc.createElement("span");
      label.textContent = node.summary || node.question.slice(0, 48);
      item.appendChild(label);

      const remove = doc.createElement("button");
      remove.className = "context-remove";
      remove.textContent = "×";
      remove.addEventListener("click", () => this.delegate.onToggleContext(nodeId));
      item.appendChild(remove);

      this.contextList.appendChild(item);
    }
  }

  setBusy(busy: boolean): void {
    this.submit.disabled = busy;
  }

  showAnswer(answer: string): void {
    this.answer.textContent = answer;
    this.question.value = "";
  }

  showError(message: string): void {
    this.answer.textContent = `Error: ${message}`;
  }
}
