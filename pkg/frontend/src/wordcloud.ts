/** Word cloud over the brushed range, sized by tf-idf weight. Hovering a
 * term asks the delegate to tint timeline nodes by term frequency. */

import type { KeywordsPayload } from "./api.js";
import { termFontSize } from "./viewmodel.js";

export interface WordCloudDelegate {
  onHoverTerm(term: string): void;
  onLeaveTerm(): void;
}

export class WordCloud {
  constructor(
    private readonly root: HTMLElement,
    private readonly delegate: WordCloudDelegate,
  ) {
    root.dataset.panel = "wordcloud";
  }

  render(payload: KeywordsPayload, range: [number, number]): void {
    this.root.dataset.version = String(payload.analysis_version);
    this.root.dataset.range = `${range[0]}-${range[1]}`;
    this.root.innerHTML = "";
    const doc = this.root.ownerDocument;
    const maxWeight = payload.keywords[0]?.weight ?? 0;
    for (const keyword of payload.keywords) {
      const span = doc.createElement("span");
      span.className = "cloud-term";
      span.dataset.term = keyword.term;
      span.textContent = keyword.term;
      span.style.fontSize = `${termFontSize(keyword.weight, maxWeight).toFixed(1)}px`;
      span.title = `weight ${keyword.weight.toFixed(3)} (df ${keyword.df})`;
      span.addEventListener("mouseenter", () => this.delegate.onHoverTerm(keyword.term));
      span.addEventListener("mouseleave", () => this.delegate.onLeaveTerm());
      this.root.appendChild(span);
    }
  }
}
