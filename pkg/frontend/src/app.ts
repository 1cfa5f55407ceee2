/** Wires the panels to the API with version fencing: every displayed
 * artifact carries the analysis_version it was fetched at, and any
 * mismatch triggers a full refetch so mixed-version composites never
 * reach the DOM. */

import type { ApiClient, ConversationDoc, GlobalGeometry, TopicsPayload } from "./api.js";
import { ApiError } from "./api.js";
import { AskView } from "./ask_view.js";
import { GlobalView } from "./global_view.js";
import { initialState, onVersionChange, setBrush, toggleContext, type ViewState } from "./state.js";
import { TopicView } from "./topic_view.js";
import { WordCloud } from "./wordcloud.js";

export interface PanelRoots {
  global: HTMLElement;
  wordcloud: HTMLElement;
  topic: HTMLElement;
  ask: HTMLElement;
}

const SEARCH_LIMIT = 1000; // question-time highlighting wants every hit

export class App {
  readonly state: ViewState;
  readonly globalView: GlobalView;
  readonly wordCloud: WordCloud;
  readonly topicView: TopicView;
  readonly askView: AskView;

  private conversation: ConversationDoc | null = null;
  private topicsPayload: TopicsPayload | null = null;
  private geometry: GlobalGeometry | null = null;

  constructor(
    private readonly api: ApiClient,
    conversationId: string,
    roots: PanelRoots,
    debounceMs = 250,
  ) {
    this.state = initialState(conversationId);
    this.globalView = new GlobalView(roots.global, {
      onBrush: (from, to) => void this.brushed(from, to),
      onSelectTopic: (topicId) => void this.selectTopic(topicId),
      onSelectNode: (nodeId) => this.selectNode(nodeId),
    });
    this.wordCloud = new WordCloud(roots.wordcloud, {
      onHoverTerm: (term) => void this.hoverTerm(term),
      onLeaveTerm: () => this.globalView.clearTermLevels(),
    });
    this.topicView = new TopicView(roots.topic, {
      onControlsChanged: (mode, threshold, key) => void this.controlsChanged(mode, threshold, key),
      onSelectNode: (nodeId) => this.selectNode(nodeId),
    });
    this.askView = new AskView(roots.ask, {
      onQuestionInput: (question) => void this.questionTyped(question),
      onSubmit: (question) => void this.submitAsk(question),
      onToggleContext: (nodeId) => this.toggleContextNode(nodeId),
    }, debounceMs);
  }

  async start(): Promise<void> {
    await this.refreshAll();
  }

  /** Poll for a new analysis version; cheap no-op while unchanged. */
  async tick(): Promise<void> {
    const conversation = await this.api.conversation(this.state.conversationId);
    if (conversation.analysis_version !== this.state.analysisVersion) {
      await this.refreshAll();
    }
  }

  async refreshAll(): Promise<void> {
    const id = this.state.conversationId;
    for (let attempt = 0; attempt < 3; attempt += 1) {
      const conversation = await this.api.conversation(id);
      if (conversation.nodes.length === 0 || conversation.analysis_version === 0) {
        this.renderEmptyState(conversation);
        return;
      }
      const version = conversation.analysis_version;
      const [topics, geometry] = await Promise.all([
        this.api.topics(id),
        this.api.globalLayout(id),
      ]);
      if (topics.analysis_version !== version || geometry.analysis_version !== version) {
        continue; // a re-analysis landed mid-fetch; take a fresh snapshot
      }
      this.commit(conversation, topics, geometry);
      await this.refreshAuxiliary();
      return;
    }
    throw new Error("analysis version kept changing during refresh");
  }

  private commit(
    conversation: ConversationDoc,
    topics: TopicsPayload,
    geometry: GlobalGeometry,
  ): void {
    this.conversation = conversation;
    this.topicsPayload = topics;
    this.geometry = geometry;
    const firstLoad = this.state.nodeCount === 0;
    onVersionChange(
      this.state,
      conversation.analysis_version,
      new Set(conversation.nodes.map((n) => n.id)),
      conversation.nodes.length,
    );
    if (firstLoad) {
      setBrush(this.state, 0, conversation.nodes.length - 1);
    }
    this.globalView.render(geometry, conversation, topics.topics);
    this.askView.setVersion(conversation.analysis_version);
    this.askView.renderContextList(this.state.contextList, conversation, topics);
    if (this.state.selectedNode) {
      this.selectNode(this.state.selectedNode);
    }
  }

  private async refreshAuxiliary(): Promise<void> {
    await this.brushed(this.state.brush[0], this.state.brush[1]);
    if (this.state.selectedTopic) {
      await this.fetchTopicLayout();
    }
    if (this.state.pendingQuestion) {
      await this.questionTyped(this.state.pendingQuestion);
    }
  }

  private renderEmptyState(conversation: ConversationDoc): void {
    const root = this.globalView["root"] as HTMLElement;
    root.innerHTML = "";
    const empty = root.ownerDocument.createElement("div");
    empty.className = "empty-state";
    empty.dataset.version = String(conversation.analysis_version);
    empty.textContent =
      conversation.nodes.length === 0
        ? "This conversation has no rounds yet."
        : "Not analyzed yet - run the analysis to see the timeline.";
    root.appendChild(empty);
  }

  async brushed(from: number, to: number): Promise<void> {
    setBrush(this.state, from, to);
    const [lo, hi] = this.state.brush;
    const payload = await this.api.keywords(this.state.conversationId, lo, hi);
    if (payload.analysis_version !== this.state.analysisVersion) {
      await this.refreshAll();
      return;
    }
    this.wordCloud.render(payload, [lo, hi]);
  }

  async hoverTerm(term: string): Promise<void> {
    const payload = await this.api.highlights(this.state.conversationId, term);
    if (payload.analysis_version !== this.state.analysisVersion) return;
    this.globalView.showTermLevels(payload.levels);
  }

  async selectTopic(topicId: string): Promise<void> {
    this.state.selectedTopic = topicId;
    await this.fetchTopicLayout();
  }

  async controlsChanged(mode: "force" | "grid", threshold: number, key: string): Promise<void> {
    this.state.layoutMode = mode;
    this.state.threshold = threshold;
    this.state.layoutKey = key as ViewState["layoutKey"];
    if (this.state.selectedTopic) {
      await this.fetchTopicLayout();
    }
  }

  private async fetchTopicLayout(): Promise<void> {
    if (!this.state.selectedTopic || !this.conversation) return;
    const payload = await this.api.topicLayout(
      this.state.conversationId,
      this.state.selectedTopic,
      this.state.layoutMode,
      this.state.threshold,
      this.state.layoutKey,
      this.state.seed,
    );
    if (payload.analysis_version !== this.state.analysisVersion) {
      await this.refreshAll();
      return;
    }
    const topic =
      this.topicsPayload?.topics.find((t) => t.id === this.state.selectedTopic) ?? null;
    this.topicView.setControls(this.state.layoutMode, this.state.threshold, this.state.layoutKey);
    this.topicView.render(payload, this.conversation, topic);
  }

  selectNode(nodeId: string): void {
    if (!this.conversation) return;
    const node = this.conversation.nodes.find((n) => n.id === nodeId);
    if (!node) return;
    this.state.selectedNode = nodeId;
    this.askView.showNode(node, this.state.contextList.includes(nodeId));
  }

  toggleContextNode(nodeId: string): void {
    if (!this.conversation || !this.topicsPayload) return;
    toggleContext(this.state, nodeId);
    this.askView.renderContextList(this.state.contextList, this.conversation, this.topicsPayload);
    if (this.state.selectedNode === nodeId) {
      this.selectNode(nodeId);
    }
  }

  async questionTyped(question: string): Promise<void> {
    this.state.pendingQuestion = question;
    if (!question.trim()) {
      this.globalView.showSearchMarks([], 0);
      return;
    }
    const payload = await this.api.search(this.state.conversationId, question, SEARCH_LIMIT);
    if (payload.analysis_version !== this.state.analysisVersion) return;
    this.globalView.showSearchMarks(payload.hits, this.geometry?.forgotten_boundary ?? 0);
  }

  async submitAsk(question: string): Promise<void> {
    this.askView.setBusy(true);
    try {
      const response = await this.api.ask(
        this.state.conversationId,
        question,
        [...this.state.contextList],
      );
      this.askView.showAnswer(response.answer);
      this.state.pendingQuestion = "";
      this.globalView.showSearchMarks([], 0);
      await this.refreshAll();
    } catch (error) {
      this.askView.showError(error instanceof ApiError ? error.message : String(error));
    } finally {
      this.askView.setBusy(false);
    }
  }
}
