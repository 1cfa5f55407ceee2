/** Client-side view state with the invariants the views rely on. */

export interface ViewState {
  conversationId: string;
  analysisVersion: number;
  brush: [number, number];
  nodeCount: number;
  selectedTopic: string | null;
  layoutMode: "force" | "grid";
  layoutKey: "time" | "degree" | "subtopic";
  threshold: number;
  seed: number;
  selectedNode: string | null;
  contextList: string[];
  pendingQuestion: string;
}

export function initialState(conversationId: string): ViewState {
  return {
    conversationId,
    analysisVersion: 0,
    brush: [0, 0],
    nodeCount: 0,
    selectedTopic: null,
    layoutMode: "force",
    layoutKey: "time",
    threshold: 0.5,
    seed: 0,
    selectedNode: null,
    contextList: [],
    pendingQuestion: "",
  };
}

/** Clamp the brush to [0, nodeCount): views never see an invalid range. */
export function setBrush(state: ViewState, from: number, to: number): void {
  const hi = Math.max(state.nodeCount - 1, 0);
  const clamp = (v: number) => Math.max(0, Math.min(hi, Math.round(v)));
  const lo = clamp(Math.min(from, to));
  state.brush = [lo, Math.max(lo, clamp(Math.max(from, to)))];
}

export function toggleContext(state: ViewState, nodeId: string): void {
  const index = state.contextList.indexOf(nodeId);
  if (index >= 0) {
    state.contextList.splice(index, 1);
  } else {
    state.contextList.push(nodeId);
  }
}

/**
 * Reconcile state with a freshly fetched version: drop context ids that no
 * longer exist and re-clamp the brush. Stale panels refetch around this.
 */
export function onVersionChange(
  state: ViewState,
  version: number,
  nodeIds: Set<string>,
  nodeCount: number,
): void {
  state.analysisVersion = version;
  state.nodeCount = nodeCount;
  state.contextList = state.contextList.filter((id) => nodeIds.has(id));
  if (state.selectedNode !== null && !nodeIds.has(state.selectedNode)) {
    state.selectedNode = null;
  }
  setBrush(state, state.brush[0], state.brush[1]);
}
