"""Topic extraction: summarize nodes, propose latent topics, assign
multi-membership by cosine threshold, and recurse one level into subtopics.

The LLM behind summarization and topic proposal is pluggable. The offline
stub keeps the whole pipeline runnable and snapshot-testable with zero
network: summaries are prefix truncations and topic labels come from a
fixed-seed k-means over the offline embeddings, each label carrying its
cluster's most frequent terms so that label embeddings stay correlated
with member content.
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass
from importlib import resources
from typing import Protocol, Sequence

import httpx
import numpy as np

from .cache import DiskCache, content_hash
from .embedding import DEFAULT_DIMENSION, EmbeddingProvider, cosine, embed, offline_embed
from .errors import ArgumentError, ProviderError, StateError
from .ingest import count_tokens
from .model import (
    DEFAULT_MEMBERSHIP_THRESHOLD,
    Conversation,
    ConversationNode,
    EmbeddingVector,
    Topic,
    primary_of,
)

PROMPT_TEMPLATE_VERSION = 1

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Terms excluded from stub topic labels; question prefixes are dominated
# by interrogatives that would otherwise win every label.
_LABEL_STOPWORDS = frozenset(
    """the and for with that this what how can you are does please about
    from have was were will would could should when where which there
    into between your our its they them been being more most some""".split()
)


@dataclass
class TopicConfig:
    membership_threshold: float = DEFAULT_MEMBERSHIP_THRESHOLD
    min_nodes_for_recursion: int = 5
    max_topics_hint: int = 8
    summary_max_tokens: int = 64

    def __post_init__(self) -> None:
        if not 0.0 < self.membership_threshold < 1.0:
            raise ArgumentError("membership_threshold must lie in (0, 1)")
        if self.min_nodes_for_recursion < 1 or self.max_topics_hint < 1:
            raise ArgumentError("recursion floor and topic hint must be positive")
        if self.summary_max_tokens < 1:
            raise ArgumentError("summary_max_tokens must be positive")


class LlmProvider(Protocol):
    """Chat-model operations the pipeline needs; deterministic or cached."""

    name: str

    def summarize(self, question: str, answer: str, max_tokens: int) -> str: ...

    def propose_topics(
        self, summaries: Sequence[str], max_topics: int, target_cluster_size: int
    ) -> list[str]: ...

    def answer(self, prompt: str) -> str: ...


def truncate_tokens(text: str, max_tokens: int) -> str:
    """Cut text at a token boundary so count_tokens(result) <= max_tokens."""
    from .ingest import CHARS_PER_TOKEN

    limit = max_tokens * CHARS_PER_TOKEN
    return text if len(text) <= limit else text[:limit]


def _kmeans(points: np.ndarray, k: int, seed: int, max_iters: int = 50) -> list[int]:
    """Deterministic Lloyd iteration with farthest-point init.

    The first center is points[seed % n]; subsequent centers maximize the
    squared distance to the nearest chosen center (ties to the smaller
    index). Returns a cluster index per point; clusters may end up empty.
    """
    n = points.shape[0]
    k = max(1, min(k, n))

    center_rows = [seed % n]
    nearest = ((points - points[center_rows[0]]) ** 2).sum(axis=1)
    while len(center_rows) < k:
        candidate = int(np.argmax(nearest))
        if nearest[candidate] == 0.0:
            break
        center_rows.append(candidate)
        nearest = np.minimum(nearest, ((points - points[candidate]) ** 2).sum(axis=1))

    centers = points[center_rows].copy()
    assign: np.ndarray | None = None
    for _ in range(max_iters):
        dist = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assign = np.argmin(dist, axis=1)
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(centers.shape[0]):
            members = points[assign == j]
            if members.shape[0]:
                centers[j] = members.mean(axis=0)
    assert assign is not None
    return [int(a) for a in assign]


def _top_terms(texts: Sequence[str], limit: int = 4) -> list[str]:
    counts: dict[str, int] = {}
    for text in texts:
        for token in _TOKEN_RE.findall(text.lower()):
            if len(token) < 3 or token in _LABEL_STOPWORDS:
                continue
            counts[token] = counts.get(token, 0) + 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [term for term, _ in ranked[:limit]]


class OfflineLlmProvider:
    """Deterministic stand-in for the remote chat model."""

    def __init__(self, dimension: int = DEFAULT_DIMENSION, seed: int = 0):
        self.name = "offline"
        self.dimension = dimension
        self.seed = seed

    def summarize(self, question: str, answer: str, max_tokens: int) -> str:
        return truncate_tokens("Q: " + question, max_tokens)

    def propose_topics(
        self, summaries: Sequence[str], max_topics: int, target_cluster_size: int
    ) -> list[str]:
        k = min(max_topics, math.ceil(len(summaries) / target_cluster_size))
        vectors = np.array([offline_embed(s, self.dimension).values for s in summaries])
        assignment = _kmeans(vectors, k, self.seed)

        labels: list[str] = []
        for cluster in range(max(assignment) + 1):
            members = [summaries[i] for i, a in enumerate(assignment) if a == cluster]
            if not members:
                continue
            terms = _top_terms(members)
            # The label doubles as the topic's embedding input, so it must
            # carry the cluster's vocabulary; a bare index would embed to
            # noise and make every membership arbitrary.
            labels.append(" ".join(terms) if terms else f"cluster-{len(labels)}")
        return labels

    def answer(self, prompt: str) -> str:
        return truncate_tokens("Echo: " + prompt, 64)


class RemoteLlmProvider:
    """OpenAI-compatible chat-completions endpoint with a disk cache.

    Configured from the environment when arguments are omitted:
    CONVOMAP_LLM_ENDPOINT, CONVOMAP_API_KEY, CONVOMAP_LLM_MODEL.
    """

    def __init__(
        self,
        endpoint: str | None = None,
        api_key: str | None = None,
        model: str | None = None,
        cache: DiskCache | None = None,
        timeout: float = 60.0,
    ):
        self.endpoint = endpoint or os.environ.get("CONVOMAP_LLM_ENDPOINT", "")
        self.api_key = api_key or os.environ.get("CONVOMAP_API_KEY", "")
        self.model = model or os.environ.get("CONVOMAP_LLM_MODEL", "gpt-3.5-turbo")
        self.name = f"remote:{self.model}"
        self.cache = cache
        self.timeout = timeout

    def _template(self, filename: str) -> str:
        return resources.files("convomap.prompts").joinpath(filename).read_text("utf-8")

    def _complete(self, prompt: str) -> str:
        key = content_hash(prompt)
        if self.cache is not None:
            hit = self.cache.get(self.name, key)
            if hit is not None:
                return hit
        if not self.endpoint:
            raise ProviderError("remote LLM endpoint is not configured", retryable=False)
        try:
            response = httpx.post(
                self.endpoint,
                json={
                    "model": self.model,
                    "messages": [{"role": "user", "content": prompt}],
                    "temperature": 0,
                },
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=self.timeout,
            )
        except httpx.HTTPError as exc:
            raise ProviderError(f"LLM request failed: {exc}", retryable=True) from exc
        if response.status_code >= 500:
            raise ProviderError(f"LLM server error {response.status_code}", retryable=True)
        if response.status_code >= 400:
            raise ProviderError(f"LLM request rejected {response.status_code}", retryable=False)
        try:
            content = response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderError(f"malformed LLM response: {exc}", retryable=False) from exc
        if self.cache is not None:
            self.cache.put(self.name, key, content)
        return content

    def summarize(self, question: str, answer: str, max_tokens: int) -> str:
        prompt = self._template("summarize_v1.txt").format(
            max_tokens=max_tokens, question=question, answer=answer
        )
        return self._complete(prompt).strip()

    def propose_topics(
        self, summaries: Sequence[str], max_topics: int, target_cluster_size: int
    ) -> list[str]:
        listing = "\n".join(f"- {s}" for s in summaries)
        prompt = self._template("propose_topics_v1.txt").format(
            summaries=listing, max_topics=max_topics
        )
        content = self._complete(prompt)
        match = re.search(r"\[.*\]", content, re.DOTALL)
        if match is None:
            raise ProviderError("LLM did not return a JSON array of labels", retryable=False)
        try:
            labels = json.loads(match.group(0))
        except json.JSONDecodeError as exc:
            raise ProviderError(f"unparseable label array: {exc}", retryable=False) from exc
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise ProviderError("label array must contain strings", retryable=False)
        return labels

    def answer(self, prompt: str) -> str:
        return self._complete(prompt)


def summarize_node(llm: LlmProvider, node: ConversationNode, cfg: TopicConfig) -> str:
    """Summary bounded by cfg.summary_max_tokens; over-length output is cut,
    never an error."""
    if not node.question:
        raise ArgumentError(f"node {node.id!r} has an empty question")
    summary = llm.summarize(node.question, node.answer, cfg.summary_max_tokens)
    if not summary:
        raise ProviderError(f"provider {llm.name} returned an empty summary", retryable=False)
    if count_tokens(summary) > cfg.summary_max_tokens:
        summary = truncate_tokens(summary, cfg.summary_max_tokens)
    return summary


def propose_topics(llm: LlmProvider, summaries: Sequence[str], cfg: TopicConfig) -> list[str]:
    """Between 1 and cfg.max_topics_hint distinct non-empty labels."""
    if not summaries:
        raise ArgumentError("cannot propose topics for zero summaries")
    raw = llm.propose_topics(summaries, cfg.max_topics_hint, cfg.min_nodes_for_recursion)
    labels: list[str] = []
    for label in raw:
        label = label.strip()
        if label and label not in labels:
            labels.append(label)
    if not labels:
        raise ProviderError(f"provider {llm.name} proposed no usable labels", retryable=False)
    return labels[: cfg.max_topics_hint]


def assign_memberships(
    node_vecs: Sequence[EmbeddingVector],
    topic_vecs: Sequence[EmbeddingVector],
    threshold: float,
) -> list[list[tuple[int, float]]]:
    """Per node: every topic at or above the threshold, plus the argmax topic
    unconditionally. Ties on the argmax go to the smaller topic index."""
    if not topic_vecs:
        raise ArgumentError("at least one topic vector is required")
    result: list[list[tuple[int, float]]] = []
    for vec in node_vecs:
        sims = [cosine(vec, tv) for tv in topic_vecs]
        best = min(range(len(sims)), key=lambda t: (-sims[t], t))
        members = [(t, s) for t, s in enumerate(sims) if s >= threshold or t == best]
        result.append(members)
    return result


def _node_text(node: ConversationNode) -> str:
    return node.question + "\n\n" + node.answer


def _prune_empty(
    labels: list[str],
    vecs: list[EmbeddingVector],
    assignments: list[list[tuple[int, float]]],
) -> tuple[list[str], list[EmbeddingVector], list[list[tuple[int, float]]]]:
    """Drop topics no node belongs to; they carry no information and would
    still occupy a timeline row. Pruning cannot orphan a node: an argmax
    topic has that node as a member by construction."""
    referenced = {t for members in assignments for t, _ in members}
    keep = [t for t in range(len(labels)) if t in referenced]
    remap = {old: new for new, old in enumerate(keep)}
    return (
        [labels[t] for t in keep],
        [vecs[t] for t in keep],
        [[(remap[t], s) for t, s in members] for members in assignments],
    )


def build_topic_model(
    conv: Conversation,
    llm: LlmProvider,
    embedder: EmbeddingProvider,
    cfg: TopicConfig | None = None,
) -> Conversation:
    """Run the full pipeline: summaries, embeddings, level-0 topics, and one
    recursion into subtopics for topics with enough members.

    All-or-nothing: the conversation is mutated only after every provider
    call has succeeded, and analysis_version is then incremented by 1.
    """
    cfg = cfg or TopicConfig()
    if not conv.nodes:
        raise StateError(f"conversation {conv.id!r} has no nodes to analyze")

    nodes = sorted(conv.nodes, key=lambda n: n.seq_index)
    summaries = [summarize_node(llm, node, cfg) for node in nodes]
    node_vecs = [embed(embedder, _node_text(node)) for node in nodes]

    labels = propose_topics(llm, summaries, cfg)
    topic_vecs = [embed(embedder, label) for label in labels]
    level0 = assign_memberships(node_vecs, topic_vecs, cfg.membership_threshold)
    labels, topic_vecs, level0 = _prune_empty(labels, topic_vecs, level0)

    topics: list[Topic] = [
        Topic(
            id=f"t{ordinal}",
            label=label,
            ordinal=ordinal,
            level=0,
            parent=None,
            embedding=topic_vecs[ordinal],
        )
        for ordinal, label in enumerate(labels)
    ]
    node_memberships: list[list[tuple[str, float]]] = []
    for node_index, members in enumerate(level0):
        as_ids = [(topics[t].id, s) for t, s in members]
        node_memberships.append(as_ids)
        for t, s in members:
            topics[t].member_similarities[nodes[node_index].id] = s

    # One recursion level: subtopics within each sufficiently large topic,
    # reusing the full-text node embeddings.
    for parent_index in range(len(labels)):
        parent = topics[parent_index]
        member_rows = [
            i for i, members in enumerate(level0) if any(t == parent_index for t, _ in members)
        ]
        if len(member_rows) < cfg.min_nodes_for_recursion:
            continue
        sub_labels = propose_topics(llm, [summaries[i] for i in member_rows], cfg)
        sub_vecs = [embed(embedder, label) for label in sub_labels]
        sub_assign = assign_memberships(
            [node_vecs[i] for i in member_rows], sub_vecs, cfg.membership_threshold
        )
        sub_labels, sub_vecs, sub_assign = _prune_empty(sub_labels, sub_vecs, sub_assign)
        base = len(topics)
        for k, label in enumerate(sub_labels):
            topics.append(
                Topic(
                    id=f"t{base + k}",
                    label=label,
                    ordinal=base + k,
                    level=1,
                    parent=parent.id,
                    embedding=sub_vecs[k],
                )
            )
        for row_pos, members in enumerate(sub_assign):
            node_id = nodes[member_rows[row_pos]].id
            for t, s in members:
                topics[base + t].member_similarities[node_id] = s

    ordinals = {t.id: t.ordinal for t in topics}
    for node, summary, vec, members in zip(nodes, summaries, node_vecs, node_memberships):
        node.summary = summary
        node.embedding = vec
        node.memberships = members
        node.primary_topic = primary_of(members, ordinals)
    conv.nodes = nodes
    conv.topics = topics
    conv.analysis_version += 1
    return conv
