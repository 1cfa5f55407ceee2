"""TF-IDF keywords, semantic search with highlight levels, and context
bundle assembly for asking with history."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .embedding import EmbeddingProvider, cosine, embed
from .errors import ArgumentError, BudgetError, NotFoundError, StateError
from .ingest import count_tokens
from .model import Conversation, ConversationNode

# Bumped whenever render_prompt's template changes; recorded in store
# metadata so cached answers can be tied to the template that made them.
CONTEXT_PROMPT_VERSION = 1

PROMPT_HEADER = "Context from the earlier conversation:"

DEFAULT_TOP_K = 5
DEFAULT_MIN_SCORE = 0.3

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Small fixed English stoplist; callers can pass their own.
DEFAULT_STOPLIST = frozenset(
    """a an and are as at be but by for from had has have i if in into is
    it its of on or our so that the their them then there these they this
    to was we were what when which who will with you your""".split()
)


def tokenize(text: str, stoplist: frozenset[str] = DEFAULT_STOPLIST) -> list[str]:
    """Lowercase alphanumeric tokens, at least two characters, minus stops."""
    return [
        token
        for token in _TOKEN_RE.findall(text.lower())
        if len(token) >= 2 and token not in stoplist
    ]


@dataclass(frozen=True)
class KeywordWeight:
    term: str
    weight: float  # tf * ln(N / df); zero iff the term is in every document
    df: int


@dataclass(frozen=True)
class SearchHit:
    node_id: str
    score: float
    highlight_level: int  # 0 (none) to 3 (strongest)


@dataclass(frozen=True)
class ContextBundle:
    question: str
    context_node_ids: tuple[str, ...]
    total_tokens: int
    budget: int


def tfidf_keywords(
    docs: Sequence[str],
    scope: Iterable[int],
    top_m: int,
    stoplist: frozenset[str] = DEFAULT_STOPLIST,
) -> list[KeywordWeight]:
    """Top keywords of the scoped documents weighted by tf * ln(N/df).

    tf counts occurrences across the scoped docs combined; df counts the
    documents (out of all of them) containing the term, so a term present
    everywhere weighs exactly zero. Ties break lexicographically.
    """
    if not docs:
        raise ArgumentError("tfidf_keywords requires at least one document")
    if top_m < 1:
        raise ArgumentError("top_m must be at least 1")
    scope_indices = sorted(set(scope))
    for index in scope_indices:
        if not 0 <= index < len(docs):
            raise ArgumentError(f"scope index {index} out of range")
    if not scope_indices:
        return []

    tokenized = [tokenize(doc, stoplist) for doc in docs]
    df: dict[str, int] = {}
    for tokens in tokenized:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1

    tf: dict[str, int] = {}
    for index in scope_indices:
        for term in tokenized[index]:
            tf[term] = tf.get(term, 0) + 1

    n_docs = len(docs)
    weights = [
        KeywordWeight(term=term, weight=count * math.log(n_docs / df[term]), df=df[term])
        for term, count in tf.items()
    ]
    weights.sort(key=lambda kw: (-kw.weight, kw.term))
    positive = [kw for kw in weights if kw.weight > 0]
    return (positive or weights)[:top_m]


def _count_term(term: str, text: str) -> int:
    return sum(1 for token in _TOKEN_RE.findall(text.lower()) if token == term)


def quantize_thirds(value: int | float, maximum: int | float) -> int:
    """0 for absent; 1..3 by thirds of the scope maximum."""
    if value <= 0 or maximum <= 0:
        return 0
    if value * 3 <= maximum:
        return 1
    if value * 3 <= 2 * maximum:
        return 2
    return 3


def term_frequency_highlights(
    term: str, nodes: Sequence[ConversationNode]
) -> dict[str, int]:
    """Highlight level per node for one hovered word, quantized by thirds of
    the scope's maximum count."""
    if not term:
        raise ArgumentError("term must be non-empty")
    needle = term.lower()
    counts = {node.id: _count_term(needle, node.question + "\n" + node.answer) for node in nodes}
    maximum = max(counts.values(), default=0)
    return {node_id: quantize_thirds(count, maximum) for node_id, count in counts.items()}


def semantic_search(
    conv: Conversation,
    provider: EmbeddingProvider,
    query: str,
    top_k: int | None = DEFAULT_TOP_K,
    min_score: float = DEFAULT_MIN_SCORE,
) -> list[SearchHit]:
    """Embed the query and rank nodes by cosine, keeping scores >= min_score.

    top_k=None disables the cap (question-time highlighting wants every
    node crossing the threshold). Highlight levels are per-rank thirds of
    the returned hits: the top third gets 3, the bottom third gets 1.
    """
    if not query:
        raise ArgumentError("query must be non-empty")
    if top_k is not None and top_k < 1:
        raise ArgumentError("top_k must be at least 1")
    if any(node.embedding is None for node in conv.nodes):
        raise StateError(f"conversation {conv.id!r} has not been embedded")

    query_vec = embed(provider, query)
    scored = sorted(
        ((cosine(node.embedding, query_vec), node) for node in conv.nodes),  # type: ignore[arg-type]
        key=lambda pair: (-pair[0], pair[1].seq_index),
    )
    kept = [(score, node) for score, node in scored if score >= min_score]
    if top_k is not None:
        kept = kept[:top_k]
    total = len(kept)
    return [
        SearchHit(node_id=node.id, score=score, highlight_level=3 - (3 * rank) // total)
        for rank, (score, node) in enumerate(kept)
    ]


def assemble_context(
    conv: Conversation,
    question: str,
    selected_node_ids: Iterable[str],
    budget: int,
) -> ContextBundle:
    """Order the selected nodes by time and account tokens against the budget."""
    if not question:
        raise ArgumentError("question must be non-empty")
    if budget < 1:
        raise ArgumentError("budget must be positive")

    selected: dict[str, ConversationNode] = {}
    for node_id in selected_node_ids:
        if node_id in selected:
            continue
        node = conv.node_by_id(node_id)
        if node is None:
            raise NotFoundError(f"node {node_id!r} does not exist")
        selected[node_id] = node

    ordered = sorted(selected.values(), key=lambda n: n.seq_index)
    total = count_tokens(question) + sum(node.token_count for node in ordered)
    if total > budget:
        raise BudgetError(total_tokens=total, budget=budget)
    return ContextBundle(
        question=question,
        context_node_ids=tuple(node.id for node in ordered),
        total_tokens=total,
        budget=budget,
    )


def render_prompt(conv: Conversation, bundle: ContextBundle) -> str:
    """Byte-stable prompt: header, Q/A blocks in timeline order, separator,
    then the new question."""
    blocks = []
    for node_id in bundle.context_node_ids:
        node = conv.node_by_id(node_id)
        if node is None:
            raise NotFoundError(f"node {node_id!r} does not exist")
        blocks.append(f"Q: {node.question}\nA: {node.answer}")
    if blocks:
        body = "\n\n".join(blocks)
        return f"{PROMPT_HEADER}\n\n{body}\n\n---\n\nNew question: {bundle.question}"
    return f"{PROMPT_HEADER}\n\nNew question: {bundle.question}"
