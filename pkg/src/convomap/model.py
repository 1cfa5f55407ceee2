"""Core domain types for conversation analysis.

A conversation is an ordered list of question/answer nodes. Analysis
attaches embeddings, a two-level topic model, and per-node topic
memberships; every other module consumes these types read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable

# Cosine threshold above which a node joins a topic, unless overridden in
# TopicConfig. The argmax topic is always a member regardless of threshold.
DEFAULT_MEMBERSHIP_THRESHOLD = 0.5

# Components are rounded to this many decimals when serialized so that
# store files are byte-stable across platforms and BLAS builds.
FLOAT_DECIMALS = 9


def round_float(x: float) -> float:
    return round(float(x), FLOAT_DECIMALS)


@dataclass(frozen=True)
class EmbeddingVector:
    """L2-normalized fixed-dimension vector; dimension is a per-store constant."""

    values: tuple[float, ...]

    @property
    def dimension(self) -> int:
        return len(self.values)

    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.values))

    def to_list(self) -> list[float]:
        return [round_float(v) for v in self.values]

    @classmethod
    def from_list(cls, values: Iterable[float]) -> "EmbeddingVector":
        return cls(tuple(float(v) for v in values))


@dataclass
class ConversationNode:
    """One question/answer round, the atomic unit of a conversation."""

    id: str
    seq_index: int
    question: str
    answer: str = ""
    summary: str = ""
    token_count: int = 0
    embedding: EmbeddingVector | None = None
    # Level-0 topic memberships as (topic_id, cosine similarity). Subtopic
    # similarities live on the subtopic's member_similarities map so that
    # primary_topic is always a level-0 argmax.
    memberships: list[tuple[str, float]] = field(default_factory=list)
    primary_topic: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "seq_index": self.seq_index,
            "question": self.question,
            "answer": self.answer,
            "summary": self.summary,
            "token_count": self.token_count,
            "embedding": self.embedding.to_list() if self.embedding else None,
            "memberships": [[t, round_float(s)] for t, s in self.memberships],
            "primary_topic": self.primary_topic,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ConversationNode":
        emb = d.get("embedding")
        return cls(
            id=d["id"],
            seq_index=d["seq_index"],
            question=d["question"],
            answer=d.get("answer", ""),
            summary=d.get("summary", ""),
            token_count=d.get("token_count", 0),
            embedding=EmbeddingVector.from_list(emb) if emb is not None else None,
            memberships=[(t, float(s)) for t, s in d.get("memberships", [])],
            primary_topic=d.get("primary_topic"),
        )


@dataclass
class Topic:
    """A labeled cluster of nodes at level 0 (topic) or level 1 (subtopic)."""

    id: str
    label: str
    ordinal: int
    level: int
    parent: str | None
    embedding: EmbeddingVector
    member_similarities: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "label": self.label,
            "ordinal": self.ordinal,
            "level": self.level,
            "parent": self.parent,
            "embedding": self.embedding.to_list(),
            "member_similarities": {
                n: round_float(s) for n, s in sorted(self.member_similarities.items())
            },
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Topic":
        return cls(
            id=d["id"],
            label=d["label"],
            ordinal=d["ordinal"],
            level=d["level"],
            parent=d.get("parent"),
            embedding=EmbeddingVector.from_list(d["embedding"]),
            member_similarities={n: float(s) for n, s in d.get("member_similarities", {}).items()},
        )


@dataclass
class Conversation:
    """A full conversation plus the artifacts of its latest analysis."""

    id: str
    title: str
    nodes: list[ConversationNode] = field(default_factory=list)
    topics: list[Topic] = field(default_factory=list)
    created_at: str = ""
    updated_at: str = ""
    analysis_version: int = 0

    def node_by_id(self, node_id: str) -> ConversationNode | None:
        for node in self.nodes:
            if node.id == node_id:
                return node
        return None

    def topic_by_id(self, topic_id: str) -> Topic | None:
        for topic in self.topics:
            if topic.id == topic_id:
                return topic
        return None

    def level0_topics(self) -> list[Topic]:
        return [t for t in self.topics if t.level == 0]

    def subtopics_of(self, topic_id: str) -> list[Topic]:
        return [t for t in self.topics if t.level == 1 and t.parent == topic_id]

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "title": self.title,
            "nodes": [n.to_dict() for n in self.nodes],
            "topics": [t.to_dict() for t in self.topics],
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "analysis_version": self.analysis_version,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Conversation":
        return cls(
            id=d["id"],
            title=d.get("title", ""),
            nodes=[ConversationNode.from_dict(n) for n in d.get("nodes", [])],
            topics=[Topic.from_dict(t) for t in d.get("topics", [])],
            created_at=d.get("created_at", ""),
            updated_at=d.get("updated_at", ""),
            analysis_version=d.get("analysis_version", 0),
        )


def primary_of(memberships: list[tuple[str, float]], ordinals: dict[str, int]) -> str | None:
    """Argmax-similarity membership; exact ties go to the smaller topic ordinal."""
    if not memberships:
        return None
    best = min(memberships, key=lambda m: (-m[1], ordinals.get(m[0], len(ordinals))))
    return best[0]


def validate_conversation(
    conv: Conversation,
    membership_threshold: float = DEFAULT_MEMBERSHIP_THRESHOLD,
) -> list[str]:
    """Check every type invariant; returns one message per violation.

    Never raises: a malformed conversation yields descriptions, not errors.
    """
    violations: list[str] = []
    ordinals = {t.id: t.ordinal for t in conv.topics}
    topic_ids = set(ordinals)

    seen_seq: set[int] = set()
    seen_node_ids: set[str] = set()
    dimensions: set[int] = set()
    last_index = len(conv.nodes) - 1

    for pos, node in enumerate(conv.nodes):
        label = f"node {node.id!r}"
        if node.id in seen_node_ids:
            violations.append(f"{label}: duplicate node id")
        seen_node_ids.add(node.id)
        if node.seq_index in seen_seq:
            violations.append(f"{label}: duplicate seq_index {node.seq_index}")
        seen_seq.add(node.seq_index)
        if pos > 0 and node.seq_index < conv.nodes[pos - 1].seq_index:
            violations.append(f"{label}: nodes not sorted by seq_index")
        if not node.question:
            violations.append(f"{label}: question is empty")
        if not node.answer and pos != last_index:
            violations.append(f"{label}: empty answer on a non-final node")
        if node.token_count < 0:
            violations.append(f"{label}: negative token_count")
        if node.embedding is not None:
            dimensions.add(node.embedding.dimension)
            if abs(node.embedding.norm() - 1.0) > 1e-6:
                violations.append(f"{label}: embedding is not L2-normalized")
        for topic_id, sim in node.memberships:
            if topic_id not in topic_ids:
                violations.append(f"{label}: membership references unknown topic {topic_id!r}")
            if not -1.0 <= sim <= 1.0:
                violations.append(f"{label}: membership similarity {sim} outside [-1, 1]")
        if node.memberships:
            expected = primary_of(node.memberships, ordinals)
            if node.primary_topic != expected:
                violations.append(
                    f"{label}: primary_topic {node.primary_topic!r} is not the "
                    f"argmax membership {expected!r}"
                )
            for topic_id, sim in node.memberships:
                if topic_id != node.primary_topic and sim < membership_threshold:
                    violations.append(
                        f"{label}: non-primary membership {topic_id!r} below "
                        f"threshold {membership_threshold}"
                    )
        elif node.primary_topic is not None:
            violations.append(f"{label}: primary_topic set without memberships")

    if conv.nodes:
        expected_seq = list(range(len(conv.nodes)))
        actual_seq = sorted(n.seq_index for n in conv.nodes)
        if actual_seq != expected_seq:
            violations.append(
                f"conversation {conv.id!r}: seq_index values not contiguous from 0"
            )

    seen_topic_ids: set[str] = set()
    for topic in conv.topics:
        label = f"topic {topic.id!r}"
        if topic.id in seen_topic_ids:
            violations.append(f"{label}: duplicate topic id")
        seen_topic_ids.add(topic.id)
        if topic.level not in (0, 1):
            violations.append(f"{label}: level {topic.level} outside {{0, 1}}")
        if topic.level == 1 and topic.parent is None:
            violations.append(f"{label}: subtopic without parent")
        if topic.level == 0 and topic.parent is not None:
            violations.append(f"{label}: top-level topic with parent {topic.parent!r}")
        if topic.parent is not None and topic.parent not in topic_ids:
            violations.append(f"{label}: parent {topic.parent!r} does not exist")
        dimensions.add(topic.embedding.dimension)
        if abs(topic.embedding.norm() - 1.0) > 1e-6:
            violations.append(f"{label}: embedding is not L2-normalized")
        for node_id, sim in topic.member_similarities.items():
            if not -1.0 <= sim <= 1.0:
                violations.append(
                    f"{label}: similarity {sim} for node {node_id!r} outside [-1, 1]"
                )
            if node_id not in seen_node_ids:
                violations.append(f"{label}: member node {node_id!r} does not exist")

    if len(dimensions) > 1:
        violations.append(
            f"conversation {conv.id!r}: mixed embedding dimensions {sorted(dimensions)}"
        )
    if conv.analysis_version < 0:
        violations.append(f"conversation {conv.id!r}: negative analysis_version")

    return violations
