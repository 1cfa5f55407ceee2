from __future__ import annotations

import math
from pathlib import Path

import pytest

from convomap.embedding import OfflineEmbeddingProvider
from convomap.model import Conversation, ConversationNode, EmbeddingVector
from convomap.service import Engine, ServiceConfig
from convomap.topics import OfflineLlmProvider

SAMPLE_EXPORT = Path(__file__).resolve().parents[1] / "src" / "convomap" / "data" / "sample_export.json"

FIXED_TIME = "2024-01-01T00:00:00Z"


@pytest.fixture(autouse=True)
def fixed_clock(monkeypatch):
    monkeypatch.setenv("CONVOMAP_FIXED_TIME", FIXED_TIME)


@pytest.fixture
def sample_export_bytes() -> bytes:
    return SAMPLE_EXPORT.read_bytes()


@pytest.fixture
def engine(tmp_path) -> Engine:
    return Engine(ServiceConfig(store_path=tmp_path / "store"))


@pytest.fixture
def offline_embedder() -> OfflineEmbeddingProvider:
    return OfflineEmbeddingProvider()


@pytest.fixture
def offline_llm() -> OfflineLlmProvider:
    return OfflineLlmProvider()


def unit_vector(dimension: int, axis: int) -> EmbeddingVector:
    values = [0.0] * dimension
    values[axis] = 1.0
    return EmbeddingVector(tuple(values))


def blend(dimension: int, axis_a: int, axis_b: int, weight_a: float) -> EmbeddingVector:
    """Unit vector with cosine exactly weight_a against axis_a's basis vector."""
    values = [0.0] * dimension
    values[axis_a] = weight_a
    values[axis_b] = math.sqrt(1.0 - weight_a * weight_a)
    return EmbeddingVector(tuple(values))


def make_node(seq: int, question: str = "q", answer: str = "a", **kwargs) -> ConversationNode:
    return ConversationNode(
        id=kwargs.pop("id", f"n{seq}"),
        seq_index=seq,
        question=question,
        answer=answer,
        **kwargs,
    )


def make_conversation(node_count: int = 3, **kwargs) -> Conversation:
    nodes = [make_node(i, question=f"question {i}", answer=f"answer {i}") for i in range(node_count)]
    return Conversation(id=kwargs.pop("id", "c1"), title="test", nodes=nodes, **kwargs)
