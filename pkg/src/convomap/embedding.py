"""Text embedding providers and cosine similarity.

Two providers share one interface: a deterministic offline hash embedder
(the test substitute, no network) and a remote OpenAI-compatible
endpoint. Vectors are always L2-normalized, so cosine reduces to a dot
product.
"""

from __future__ import annotations

import hashlib
import math
import os
import re
from typing import Protocol

import httpx

from .cache import DiskCache, content_hash
from .errors import ArgumentError, ProviderError
from .model import EmbeddingVector

DEFAULT_DIMENSION = 256

# Fixed key for the 64-bit token hash; changing it changes every offline
# vector, so it is part of the on-disk format.
_HASH_KEY = b"convomap-offline-embed-v1"

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def _token_hash(token: str) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=_HASH_KEY).digest()
    return int.from_bytes(digest, "big")


def offline_embed(text: str, dimension: int = DEFAULT_DIMENSION) -> EmbeddingVector:
    """Hash-bucket bag-of-words embedding, deterministic across platforms.

    Lowercases, splits on non-alphanumeric runs, and adds ±count into the
    bucket ``hash(token) % dimension`` with the sign taken from the hash's
    top bit, then L2-normalizes.
    """
    if not text:
        raise ArgumentError("cannot embed empty text")
    tokens = _TOKEN_RE.findall(text.lower())
    if not tokens:
        raise ArgumentError("text has no alphanumeric tokens to embed")

    counts: dict[str, int] = {}
    for token in tokens:
        counts[token] = counts.get(token, 0) + 1

    values = [0.0] * dimension
    for token, count in counts.items():
        h = _token_hash(token)
        sign = 1.0 if (h >> 63) & 1 == 0 else -1.0
        values[h % dimension] += sign * count

    norm = math.sqrt(sum(v * v for v in values))
    return EmbeddingVector(tuple(v / norm for v in values))


class EmbeddingProvider(Protocol):
    """Deterministic text → vector mapping of a fixed dimension."""

    name: str
    dimension: int

    def embed_text(self, text: str) -> EmbeddingVector: ...


class OfflineEmbeddingProvider:
    """Wraps offline_embed behind the provider interface."""

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        self.name = "offline"
        self.dimension = dimension

    def embed_text(self, text: str) -> EmbeddingVector:
        return offline_embed(text, self.dimension)


class RemoteEmbeddingProvider:
    """OpenAI-compatible embeddings endpoint, cached on disk for determinism.

    Configuration comes from the environment when arguments are omitted:
    CONVOMAP_EMBED_ENDPOINT, CONVOMAP_API_KEY, CONVOMAP_EMBED_MODEL.
    """

    def __init__(
        self,
        endpoint: str | None = None,
        api_key: str | None = None,
        model: str | None = None,
        dimension: int = 1536,
        cache: DiskCache | None = None,
        timeout: float = 30.0,
    ):
        self.endpoint = endpoint or os.environ.get("CONVOMAP_EMBED_ENDPOINT", "")
        self.api_key = api_key or os.environ.get("CONVOMAP_API_KEY", "")
        self.model = model or os.environ.get("CONVOMAP_EMBED_MODEL", "text-embedding-3-small")
        self.name = f"remote:{self.model}"
        self.dimension = dimension
        self.cache = cache
        self.timeout = timeout

    def embed_text(self, text: str) -> EmbeddingVector:
        key = content_hash(text)
        if self.cache is not None:
            hit = self.cache.get(self.name, key)
            if hit is not None:
                return EmbeddingVector.from_list(hit)
        if not self.endpoint:
            raise ProviderError("remote embedding endpoint is not configured", retryable=False)
        try:
            response = httpx.post(
                self.endpoint,
                json={"input": [text], "model": self.model},
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=self.timeout,
            )
        except httpx.HTTPError as exc:
            raise ProviderError(f"embedding request failed: {exc}", retryable=True) from exc
        if response.status_code >= 500:
            raise ProviderError(f"embedding server error {response.status_code}", retryable=True)
        if response.status_code >= 400:
            raise ProviderError(f"embedding request rejected {response.status_code}", retryable=False)
        try:
            raw = response.json()["data"][0]["embedding"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderError(f"malformed embedding response: {exc}", retryable=False) from exc

        norm = math.sqrt(sum(float(v) ** 2 for v in raw))
        if norm == 0:
            raise ProviderError("embedding response was a zero vector", retryable=False)
        vector = EmbeddingVector(tuple(float(v) / norm for v in raw))
        if self.cache is not None:
            self.cache.put(self.name, key, vector.to_list())
        return vector


def embed(provider: EmbeddingProvider, text: str) -> EmbeddingVector:
    """Embed text, enforcing the normalization and dimension contracts."""
    if not text:
        raise ArgumentError("cannot embed empty text")
    vector = provider.embed_text(text)
    if vector.dimension != provider.dimension:
        raise ProviderError(
            f"provider {provider.name} returned dimension {vector.dimension}, "
            f"expected {provider.dimension}",
            retryable=False,
        )
    return vector


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity; the plain dot product for normalized inputs."""
    if a.dimension != b.dimension:
        raise ArgumentError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    dot = sum(x * y for x, y in zip(a.values, b.values))
    na = a.norm()
    nb = b.norm()
    if na == 0.0 or nb == 0.0:
        raise ArgumentError("cosine undefined for zero vectors")
    return dot / (na * nb)
