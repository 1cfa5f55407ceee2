from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from convomap.embedding import (
    OfflineEmbeddingProvider,
    cosine,
    embed,
    offline_embed,
)
from convomap.errors import ArgumentError, ProviderError
from convomap.model import EmbeddingVector

from .conftest import unit_vector


class TestOfflineEmbed:
    def test_deterministic(self):
        a = offline_embed("the same text twice")
        b = offline_embed("the same text twice")
        assert a.values == b.values

    def test_empty_text_rejected(self):
        with pytest.raises(ArgumentError):
            offline_embed("")

    def test_no_alphanumeric_tokens_rejected(self):
        with pytest.raises(ArgumentError):
            offline_embed("!!! --- ...")

    def test_normalized_within_tolerance(self):
        for text in ("x", "hello world", "a much longer text with many words in it"):
            vector = offline_embed(text)
            assert abs(vector.norm() - 1.0) < 1e-6

    def test_repeated_token_keeps_direction(self):
        # "a a a" and "a" fill the same single bucket, scaled differently,
        # so normalization makes them identical.
        assert cosine(offline_embed("a a a"), offline_embed("a")) == pytest.approx(1.0)

    def test_disjoint_token_pairs_rarely_similar(self):
        # 1000 seeded pairs over disjoint vocabularies; bucket collisions
        # produce small cosines, never 0.5.
        rng = random.Random(7)
        worst = 0.0
        for _ in range(1000):
            left = " ".join(f"left{rng.randrange(10_000)}" for _ in range(rng.randint(3, 10)))
            right = " ".join(f"right{rng.randrange(10_000)}" for _ in range(rng.randint(3, 10)))
            worst = max(worst, abs(cosine(offline_embed(left), offline_embed(right))))
        assert worst < 0.5

    def test_dimension_parameter_respected(self):
        assert offline_embed("text", dimension=32).dimension == 32


class TestEmbedContract:
    def test_provider_roundtrip_deterministic(self):
        provider = OfflineEmbeddingProvider()
        assert embed(provider, "x").values == embed(provider, "x").values

    def test_empty_text_argument_error(self):
        with pytest.raises(ArgumentError):
            embed(OfflineEmbeddingProvider(), "")

    def test_dimension_mismatch_is_provider_error(self):
        class Lying:
            name = "lying"
            dimension = 16

            def embed_text(self, text):
                return offline_embed(text, 8)

        with pytest.raises(ProviderError):
            embed(Lying(), "text")


class TestCosine:
    def test_identity(self):
        v = offline_embed("some text")
        assert cosine(v, v) == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_basis(self):
        assert cosine(unit_vector(8, 0), unit_vector(8, 1)) == 0.0

    def test_antipodal(self):
        v = offline_embed("some text")
        neg = EmbeddingVector(tuple(-x for x in v.values))
        assert cosine(v, neg) == pytest.approx(-1.0, abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ArgumentError):
            cosine(unit_vector(4, 0), unit_vector(8, 0))

    @given(st.integers(0, 2**32 - 1))
    def test_symmetry_exact(self, seed):
        rng = random.Random(seed)
        a = EmbeddingVector(tuple(rng.uniform(-1, 1) for _ in range(16)))
        b = EmbeddingVector(tuple(rng.uniform(-1, 1) for _ in range(16)))
        assert cosine(a, b) == cosine(b, a)

    @given(st.integers(0, 2**32 - 1))
    def test_range(self, seed):
        rng = random.Random(seed)
        a = EmbeddingVector(tuple(rng.uniform(-1, 1) for _ in range(16)))
        b = EmbeddingVector(tuple(rng.uniform(-1, 1) for _ in range(16)))
        assert -1.0 - 1e-9 <= cosine(a, b) <= 1.0 + 1e-9

    def test_unnormalized_inputs_normalized_by_formula(self):
        a = EmbeddingVector((3.0, 4.0))
        b = EmbeddingVector((3.0, 4.0))
        assert cosine(a, b) == pytest.approx(1.0)
        assert abs(a.norm() - 5.0) < 1e-12  # cosine itself does the normalizing
