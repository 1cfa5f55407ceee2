from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convomap.embedding import OfflineEmbeddingProvider, offline_embed
from convomap.errors import ArgumentError, BudgetError, NotFoundError, StateError
from convomap.ingest import count_tokens
from convomap.model import Conversation
from convomap.retrieval import (
    assemble_context,
    render_prompt,
    semantic_search,
    term_frequency_highlights,
    tfidf_keywords,
    tokenize,
)

from .conftest import make_node


def embedded_conversation(texts: list[str]) -> Conversation:
    nodes = []
    for i, text in enumerate(texts):
        node = make_node(i, question=text, answer=f"answer about {text}")
        node.embedding = offline_embed(node.question + "\n\n" + node.answer)
        node.token_count = count_tokens(node.question + node.answer)
        nodes.append(node)
    return Conversation(id="c1", title="emb", nodes=nodes, analysis_version=1)


class TestTfidfKeywords:
    def test_term_in_every_document_weighs_zero_and_is_excluded(self):
        docs = ["shared unique1", "shared unique2", "shared unique3"]
        keywords = tfidf_keywords(docs, [0, 1, 2], top_m=10)
        terms = {kw.term for kw in keywords}
        assert "shared" not in terms
        assert {"unique1", "unique2", "unique3"} <= terms

    def test_formula_on_two_documents(self):
        # Same structure as the stated example, with tokenizer-legal 2-char
        # terms: scope {0} of ["aa bb aa", "bb cc"].
        docs = ["aa bb aa", "bb cc"]
        keywords = {kw.term: kw for kw in tfidf_keywords(docs, [0], top_m=10)}
        assert keywords["aa"].weight == pytest.approx(2 * math.log(2), abs=1e-12)
        assert keywords["aa"].df == 1
        assert "bb" not in keywords  # 1 * ln(2/2) = 0, excluded next to positives

    def test_zero_scope_returns_empty(self):
        assert tfidf_keywords(["a doc"], [], top_m=5) == []

    def test_all_zero_weights_still_returned_when_no_positives(self):
        docs = ["same words", "same words"]
        keywords = tfidf_keywords(docs, [0], top_m=5)
        assert keywords and all(kw.weight == 0.0 for kw in keywords)

    def test_ties_break_lexicographically(self):
        docs = ["zz aa", "other thing"]
        keywords = tfidf_keywords(docs, [0], top_m=2)
        assert [kw.term for kw in keywords] == ["aa", "zz"]

    def test_scope_out_of_range_rejected(self):
        with pytest.raises(ArgumentError):
            tfidf_keywords(["doc"], [4], top_m=1)

    def test_empty_docs_rejected(self):
        with pytest.raises(ArgumentError):
            tfidf_keywords([], [0], top_m=1)

    def test_against_independent_oracle(self):
        # Ten-document corpus; oracle computes tf * ln(N/df) with its own
        # tokenizer and bookkeeping.
        docs = [
            "engine room alpha valve",
            "valve gasket torque spec",
            "alpha torque wrench",
            "engine oil filter spec",
            "gasket seal oil leak",
            "wrench set torque values",
            "filter mesh alpha grade",
            "seal ring spec sheet",
            "leak test room pressure",
            "pressure valve engine test",
        ]
        scope = [1, 3, 5, 7]

        def oracle():
            token_lists = [tokenize(d) for d in docs]
            df: dict[str, int] = {}
            for tokens in token_lists:
                for t in set(tokens):
                    df[t] = df.get(t, 0) + 1
            tf: dict[str, int] = {}
            for i in scope:
                for t in token_lists[i]:
                    tf[t] = tf.get(t, 0) + 1
            return {t: c * math.log(len(docs) / df[t]) for t, c in tf.items()}

        expected = oracle()
        for kw in tfidf_keywords(docs, scope, top_m=50):
            assert kw.weight == pytest.approx(expected[kw.term], abs=1e-9)

    @given(st.lists(st.sampled_from(["aa bb", "bb cc", "cc dd aa", "dd"]), min_size=1, max_size=8))
    @settings(max_examples=40)
    def test_everywhere_terms_always_zero(self, docs):
        keywords = tfidf_keywords(docs, range(len(docs)), top_m=100)
        for kw in keywords:
            if kw.df == len(docs):
                assert kw.weight == 0.0


class TestTermFrequencyHighlights:
    def test_absent_term_all_zero(self):
        nodes = [make_node(0, question="alpha", answer="beta"), make_node(1)]
        levels = term_frequency_highlights("missing", nodes)
        assert set(levels.values()) == {0}

    def test_quantization_bounds(self):
        nodes = [
            make_node(0, question="w", answer=""),
            make_node(1, question="w w", answer=""),
            make_node(2, question="w w w", answer=""),
        ]
        levels = term_frequency_highlights("w", nodes)
        assert [levels[f"n{i}"] for i in range(3)] == [1, 2, 3]

    def test_single_node_is_its_own_maximum(self):
        nodes = [make_node(0, question="w w w w w", answer="")]
        assert term_frequency_highlights("w", nodes) == {"n0": 3}

    def test_empty_term_rejected(self):
        with pytest.raises(ArgumentError):
            term_frequency_highlights("", [])

    def test_monotone_in_count(self):
        nodes = [make_node(i, question="w " * i if i else "x", answer="") for i in range(8)]
        levels = term_frequency_highlights("w", nodes)
        counts = {f"n{i}": i for i in range(8)}
        pairs = sorted(counts.items(), key=lambda kv: kv[1])
        for (id_low, _), (id_high, _) in zip(pairs, pairs[1:]):
            assert levels[id_low] <= levels[id_high]


class TestSemanticSearch:
    def test_identical_text_is_top_hit_with_score_one(self):
        conv = embedded_conversation(["reactor coolant loop", "ballot quorum ledger", "glacier moraine"])
        target = conv.nodes[1]
        query = target.question + "\n\n" + target.answer
        hits = semantic_search(conv, OfflineEmbeddingProvider(), query)
        assert hits[0].node_id == target.id
        assert hits[0].score == pytest.approx(1.0, abs=1e-9)
        assert hits[0].highlight_level == 3

    def test_min_score_above_one_gives_empty(self):
        conv = embedded_conversation(["alpha", "beta"])
        assert semantic_search(conv, OfflineEmbeddingProvider(), "alpha", min_score=1.1) == []

    def test_top_k_caps_results(self):
        conv = embedded_conversation([f"word{i} common" for i in range(10)])
        hits = semantic_search(conv, OfflineEmbeddingProvider(), "common word0", top_k=3, min_score=-1.0)
        assert len(hits) == 3

    def test_no_cap_when_top_k_none(self):
        conv = embedded_conversation([f"word{i} common" for i in range(10)])
        hits = semantic_search(conv, OfflineEmbeddingProvider(), "common", top_k=None, min_score=-1.0)
        assert len(hits) == 10

    def test_empty_query_rejected(self):
        conv = embedded_conversation(["alpha"])
        with pytest.raises(ArgumentError):
            semantic_search(conv, OfflineEmbeddingProvider(), "")

    def test_unembedded_conversation_rejected(self):
        conv = Conversation(id="c1", title="raw", nodes=[make_node(0)])
        with pytest.raises(StateError):
            semantic_search(conv, OfflineEmbeddingProvider(), "query")

    def test_ordering_and_uniqueness(self):
        conv = embedded_conversation([f"topic{i % 3} filler{i}" for i in range(9)])
        hits = semantic_search(conv, OfflineEmbeddingProvider(), "topic0 topic1", top_k=None, min_score=-1.0)
        scores = [h.score for h in hits]
        assert scores == sorted(scores, reverse=True)
        assert len({h.node_id for h in hits}) == len(hits)
        levels = [h.highlight_level for h in hits]
        assert levels == sorted(levels, reverse=True)
        assert set(levels) <= {1, 2, 3}


class TestAssembleContext:
    def test_question_only_bundle(self):
        conv = embedded_conversation(["alpha"])
        bundle = assemble_context(conv, "just asking", [], budget=100)
        assert bundle.context_node_ids == ()
        assert bundle.total_tokens == count_tokens("just asking")

    def test_exact_budget_boundary_succeeds(self):
        conv = embedded_conversation(["alpha"])
        node = conv.nodes[0]
        question = "q" * 8  # 2 tokens
        budget = count_tokens(question) + node.token_count
        bundle = assemble_context(conv, question, [node.id], budget=budget)
        assert bundle.total_tokens == budget

    def test_over_budget_reports_overshoot(self):
        conv = embedded_conversation(["alpha"])
        node = conv.nodes[0]
        question = "q" * 8
        budget = count_tokens(question) + node.token_count - 1
        with pytest.raises(BudgetError) as exc:
            assemble_context(conv, question, [node.id], budget=budget)
        assert exc.value.overshoot == 1

    def test_duplicates_deduplicated(self):
        conv = embedded_conversation(["alpha", "beta"])
        bundle = assemble_context(conv, "q", ["n1", "n1", "n0"], budget=10_000)
        assert bundle.context_node_ids == ("n0", "n1")

    def test_nodes_ordered_by_seq_index(self):
        conv = embedded_conversation(["alpha", "beta", "gamma"])
        bundle = assemble_context(conv, "q", ["n2", "n0"], budget=10_000)
        assert bundle.context_node_ids == ("n0", "n2")

    def test_unknown_id_not_found(self):
        conv = embedded_conversation(["alpha"])
        with pytest.raises(NotFoundError):
            assemble_context(conv, "q", ["n9"], budget=100)


class TestRenderPrompt:
    def test_empty_context_template(self):
        conv = embedded_conversation(["alpha"])
        bundle = assemble_context(conv, "what now", [], budget=100)
        assert render_prompt(conv, bundle) == (
            "Context from the earlier conversation:\n\nNew question: what now"
        )

    def test_two_nodes_in_sequence_order(self):
        conv = embedded_conversation(["alpha", "beta"])
        bundle = assemble_context(conv, "next", ["n1", "n0"], budget=10_000)
        prompt = render_prompt(conv, bundle)
        assert prompt == (
            "Context from the earlier conversation:\n\n"
            f"Q: {conv.nodes[0].question}\nA: {conv.nodes[0].answer}\n\n"
            f"Q: {conv.nodes[1].question}\nA: {conv.nodes[1].answer}\n\n"
            "---\n\n"
            "New question: next"
        )

    def test_byte_stable(self):
        conv = embedded_conversation(["alpha", "beta"])
        bundle = assemble_context(conv, "next", ["n0"], budget=10_000)
        assert render_prompt(conv, bundle).encode() == render_prompt(conv, bundle).encode()
