"""Acceptance criteria, one test per criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS line per
criterion. Oracles here are coded independently of the paths they check:
permutation enumeration with its own cost arithmetic, a separate tf-idf
formula, and the analytic pair-equilibrium solution.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import time

import numpy as np
import pytest

from convomap.global_layout import (
    TransitionMatrix,
    forgotten_boundary,
    solve_rows_exact,
    solve_rows_heuristic,
    wiggle_cost,
)
from convomap.retrieval import tfidf_keywords, tokenize
from convomap.service import Engine, ServiceConfig
from convomap.topic_layout import (
    ForceParams,
    GraphNode,
    TopicGraph,
    force_layout,
    repulsion_force,
)

from .conftest import SAMPLE_EXPORT
from .test_cli import GOLDEN_DIR, GOLDEN_STEPS, run_cli

QAP_INSTANCES = 200
QAP_SEED = 2024


def qap_instances():
    rng = random.Random(QAP_SEED)
    for _ in range(QAP_INSTANCES):
        n = rng.randint(2, 8)
        matrix = TransitionMatrix.zeros(n)
        for i in range(n):
            for j in range(n):
                if i != j:
                    matrix.a[i][j] = rng.randint(0, 9)
        yield matrix


_PAIR_DISTANCE_CACHE: dict[int, np.ndarray] = {}


def enumeration_minimum(matrix: TransitionMatrix) -> int:
    """Independent oracle: score every permutation with its own (vectorized)
    evaluation of the wiggle objective."""
    n = matrix.n
    if n not in _PAIR_DISTANCE_CACHE:
        perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
        _PAIR_DISTANCE_CACHE[n] = np.abs(perms[:, :, None] - perms[:, None, :])
    distance = _PAIR_DISTANCE_CACHE[n]
    weights = np.array(matrix.a, dtype=np.int64)
    costs = (distance * weights[None, :, :]).sum(axis=(1, 2))
    return int(costs.min())


def test_qap_oracle_equivalence():
    start = time.perf_counter()
    matches = 0
    for matrix in qap_instances():
        exact = solve_rows_exact(matrix)
        if exact.cost == enumeration_minimum(matrix):
            matches += 1
    elapsed = time.perf_counter() - start
    assert matches == QAP_INSTANCES
    assert elapsed < 5.0, f"took {elapsed:.2f}s"
    print(f"\nPASS qap-oracle-equivalence: {matches}/{QAP_INSTANCES} in {elapsed:.2f}s")


def test_qap_constraint_satisfaction():
    checked = 0
    for matrix in qap_instances():
        result = solve_rows_exact(matrix)
        assert sorted(result.rows) == list(range(matrix.n)), "not a bijection"
        reversed_rows = [matrix.n - 1 - r for r in result.rows]
        assert wiggle_cost(matrix, result.rows) == wiggle_cost(matrix, reversed_rows)
        checked += 1
    print(f"\nPASS qap-constraints: bijection + exact reversal symmetry on {checked} instances")


def test_heuristic_quality():
    equal = 0
    for matrix in qap_instances():
        exact = solve_rows_exact(matrix)
        heuristic = solve_rows_heuristic(matrix, seed=0)
        assert heuristic.cost >= exact.cost
        assert heuristic.cost <= wiggle_cost(matrix, list(range(matrix.n)))
        assert heuristic == solve_rows_heuristic(matrix, seed=0), "nondeterministic"
        equal += heuristic.cost == exact.cost
    ratio = equal / QAP_INSTANCES
    assert ratio >= 0.95, f"heuristic matched exact on only {ratio:.1%}"
    print(f"\nPASS heuristic-quality: optimal on {equal}/{QAP_INSTANCES} ({ratio:.1%})")


def test_force_law():
    params = ForceParams()

    # Pairwise repulsion antisymmetry within 1e-9 on 100 random configurations.
    rng = random.Random(99)
    for _ in range(100):
        p_i = (rng.uniform(-100, 100), rng.uniform(-100, 100))
        p_j = (rng.uniform(-100, 100), rng.uniform(-100, 100))
        fij = repulsion_force(p_i, p_j, params)
        fji = repulsion_force(p_j, p_i, params)
        assert abs(fij[0] + fji[0]) <= 1e-9 and abs(fij[1] + fji[1]) <= 1e-9

    # Isolated edge pair with s=1, r=30 converges to (r^2)^(1/3) within 2%.
    pair = TopicGraph(
        topic_id="t",
        nodes=[GraphNode("a", 0), GraphNode("b", 1)],
        edges=[("a", "b", 1.0)],
    )
    result = force_layout(pair, params, seed=0)
    assert result.converged and result.iterations_used <= 500
    (ax, ay), (bx, by) = result.positions["a"], result.positions["b"]
    d = math.hypot(ax - bx, ay - by)
    target = 900.0 ** (1.0 / 3.0)
    rel_err = abs(d - target) / target
    assert rel_err < 0.02

    # 500-node stress graph: every coordinate stays finite.
    nodes = [GraphNode(f"s{i}", i) for i in range(500)]
    edges = [(f"s{i}", f"s{i + 1}", 0.8) for i in range(0, 499, 7)]
    stress = force_layout(TopicGraph(topic_id="s", nodes=nodes, edges=edges), params, seed=0)
    assert all(
        math.isfinite(x) and math.isfinite(y) for x, y in stress.positions.values()
    )
    print(
        f"\nPASS force-law: antisymmetry<=1e-9, pair distance {d:.3f} vs {target:.3f} "
        f"({rel_err:.2%} err, {result.iterations_used} iters), 500-node stress finite"
    )


def test_tfidf_oracle():
    docs = [
        "engine room alpha valve pressure",
        "valve gasket torque spec sheet",
        "alpha torque wrench calibration",
        "engine oil filter spec change",
        "gasket seal oil leak trace",
        "wrench set torque values table",
        "filter mesh alpha grade sample",
        "seal ring spec sheet revision",
        "leak test room pressure hold",
        "pressure valve engine test rig",
    ]
    scope = [0, 2, 4, 6, 8]

    token_lists = [tokenize(d) for d in docs]
    df: dict[str, int] = {}
    for tokens in token_lists:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    tf: dict[str, int] = {}
    for i in scope:
        for term in token_lists[i]:
            tf[term] = tf.get(term, 0) + 1
    oracle = {term: count * math.log(len(docs) / df[term]) for term, count in tf.items()}

    keywords = tfidf_keywords(docs, scope, top_m=100)
    for kw in keywords:
        assert abs(kw.weight - oracle[kw.term]) <= 1e-9

    # A term occurring in every document weighs exactly zero.
    everywhere_docs = [f"omni word{i}" for i in range(10)]
    weights = {kw.term: kw.weight for kw in tfidf_keywords(everywhere_docs, range(10), top_m=100)}
    assert weights.get("omni", 0.0) == 0.0
    print(f"\nPASS tfidf-oracle: {len(keywords)} scoped terms match tf*ln(N/df) to 1e-9; omni-term == 0")


def test_topic_pipeline_determinism_and_coverage(tmp_path):
    def run(label: str) -> tuple[bytes, bytes, dict]:
        engine = Engine(ServiceConfig(store_path=tmp_path / label))
        conv_id = engine.ingest(SAMPLE_EXPORT.read_bytes())
        engine.analyze(conv_id)
        conv = engine.store.load(conv_id)
        topic_model = json.dumps(
            {
                "topics": [t.to_dict() for t in conv.topics],
                "memberships": [n.to_dict() for n in conv.nodes],
            },
            sort_keys=True,
        ).encode()
        geometry = json.dumps(engine.global_geometry(conv_id), sort_keys=True).encode()
        return topic_model, geometry, conv.to_dict()

    model_a, geometry_a, doc = run("first")
    model_b, geometry_b, _ = run("second")
    assert model_a == model_b, "topic model bytes differ between runs"
    assert geometry_a == geometry_b, "geometry bytes differ between runs"

    nodes = doc["nodes"]
    assert len(nodes) == 30
    assert all(node["primary_topic"] for node in nodes)
    multi = [node["id"] for node in nodes if len(node["memberships"]) >= 2]
    assert multi, "bundled fixture must contain a multi-membership node"
    print(
        f"\nPASS topic-pipeline: byte-identical across runs "
        f"({len(model_a)}B model, {len(geometry_a)}B geometry); "
        f"30/30 primary topics; multi-membership nodes: {multi}"
    )


def test_forgotten_line():
    assert forgotten_boundary([100, 200, 300, 400], 600) == 3
    assert forgotten_boundary([10, 10], 1000) == 0
    assert forgotten_boundary([700], 600) == 1

    rng = random.Random(41)
    for _ in range(100):
        counts = [rng.randint(0, 400) for _ in range(rng.randint(0, 50))]
        budgets = sorted(rng.randint(1, 4000) for _ in range(8))
        boundaries = [forgotten_boundary(counts, b) for b in budgets]
        assert boundaries == sorted(boundaries, reverse=True), "not monotone in budget"
    print("\nPASS forgotten-line: truth table exact; monotone over 100 random count vectors")


def test_end_to_end_ask_cycle(tmp_path):
    start = time.perf_counter()
    engine = Engine(ServiceConfig(store_path=tmp_path / "e2e"))
    conv_id = engine.ingest(SAMPLE_EXPORT.read_bytes())
    assert engine.store.load(conv_id).analysis_version == 0

    engine.analyze(conv_id)
    assert engine.store.load(conv_id).analysis_version == 1
    nodes_before = len(engine.store.load(conv_id).nodes)

    asked = engine.ask(
        conv_id,
        "How should the benchmark treat the new baseline?",
        ["n12", "n14"],
    )
    conv = engine.store.load(conv_id)
    assert len(conv.nodes) == nodes_before + 1
    assert conv.analysis_version == 2  # analyze (+1) then ask's re-analysis (+1)
    assert asked["analysis_version"] == 2

    # Over-budget context is rejected with the exact overshoot.
    from convomap.errors import BudgetError
    from convomap.ingest import count_tokens

    question = "x" * 40
    total = count_tokens(question) + sum(n.token_count for n in conv.nodes)
    tight = Engine(ServiceConfig(store_path=tmp_path / "e2e", token_budget=total - 7))
    with pytest.raises(BudgetError) as exc:
        tight.ask(conv_id, question, [n.id for n in conv.nodes])
    assert exc.value.overshoot == 7

    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, f"cycle took {elapsed:.2f}s"

    # Golden CLI outputs are byte-stable.
    store = tmp_path / "golden-store"
    mismatched = []
    for filename, args in GOLDEN_STEPS:
        result = run_cli(store, *args)
        assert result.returncode == 0, result.stderr.decode()
        if result.stdout != (GOLDEN_DIR / filename).read_bytes():
            mismatched.append(filename)
    assert mismatched == []
    print(
        f"\nPASS end-to-end: cycle {elapsed:.2f}s < 10s; node +1; version 0->2; "
        f"overshoot 7 reported; {len(GOLDEN_STEPS)} golden outputs byte-stable"
    )
