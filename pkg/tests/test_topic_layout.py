from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convomap.errors import ArgumentError, NotFoundError
from convomap.model import Conversation, Topic
from convomap.topic_layout import (
    ForceParams,
    GraphNode,
    TopicGraph,
    attraction_force,
    build_topic_graph,
    compute_forces,
    force_layout,
    force_step,
    grid_layout,
    layout_to_dict,
    repulsion_force,
    seed_positions,
)

from .conftest import make_node, unit_vector

PAIR_EQUILIBRIUM = 900.0 ** (1.0 / 3.0)  # d^3 = r^2 / s with r=30, s=1


def pair_graph(similarity: float = 1.0) -> TopicGraph:
    return TopicGraph(
        topic_id="t",
        nodes=[GraphNode("a", 0), GraphNode("b", 1)],
        edges=[("a", "b", similarity)],
    )


def ring_graph(count: int, similarity: float = 0.8, link_every: int = 1) -> TopicGraph:
    nodes = [GraphNode(f"s{i}", i) for i in range(count)]
    edges = [
        (f"s{i}", f"s{i + 1}", similarity)
        for i in range(0, count - 1, link_every)
    ]
    return TopicGraph(topic_id="ring", nodes=nodes, edges=edges)


def distance(positions, a, b) -> float:
    (ax, ay), (bx, by) = positions[a], positions[b]
    return math.hypot(ax - bx, ay - by)


class TestBuildTopicGraph:
    def make_analyzed(self) -> Conversation:
        e0, e1 = unit_vector(4, 0), unit_vector(4, 1)
        nodes = [
            make_node(0, memberships=[("t0", 0.9)], primary_topic="t0", embedding=e0),
            make_node(1, memberships=[("t0", 0.8)], primary_topic="t0", embedding=e0),
            make_node(2, memberships=[("t0", 0.7)], primary_topic="t0", embedding=e1),
        ]
        topic = Topic(
            id="t0",
            label="topic",
            ordinal=0,
            level=0,
            parent=None,
            embedding=e0,
            member_similarities={"n0": 0.9, "n1": 0.8, "n2": 0.7},
        )
        return Conversation(id="c1", title="g", nodes=nodes, topics=[topic], analysis_version=1)

    def test_threshold_above_max_cosine_gives_no_edges(self):
        graph = build_topic_graph(self.make_analyzed(), "t0", 1.01)
        assert graph.edges == []

    def test_threshold_minus_one_gives_complete_graph(self):
        graph = build_topic_graph(self.make_analyzed(), "t0", -1.0)
        assert len(graph.edges) == 3  # C(3,2)

    def test_identical_embeddings_edge_similarity_one(self):
        graph = build_topic_graph(self.make_analyzed(), "t0", 0.9)
        assert ("n0", "n1", 1.0) in [(a, b, round(s, 9)) for a, b, s in graph.edges]

    def test_unknown_topic_not_found(self):
        with pytest.raises(NotFoundError):
            build_topic_graph(self.make_analyzed(), "missing", 0.5)

    def test_ring_data_populated(self):
        graph = build_topic_graph(self.make_analyzed(), "t0", 0.5)
        assert graph.nodes[0].outer_ring == [("t0", 0, 0.9)]


class TestForceStep:
    def test_single_node_at_center_does_not_move(self):
        graph = TopicGraph(topic_id="t", nodes=[GraphNode("a", 0)], edges=[])
        positions, velocities, disp = force_step({"a": (0.0, 0.0)}, graph, ForceParams())
        assert positions["a"] == (0.0, 0.0)
        assert disp == 0.0

    def test_two_nodes_newton_pair_symmetry(self):
        graph = TopicGraph(
            topic_id="t", nodes=[GraphNode("a", 0), GraphNode("b", 1)], edges=[]
        )
        start = {"a": (-10.0, 0.0), "b": (10.0, 0.0)}
        positions, _, _ = force_step(start, graph, ForceParams())
        moved_a = positions["a"][0] - start["a"][0]
        moved_b = positions["b"][0] - start["b"][0]
        assert moved_a == pytest.approx(-moved_b, abs=1e-12)
        assert positions["a"][1] == pytest.approx(0.0, abs=1e-12)

    def test_repulsion_antisymmetry_random_configurations(self):
        rng = random.Random(5)
        params = ForceParams()
        for _ in range(100):
            p_i = (rng.uniform(-50, 50), rng.uniform(-50, 50))
            p_j = (rng.uniform(-50, 50), rng.uniform(-50, 50))
            if p_i == p_j:
                continue
            fij = repulsion_force(p_i, p_j, params)
            fji = repulsion_force(p_j, p_i, params)
            assert abs(fij[0] + fji[0]) < 1e-9
            assert abs(fij[1] + fji[1]) < 1e-9

    def test_net_force_zero_without_centering(self):
        params = ForceParams(centering_strength=1e-12)
        graph = ring_graph(12, similarity=0.9)
        positions = seed_positions(graph, params, seed=3)
        forces = compute_forces(positions, graph, params)
        total_x = sum(f[0] for f in forces.values())
        total_y = sum(f[1] for f in forces.values())
        assert abs(total_x) < 1e-6
        assert abs(total_y) < 1e-6

    def test_attraction_points_toward_neighbor(self):
        params = ForceParams()
        fx, fy = attraction_force((0.0, 0.0), (10.0, 0.0), 1.0, params)
        assert fx > 0 and fy == 0.0
        # magnitude k*s*d^2 = 0.05 * 100
        assert math.hypot(fx, fy) == pytest.approx(5.0)

    def test_coincident_points_jittered_not_crash(self):
        graph = ring_graph(3)
        positions = {"s0": (1.0, 1.0), "s1": (1.0, 1.0), "s2": (5.0, 5.0)}
        new_positions, _, _ = force_step(positions, graph, ForceParams())
        assert len(set(new_positions.values())) == 3

    def test_non_finite_positions_rejected(self):
        graph = ring_graph(2)
        with pytest.raises(ArgumentError):
            force_step({"s0": (float("nan"), 0.0), "s1": (1.0, 1.0)}, graph, ForceParams())


class TestForceLayout:
    def test_single_node_graph(self):
        graph = TopicGraph(topic_id="t", nodes=[GraphNode("a", 0)], edges=[])
        result = force_layout(graph, ForceParams(), seed=0)
        assert result.positions["a"] == (0.0, 0.0)
        assert result.converged
        assert result.iterations_used <= 2

    def test_deterministic_for_seed(self):
        graph = ring_graph(8)
        first = force_layout(graph, ForceParams(), seed=9)
        second = force_layout(graph, ForceParams(), seed=9)
        assert first == second

    def test_pair_equilibrium_within_two_percent(self):
        result = force_layout(pair_graph(1.0), ForceParams(), seed=0)
        assert result.converged
        assert result.iterations_used <= 500
        d = distance(result.positions, "a", "b")
        assert abs(d - PAIR_EQUILIBRIUM) / PAIR_EQUILIBRIUM < 0.02

    @pytest.mark.parametrize("similarity", [0.5, 0.75, 1.0])
    def test_equilibrium_law_for_similarities(self, similarity):
        # |d^3 s - r^2| / r^2 < 0.05 for an isolated connected pair
        result = force_layout(pair_graph(similarity), ForceParams(), seed=0)
        d = distance(result.positions, "a", "b")
        assert abs(d**3 * similarity - 900.0) / 900.0 < 0.05

    def test_empty_graph_rejected(self):
        with pytest.raises(ArgumentError):
            force_layout(TopicGraph(topic_id="t", nodes=[], edges=[]), ForceParams())

    def test_all_positions_finite_on_mid_sized_graph(self):
        graph = ring_graph(60, link_every=3)
        result = force_layout(graph, ForceParams(max_iters=120), seed=1)
        for x, y in result.positions.values():
            assert math.isfinite(x) and math.isfinite(y)


class TestGridLayout:
    def test_single_node_at_origin(self):
        graph = TopicGraph(topic_id="t", nodes=[GraphNode("a", 3)], edges=[])
        result = grid_layout(graph)
        assert result.positions["a"] == (0.0, 0.0)
        assert result.mode == "grid"
        assert result.converged

    def test_four_nodes_time_order_reading_order(self):
        nodes = [GraphNode(f"n{i}", i) for i in (2, 0, 3, 1)]
        graph = TopicGraph(topic_id="t", nodes=nodes, edges=[])
        result = grid_layout(graph, order_key="time", params=ForceParams(r=0.5))
        # 2x2 grid, spacing 1, centered: reading order is seq order.
        assert result.positions["n0"] == (-0.5, -0.5)
        assert result.positions["n1"] == (0.5, -0.5)
        assert result.positions["n2"] == (-0.5, 0.5)
        assert result.positions["n3"] == (0.5, 0.5)

    def test_degree_order_ranks_by_edge_count(self):
        # Degrees: n0=1, n1=2, n2=1 (a simple graph needs an even degree
        # sum). Rank: n1 first, then the n0/n2 tie resolves by seq_index.
        nodes = [GraphNode("n0", 0), GraphNode("n1", 1), GraphNode("n2", 2)]
        edges = [("n1", "n2", 0.9), ("n1", "n0", 0.9)]
        graph = TopicGraph(topic_id="t", nodes=nodes, edges=edges)
        result = grid_layout(graph, order_key="degree", params=ForceParams(r=0.5))
        ranked = sorted(result.positions.items(), key=lambda kv: (kv[1][1], kv[1][0]))
        assert [node_id for node_id, _ in ranked] == ["n1", "n0", "n2"]

    def test_subtopic_order_groups_by_argmax_ordinal(self):
        nodes = [
            GraphNode("n0", 0, inner_ring=[("t9", 9, 0.9)]),
            GraphNode("n1", 1, inner_ring=[("t8", 8, 0.9)]),
            GraphNode("n2", 2, inner_ring=[]),
        ]
        graph = TopicGraph(topic_id="t", nodes=nodes, edges=[])
        result = grid_layout(graph, order_key="subtopic", params=ForceParams(r=0.5))
        ranked = sorted(result.positions.items(), key=lambda kv: (kv[1][1], kv[1][0]))
        # group ordinal 8 first, then 9, ringless last
        assert [node_id for node_id, _ in ranked] == ["n1", "n0", "n2"]

    def test_unknown_order_key_rejected(self):
        with pytest.raises(ArgumentError):
            grid_layout(ring_graph(2), order_key="alphabetical")

    @given(st.integers(1, 40))
    @settings(max_examples=30)
    def test_positions_form_bijection_onto_grid_cells(self, count):
        graph = ring_graph(count)
        result = grid_layout(graph)
        assert len(set(result.positions.values())) == count
        cols = math.ceil(math.sqrt(count))
        spacing = 2.0 * ForceParams().r
        for x, y in result.positions.values():
            col = x / spacing + (cols - 1) / 2.0
            assert col == pytest.approx(round(col))


class TestLayoutSerialization:
    def test_wire_format_shape(self):
        nodes = [
            GraphNode("n0", 0, outer_ring=[("t0", 0, 0.8)], inner_ring=[("t5", 5, 0.7)]),
            GraphNode("n1", 1, outer_ring=[("t0", 0, 0.6)]),
        ]
        graph = TopicGraph(topic_id="t0", nodes=nodes, edges=[("n0", "n1", 0.65)])
        doc = layout_to_dict(graph, grid_layout(graph))
        assert doc["mode"] == "grid"
        assert doc["converged"] is True
        assert doc["iterations"] == 0
        assert doc["nodes"][0]["outer_ring"] == [{"topic": "t0", "s": 0.8}]
        assert doc["nodes"][0]["inner_ring"] == [{"subtopic": "t5", "s": 0.7}]
        assert doc["edges"] == [{"a": "n0", "b": "n1", "s": 0.65}]
