"""Per-topic graph layouts: force-directed simulation or orthogonal grid.

Nodes of one topic form a graph whose edges are pairs of members with
cosine similarity at or above a caller-chosen threshold. The force
layout balances inverse-distance repulsion between every pair against a
spring along each edge whose pull grows with similarity and distance
squared, so an isolated connected pair settles where k*r^2/d equals
k*s*d^2, i.e. at d = (r^2/s)^(1/3).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .embedding import cosine
from .errors import ArgumentError, NotFoundError, StateError
from .model import Conversation, round_float


@dataclass
class ForceParams:
    k: float = 0.05                 # force scaling factor
    r: float = 30.0                 # desired separation, length units
    damping: float = 0.9
    dt: float = 1.0
    max_iters: int = 500
    epsilon: float = 0.01           # stop when max displacement drops below
    center: tuple[float, float] = (0.0, 0.0)
    centering_strength: float = 0.01
    # Stabilization. The raw integrator diverges when seeded far from
    # equilibrium (attraction grows with d^2, so a dt=1 step overshoots by
    # orders of magnitude). Steps are capped at max_step, and forces are
    # scaled by an annealing factor that decays to alpha_min and stays
    # there. Neither changes any fixed point: scaled forces vanish exactly
    # where unscaled ones do.
    max_step: float = 5.0
    alpha_decay: float = 0.98
    alpha_min: float = 0.3
    # Convergence requires this many consecutive sub-epsilon steps; a single
    # tiny step also happens at an oscillation's turning point.
    settle_steps: int = 5

    def __post_init__(self) -> None:
        if min(self.k, self.r, self.dt, self.epsilon, self.max_step) <= 0:
            raise ArgumentError("force parameters must be positive")
        if not 0.0 < self.damping < 1.0:
            raise ArgumentError("damping must lie in (0, 1)")
        if not 0.0 < self.alpha_decay <= 1.0 or not 0.0 < self.alpha_min <= 1.0:
            raise ArgumentError("alpha_decay and alpha_min must lie in (0, 1]")
        if self.max_iters < 1:
            raise ArgumentError("max_iters must be positive")


@dataclass
class GraphNode:
    id: str
    seq_index: int
    # (topic_id, topic_ordinal, similarity); outer sectors are level-0
    # topics, inner sectors the selected topic's subtopics.
    outer_ring: list[tuple[str, int, float]] = field(default_factory=list)
    inner_ring: list[tuple[str, int, float]] = field(default_factory=list)


@dataclass
class TopicGraph:
    topic_id: str
    nodes: list[GraphNode]
    edges: list[tuple[str, str, float]]
    similarities: dict[tuple[str, str], float] = field(default_factory=dict)

    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    def degree(self, node_id: str) -> int:
        return sum(1 for a, b, _ in self.edges if node_id in (a, b))


@dataclass
class LayoutResult:
    positions: dict[str, tuple[float, float]]
    iterations_used: int
    converged: bool
    mode: str  # "force" | "grid"


def build_topic_graph(conv: Conversation, topic_id: str, edge_threshold: float) -> TopicGraph:
    """Graph over a topic's member nodes with similarity-filtered edges and
    nested-ring sector data."""
    topic = conv.topic_by_id(topic_id)
    if topic is None:
        raise NotFoundError(f"topic {topic_id!r} does not exist")
    ordinals = {t.id: t.ordinal for t in conv.topics}
    subtopics = conv.subtopics_of(topic_id)

    members = sorted(
        (n for n in conv.nodes if n.id in topic.member_similarities),
        key=lambda n: n.seq_index,
    )
    if any(n.embedding is None for n in members):
        raise StateError(f"topic {topic_id!r} members are missing embeddings")

    nodes: list[GraphNode] = []
    for node in members:
        outer = sorted(
            ((tid, ordinals[tid], s) for tid, s in node.memberships),
            key=lambda entry: entry[1],
        )
        inner = [
            (sub.id, sub.ordinal, sub.member_similarities[node.id])
            for sub in sorted(subtopics, key=lambda t: t.ordinal)
            if node.id in sub.member_similarities
        ]
        nodes.append(
            GraphNode(id=node.id, seq_index=node.seq_index, outer_ring=outer, inner_ring=inner)
        )

    similarities: dict[tuple[str, str], float] = {}
    edges: list[tuple[str, str, float]] = []
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            a, b = members[i], members[j]
            s = cosine(a.embedding, b.embedding)  # type: ignore[arg-type]
            similarities[(a.id, b.id)] = s
            if s >= edge_threshold:
                edges.append((a.id, b.id, s))

    return TopicGraph(topic_id=topic_id, nodes=nodes, edges=edges, similarities=similarities)


def repulsion_force(
    p_i: tuple[float, float], p_j: tuple[float, float], params: ForceParams
) -> tuple[float, float]:
    """Contribution of node j to node i: k * r^2 / d^2 scaled along p_i - p_j."""
    dx = p_i[0] - p_j[0]
    dy = p_i[1] - p_j[1]
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        raise ArgumentError("repulsion undefined for coincident points; jitter first")
    scale = params.k * params.r * params.r / d2
    return (scale * dx, scale * dy)


def attraction_force(
    p_i: tuple[float, float],
    p_j: tuple[float, float],
    similarity: float,
    params: ForceParams,
) -> tuple[float, float]:
    """Edge spring on node i pulling toward j with magnitude k * s * d^2."""
    dx = p_j[0] - p_i[0]
    dy = p_j[1] - p_i[1]
    d = math.sqrt(dx * dx + dy * dy)
    scale = params.k * similarity * d
    return (scale * dx, scale * dy)


def _hash_unit(tag: str) -> tuple[float, float]:
    digest = hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest()
    angle = 2.0 * math.pi * int.from_bytes(digest, "big") / 2**64
    return (math.cos(angle), math.sin(angle))


def _jitter_coincident(order: list[str], positions: dict[str, tuple[float, float]]) -> None:
    groups: dict[tuple[float, float], list[str]] = {}
    for node_id in order:
        groups.setdefault(positions[node_id], []).append(node_id)
    for coords, ids in groups.items():
        if len(ids) < 2:
            continue
        for index, node_id in enumerate(ids):
            ux, uy = _hash_unit(f"jitter:{index}:{node_id}")
            positions[node_id] = (coords[0] + 1e-3 * ux, coords[1] + 1e-3 * uy)


def compute_forces(
    positions: dict[str, tuple[float, float]],
    graph: TopicGraph,
    params: ForceParams,
) -> dict[str, tuple[float, float]]:
    """Net force per node: all-pairs repulsion, edge springs, centering.

    Positions must be finite and pairwise distinct (see _jitter_coincident).
    """
    order = graph.node_ids()
    index = {node_id: i for i, node_id in enumerate(order)}
    p = np.array([positions[node_id] for node_id in order], dtype=float)
    if not np.all(np.isfinite(p)):
        raise ArgumentError("positions must be finite")
    n = len(order)
    forces = np.zeros((n, 2))

    if n > 1:
        diff = p[:, None, :] - p[None, :, :]
        d2 = (diff ** 2).sum(axis=2)
        np.fill_diagonal(d2, 1.0)  # diagonal diff is zero; avoid 0/0
        scale = params.k * params.r * params.r / d2
        forces += (scale[:, :, None] * diff).sum(axis=1)

    for a, b, s in graph.edges:
        i, j = index[a], index[b]
        delta = p[j] - p[i]
        d = math.sqrt(float(delta[0]) ** 2 + float(delta[1]) ** 2)
        pull = params.k * s * d * delta
        forces[i] += pull
        forces[j] -= pull

    center = np.array(params.center)
    forces += params.centering_strength * (center - p)

    return {node_id: (float(forces[i][0]), float(forces[i][1])) for i, node_id in enumerate(order)}


def force_step(
    positions: dict[str, tuple[float, float]],
    graph: TopicGraph,
    params: ForceParams,
    velocities: dict[str, tuple[float, float]] | None = None,
    alpha: float = 1.0,
) -> tuple[dict[str, tuple[float, float]], dict[str, tuple[float, float]], float]:
    """One damped-velocity integration step with forces scaled by alpha.

    Returns (new positions, new velocities, max node displacement). The
    displacement of any node in one step is capped at params.max_step;
    a clamped node's carried momentum is dropped, since keeping speed at
    the cap sustains a limit cycle instead of settling.
    """
    order = graph.node_ids()
    positions = dict(positions)
    _jitter_coincident(order, positions)
    if velocities is None:
        velocities = {node_id: (0.0, 0.0) for node_id in order}

    forces = compute_forces(positions, graph, params)
    new_positions: dict[str, tuple[float, float]] = {}
    new_velocities: dict[str, tuple[float, float]] = {}
    max_disp = 0.0
    for node_id in order:
        fx, fy = forces[node_id]
        vx, vy = velocities[node_id]
        vx = params.damping * (vx + params.dt * alpha * fx)
        vy = params.damping * (vy + params.dt * alpha * fy)
        dx = params.dt * vx
        dy = params.dt * vy
        step = math.sqrt(dx * dx + dy * dy)
        if step > params.max_step:
            shrink = params.max_step / step
            dx *= shrink
            dy *= shrink
            vx = 0.0
            vy = 0.0
            step = params.max_step
        x, y = positions[node_id]
        new_positions[node_id] = (x + dx, y + dy)
        new_velocities[node_id] = (vx, vy)
        max_disp = max(max_disp, step)
    return new_positions, new_velocities, max_disp


def seed_positions(graph: TopicGraph, params: ForceParams, seed: int) -> dict[str, tuple[float, float]]:
    """Deterministic circle of radius r*sqrt(n), angle by node order, with a
    small seeded jitter so symmetric graphs do not lock into saddle points."""
    order = graph.node_ids()
    n = len(order)
    if n == 1:
        return {order[0]: params.center}
    radius = params.r * math.sqrt(n)
    positions: dict[str, tuple[float, float]] = {}
    for i, node_id in enumerate(order):
        angle = 2.0 * math.pi * i / n
        jx, jy = _hash_unit(f"seed:{seed}:{node_id}")
        positions[node_id] = (
            params.center[0] + radius * math.cos(angle) + 0.1 * params.r * jx,
            params.center[1] + radius * math.sin(angle) + 0.1 * params.r * jy,
        )
    return positions


def force_layout(graph: TopicGraph, params: ForceParams | None = None, seed: int = 0) -> LayoutResult:
    """Iterate force_step from the seeded circle until the largest step is
    below epsilon or the iteration budget runs out."""
    if not graph.nodes:
        raise ArgumentError("cannot lay out an empty graph")
    params = params or ForceParams()
    positions = seed_positions(graph, params, seed)
    velocities: dict[str, tuple[float, float]] | None = None
    converged = False
    iterations = 0
    alpha = 1.0
    settled = 0
    for iterations in range(1, params.max_iters + 1):
        positions, velocities, max_disp = force_step(
            positions, graph, params, velocities, alpha=alpha
        )
        settled = settled + 1 if max_disp < params.epsilon else 0
        if settled >= params.settle_steps or max_disp == 0.0:
            converged = True
            break
        alpha = max(params.alpha_min, alpha * params.alpha_decay)
    return LayoutResult(
        positions=positions, iterations_used=iterations, converged=converged, mode="force"
    )


GRID_ORDER_KEYS = ("time", "degree", "subtopic")


def _subtopic_group(node: GraphNode) -> int:
    if not node.inner_ring:
        return 1 << 30  # nodes with no subtopic sort after every group
    best = min(node.inner_ring, key=lambda entry: (-entry[2], entry[1]))
    return best[1]


def grid_layout(graph: TopicGraph, order_key: str = "time", params: ForceParams | None = None) -> LayoutResult:
    """Regular grid read left-to-right, top-to-bottom under the chosen order:
    time (seq ascending), degree (edge count descending, ties by time), or
    subtopic (argmax inner-ring ordinal group, then time)."""
    if not graph.nodes:
        raise ArgumentError("cannot lay out an empty graph")
    if order_key not in GRID_ORDER_KEYS:
        raise ArgumentError(f"order_key must be one of {GRID_ORDER_KEYS}")
    params = params or ForceParams()

    if order_key == "time":
        ordered = sorted(graph.nodes, key=lambda n: n.seq_index)
    elif order_key == "degree":
        ordered = sorted(graph.nodes, key=lambda n: (-graph.degree(n.id), n.seq_index))
    else:
        ordered = sorted(graph.nodes, key=lambda n: (_subtopic_group(n), n.seq_index))

    n = len(ordered)
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    spacing = 2.0 * params.r
    positions: dict[str, tuple[float, float]] = {}
    for rank, node in enumerate(ordered):
        row, col = divmod(rank, cols)
        positions[node.id] = (
            params.center[0] + (col - (cols - 1) / 2.0) * spacing,
            params.center[1] + (row - (rows - 1) / 2.0) * spacing,
        )
    return LayoutResult(positions=positions, iterations_used=0, converged=True, mode="grid")


def layout_to_dict(graph: TopicGraph, result: LayoutResult) -> dict[str, Any]:
    """Wire format combining layout coordinates with ring and edge data."""
    nodes = []
    for node in graph.nodes:
        x, y = result.positions[node.id]
        nodes.append(
            {
                "id": node.id,
                "x": round_float(x),
                "y": round_float(y),
                "outer_ring": [
                    {"topic": tid, "s": round_float(s)} for tid, _, s in node.outer_ring
                ],
                "inner_ring": [
                    {"subtopic": tid, "s": round_float(s)} for tid, _, s in node.inner_ring
                ],
            }
        )
    return {
        "mode": result.mode,
        "converged": result.converged,
        "iterations": result.iterations_used,
        "nodes": nodes,
        "edges": [
            {"a": a, "b": b, "s": round_float(s)} for a, b, s in graph.edges
        ],
    }
