"""Global timeline geometry: topic rows via wiggle minimization.

Topics occupy horizontal rows; each node sits at (seq_index, row of its
primary topic). Row order is chosen to minimize total wiggle, the sum
over topic pairs of transition count times vertical distance. Finding
that order is a quadratic assignment problem, solved exactly by branch
and bound at small topic counts and by a restarted 2-opt heuristic above
the exact limit.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Sequence

from .errors import ArgumentError, CapacityError, StateError
from .model import Conversation

EXACT_LIMIT = 10
ENUMERATION_LIMIT = 6
DEFAULT_TOKEN_BUDGET = 4096
HEURISTIC_RESTARTS = 8


@dataclass
class TransitionMatrix:
    """a[i][j] counts timeline transitions from topic i to topic j; the
    diagonal stays zero because self-transitions carry no wiggle cost."""

    n: int
    a: list[list[int]]

    @classmethod
    def zeros(cls, n: int) -> "TransitionMatrix":
        return cls(n=n, a=[[0] * n for _ in range(n)])

    def total_transitions(self) -> int:
        return sum(sum(row) for row in self.a)


@dataclass
class RowAssignment:
    rows: list[int]
    cost: int
    method: str  # "exact" | "heuristic"

    def to_dict(self) -> dict[str, Any]:
        return {"rows": self.rows, "cost": self.cost, "method": self.method}


@dataclass
class GlobalGeometry:
    nodes: list[dict[str, Any]]
    edges: list[list[int]]
    topics: list[dict[str, Any]]
    forgotten_boundary: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "nodes": self.nodes,
            "edges": self.edges,
            "topics": self.topics,
            "forgotten_boundary": self.forgotten_boundary,
        }


def build_transition_matrix(
    primary_topics: Sequence[int], n_topics: int | None = None
) -> TransitionMatrix:
    """Count consecutive primary-topic changes along the timeline."""
    if n_topics is None:
        n_topics = max(primary_topics) + 1 if primary_topics else 0
    matrix = TransitionMatrix.zeros(n_topics)
    for t in primary_topics:
        if not 0 <= t < n_topics:
            raise ArgumentError(f"topic index {t} out of range for n={n_topics}")
    for prev, curr in zip(primary_topics, primary_topics[1:]):
        if prev != curr:
            matrix.a[prev][curr] += 1
    return matrix


def _check_permutation(rows: Sequence[int], n: int) -> None:
    if sorted(rows) != list(range(n)):
        raise ArgumentError(f"rows {list(rows)} is not a permutation of 0..{n - 1}")


def wiggle_cost(matrix: TransitionMatrix, rows: Sequence[int]) -> int:
    """Total vertical eye travel: sum of a[i][k] * |rows[i] - rows[k]|."""
    _check_permutation(rows, matrix.n)
    cost = 0
    for i in range(matrix.n):
        row_i = rows[i]
        for k in range(matrix.n):
            weight = matrix.a[i][k]
            if weight:
                cost += weight * abs(row_i - rows[k])
    return cost


def _pair_weights(matrix: TransitionMatrix) -> list[list[int]]:
    """Symmetrized weights; |j - l| makes direction irrelevant."""
    n = matrix.n
    return [
        [matrix.a[i][k] + matrix.a[k][i] for k in range(n)]
        for i in range(n)
    ]


def _cost_from_pairs(weights: list[list[int]], rows: Sequence[int]) -> int:
    n = len(rows)
    cost = 0
    for i in range(n):
        for k in range(i + 1, n):
            if weights[i][k]:
                cost += weights[i][k] * abs(rows[i] - rows[k])
    return cost


def solve_rows_exact(matrix: TransitionMatrix, exact_limit: int = EXACT_LIMIT) -> RowAssignment:
    """Minimum-wiggle permutation; among optima, the lexicographically
    smallest rows sequence. Plain enumeration up to n=6, branch and bound
    with a distance-1 lower bound beyond."""
    n = matrix.n
    if n > exact_limit:
        raise CapacityError(
            f"{n} topics exceeds the exact limit {exact_limit}; use solve_rows_heuristic"
        )
    if n == 0:
        return RowAssignment(rows=[], cost=0, method="exact")

    weights = _pair_weights(matrix)

    if n <= ENUMERATION_LIMIT:
        best_rows: tuple[int, ...] | None = None
        best_cost = 0
        for perm in itertools.permutations(range(n)):
            cost = _cost_from_pairs(weights, perm)
            if best_rows is None or cost < best_cost:
                best_rows, best_cost = perm, cost
        assert best_rows is not None
        return RowAssignment(rows=list(best_rows), cost=best_cost, method="exact")

    # Branch on heavily connected topics first: their placements dominate
    # the objective, so bad subtrees price themselves out early. Correctness
    # does not depend on the order; leaves are compared in original space.
    order = sorted(range(n), key=lambda i: (-sum(weights[i]), i))
    permuted = [[weights[order[a]][order[b]] for b in range(n)] for a in range(n)]
    # Per level: earlier levels connected by nonzero weight.
    links: list[list[tuple[int, int]]] = [
        [(u, permuted[u][t]) for u in range(t) if permuted[u][t]] for t in range(n)
    ]
    # Suffix bound: every pair with an endpoint not yet placed costs at
    # least its weight times distance 1.
    rest = [0] * (n + 1)
    for t in range(n - 1, -1, -1):
        rest[t] = rest[t + 1] + sum(permuted[i][t] for i in range(t))

    incumbent = solve_rows_heuristic(matrix, seed=0)
    best_cost = incumbent.cost
    best_rows = tuple(incumbent.rows)

    level_rows = [0] * n
    used = [False] * n

    def descend(t: int, partial: int) -> None:
        nonlocal best_cost, best_rows
        if t == n:
            original = [0] * n
            for level, topic in enumerate(order):
                original[topic] = level_rows[level]
            candidate = tuple(original)
            if partial < best_cost or (partial == best_cost and candidate < best_rows):
                best_cost, best_rows = partial, candidate
            return
        bound_rest = rest[t + 1]
        level_links = links[t]
        for value in range(n):
            if used[value]:
                continue
            added = partial
            for u, weight in level_links:
                added += weight * abs(level_rows[u] - value)
            if added + bound_rest > best_cost:
                continue
            used[value] = True
            level_rows[t] = value
            descend(t + 1, added)
            used[value] = False
    descend(0, 0)
    return RowAssignment(rows=list(best_rows), cost=best_cost, method="exact")


def _greedy_order(weights: list[list[int]]) -> list[int]:
    n = len(weights)
    totals = [(-sum(weights[i]), i) for i in range(n)]
    ranked = sorted(totals)
    rows = [0] * n
    for rank, (_, topic) in enumerate(ranked):
        rows[topic] = rank
    return rows


def _two_opt(weights: list[list[int]], rows: list[int]) -> tuple[list[int], int]:
    """Best-improvement pairwise swaps until a local optimum."""
    n = len(rows)
    rows = list(rows)
    cost = _cost_from_pairs(weights, rows)
    while True:
        best_delta = 0
        best_swap: tuple[int, int] | None = None
        for i in range(n):
            for j in range(i + 1, n):
                delta = 0
                ri, rj = rows[i], rows[j]
                for k in range(n):
                    if k == i or k == j:
                        continue
                    rk = rows[k]
                    if weights[i][k]:
                        delta += weights[i][k] * (abs(rj - rk) - abs(ri - rk))
                    if weights[j][k]:
                        delta += weights[j][k] * (abs(ri - rk) - abs(rj - rk))
                if delta < best_delta:
                    best_delta = delta
                    best_swap = (i, j)
        if best_swap is None:
            return rows, cost
        i, j = best_swap
        rows[i], rows[j] = rows[j], rows[i]
        cost += best_delta


def solve_rows_heuristic(
    matrix: TransitionMatrix, seed: int = 0, restarts: int = HEURISTIC_RESTARTS
) -> RowAssignment:
    """2-opt local search from the greedy ordering, the identity, and seeded
    shuffles; deterministic for a fixed seed and never worse than either
    non-random start."""
    n = matrix.n
    if n == 0:
        return RowAssignment(rows=[], cost=0, method="heuristic")
    weights = _pair_weights(matrix)

    starts: list[list[int]] = [_greedy_order(weights), list(range(n))]
    rng = random.Random(seed)
    for _ in range(restarts):
        shuffled = list(range(n))
        rng.shuffle(shuffled)
        starts.append(shuffled)

    best_rows: list[int] | None = None
    best_cost = 0
    for start in starts:
        rows, cost = _two_opt(weights, start)
        if best_rows is None or cost < best_cost or (cost == best_cost and rows < best_rows):
            best_rows, best_cost = rows, cost
    assert best_rows is not None
    return RowAssignment(rows=best_rows, cost=best_cost, method="heuristic")


def solve_rows(matrix: TransitionMatrix, seed: int = 0) -> RowAssignment:
    """Exact when the instance is small enough, heuristic otherwise."""
    if matrix.n <= EXACT_LIMIT:
        return solve_rows_exact(matrix)
    return solve_rows_heuristic(matrix, seed=seed)


def forgotten_boundary(token_counts: Sequence[int], budget: int) -> int:
    """Oldest seq_index still inside the token budget, walking back from the
    newest node. 0 when everything fits; len(token_counts) when even the
    newest node alone exceeds the budget."""
    if budget <= 0:
        raise ArgumentError("budget must be positive")
    running = 0
    boundary = len(token_counts)
    for index in range(len(token_counts) - 1, -1, -1):
        running += token_counts[index]
        if running > budget:
            break
        boundary = index
    return boundary


def build_global_geometry(
    conv: Conversation,
    assignment: RowAssignment,
    budget: int = DEFAULT_TOKEN_BUDGET,
) -> GlobalGeometry:
    """Node (x, row) positions, consecutive-node edges, per-topic rows, and
    the forgotten line for an analyzed conversation."""
    level0 = conv.level0_topics()
    if not level0 or any(n.primary_topic is None for n in conv.nodes):
        raise StateError(f"conversation {conv.id!r} has not been analyzed")
    if len(assignment.rows) != len(level0):
        raise ArgumentError(
            f"assignment covers {len(assignment.rows)} topics, expected {len(level0)}"
        )

    row_of = {topic.id: assignment.rows[i] for i, topic in enumerate(level0)}
    nodes = [
        {"id": node.id, "x": node.seq_index, "row": row_of[node.primary_topic]}
        for node in conv.nodes
    ]
    edges = [[k, k + 1] for k in range(len(conv.nodes) - 1)]
    topics = [
        {"id": topic.id, "row": row_of[topic.id], "ordinal": topic.ordinal}
        for topic in level0
    ]
    counts = [node.token_count for node in conv.nodes]
    return GlobalGeometry(
        nodes=nodes,
        edges=edges,
        topics=topics,
        forgotten_boundary=forgotten_boundary(counts, budget),
    )
