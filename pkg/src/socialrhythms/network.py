"""Weekly weighted social networks built from visit events.

Edge weight is the total dwell seconds between two users within one week,
summed over both visit directions. Includes the strong/weak classification
against the log10-weight threshold, the "random combination" null model,
and the discrete power-law degree fit.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np

from .events import UserId, VisitEvent, WeekIndex, week_bounds

STRENGTH_THRESHOLD_LOG10W = 3.1


class NetworkError(ValueError):
    pass


class NonPositiveWeight(NetworkError):
    pass


class Infeasible(NetworkError):
    pass


class TooFewSamples(NetworkError):
    pass


class EdgeStrength(Enum):
    STRONG = "strong"
    WEAK = "weak"


class WeightedGraph:
    """Undirected graph with positive edge weights, keyed by string node ids.

    Adjacency is insertion-ordered; anything order-sensitive downstream
    (sampling, exports) sorts node ids explicitly.
    """

    __slots__ = ("week", "_adj")

    def __init__(self, week: WeekIndex = 0):
        self.week = week
        self._adj: dict[UserId, dict[UserId, float]] = {}

    def add_node(self, u: UserId) -> None:
        if u not in self._adj:
            self._adj[u] = {}

    def add_edge(self, a: UserId, b: UserId, weight: float) -> None:
        if a == b:
            raise NetworkError(f"self-loop on {a!r}")
        if not weight > 0:
            raise NonPositiveWeight(f"edge weight must be > 0, got {weight}")
        self.add_node(a)
        self.add_node(b)
        self._adj[a][b] = self._adj[a].get(b, 0.0) + weight
        self._adj[b][a] = self._adj[b].get(a, 0.0) + weight

    def __contains__(self, u: UserId) -> bool:
        return u in self._adj

    @property
    def nodes(self) -> list[UserId]:
        return list(self._adj)

    @property
    def n_nodes(self) -> int:
        return len(self._adj)

    @property
    def n_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self._adj.values()) // 2

    def edges(self) -> Iterator[tuple[UserId, UserId, float]]:
        for u, nbrs in self._adj.items():
            for v, w in nbrs.items():
                if u < v:
                    yield u, v, w

    def has_edge(self, a: UserId, b: UserId) -> bool:
        return b in self._adj.get(a, ())

    def weight(self, a: UserId, b: UserId) -> float | None:
        return self._adj.get(a, {}).get(b)

    def neighbors(self, u: UserId) -> dict[UserId, float]:
        return self._adj[u]

    def degree(self, u: UserId) -> int:
        return len(self._adj[u])

    def strength(self, u: UserId) -> float:
        return sum(self._adj[u].values())

    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges())


def build_week_network(
    events: Iterable[VisitEvent],
    week: WeekIndex,
    origin: float,
) -> WeightedGraph:
    """Aggregate per-pair dwell seconds overlapping the given week.

    Visits in either direction between the same two users feed one
    undirected edge; a visit spanning a week boundary contributes only
    its in-week overlap. Nodes are exactly the endpoints of edges.
    """
    week_start, week_end = week_bounds(week, origin)
    g = WeightedGraph(week=week)
    for event in events:
        overlap = min(event.end, week_end) - max(event.start, week_start)
        if overlap > 0:
            g.add_edge(event.visitor, event.owner, overlap)
    return g


def edge_strength_class(
    w: float, threshold_log10w: float = STRENGTH_THRESHOLD_LOG10W
) -> EdgeStrength:
    """Strong iff log10(w) strictly exceeds the threshold (default 3.1)."""
    if not w > 0:
        raise NonPositiveWeight(f"weight must be > 0, got {w}")
    return EdgeStrength.STRONG if math.log10(w) > threshold_log10w else EdgeStrength.WEAK


def strong_edge_subgraph(
    g: WeightedGraph, threshold_log10w: float = STRENGTH_THRESHOLD_LOG10W
) -> WeightedGraph:
    """Keep edges with log10(w) >= threshold; isolated nodes are dropped.

    Note the boundary is inclusive here (subnetwork definition), while
    edge_strength_class uses a strict inequality.
    """
    cutoff = 10.0 ** threshold_log10w
    out = WeightedGraph(week=g.week)
    for a, b, w in g.edges():
        if w >= cutoff:
            out.add_edge(a, b, w)
    return out


def null_reattach(g: WeightedGraph, seed: int) -> WeightedGraph:
    """Random-combination null: re-draw every edge's endpoints uniformly.

    The node set and the multiset of edge weights are preserved exactly;
    self-loops and duplicate pairs are rejected and re-drawn.
    """
    nodes = sorted(g.nodes)
    n = len(nodes)
    if n < 2:
        raise NetworkError("need at least 2 nodes to reattach edges")
    edge_list = sorted(g.edges())
    max_pairs = n * (n - 1) // 2
    if len(edge_list) > max_pairs:
        raise Infeasible(f"{len(edge_list)} edges cannot fit in {max_pairs} node pairs")

    rng = np.random.default_rng(seed)
    out = WeightedGraph(week=g.week)
    for u in nodes:
        out.add_node(u)
    taken: set[tuple[int, int]] = set()
    for _, _, w in edge_list:
        while True:
            i = int(rng.integers(n))
            j = int(rng.integers(n))
            if i == j:
                continue
            key = (i, j) if i < j else (j, i)
            if key in taken:
                continue
            taken.add(key)
            out.add_edge(nodes[key[0]], nodes[key[1]], w)
            break
    return out


def random_pairs(
    nodes: Iterable[UserId], n: int, seed: int
) -> list[tuple[UserId, UserId]]:
    """n uniform unordered pairs of distinct users, with replacement across draws."""
    pool = sorted(nodes)
    if len(pool) < 2:
        raise NetworkError("need at least 2 nodes to draw pairs")
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n):
        i = int(rng.integers(len(pool)))
        j = int(rng.integers(len(pool)))
        while j == i:
            j = int(rng.integers(len(pool)))
        a, b = pool[i], pool[j]
        pairs.append((a, b) if a < b else (b, a))
    return pairs


def powerlaw_mle(samples: Sequence[int], kmin: int) -> float:
    """Discrete power-law exponent by maximum likelihood.

    Uses the standard continuous approximation
    alpha = 1 + n / sum(ln(k_i / (kmin - 1/2))) over samples k_i >= kmin.
    Returns +inf when every retained sample sits exactly at kmin (the
    likelihood is maximised in the alpha -> inf limit).
    """
    ks = np.asarray([k for k in samples if k >= kmin], dtype=float)
    if ks.size < 10:
        raise TooFewSamples(f"need >= 10 samples with k >= kmin, got {ks.size}")
    if ks.max() == kmin:
        return math.inf
    return 1.0 + ks.size / float(np.sum(np.log(ks / (kmin - 0.5))))


def degree_powerlaw_exponent(g: WeightedGraph, kmin: int = 2) -> float:
    """Power-law exponent of the degree distribution (degrees >= kmin)."""
    return powerlaw_mle([g.degree(u) for u in g.nodes], kmin)
