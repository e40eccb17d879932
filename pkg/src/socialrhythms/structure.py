"""Community structure: weighted-modularity detection and clustering coefficients.

Community detection is greedy weighted-modularity agglomeration (local
moves plus aggregation, repeated until no gain), deterministic for a
given seed. The clustering coefficient is the weighted variant that
averages the two incident edge weights over closed neighbour pairs,
normalised by strength times (degree - 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .events import UserId
from .network import WeightedGraph
from .rhythm import RhythmVector


class StructureError(ValueError):
    pass


class UnknownNode(StructureError):
    pass


@dataclass(frozen=True)
class Partition:
    """Disjoint communities over the node set; ids are dense from 0."""

    membership: dict[UserId, int]

    @property
    def n_communities(self) -> int:
        return len(set(self.membership.values()))

    def communities(self) -> list[list[UserId]]:
        groups: dict[int, list[UserId]] = {}
        for node in sorted(self.membership):
            groups.setdefault(self.membership[node], []).append(node)
        return [groups[c] for c in sorted(groups)]


@dataclass(frozen=True)
class CommunityStats:
    community_id: int
    size: int
    mean_similarity: float
    mean_wcc: float


@dataclass(frozen=True)
class CommunityReport:
    stats: list[CommunityStats]
    skipped: int


def modularity(g: WeightedGraph, membership: Mapping[UserId, int]) -> float:
    """Weighted Newman modularity of a node-to-community assignment."""
    total = g.total_weight()
    if total == 0.0:
        return 0.0
    intra: dict[int, float] = {}
    tot: dict[int, float] = {}
    for a, b, w in g.edges():
        ca, cb = membership[a], membership[b]
        if ca == cb:
            intra[ca] = intra.get(ca, 0.0) + w
    for u in g.nodes:
        c = membership[u]
        tot[c] = tot.get(c, 0.0) + g.strength(u)
    q = 0.0
    for c in set(membership.values()):
        q += intra.get(c, 0.0) / total - (tot.get(c, 0.0) / (2.0 * total)) ** 2
    return q


def _one_level(adj: list[dict[int, float]], k: np.ndarray, m2: float,
               rng: np.random.Generator) -> tuple[np.ndarray, bool]:
    """One round of local moves; returns (community of each node, any move)."""
    n = len(adj)
    comm = np.arange(n)
    comm_tot = k.copy()
    order = np.arange(n)
    improved = False
    while True:
        moved = 0
        rng.shuffle(order)
        for i in order:
            ci = int(comm[i])
            ki = k[i]
            link: dict[int, float] = {}
            for j, w in adj[i].items():
                cj = int(comm[j])
                link[cj] = link.get(cj, 0.0) + w
            comm_tot[ci] -= ki
            best_c = ci
            best_gain = link.get(ci, 0.0) - comm_tot[ci] * ki / m2
            for c in sorted(link):
                if c == ci:
                    continue
                gain = link[c] - comm_tot[c] * ki / m2
                if gain > best_gain + 1e-12:
                    best_gain = gain
                    best_c = c
            comm_tot[best_c] += ki
            if best_c != ci:
                comm[i] = best_c
                moved += 1
        if moved == 0:
            break
        improved = True
    return comm, improved


def _relabel(comm: np.ndarray) -> np.ndarray:
    labels: dict[int, int] = {}
    out = np.empty_like(comm)
    for i, c in enumerate(comm):
        c = int(c)
        if c not in labels:
            labels[c] = len(labels)
        out[i] = labels[c]
    return out


def _aggregate(adj: list[dict[int, float]], self_w: np.ndarray,
               comm: np.ndarray) -> tuple[list[dict[int, float]], np.ndarray]:
    nc = int(comm.max()) + 1
    new_adj: list[dict[int, float]] = [{} for _ in range(nc)]
    new_self = np.zeros(nc)
    for i, w in enumerate(self_w):
        new_self[comm[i]] += w
    for i, nbrs in enumerate(adj):
        ci = int(comm[i])
        for j, w in nbrs.items():
            if j <= i:
                continue
            cj = int(comm[j])
            if ci == cj:
                new_self[ci] += w
            else:
                new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
                new_adj[cj][ci] = new_adj[cj].get(ci, 0.0) + w
    return new_adj, new_self


def detect_communities(g: WeightedGraph, seed: int = 0) -> Partition:
    """Greedy modularity-maximising partition, deterministic given seed.

    Starts from singletons and only applies improving moves, so the result
    never scores below the singleton partition. Nodes in different
    connected components never share a community (moves follow edges).
    """
    nodes = sorted(g.nodes)
    if not nodes:
        raise StructureError("graph has no nodes")
    index = {u: i for i, u in enumerate(nodes)}
    n = len(nodes)
    adj: list[dict[int, float]] = [{} for _ in range(n)]
    for a, b, w in g.edges():
        ia, ib = index[a], index[b]
        adj[ia][ib] = w
        adj[ib][ia] = w
    total = g.total_weight()
    if total == 0.0:
        return Partition({u: i for i, u in enumerate(nodes)})

    rng = np.random.default_rng(seed)
    m2 = 2.0 * total
    self_w = np.zeros(n)
    node_comm = np.arange(n)  # original node -> current-level super-node
    while True:
        k = np.array([sum(nbrs.values()) + 2.0 * self_w[i] for i, nbrs in enumerate(adj)])
        comm, improved = _one_level(adj, k, m2, rng)
        if not improved:
            break
        comm = _relabel(comm)
        node_comm = comm[node_comm]
        if int(comm.max()) + 1 == len(adj):
            break
        adj, self_w = _aggregate(adj, self_w, comm)

    final = _relabel(node_comm)
    return Partition({u: int(final[i]) for i, u in enumerate(nodes)})


def weighted_clustering_coefficient(g: WeightedGraph, i: UserId) -> float:
    """Average incident weight over closed neighbour pairs of node i.

    C_i = sum over neighbour pairs (j, k) with an edge j-k of
    (w_ij + w_ik), divided by strength_i * (degree_i - 1). Equals 1 on an
    equal-weight triangle and 0 when no two neighbours are connected.
    """
    if i not in g:
        raise UnknownNode(f"node {i!r} not in graph")
    nbrs = g.neighbors(i)
    d = len(nbrs)
    if d <= 1:
        return 0.0
    items = sorted(nbrs.items())
    num = 0.0
    for a in range(len(items)):
        j, w_ij = items[a]
        for b in range(a + 1, len(items)):
            k, w_ik = items[b]
            if g.has_edge(j, k):
                num += w_ij + w_ik
    return num / (g.strength(i) * (d - 1))


def mean_pairwise_similarity(rhythms: list[RhythmVector]) -> float:
    """Mean cosine over all unordered pairs of unit vectors.

    Uses the identity (||sum r||^2 - n) / (n (n - 1)).
    """
    n = len(rhythms)
    if n < 2:
        raise StructureError("need at least 2 members for pairwise similarity")
    total = np.sum([r.values for r in rhythms], axis=0)
    return (float(np.dot(total, total)) - n) / (n * (n - 1))


def community_similarity_vs_clustering(
    g: WeightedGraph,
    partition: Partition,
    rhythms: Mapping[UserId, RhythmVector],
    min_size: int = 3,
) -> CommunityReport:
    """Per-community mean member similarity and mean clustering coefficient.

    Similarity is averaged over all member pairs, connected or not;
    clustering coefficients are evaluated on the full graph. Communities
    below min_size are skipped and counted.
    """
    stats = []
    skipped = 0
    for members in partition.communities():
        if len(members) < min_size:
            skipped += 1
            continue
        cid = partition.membership[members[0]]
        mean_sim = mean_pairwise_similarity([rhythms[u] for u in members])
        mean_wcc = float(np.mean([weighted_clustering_coefficient(g, u) for u in members]))
        stats.append(CommunityStats(cid, len(members), mean_sim, mean_wcc))
    return CommunityReport(stats=stats, skipped=skipped)
