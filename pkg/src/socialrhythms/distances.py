"""Shortest-path distances and long-range similarity decay.

Weighted distances use 1/w as the edge length, so heavy edges are short.
Hop distances treat every edge as length 1. The decay analyses bin pair
similarity by distance from sampled source nodes and compare against the
random-pair baseline.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .binning import BinnedCurve
from .events import UserId
from .network import WeightedGraph, random_pairs
from .rhythm import RhythmVector, similarity
from .structure import UnknownNode

DEFAULT_SOURCE_SAMPLE = 500
EXACT_ENUMERATION_BELOW = 2000


@dataclass(frozen=True)
class DistanceField:
    """Distances from one source; unreachable nodes are simply absent."""

    source: UserId
    dist: dict[UserId, float]
    hops: dict[UserId, int]


@dataclass(frozen=True)
class DistanceCurveResult:
    curve: BinnedCurve
    baseline_mean: float
    baseline_sd: float
    n_pairs: int


def weighted_sssp(g: WeightedGraph, source: UserId) -> DistanceField:
    """Dijkstra single-source shortest paths with edge length 1/w."""
    if source not in g:
        raise UnknownNode(f"source {source!r} not in graph")
    dist: dict[UserId, float] = {source: 0.0}
    hops: dict[UserId, int] = {source: 0}
    settled: set[UserId] = set()
    heap: list[tuple[float, int, UserId]] = [(0.0, 0, source)]
    while heap:
        d, h, u = heapq.heappop(heap)
        if u in settled:
            continue
        settled.add(u)
        dist[u] = d
        hops[u] = h
        for v, w in sorted(g.neighbors(u).items()):
            if v in settled:
                continue
            nd = d + 1.0 / w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                hops[v] = h + 1
                heapq.heappush(heap, (nd, h + 1, v))
    return DistanceField(source=source, dist=dist, hops=hops)


def hop_sssp(g: WeightedGraph, source: UserId) -> DistanceField:
    """Breadth-first hop distances (every edge counts 1)."""
    if source not in g:
        raise UnknownNode(f"source {source!r} not in graph")
    hops: dict[UserId, int] = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in sorted(g.neighbors(u)):
            if v not in hops:
                hops[v] = hops[u] + 1
                queue.append(v)
    return DistanceField(source=source, dist={u: float(h) for u, h in hops.items()}, hops=hops)


def _pick_sources(g: WeightedGraph, source_sample: int, seed: int,
                  exact_below: int) -> list[UserId]:
    nodes = sorted(g.nodes)
    if len(nodes) < exact_below or source_sample >= len(nodes):
        return nodes
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(nodes), size=source_sample, replace=False)
    return [nodes[i] for i in sorted(idx)]


def _sssp(g: WeightedGraph, source: UserId, mode: str) -> DistanceField:
    if mode == "weighted":
        return weighted_sssp(g, source)
    if mode == "hops":
        return hop_sssp(g, source)
    raise ValueError(f"mode must be 'weighted' or 'hops', got {mode!r}")


def distance_similarity_samples(
    g: WeightedGraph,
    rhythms: Mapping[UserId, RhythmVector],
    mode: str = "weighted",
    source_sample: int = DEFAULT_SOURCE_SAMPLE,
    seed: int = 0,
    exact_below: int = EXACT_ENUMERATION_BELOW,
) -> tuple[np.ndarray, np.ndarray]:
    """(distance, similarity) samples over ordered pairs from sampled sources."""
    if source_sample < 1:
        raise ValueError("source_sample must be >= 1")
    sources = _pick_sources(g, source_sample, seed, exact_below)
    dists = []
    sims = []
    for s in sources:
        field = _sssp(g, s, mode)
        r_s = rhythms[s]
        for t, d in field.dist.items():
            if t == s:
                continue
            dists.append(d)
            sims.append(similarity(r_s, rhythms[t]))
    return np.asarray(dists), np.asarray(sims)


def default_distance_bins(dists: np.ndarray, mode: str) -> np.ndarray:
    """Log-spaced bins for weighted distances, unit bins for hop counts."""
    if dists.size == 0:
        return np.array([0.0, 1.0])
    if mode == "hops":
        return np.arange(0.5, float(dists.max()) + 1.0)
    lo, hi = float(dists.min()), float(dists.max())
    if hi <= lo:
        hi = lo * 1.01 + 1e-12
    bins = np.geomspace(lo, hi, 21)
    bins[0] *= 0.999999  # keep the minimum inside the first bin
    return bins


def similarity_vs_distance(
    g: WeightedGraph,
    rhythms: Mapping[UserId, RhythmVector],
    mode: str = "weighted",
    source_sample: int = DEFAULT_SOURCE_SAMPLE,
    bins=None,
    seed: int = 0,
    exact_below: int = EXACT_ENUMERATION_BELOW,
) -> DistanceCurveResult:
    """Pair similarity binned by network distance from sampled sources.

    All ordered (source, target) pairs with target reachable are counted
    once per sampled source. Default bins are logarithmic for weighted
    mode and unit-width for hop mode. The baseline is the similarity of
    uniformly random pairs.
    """
    dists_arr, sims = distance_similarity_samples(
        g, rhythms, mode, source_sample, seed, exact_below)

    if bins is None:
        bins = default_distance_bins(dists_arr, mode)
    curve = BinnedCurve.from_samples(dists_arr, sims, bins)

    if g.n_nodes >= 2:
        base = [similarity(rhythms[a], rhythms[b])
                for a, b in random_pairs(g.nodes, max(2000, g.n_nodes), seed + 1)]
        base_arr = np.asarray(base)
        baseline_mean = float(base_arr.mean())
        baseline_sd = float(base_arr.std())
    else:
        baseline_mean = baseline_sd = float("nan")
    return DistanceCurveResult(curve, baseline_mean, baseline_sd, len(dists))


def reach_profile(
    g: WeightedGraph,
    thresholds,
    mode: str = "weighted",
    source_sample: int = DEFAULT_SOURCE_SAMPLE,
    seed: int = 0,
    denominator: str = "all",
    exact_below: int = EXACT_ENUMERATION_BELOW,
) -> list[float]:
    """reach_fraction evaluated at several thresholds in one sweep."""
    thresholds = [float(d) for d in thresholds]
    if any(d < 0 for d in thresholds):
        raise ValueError("distance thresholds must be >= 0")
    if denominator not in ("all", "reachable"):
        raise ValueError(f"unknown denominator {denominator!r}")
    n = g.n_nodes
    if n < 2:
        return [0.0 for _ in thresholds]
    sources = _pick_sources(g, source_sample, seed, exact_below)
    sums = np.zeros(len(thresholds))
    weights = 0
    for s in sources:
        field = _sssp(g, s, mode)
        dists = np.array([dd for t, dd in field.dist.items() if t != s])
        if denominator == "all":
            denom = n - 1
        else:
            denom = dists.size
            if denom == 0:
                continue
        for i, d in enumerate(thresholds):
            sums[i] += np.count_nonzero(dists <= d) / denom
        weights += 1
    if weights == 0:
        return [0.0 for _ in thresholds]
    return [float(v / weights) for v in sums]


def reach_fraction(
    g: WeightedGraph,
    d: float,
    mode: str = "weighted",
    source_sample: int = DEFAULT_SOURCE_SAMPLE,
    seed: int = 0,
    denominator: str = "all",
    exact_below: int = EXACT_ENUMERATION_BELOW,
) -> float:
    """Fraction of ordered node pairs within distance d, source-averaged.

    With denominator="all" (default) unreachable pairs count as not
    reached; "reachable" restricts the denominator to reachable pairs.
    """
    return reach_profile(g, [d], mode, source_sample, seed, denominator, exact_below)[0]


def decay_threshold_distance(
    curve: BinnedCurve, baseline: float, factor: float = 1.10
) -> float | None:
    """Largest populated bin-center whose mean is >= factor * baseline."""
    best = None
    for center, mean, count in zip(curve.centers, curve.means, curve.counts):
        if count > 0 and mean >= factor * baseline:
            best = float(center)
    return best
