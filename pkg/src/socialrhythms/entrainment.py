"""Entrainment analyses over consecutive weekly networks.

Covers the similarity-versus-weight curve, before/after similarity of
newly connected pairs, similarity distributions against the
random-combination null, intrapersonal rhythm stability, triadic
neighbourhood changes, and Welch's unequal-variance t-test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import betainc

from .binning import BinnedCurve, Histogram, similarity_bin_edges
from .events import UserId, WeekIndex
from .network import (
    STRENGTH_THRESHOLD_LOG10W,
    EdgeStrength,
    WeightedGraph,
    edge_strength_class,
    random_pairs,
)
from .rhythm import RhythmVector, similarity


class AnalysisError(ValueError):
    pass


class MissingRhythm(AnalysisError):
    def __init__(self, missing: list[UserId]):
        self.missing = missing
        preview = ", ".join(missing[:5])
        suffix = "..." if len(missing) > 5 else ""
        super().__init__(f"{len(missing)} graph nodes lack a rhythm: {preview}{suffix}")


class NonAdjacentWeeks(AnalysisError):
    pass


class UserMismatch(AnalysisError):
    pass


class TooFewSamples(AnalysisError):
    pass


class ZeroVariance(AnalysisError):
    pass


class TriadCondition(Enum):
    STRONG_EDGE = "strong"
    WEAK_EDGE = "weak"
    UNCONNECTED = "unconnected"


@dataclass(frozen=True)
class PairObservation:
    """Before/after similarity record for one pair across consecutive weeks."""

    pair: tuple[UserId, UserId]
    week_before: WeekIndex
    week_after: WeekIndex
    sim_before: float
    sim_after: float
    weight_after: float
    newly_connected: bool = True

    @property
    def change(self) -> float:
        return self.sim_after - self.sim_before


@dataclass(frozen=True)
class TriadObservation:
    """A new edge A-B seen from an existing neighbour C of A.

    ``bc_condition`` classifies the B-C relation in the week before the
    new edge appeared.
    """

    a: UserId
    b: UserId
    c: UserId
    bc_condition: TriadCondition
    sim_ac_before: float
    sim_ac_after: float
    sim_bc_before: float
    sim_bc_after: float


@dataclass(frozen=True)
class WelchResult:
    t: float
    dof: float
    p: float
    mean_difference: float


@dataclass(frozen=True)
class WeightCurveResult:
    curve: BinnedCurve
    baseline_mean: float
    baseline_sd: float
    n_baseline: int


@dataclass(frozen=True)
class DistributionComparison:
    before: Histogram
    after: Histogram
    null: Histogram


def similarity_vs_weight_curve(
    g: WeightedGraph,
    rhythms: Mapping[UserId, RhythmVector],
    bin_edges=None,
    *,
    seed: int = 0,
    n_baseline: int | None = None,
) -> WeightCurveResult:
    """Mean/sd of edge-pair similarity binned by log10 edge weight.

    The baseline is the similarity of uniformly random user pairs drawn
    from the same node set. Every edge endpoint must have a rhythm;
    offenders are collected and raised, not dropped.
    """
    missing = sorted({u for a, b, _ in g.edges() for u in (a, b) if u not in rhythms})
    if missing:
        raise MissingRhythm(missing)

    logw = []
    sims = []
    for a, b, w in g.edges():
        logw.append(math.log10(w))
        sims.append(similarity(rhythms[a], rhythms[b]))

    if bin_edges is None:
        if logw:
            lo = math.floor(min(logw) * 10.0) / 10.0
            hi = math.ceil(max(logw) * 10.0) / 10.0
            hi = max(hi, lo + 0.2)
            bin_edges = np.arange(lo, hi + 1e-9, 0.2)
        else:
            bin_edges = np.array([0.0, 1.0])
    curve = BinnedCurve.from_samples(logw, sims, bin_edges)

    if g.n_nodes >= 2:
        n_base = n_baseline if n_baseline is not None else max(1000, g.n_edges)
        base = [similarity(rhythms[a], rhythms[b])
                for a, b in random_pairs(g.nodes, n_base, seed)
                if a in rhythms and b in rhythms]
    else:
        base = []
    base_arr = np.asarray(base, dtype=float)
    baseline_mean = float(base_arr.mean()) if base_arr.size else float("nan")
    baseline_sd = float(base_arr.std()) if base_arr.size else float("nan")
    return WeightCurveResult(curve, baseline_mean, baseline_sd, int(base_arr.size))


def pooled_weight_curve(
    graphs: Mapping[WeekIndex, WeightedGraph],
    rhythms_by_week: Mapping[WeekIndex, Mapping[UserId, RhythmVector]],
    bin_edges=None,
    *,
    seed: int = 0,
    baseline_pairs_per_week: int = 2000,
) -> WeightCurveResult:
    """similarity_vs_weight_curve pooled over several weekly networks."""
    logw = []
    sims = []
    base = []
    for offset, week in enumerate(sorted(graphs)):
        g = graphs[week]
        rhythms = rhythms_by_week.get(week, {})
        missing = sorted({u for a, b, _ in g.edges() for u in (a, b) if u not in rhythms})
        if missing:
            raise MissingRhythm(missing)
        for a, b, w in g.edges():
            logw.append(math.log10(w))
            sims.append(similarity(rhythms[a], rhythms[b]))
        if g.n_nodes >= 2:
            base.extend(similarity(rhythms[a], rhythms[b])
                        for a, b in random_pairs(g.nodes, baseline_pairs_per_week, seed + offset))
    if bin_edges is None:
        if logw:
            lo = math.floor(min(logw) * 10.0) / 10.0
            hi = math.ceil(max(logw) * 10.0) / 10.0
            hi = max(hi, lo + 0.2)
            bin_edges = np.arange(lo, hi + 1e-9, 0.2)
        else:
            bin_edges = np.array([0.0, 1.0])
    curve = BinnedCurve.from_samples(logw, sims, bin_edges)
    base_arr = np.asarray(base, dtype=float)
    baseline_mean = float(base_arr.mean()) if base_arr.size else float("nan")
    baseline_sd = float(base_arr.std()) if base_arr.size else float("nan")
    return WeightCurveResult(curve, baseline_mean, baseline_sd, int(base_arr.size))


def _require_adjacent(g_prev: WeightedGraph, g_curr: WeightedGraph) -> None:
    if g_curr.week != g_prev.week + 1:
        raise NonAdjacentWeeks(
            f"weeks must be consecutive, got {g_prev.week} then {g_curr.week}")


def new_edges(
    g_prev: WeightedGraph,
    g_curr: WeightedGraph,
    rhythms_prev: Mapping[UserId, RhythmVector],
    rhythms_curr: Mapping[UserId, RhythmVector],
) -> list[PairObservation]:
    """Pairs connected in the current week but not the previous one.

    Only pairs whose both users have rhythms in both weeks are emitted.
    """
    _require_adjacent(g_prev, g_curr)
    out = []
    for a, b, w in g_curr.edges():
        if g_prev.has_edge(a, b):
            continue
        if a not in rhythms_prev or b not in rhythms_prev:
            continue
        if a not in rhythms_curr or b not in rhythms_curr:
            continue
        out.append(PairObservation(
            pair=(a, b),
            week_before=g_prev.week,
            week_after=g_curr.week,
            sim_before=similarity(rhythms_prev[a], rhythms_prev[b]),
            sim_after=similarity(rhythms_curr[a], rhythms_curr[b]),
            weight_after=w,
        ))
    return out


def change_curve(
    obs: Sequence[PairObservation], bin_edges=None
) -> BinnedCurve:
    """Mean/sd of after-similarity binned by before-similarity (width 0.05)."""
    if bin_edges is None:
        bin_edges = similarity_bin_edges()
    before = [o.sim_before for o in obs]
    after = [o.sim_after for o in obs]
    return BinnedCurve.from_samples(before, after, bin_edges)


def similarity_distributions(
    new_pairs: Sequence[PairObservation],
    random_combination_pairs: Sequence[PairObservation],
    bin_width: float = 0.05,
) -> DistributionComparison:
    """Histograms of similarity before and after connecting, plus the null.

    The null distribution is taken from the after-week similarities of
    pairs that are "new" across randomly reattached versions of the two
    weekly networks.
    """
    edges = similarity_bin_edges(bin_width)
    return DistributionComparison(
        before=Histogram.from_samples([o.sim_before for o in new_pairs], edges),
        after=Histogram.from_samples([o.sim_after for o in new_pairs], edges),
        null=Histogram.from_samples([o.sim_after for o in random_combination_pairs], edges),
    )


def null_pair_observations(
    g_prev: WeightedGraph,
    g_curr: WeightedGraph,
    rhythms_prev: Mapping[UserId, RhythmVector],
    rhythms_curr: Mapping[UserId, RhythmVector],
    seed: int,
) -> list[PairObservation]:
    """Random-combination analogue of new_edges.

    Both weekly networks are independently reattached and the same
    new-edge scan is applied to the randomised pair.
    """
    from .network import null_reattach

    _require_adjacent(g_prev, g_curr)
    null_prev = null_reattach(g_prev, seed)
    null_curr = null_reattach(g_curr, seed + 1)
    return new_edges(null_prev, null_curr, rhythms_prev, rhythms_curr)


def intrapersonal_similarity(
    user: UserId, r_before: RhythmVector, r_after: RhythmVector
) -> float:
    """Cosine between one user's rhythms in consecutive weeks."""
    if r_before.user != user or r_after.user != user:
        raise UserMismatch(
            f"rhythms belong to {r_before.user!r}/{r_after.user!r}, expected {user!r}")
    if r_before.week is not None and r_after.week is not None:
        if r_after.week != r_before.week + 1:
            raise NonAdjacentWeeks(
                f"weeks must be consecutive, got {r_before.week} then {r_after.week}")
    return similarity(r_before, r_after)


def triad_extract(
    g_prev: WeightedGraph,
    g_curr: WeightedGraph,
    rhythms_prev: Mapping[UserId, RhythmVector],
    rhythms_curr: Mapping[UserId, RhythmVector],
    threshold_log10w: float = STRENGTH_THRESHOLD_LOG10W,
) -> list[TriadObservation]:
    """Triads around each new edge A-B: every C with an existing A-C edge.

    Both orientations of the new edge are scanned (A and B swap roles).
    The B-C condition is evaluated on the previous week's network. Triads
    where any of the three users lacks a rhythm in either week are skipped.
    """
    _require_adjacent(g_prev, g_curr)
    out = []
    for x, y, _w in g_curr.edges():
        if g_prev.has_edge(x, y):
            continue
        for a, b in ((x, y), (y, x)):
            if a not in g_prev:
                continue
            for c in sorted(g_prev.neighbors(a)):
                if c == b:
                    continue
                users = (a, b, c)
                if any(u not in rhythms_prev or u not in rhythms_curr for u in users):
                    continue
                w_bc = g_prev.weight(b, c)
                if w_bc is None:
                    condition = TriadCondition.UNCONNECTED
                elif edge_strength_class(w_bc, threshold_log10w) is EdgeStrength.STRONG:
                    condition = TriadCondition.STRONG_EDGE
                else:
                    condition = TriadCondition.WEAK_EDGE
                out.append(TriadObservation(
                    a=a, b=b, c=c,
                    bc_condition=condition,
                    sim_ac_before=similarity(rhythms_prev[a], rhythms_prev[c]),
                    sim_ac_after=similarity(rhythms_curr[a], rhythms_curr[c]),
                    sim_bc_before=similarity(rhythms_prev[b], rhythms_prev[c]),
                    sim_bc_after=similarity(rhythms_curr[b], rhythms_curr[c]),
                ))
    return out


@dataclass(frozen=True)
class TriadCurves:
    ac: BinnedCurve
    bc: BinnedCurve
    n: int


def triad_change_summary(
    triads: Sequence[TriadObservation], bin_edges=None
) -> dict[TriadCondition, TriadCurves]:
    """Per-condition change curves for the A-C and B-C pairs."""
    if bin_edges is None:
        bin_edges = similarity_bin_edges()
    out = {}
    for condition in TriadCondition:
        group = [t for t in triads if t.bc_condition is condition]
        out[condition] = TriadCurves(
            ac=BinnedCurve.from_samples(
                [t.sim_ac_before for t in group], [t.sim_ac_after for t in group], bin_edges),
            bc=BinnedCurve.from_samples(
                [t.sim_bc_before for t in group], [t.sim_bc_after for t in group], bin_edges),
            n=len(group),
        )
    return out


def welch_t(x: Iterable[float], y: Iterable[float]) -> WelchResult:
    """Welch's unequal-variance t-test with a two-sided p-value.

    t = (mean_x - mean_y) / sqrt(sx^2/nx + sy^2/ny), dof by
    Welch-Satterthwaite, and p = I_{v/(v+t^2)}(v/2, 1/2) via the
    regularised incomplete beta function.
    """
    xs = np.asarray(list(x), dtype=float)
    ys = np.asarray(list(y), dtype=float)
    if xs.size < 2 or ys.size < 2:
        raise TooFewSamples(f"need >= 2 samples per group, got {xs.size} and {ys.size}")
    vx = float(xs.var(ddof=1))
    vy = float(ys.var(ddof=1))
    if vx == 0.0 and vy == 0.0:
        raise ZeroVariance("both samples are constant")
    nx, ny = xs.size, ys.size
    se2 = vx / nx + vy / ny
    diff = float(xs.mean() - ys.mean())
    t = diff / math.sqrt(se2)
    dof = se2 ** 2 / ((vx / nx) ** 2 / (nx - 1) + (vy / ny) ** 2 / (ny - 1))
    p = float(betainc(dof / 2.0, 0.5, dof / (dof + t * t))) if t != 0.0 else 1.0
    return WelchResult(t=t, dof=dof, p=p, mean_difference=diff)
