"""Binned summary curves and histograms shared by the analysis modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _bin_index(x: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Bin membership with half-open bins [e_i, e_{i+1}), last bin closed."""
    idx = np.searchsorted(edges, x, side="right") - 1
    idx[x == edges[-1]] = len(edges) - 2
    idx[(x < edges[0]) | (x > edges[-1])] = -1
    return idx


@dataclass(frozen=True)
class BinnedCurve:
    """Per-bin mean/sd/count of a y-variable indexed by a binned x-variable."""

    edges: np.ndarray
    means: np.ndarray
    sds: np.ndarray
    counts: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def n_bins(self) -> int:
        return len(self.edges) - 1

    def populated(self) -> np.ndarray:
        return self.counts > 0

    @classmethod
    def from_samples(cls, x, y, edges) -> "BinnedCurve":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        edges = np.asarray(edges, dtype=float)
        if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("edges must be a strictly increasing 1-D array")
        nb = len(edges) - 1
        counts = np.zeros(nb, dtype=int)
        means = np.full(nb, np.nan)
        sds = np.full(nb, np.nan)
        if x.size:
            idx = _bin_index(x, edges)
            keep = idx >= 0
            idx, yy = idx[keep], y[keep]
            counts = np.bincount(idx, minlength=nb)
            sums = np.bincount(idx, weights=yy, minlength=nb)
            sq = np.bincount(idx, weights=yy * yy, minlength=nb)
            nonzero = counts > 0
            means[nonzero] = sums[nonzero] / counts[nonzero]
            var = np.zeros(nb)
            var[nonzero] = np.maximum(sq[nonzero] / counts[nonzero] - means[nonzero] ** 2, 0.0)
            sds[nonzero] = np.sqrt(var[nonzero])
        return cls(edges=edges, means=means, sds=sds, counts=counts)


@dataclass(frozen=True)
class Histogram:
    """Fixed-width histogram with the sample mean attached."""

    edges: np.ndarray
    counts: np.ndarray
    mean: float
    n: int

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @classmethod
    def from_samples(cls, values, edges) -> "Histogram":
        values = np.asarray(values, dtype=float)
        edges = np.asarray(edges, dtype=float)
        counts = np.zeros(len(edges) - 1, dtype=int)
        if values.size:
            idx = _bin_index(values, edges)
            idx = idx[idx >= 0]
            counts = np.bincount(idx, minlength=len(edges) - 1)
        mean = float(values.mean()) if values.size else float("nan")
        return cls(edges=edges, counts=counts, mean=mean, n=int(values.size))


def similarity_bin_edges(width: float = 0.05) -> np.ndarray:
    """Uniform bin edges spanning the similarity range [-1, 1]."""
    n = int(round(2.0 / width))
    return np.linspace(-1.0, 1.0, n + 1)
