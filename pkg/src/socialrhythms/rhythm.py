"""Weekly rhythm extraction: 168-point DFT, harmonic bandpass, 24-hour profile.

A week of hourly usage minutes is transformed to the frequency domain,
restricted to the harmonics whose periods divide 24 hours (24/i hours for
i = 1..11, i.e. 7i cycles per week) plus the DC bin, inverse-transformed,
truncated to one 24-hour cycle, and normalised to unit length. The inner
product of two such vectors is their cosine similarity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .events import HOURS_PER_WEEK, UserId, WeekIndex, WeeklyUsageSeries

N = HOURS_PER_WEEK  # 168 samples, one per hour
PROFILE_HOURS = 24

# Cycle factors: periods 24/i hours for i = 1..11 are 7i cycles per week.
PERIOD_DIVISORS = tuple(range(1, 12))
HARMONIC_BINS = tuple(7 * i for i in PERIOD_DIVISORS)
RETAINED_BINS = (0,) + HARMONIC_BINS + tuple(N - k for k in HARMONIC_BINS)

_RETAINED_MASK = np.zeros(N, dtype=bool)
_RETAINED_MASK[list(RETAINED_BINS)] = True


class RhythmError(ValueError):
    pass


class WrongLength(RhythmError):
    pass


class NotBandlimited(RhythmError):
    pass


class ZeroVector(RhythmError):
    pass


@dataclass(frozen=True)
class RhythmVector:
    """Unit-norm 24-hour activity profile of one user for one week."""

    values: np.ndarray
    user: Optional[UserId] = None
    week: Optional[WeekIndex] = None


def dft168(series) -> np.ndarray:
    """Forward DFT of a 168-sample series: bin[k] = sum_t x[t] e^(-2pi i k t / 168)."""
    x = np.asarray(series, dtype=float)
    if x.shape != (N,):
        raise WrongLength(f"expected {N} samples, got shape {x.shape}")
    return np.fft.fft(x)


def bandpass(spectrum) -> np.ndarray:
    """Zero every bin except DC and the eleven 24-hour-divisor harmonics."""
    s = np.asarray(spectrum, dtype=complex)
    if s.shape != (N,):
        raise WrongLength(f"expected {N} bins, got shape {s.shape}")
    out = np.zeros(N, dtype=complex)
    out[_RETAINED_MASK] = s[_RETAINED_MASK]
    return out


def reconstruct24(spectrum) -> np.ndarray:
    """Inverse transform of a band-limited spectrum, evaluated at hours 0..23.

    All retained bins are multiples of 7 cycles/week, so the time-domain
    signal is 24-hour periodic and one cycle carries everything.
    """
    s = np.asarray(spectrum, dtype=complex)
    if s.shape != (N,):
        raise WrongLength(f"expected {N} bins, got shape {s.shape}")
    off_band = np.abs(s[~_RETAINED_MASK])
    if off_band.size and off_band.max() > 1e-12:
        raise NotBandlimited(
            f"spectrum has energy off the retained harmonics (max |bin| = {off_band.max():.3e})")
    full = np.fft.ifft(s)
    head = full[:PROFILE_HOURS]
    residue = float(np.abs(head.imag).max())
    if residue > 1e-9:
        raise RhythmError(f"imaginary residue {residue:.3e}; spectrum of a real series expected")
    return head.real.copy()


def normalize(values, user: Optional[UserId] = None, week: Optional[WeekIndex] = None) -> RhythmVector:
    """Scale a 24-value profile to unit L2 norm."""
    v = np.asarray(values, dtype=float)
    if v.shape != (PROFILE_HOURS,):
        raise WrongLength(f"expected {PROFILE_HOURS} values, got shape {v.shape}")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ZeroVector("cannot normalise an all-zero profile (inactive user-week)")
    return RhythmVector(v / norm, user=user, week=week)


def rhythm_of_week(series: WeeklyUsageSeries) -> RhythmVector:
    """Full pipeline: DFT, bandpass, inverse, normalise.

    Raises ZeroVector for an all-zero (inactive) week; callers are expected
    to exclude that user-week.
    """
    return normalize(
        reconstruct24(bandpass(dft168(series.minutes))),
        user=series.user,
        week=series.week,
    )


def similarity(a: RhythmVector, b: RhythmVector) -> float:
    """Inner product of two unit-norm rhythm vectors (their cosine)."""
    return float(np.dot(a.values, b.values))


def rhythms_for_week(
    series_by_user: dict[UserId, WeeklyUsageSeries],
) -> tuple[dict[UserId, RhythmVector], list[UserId]]:
    """Extract rhythms for every active user-week; returns (rhythms, skipped)."""
    rhythms: dict[UserId, RhythmVector] = {}
    skipped: list[UserId] = []
    for user, series in series_by_user.items():
        try:
            rhythms[user] = rhythm_of_week(series)
        except ZeroVector:
            skipped.append(user)
    return rhythms, skipped


class RhythmTransform(TransformerMixin, BaseEstimator):
    """Stateless sklearn transformer from hourly weeks to rhythm vectors.

    Input ``X`` has shape (n_samples, 168): usage minutes per hour bin.
    Output has shape (n_samples, 24): unit-norm rhythm vectors. Rows that
    are all zero have no defined rhythm and raise ValueError.
    """

    def fit(self, X, y=None):
        self._check(X)
        return self

    def transform(self, X) -> np.ndarray:
        X = self._check(X)
        spectra = np.fft.fft(X, axis=1)
        spectra[:, ~_RETAINED_MASK] = 0.0
        profiles = np.fft.ifft(spectra, axis=1)[:, :PROFILE_HOURS].real
        norms = np.linalg.norm(profiles, axis=1)
        zero_rows = np.flatnonzero(norms == 0.0)
        if zero_rows.size:
            raise ValueError(f"rows {zero_rows.tolist()} are inactive (all-zero weeks)")
        return profiles / norms[:, None]

    @staticmethod
    def _check(X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != N:
            raise ValueError(f"X must have shape (n_samples, {N}), got {X.shape}")
        return X
