import numpy as np
import pytest

from socialrhythms.events import build_usage_series, events_by_week
from socialrhythms.rhythm import rhythms_for_week
from socialrhythms.simulate import SimConfig, run_simulation


def extract_weekly_rhythms(result):
    """Ground-truth pipeline: events -> usage series -> rhythm vectors."""
    origin = float(result.config.origin)
    buckets = events_by_week(result.events, origin, result.config.weeks)
    out = {}
    for week in sorted(result.graphs):
        series = build_usage_series(buckets[week], week, origin)
        rhythms, _ = rhythms_for_week(series)
        out[week] = rhythms
    return out


@pytest.fixture(scope="session")
def default_sim():
    """One default-config simulation shared by the slow qualitative tests."""
    return run_simulation(SimConfig())


@pytest.fixture(scope="session")
def default_rhythms(default_sim):
    return extract_weekly_rhythms(default_sim)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
