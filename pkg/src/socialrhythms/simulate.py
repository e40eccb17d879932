"""Coupled daily-phase oscillator simulator producing synthetic visit logs.

Each agent carries a daily activity phase (hours), an intrinsic drift, and
a peaked 24-hour activity profile. Pairs whose recent interaction weight
exceeds the log10 threshold pull each other's phases together (sine
coupling, zero below threshold and growing with log10 weight above it).
Visits are emitted per relationship per day from a Poisson process whose
rate scales with the overlap of the two activity profiles; dwell times are
log-normal. The output is an event log in the standard CSV format plus
ground-truth weekly graphs and phases, used to verify the analysis
pipeline end to end.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .events import SECONDS_PER_HOUR, UserId, VisitEvent
from .network import WeightedGraph

HOURS_PER_DAY = 24
DAY_SECONDS = 86400
TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"config field '{field_name}': {message}")


@dataclass(frozen=True)
class Agent:
    """One simulated user.

    phase: hours in [0, 24), centre of the daily activity bump.
    omega: intrinsic drift in hours/day (deviation from a 24 h period).
    amplitude: multiplies the visit rate.
    concentration: peakedness of the daily activity bump (> 0).
    sociability: expected visits per day per relationship (>= 0).
    """

    id: UserId
    phase: float
    omega: float = 0.0
    amplitude: float = 1.0
    concentration: float = 2.0
    sociability: float = 1.0

    def __post_init__(self):
        if not self.concentration > 0:
            raise ConfigError("concentration", f"must be > 0, got {self.concentration}")
        if self.sociability < 0:
            raise ConfigError("sociability", f"must be >= 0, got {self.sociability}")
        object.__setattr__(self, "phase", self.phase % HOURS_PER_DAY)


@dataclass(frozen=True)
class ScheduledEdge:
    a: UserId
    b: UserId
    week: int
    rate_scale: float = 1.0


@dataclass
class SimConfig:
    population: int = 2000
    weeks: int = 10
    coupling_gain: float = 1.0
    coupling_threshold: float = 3.1  # log10 seconds
    phase_noise_sd: float = 0.3      # hours per sqrt(day)
    encounter_rate: float = 20.0     # expected new random pairs per day
    homophily: float = 1.0
    seed: int = 0
    origin: int = 1582988400         # 2020-03-01 00:00 at UTC+9
    omega_sd: float = 0.4
    concentration_min: float = 0.6
    concentration_max: float = 1.2
    sociability_median: float = 0.6
    sociability_sigma_log: float = 0.7
    affinity_sigma_log: float = 1.5   # per-relationship rate multiplier spread
    dwell_median_s: float = 600.0
    dwell_sigma_log: float = 1.0
    group_size: int = 16
    intra_group_edge_prob_min: float = 0.1
    intra_group_edge_prob_max: float = 0.8
    cross_group_edge_prob: float = 0.1
    group_phase_jitter_h: float = 4.0  # <= 0 means uniform random phases
    scheduled_edges: list[ScheduledEdge] = field(default_factory=list)

    def validate(self) -> None:
        if self.population < 2:
            raise ConfigError("population", f"must be >= 2, got {self.population}")
        if self.weeks < 2:
            raise ConfigError("weeks", f"must be >= 2, got {self.weeks}")
        for name in ("coupling_gain", "phase_noise_sd", "encounter_rate", "homophily",
                     "omega_sd", "sociability_sigma_log", "affinity_sigma_log",
                     "dwell_sigma_log"):
            if getattr(self, name) < 0:
                raise ConfigError(name, f"must be >= 0, got {getattr(self, name)}")
        if not self.sociability_median >= 0:
            raise ConfigError("sociability_median", "must be >= 0")
        if not self.dwell_median_s > 0:
            raise ConfigError("dwell_median_s", "must be > 0")
        if not 0 < self.concentration_min <= self.concentration_max:
            raise ConfigError("concentration_min", "need 0 < min <= max")
        if self.group_size < 1:
            raise ConfigError("group_size", f"must be >= 1, got {self.group_size}")
        for name in ("intra_group_edge_prob_min", "intra_group_edge_prob_max",
                     "cross_group_edge_prob"):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigError(name, "must be a probability in [0, 1]")
        if self.intra_group_edge_prob_min > self.intra_group_edge_prob_max:
            raise ConfigError("intra_group_edge_prob_min", "min exceeds max")
        for se in self.scheduled_edges:
            if se.a == se.b:
                raise ConfigError("scheduled_edges", f"self edge on {se.a!r}")
            if not 0 <= se.week < self.weeks:
                raise ConfigError("scheduled_edges",
                                  f"week {se.week} outside [0, {self.weeks})")
            if se.rate_scale < 0:
                raise ConfigError("scheduled_edges", "rate_scale must be >= 0")


_NUMBER = {"type": "number"}
_NONNEG = {"type": "number", "minimum": 0}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "population": {"type": "integer", "minimum": 2},
        "weeks": {"type": "integer", "minimum": 2},
        "coupling_gain": _NONNEG,
        "coupling_threshold": _NUMBER,
        "phase_noise_sd": _NONNEG,
        "encounter_rate": _NONNEG,
        "homophily": _NONNEG,
        "seed": {"type": "integer", "minimum": 0},
        "origin": {"type": "integer"},
        "omega_sd": _NONNEG,
        "concentration_min": {"type": "number", "exclusiveMinimum": 0},
        "concentration_max": {"type": "number", "exclusiveMinimum": 0},
        "sociability_median": _NONNEG,
        "sociability_sigma_log": _NONNEG,
        "affinity_sigma_log": _NONNEG,
        "dwell_median_s": {"type": "number", "exclusiveMinimum": 0},
        "dwell_sigma_log": _NONNEG,
        "group_size": {"type": "integer", "minimum": 1},
        "intra_group_edge_prob_min": {"type": "number", "minimum": 0, "maximum": 1},
        "intra_group_edge_prob_max": {"type": "number", "minimum": 0, "maximum": 1},
        "cross_group_edge_prob": {"type": "number", "minimum": 0, "maximum": 1},
        "group_phase_jitter_h": _NUMBER,
        "scheduled_edges": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["a", "b", "week"],
                "properties": {
                    "a": {"type": "string", "minLength": 1},
                    "b": {"type": "string", "minLength": 1},
                    "week": {"type": "integer", "minimum": 0},
                    "rate_scale": _NONNEG,
                },
            },
        },
    },
}


def config_from_dict(data: dict) -> SimConfig:
    """Build and validate a SimConfig from a parsed JSON document."""
    import jsonschema

    try:
        jsonschema.validate(data, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        field_name = ".".join(str(p) for p in exc.absolute_path) or "(document)"
        raise ConfigError(field_name, exc.message) from exc
    kwargs = dict(data)
    kwargs["scheduled_edges"] = [
        ScheduledEdge(e["a"], e["b"], e["week"], e.get("rate_scale", 1.0))
        for e in data.get("scheduled_edges", [])
    ]
    config = SimConfig(**kwargs)
    config.validate()
    return config


def load_config(path) -> SimConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Phase dynamics


def coupling_strength(w: float, kappa: float, theta: float) -> float:
    """K(w) = kappa * max(0, log10 w - theta); zero at or below threshold."""
    if w <= 0:
        return 0.0
    return kappa * max(0.0, math.log10(w) - theta)


def _phase_pull(phases: np.ndarray, idx_a: np.ndarray, idx_b: np.ndarray,
                k: np.ndarray, n: int) -> np.ndarray:
    """Summed coupling term per agent, in hours/day."""
    if idx_a.size == 0:
        return np.zeros(n)
    gap = TWO_PI * (phases[idx_b] - phases[idx_a]) / HOURS_PER_DAY
    pull_ab = k * (HOURS_PER_DAY / TWO_PI) * np.sin(gap)
    return (np.bincount(idx_a, weights=pull_ab, minlength=n)
            - np.bincount(idx_b, weights=pull_ab, minlength=n))


def step_phases(
    agents: Sequence[Agent],
    g: WeightedGraph,
    dt: float,
    kappa: float,
    theta: float,
    noise_sd: float,
    seed: int,
) -> list[Agent]:
    """One explicit-Euler step of the coupled phase dynamics.

    phi_i <- wrap(phi_i + dt*omega_i
                  + dt * sum_j K(w_ij) * (24/2pi) * sin(2pi (phi_j - phi_i)/24)
                  + noise_i)
    with K(w) = kappa * max(0, log10 w - theta) and
    noise_i ~ Normal(0, noise_sd * sqrt(dt)) drawn once per agent, in
    agent order, from numpy's default generator seeded with ``seed``.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    index = {a.id: i for i, a in enumerate(agents)}
    n = len(agents)
    phases = np.array([a.phase for a in agents])
    omegas = np.array([a.omega for a in agents])

    ia, ib, ks = [], [], []
    for a, b, w in g.edges():
        if a not in index or b not in index:
            raise KeyError(f"graph edge ({a!r}, {b!r}) references unknown agents")
        k = coupling_strength(w, kappa, theta)
        if k > 0.0:
            ia.append(index[a])
            ib.append(index[b])
            ks.append(k)
    pull = _phase_pull(phases, np.asarray(ia, dtype=int), np.asarray(ib, dtype=int),
                       np.asarray(ks), n)

    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, noise_sd * math.sqrt(dt), n) if noise_sd > 0 else np.zeros(n)
    new_phases = (phases + dt * (omegas + pull) + noise) % HOURS_PER_DAY
    return [dataclasses.replace(a, phase=float(p)) for a, p in zip(agents, new_phases)]


def lock_condition_two(delta_omega: float, coupling: float) -> bool:
    """Two coupled oscillators lock iff |delta_omega| <= 2K (rad/day).

    The phase gap obeys psi' = delta_omega - 2K sin(psi), which has a
    fixed point exactly when |delta_omega| <= 2K.
    """
    if coupling < 0:
        raise ValueError(f"coupling must be >= 0, got {coupling}")
    return abs(delta_omega) <= 2.0 * coupling


def two_oscillator_drift_rate(
    delta_omega: float,
    coupling,
    horizon_days: float = 240.0,
    dt: float = 0.002,
    psi0: float = 0.0,
):
    """Mean |dpsi/dt| over the final quarter of a long gap integration.

    Near zero when the pair locks, close to sqrt(d_omega^2 - 4K^2) when it
    drifts. ``coupling`` may be an array; the integration is vectorised.
    """
    ks = np.atleast_1d(np.asarray(coupling, dtype=float))
    psi = np.full(ks.shape, psi0, dtype=float)
    steps = int(round(horizon_days / dt))
    mark = (3 * steps) // 4
    psi_mark = psi.copy()
    for s in range(steps):
        psi = psi + dt * (delta_omega - 2.0 * ks * np.sin(psi))
        if s + 1 == mark:
            psi_mark = psi.copy()
    rate = np.abs(psi - psi_mark) / ((steps - mark) * dt)
    return rate if np.ndim(coupling) else float(rate[0])


def two_oscillator_locked(
    delta_omega: float,
    coupling,
    horizon_days: float = 240.0,
    dt: float = 0.002,
):
    """Lock test by integration: negligible net gap drift at the horizon."""
    rate = two_oscillator_drift_rate(delta_omega, coupling, horizon_days, dt)
    tol = 0.05 * max(abs(delta_omega), 1e-9)
    return rate < tol


# ---------------------------------------------------------------------------
# Scenario specifications


@dataclass(frozen=True)
class TwoOscillatorScenario:
    delta_omega: float  # rad/day
    coupling: float     # rad/day


@dataclass(frozen=True)
class TriadScenario:
    """Many disjoint A/B/C triples with a scheduled A-B closure.

    topology "triangle": B-C exists from week 0 (closed condition);
    topology "path": only A-C exists (open condition).
    """

    topology: str
    closure_week: int = 2
    n_triads: int = 200
    bc_rate_scale: float = 1.0

    def __post_init__(self):
        if self.topology not in ("triangle", "path"):
            raise ConfigError("topology", f"must be 'triangle' or 'path', got {self.topology!r}")


@dataclass(frozen=True)
class PopulationScenario:
    config: SimConfig


def triad_scenario_config(scenario: TriadScenario, base: Optional[SimConfig] = None) -> SimConfig:
    """Population config realising a triad scenario: no random encounters,
    no background topology, one scheduled triple per triad."""
    base = base if base is not None else SimConfig()
    scheduled: list[ScheduledEdge] = []
    weeks = max(base.weeks, scenario.closure_week + 2)
    for t in range(scenario.n_triads):
        a, b, c = (f"t{t:04d}{u}" for u in "abc")
        scheduled.append(ScheduledEdge(a, c, 0))
        if scenario.topology == "triangle":
            scheduled.append(ScheduledEdge(b, c, 0, rate_scale=scenario.bc_rate_scale))
        scheduled.append(ScheduledEdge(a, b, scenario.closure_week))
    return dataclasses.replace(
        base,
        population=3 * scenario.n_triads,
        weeks=weeks,
        encounter_rate=0.0,
        cross_group_edge_prob=0.0,
        intra_group_edge_prob_min=0.0,
        intra_group_edge_prob_max=0.0,
        group_phase_jitter_h=-1.0,
        scheduled_edges=scheduled,
    )


def _triad_ids(n_triads: int) -> list[tuple[UserId, UserId, UserId]]:
    return [tuple(f"t{t:04d}{u}" for u in "abc") for t in range(n_triads)]


# ---------------------------------------------------------------------------
# Event emission


def activity_profile(phase: float, concentration: float) -> np.ndarray:
    """Normalised 24-hour activity distribution, peaked at ``phase``."""
    hours = np.arange(HOURS_PER_DAY)
    p = np.exp(concentration * np.cos(TWO_PI * (hours - phase) / HOURS_PER_DAY))
    return p / p.sum()


def profile_overlap(profile_a: np.ndarray, profile_b: np.ndarray) -> float:
    """Overlap of two normalised profiles; 1 when both are uniform."""
    return float(HOURS_PER_DAY * np.dot(profile_a, profile_b))


def pair_visit_rate(agent_a: Agent, agent_b: Agent, rate_scale: float = 1.0) -> float:
    """Expected visits per day between two related agents."""
    overlap = profile_overlap(
        activity_profile(agent_a.phase, agent_a.concentration),
        activity_profile(agent_b.phase, agent_b.concentration),
    )
    base = math.sqrt(agent_a.sociability * agent_a.amplitude
                     * agent_b.sociability * agent_b.amplitude)
    return base * overlap * rate_scale


def _emit_for_edges(
    profiles: np.ndarray,
    ids: list[UserId],
    idx_a: np.ndarray,
    idx_b: np.ndarray,
    lam: np.ndarray,
    day: int,
    rng: np.random.Generator,
    origin: float,
    dwell_median_s: float,
    dwell_sigma_log: float,
    min_counts: Optional[np.ndarray] = None,
) -> list[VisitEvent]:
    counts = rng.poisson(lam)
    if min_counts is not None:
        counts = np.maximum(counts, min_counts)
    total = int(counts.sum())
    if total == 0:
        return []
    edge_of_event = np.repeat(np.arange(len(lam)), counts)
    prod = profiles[idx_a] * profiles[idx_b]
    cdf = np.cumsum(prod / prod.sum(axis=1, keepdims=True), axis=1)
    u = rng.random(total)
    hour = (cdf[edge_of_event] < u[:, None]).sum(axis=1)
    second = rng.random(total) * SECONDS_PER_HOUR
    dwell = rng.lognormal(math.log(dwell_median_s), dwell_sigma_log, total)
    visitor_is_a = rng.random(total) < 0.5
    day_start = origin + day * DAY_SECONDS
    events = []
    for e, h, sec, dw, a_first in zip(edge_of_event, hour, second, dwell, visitor_is_a):
        a = ids[idx_a[e]]
        b = ids[idx_b[e]]
        visitor, owner = (a, b) if a_first else (b, a)
        start = math.floor(day_start + h * SECONDS_PER_HOUR + sec)
        events.append(VisitEvent(visitor, owner, float(start), float(dw)))
    return events


def emit_events(
    agents: Sequence[Agent],
    g: WeightedGraph,
    day: int,
    seed: int,
    *,
    origin: float = 0.0,
    dwell_median_s: float = 600.0,
    dwell_sigma_log: float = 1.0,
    rate_scales: Optional[dict[tuple[UserId, UserId], float]] = None,
) -> list[VisitEvent]:
    """One day of visits over the edges of the relationship graph.

    Per edge, the visit count is Poisson with rate
    sqrt(soc_a * amp_a * soc_b * amp_b) * overlap(profile_a, profile_b),
    start hours are drawn from the product of the two activity profiles,
    and dwell is log-normal (median dwell_median_s).
    """
    index = {a.id: i for i, a in enumerate(agents)}
    phases = np.array([a.phase for a in agents])
    concentrations = np.array([a.concentration for a in agents])
    s_eff = np.array([a.sociability * a.amplitude for a in agents])

    hours = np.arange(HOURS_PER_DAY)
    raw = np.exp(concentrations[:, None]
                 * np.cos(TWO_PI * (hours[None, :] - phases[:, None]) / HOURS_PER_DAY))
    profiles = raw / raw.sum(axis=1, keepdims=True)

    edge_list = sorted(g.edges())
    if not edge_list:
        return []
    idx_a = np.array([index[a] for a, _, _ in edge_list])
    idx_b = np.array([index[b] for _, b, _ in edge_list])
    overlap = HOURS_PER_DAY * np.sum(profiles[idx_a] * profiles[idx_b], axis=1)
    scale = np.ones(len(edge_list))
    if rate_scales:
        for i, (a, b, _) in enumerate(edge_list):
            scale[i] = rate_scales.get((a, b), rate_scales.get((b, a), 1.0))
    lam = np.sqrt(s_eff[idx_a] * s_eff[idx_b]) * overlap * scale

    ids = [a.id for a in agents]
    rng = np.random.default_rng(seed)
    return _emit_for_edges(profiles, ids, idx_a, idx_b, lam, day, rng,
                           origin, dwell_median_s, dwell_sigma_log)


def evolve_network(
    g: WeightedGraph,
    agents: Sequence[Agent],
    day: int,
    config: SimConfig,
    seed: int,
) -> WeightedGraph:
    """Relationship bookkeeping for one day.

    Activates scheduled edges at the start of their week and adds random
    encounters; an encounter between i and j is accepted with probability
    exp(homophily * (cos(2pi (phi_i - phi_j)/24) - 1)), so homophily 0
    gives uniform pairing. New edges get a placeholder weight of 1 s;
    weekly interaction weights are recomputed from emitted events by the
    run loop, not here.
    """
    out = WeightedGraph(week=g.week)
    for u in g.nodes:
        out.add_node(u)
    for a, b, w in g.edges():
        out.add_edge(a, b, w)

    if day % 7 == 0:
        week = day // 7
        for se in config.scheduled_edges:
            if se.week == week and not out.has_edge(se.a, se.b):
                out.add_edge(se.a, se.b, 1.0)

    rng = np.random.default_rng(seed)
    n_new = int(rng.poisson(config.encounter_rate))
    ids = sorted(a.id for a in agents)
    phase_of = {a.id: a.phase for a in agents}
    for _ in range(n_new):
        for _try in range(10000):
            i = int(rng.integers(len(ids)))
            j = int(rng.integers(len(ids)))
            if i == j:
                continue
            a, b = ids[i], ids[j]
            if out.has_edge(a, b):
                continue
            gap = TWO_PI * (phase_of[a] - phase_of[b]) / HOURS_PER_DAY
            accept = math.exp(config.homophily * (math.cos(gap) - 1.0))
            if rng.random() < accept:
                out.add_edge(a, b, 1.0)
                break
        else:
            break  # graph effectively saturated
    return out


# ---------------------------------------------------------------------------
# Full simulation


@dataclass
class SimResult:
    config: SimConfig
    events: list[VisitEvent]
    graphs: dict[int, WeightedGraph]
    phases: dict[int, dict[UserId, float]]
    agents: list[Agent]


def _split_dwell_by_week(start: float, dwell: float, origin: float,
                         week_seconds: float) -> list[tuple[int, float]]:
    out = []
    t = start
    end = start + dwell
    while t < end:
        week = int((t - origin) // week_seconds)
        week_end = origin + (week + 1) * week_seconds
        chunk = min(end, week_end) - t
        out.append((week, chunk))
        t += chunk
    return out


def run_simulation(config: SimConfig) -> SimResult:
    """Run the full population simulation; deterministic given the seed."""
    from .events import SECONDS_PER_WEEK

    config.validate()
    rng = np.random.default_rng(config.seed)
    pop = config.population
    ids = [f"u{i:05d}" for i in range(pop)]

    n_groups = -(-pop // config.group_size)
    group_of = np.arange(pop) // config.group_size
    centers = rng.uniform(0.0, HOURS_PER_DAY, n_groups)
    if config.group_phase_jitter_h > 0:
        phases = (centers[group_of]
                  + rng.normal(0.0, config.group_phase_jitter_h, pop)) % HOURS_PER_DAY
    else:
        phases = rng.uniform(0.0, HOURS_PER_DAY, pop)
    omegas = rng.normal(0.0, config.omega_sd, pop)
    concentrations = rng.uniform(config.concentration_min, config.concentration_max, pop)
    sociabilities = rng.lognormal(math.log(config.sociability_median)
                                  if config.sociability_median > 0 else -math.inf,
                                  config.sociability_sigma_log, pop) \
        if config.sociability_median > 0 else np.zeros(pop)

    id_index = {u: i for i, u in enumerate(ids)}
    relations: dict[tuple[int, int], float] = {}

    def pair_key(i: int, j: int) -> tuple[int, int]:
        return (i, j) if i < j else (j, i)

    def draw_affinity() -> float:
        if config.affinity_sigma_log > 0:
            return float(rng.lognormal(0.0, config.affinity_sigma_log))
        return 1.0

    for gidx in range(n_groups):
        members = [i for i in range(pop) if group_of[i] == gidx]
        p_g = rng.uniform(config.intra_group_edge_prob_min, config.intra_group_edge_prob_max)
        for x in range(len(members)):
            for y in range(x + 1, len(members)):
                if rng.random() < p_g:
                    relations[pair_key(members[x], members[y])] = draw_affinity()
    if config.cross_group_edge_prob > 0:
        for i in range(pop):
            if rng.random() < config.cross_group_edge_prob:
                j = int(rng.integers(pop))
                while j == i:
                    j = int(rng.integers(pop))
                relations.setdefault(pair_key(i, j), draw_affinity())

    scheduled_by_week: dict[int, list[ScheduledEdge]] = {}
    for se in config.scheduled_edges:
        if se.a not in id_index or se.b not in id_index:
            raise ConfigError("scheduled_edges",
                              f"unknown user in edge ({se.a!r}, {se.b!r}); "
                              f"population ids are u00000..u{pop - 1:05d} "
                              "unless the scenario defines its own")
        scheduled_by_week.setdefault(se.week, []).append(se)

    dt = 1.0 / HOURS_PER_DAY
    noise_scale = config.phase_noise_sd * math.sqrt(dt)
    hours_axis = np.arange(HOURS_PER_DAY)

    cum_week_w: dict[tuple[int, int], float] = {}
    pending_first: set[tuple[int, int]] = set()
    week_weights: dict[int, dict[tuple[int, int], float]] = {}
    events_all: list[VisitEvent] = []
    phase_snapshots: dict[int, dict[UserId, float]] = {}

    n_days = config.weeks * 7
    for day in range(n_days):
        week = day // 7
        if day % 7 == 0:
            cum_week_w = {}
            for se in scheduled_by_week.get(week, ()):
                key = pair_key(id_index[se.a], id_index[se.b])
                relations[key] = se.rate_scale
                pending_first.add(key)

        if config.encounter_rate > 0:
            n_new = int(rng.poisson(config.encounter_rate))
            for _ in range(n_new):
                for _try in range(10000):
                    i = int(rng.integers(pop))
                    j = int(rng.integers(pop))
                    if i == j:
                        continue
                    key = pair_key(i, j)
                    if key in relations:
                        continue
                    gap = TWO_PI * (phases[i] - phases[j]) / HOURS_PER_DAY
                    if rng.random() < math.exp(config.homophily * (math.cos(gap) - 1.0)):
                        relations[key] = draw_affinity()
                        break
                else:
                    break

        # Coupling weight: this week's running dwell total, so a pair is
        # coupled during week w exactly when its week-w weight clears the
        # threshold (the analysis bins by the same weekly weight).
        k_vals = []
        ka = []
        kb = []
        for key in sorted(cum_week_w):
            k = coupling_strength(cum_week_w[key], config.coupling_gain,
                                  config.coupling_threshold)
            if k > 0:
                ka.append(key[0])
                kb.append(key[1])
                k_vals.append(k)
        idx_ka = np.asarray(ka, dtype=int)
        idx_kb = np.asarray(kb, dtype=int)
        arr_k = np.asarray(k_vals)

        # Emit this day's visits using the day-start profiles.
        raw = np.exp(concentrations[:, None]
                     * np.cos(TWO_PI * (hours_axis[None, :] - phases[:, None]) / HOURS_PER_DAY))
        profiles = raw / raw.sum(axis=1, keepdims=True)
        rel_items = sorted(relations.items())
        today_w: dict[tuple[int, int], float] = {}
        if rel_items:
            idx_a = np.array([k[0] for k, _ in rel_items])
            idx_b = np.array([k[1] for k, _ in rel_items])
            scale = np.array([s for _, s in rel_items])
            overlap = HOURS_PER_DAY * np.sum(profiles[idx_a] * profiles[idx_b], axis=1)
            s_eff = sociabilities
            lam = np.sqrt(s_eff[idx_a] * s_eff[idx_b]) * overlap * scale
            min_counts = None
            if pending_first:
                min_counts = np.array([1 if k in pending_first else 0
                                       for k, _ in rel_items])
                pending_first.clear()
            day_events = _emit_for_edges(
                profiles, ids, idx_a, idx_b, lam, day, rng,
                float(config.origin), config.dwell_median_s, config.dwell_sigma_log,
                min_counts=min_counts,
            )
            for ev in day_events:
                key = pair_key(id_index[ev.visitor], id_index[ev.owner])
                today_w[key] = today_w.get(key, 0.0) + ev.dwell
                for wk, chunk in _split_dwell_by_week(ev.start, ev.dwell,
                                                      float(config.origin), SECONDS_PER_WEEK):
                    week_weights.setdefault(wk, {})
                    week_weights[wk][key] = week_weights[wk].get(key, 0.0) + chunk
            events_all.extend(day_events)

        for key, w in today_w.items():
            cum_week_w[key] = cum_week_w.get(key, 0.0) + w

        for _hour in range(HOURS_PER_DAY):
            pull = _phase_pull(phases, idx_ka, idx_kb, arr_k, pop)
            noise = rng.normal(0.0, noise_scale, pop) if noise_scale > 0 else 0.0
            phases = (phases + dt * (omegas + pull) + noise) % HOURS_PER_DAY

        if day % 7 == 6:
            phase_snapshots[week] = {ids[i]: float(phases[i]) for i in range(pop)}

    events_all.sort(key=lambda e: (e.start, e.visitor, e.owner, e.dwell))

    graphs: dict[int, WeightedGraph] = {}
    for week in range(config.weeks):
        g = WeightedGraph(week=week)
        for (i, j), w in sorted(week_weights.get(week, {}).items()):
            if w > 0:
                g.add_edge(ids[i], ids[j], w)
        graphs[week] = g

    agents = [Agent(id=ids[i], phase=float(phases[i]), omega=float(omegas[i]),
                    amplitude=1.0, concentration=float(concentrations[i]),
                    sociability=float(sociabilities[i])) for i in range(pop)]
    return SimResult(config=config, events=events_all, graphs=graphs,
                     phases=phase_snapshots, agents=agents)
