"""Weekly social-rhythm extraction, entrainment analysis, and simulation."""

__version__ = "0.1.0"

from .events import (
    VisitEvent,
    WeeklyUsageSeries,
    assign_week,
    build_usage_series,
    parse_events,
)
from .rhythm import (
    RETAINED_BINS,
    RhythmTransform,
    RhythmVector,
    bandpass,
    dft168,
    normalize,
    reconstruct24,
    rhythm_of_week,
    similarity,
)
from .network import (
    EdgeStrength,
    WeightedGraph,
    build_week_network,
    degree_powerlaw_exponent,
    edge_strength_class,
    null_reattach,
    powerlaw_mle,
    random_pairs,
    strong_edge_subgraph,
)
from .entrainment import (
    PairObservation,
    TriadCondition,
    TriadObservation,
    WelchResult,
    change_curve,
    intrapersonal_similarity,
    new_edges,
    similarity_distributions,
    similarity_vs_weight_curve,
    triad_change_summary,
    triad_extract,
    welch_t,
)
from .structure import (
    CommunityStats,
    Partition,
    community_similarity_vs_clustering,
    detect_communities,
    modularity,
    weighted_clustering_coefficient,
)
from .distances import (
    DistanceField,
    decay_threshold_distance,
    hop_sssp,
    reach_fraction,
    similarity_vs_distance,
    weighted_sssp,
)
from .simulate import (
    Agent,
    SimConfig,
    ScheduledEdge,
    emit_events,
    evolve_network,
    lock_condition_two,
    run_simulation,
    step_phases,
)
