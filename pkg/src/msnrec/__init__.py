"""Multidimensional social network extraction, analytics and adaptive
people recommendations for media-sharing activity logs."""

from .analytics import (
    LayerSimilarityReport,
    LayerStats,
    all_layer_stats,
    compare_all_layers,
    compare_layers,
    layer_stats,
    tie_overlap_histogram,
)
from .errors import MsnError
from .events import ActivityEvent, EventKind, parse_events, parse_log_file
from .layers import (
    DecayConfig,
    LAYER_KINDS,
    RelationLayer,
    build_all_layers,
    build_contact_layers,
    build_favourite_layers,
    build_group_layer,
    build_opinion_layers,
    build_tag_layer,
    decayed_count,
)
from .network import (
    MSN,
    AggregationConfig,
    Tie,
    TieNeighbor,
    UnknownUser,
    aggregate,
    load_msn,
    save_msn,
    tie_neighbors,
)
from .recommend import (
    CandidateState,
    FeedbackEvent,
    RankConfig,
    RecommendationEntry,
    RecommendationList,
    WeightState,
    adapt_weights,
    apply_feedback_batch,
    contribution,
    rank,
    recommendation_value,
    refresh_system_weights,
    load_weights,
    save_weights,
)
from .simulate import (
    ExperimentReport,
    InsufficientCandidates,
    RaterProfile,
    run_experiment,
    synthetic_events,
    synthetic_msn,
)
from .store import ActivityStore, build_store, load_store, save_store

__version__ = "0.1.0"
