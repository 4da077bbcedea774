"""Collaborative video-annotation aggregation: confidence-weighted merging,
consensus overlays, rationale clustering, evaluation, simulation, service."""

from .errors import (
    ConfidenceOutOfRange,
    CoordinateOutOfRange,
    CrowdmarkError,
    DegenerateRegion,
    EmbeddingDimMismatch,
    EmptyCustomLabel,
    EmptyMemberList,
    InvalidRecord,
    InvalidScenario,
    LogCorrupt,
    MissingGroundTruth,
    MixedVideoInput,
    NotAuthor,
    RegionDegenerate,
    RemoteEmbedderUnavailable,
    UnknownAnnotation,
    UnknownLabel,
    UnknownRegion,
    UnknownVideo,
    ZeroVector,
)
from .model import (
    AggregationConfig,
    Annotation,
    Artifact,
    ClusterConfig,
    DemonstrationConfig,
    GroundTruth,
    Label,
    MAX_CUSTOM_LABEL_LEN,
    MAX_REASON_LEN,
    PREDEFINED_LABELS,
    RECORD_FIELDS,
    SpatioTemporalRegion,
    TEMPORAL_CLIP_TOLERANCE,
    UserHistory,
    VideoMeta,
    make_label,
    taxonomy,
    validate_annotation,
)
from .aggregation import (
    AggregatedRegion,
    AggregatedRegionSet,
    ClusterSummary,
    LabelAggregate,
    LabelPair,
    aggregate,
    conf_weighted_avg,
    dominant_label,
    histories_from_annotations,
    iou3d,
    label_rank_key,
    merge_annotations,
    reliability,
)
from .clustering import (
    Embedder,
    Embedding,
    HashingEmbedder,
    KMeansResult,
    RationaleClusterer,
    RemoteEmbedder,
    embed_all,
    kmeans_cosine,
)
from .demonstration import (
    COLOR_HEX,
    ConsensusState,
    GREEN,
    ORANGE,
    RED,
    color_state,
    compute_consensus,
    detail,
    find_region,
    hover,
    overlays_at,
)
from .evaluation import (
    ClassificationConfig,
    ConvergencePoint,
    MetricsReport,
    SweepResult,
    SweepRow,
    build_prior_sets,
    classify_video,
    convergence_csv,
    convergence_series,
    default_thresholds,
    prf,
    sensitivity_sweep,
)
from .simulator import (
    AnnotatorProfile,
    ComparisonReport,
    DAY_MS,
    MethodMetrics,
    Scenario,
    ScenarioConfig,
    baseline_majority_vote,
    baseline_nms,
    generate_scenario,
    run_comparison,
)
from .logstore import (
    AnnotationLog,
    LogState,
    annotation_from_record,
    format_line,
    parse_line,
    replay,
)
from .service import ServiceConfig, VideoStore, batch_aggregate, create_app

__version__ = "0.1.0"

__all__ = [
    "AggregatedRegion",
    "AggregatedRegionSet",
    "AggregationConfig",
    "Annotation",
    "AnnotationLog",
    "AnnotatorProfile",
    "Artifact",
    "COLOR_HEX",
    "ClassificationConfig",
    "ClusterConfig",
    "ClusterSummary",
    "ComparisonReport",
    "ConfidenceOutOfRange",
    "ConsensusState",
    "ConvergencePoint",
    "CoordinateOutOfRange",
    "CrowdmarkError",
    "DAY_MS",
    "DegenerateRegion",
    "DemonstrationConfig",
    "Embedder",
    "Embedding",
    "EmbeddingDimMismatch",
    "EmptyCustomLabel",
    "EmptyMemberList",
    "GREEN",
    "GroundTruth",
    "HashingEmbedder",
    "InvalidRecord",
    "InvalidScenario",
    "KMeansResult",
    "Label",
    "LabelAggregate",
    "LabelPair",
    "LogCorrupt",
    "LogState",
    "MAX_CUSTOM_LABEL_LEN",
    "MAX_REASON_LEN",
    "MetricsReport",
    "MissingGroundTruth",
    "MixedVideoInput",
    "NotAuthor",
    "ORANGE",
    "PREDEFINED_LABELS",
    "RECORD_FIELDS",
    "RED",
    "RationaleClusterer",
    "RegionDegenerate",
    "RemoteEmbedder",
    "RemoteEmbedderUnavailable",
    "Scenario",
    "ScenarioConfig",
    "ServiceConfig",
    "SpatioTemporalRegion",
    "SweepResult",
    "SweepRow",
    "TEMPORAL_CLIP_TOLERANCE",
    "UnknownAnnotation",
    "UnknownLabel",
    "UnknownRegion",
    "UnknownVideo",
    "UserHistory",
    "VideoMeta",
    "VideoStore",
    "ZeroVector",
    "aggregate",
    "annotation_from_record",
    "baseline_majority_vote",
    "baseline_nms",
    "batch_aggregate",
    "build_prior_sets",
    "classify_video",
    "color_state",
    "compute_consensus",
    "conf_weighted_avg",
    "convergence_csv",
    "convergence_series",
    "create_app",
    "default_thresholds",
    "detail",
    "dominant_label",
    "embed_all",
    "find_region",
    "format_line",
    "generate_scenario",
    "histories_from_annotations",
    "hover",
    "iou3d",
    "kmeans_cosine",
    "label_rank_key",
    "make_label",
    "merge_annotations",
    "overlays_at",
    "parse_line",
    "prf",
    "reliability",
    "replay",
    "run_comparison",
    "sensitivity_sweep",
    "taxonomy",
    "validate_annotation",
]
