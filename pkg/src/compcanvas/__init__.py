"""Composition-canvas retrieval.

Represents each image by geometric abstractions of its figures (poselines,
view cones, action regions and lines) derived from pose keypoints, and
ranks a corpus by compositional similarity. Includes normalizations, a
greedy poseline matcher with ratio summaries, external-feature fusion, a
pose-distance baseline, an evaluation harness with grid search, SVG
overlays, and an HTTP query service.
"""

from .canvas import (
    ActionLine,
    ActionRegion,
    BisectionRay,
    CompositionCanvas,
    ConePolygon,
    ExtractParams,
    Poseline,
    build_cone,
    extract_canvas,
    intersect_cones,
    make_action_lines,
    make_bisection_ray,
    make_poseline,
)
from .evaluation import (
    GridSpec,
    MetricsReport,
    cluster_feature_vector,
    evaluate,
    grid_search,
    mean_average_precision,
    precision_recall_at_k,
)
from .index import (
    CorpusIndex,
    QueryRequest,
    RankedResults,
    attach_features,
    build_index,
    load_index,
    query,
    save_index,
)
from .latp import latp_distance, neck_normalize, pose_pair_distance
from .normalize import NormMode, NormalizedCanvas, PoselineSet, normalize
from .overlay import OverlayOptions, render_match, render_overlay
from .pose import (
    DerivedJoints,
    Keypoint,
    Pose,
    PoseScene,
    derive_joints,
    parse_keypoint_file,
    serialize_scenes,
)
from .similarity import (
    CombineMode,
    MatchList,
    SimilarityParams,
    SimilarityRecord,
    SortMethod,
    combine,
    compare_canvases,
    greedy_bipartite_match,
    poseline_distance,
    rank,
    summarize,
)
from .synthetic import CLASS_TEMPLATES, FigurePlacement, SyntheticSpec, generate_synthetic_corpus

__version__ = "0.1.0"
