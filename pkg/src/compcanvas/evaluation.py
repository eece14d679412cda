"""Retrieval evaluation: P@k / R@k / mAP, grid search, cluster features.

Every labeled corpus image is used once as a query against all others;
relevance means sharing the query's class label (the query itself is
excluded from both the ranking and the relevant set). Scenes are rescaled
so the longer side is 1000px before indexing unless disabled, keeping the
pixel-space outlier threshold comparable across corpora.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .canvas import CompositionCanvas, ExtractParams
from .index import CorpusIndex, QueryRequest, attach_features, build_index, query
from .normalize import NormMode, normalize
from .pose import PoseScene, rescale_to_longest_side
from .similarity import (
    CombineMode,
    SimilarityParams,
    SortMethod,
    default_filter_threshold,
)

K_RANGE = tuple(range(1, 11))


@dataclass(frozen=True, slots=True)
class MetricsReport:
    mean_p_at_k: dict[int, float]
    mean_r_at_k: dict[int, float]
    mean_ap: float
    query_count: int
    skipped_queries: tuple[str, ...]  # labeled queries with no other same-class image
    params: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def mp1(self) -> float:
        return self.mean_p_at_k[1]

    def to_dict(self) -> dict:
        return {
            "mP@k": {str(k): v for k, v in self.mean_p_at_k.items()},
            "mR@k": {str(k): v for k, v in self.mean_r_at_k.items()},
            "mAP": self.mean_ap,
            "query_count": self.query_count,
            "skipped_queries": list(self.skipped_queries),
            "params": self.params,
            "notes": list(self.notes),
        }

    def table(self) -> str:
        """Aligned text row set: mP@1, mP@2, mP@5, mAP (percent)."""
        header = f"{'mP@1':>8} {'mP@2':>8} {'mP@5':>8} {'mAP':>8}"
        row = (
            f"{100 * self.mean_p_at_k[1]:8.2f} {100 * self.mean_p_at_k[2]:8.2f} "
            f"{100 * self.mean_p_at_k[5]:8.2f} {100 * self.mean_ap:8.2f}"
        )
        return header + "\n" + row


def precision_recall_at_k(
    ranked_ids: list[str], relevant: set[str], k: int
) -> tuple[float, float]:
    """(P@k, R@k) of one ranking; the relevant set must exclude the query."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not relevant:
        raise ValueError("relevant set is empty")
    hits = sum(1 for image_id in ranked_ids[:k] if image_id in relevant)
    return hits / k, hits / len(relevant)


def average_precision(ranked_ids: list[str], relevant: set[str]) -> float:
    """Mean of precision at each relevant rank, over the full ranking."""
    if not relevant:
        raise ValueError("relevant set is empty")
    hits = 0
    total = 0.0
    for rank_pos, image_id in enumerate(ranked_ids, start=1):
        if image_id in relevant:
            hits += 1
            total += hits / rank_pos
    return total / len(relevant)


def mean_average_precision(
    rankings: dict[str, list[str]], relevance: dict[str, set[str]]
) -> float:
    """mAP over queries; queries with empty relevant sets are skipped."""
    aps = [
        average_precision(ranked, relevance[query_id])
        for query_id, ranked in sorted(rankings.items())
        if relevance[query_id]
    ]
    return float(np.mean(aps)) if aps else 0.0


def evaluate(
    index: CorpusIndex,
    norm_mode: NormMode = NormMode.NONE,
    similarity: SimilarityParams | None = None,
    baseline: str | None = None,
    latp_mode: str = "min",
    latp_robust: bool = False,
    labels: dict[str, str] | None = None,
) -> MetricsReport:
    """Leave-one-out retrieval metrics over a labeled index.

    `labels` overrides the index's own labels (used for shuffled-label
    null checks). Raises on unlabeled entries.
    """
    if similarity is None:
        similarity = SimilarityParams(filter_threshold=default_filter_threshold(norm_mode))
    label_of = labels if labels is not None else {
        k: v for k, v in index.labels.items() if v is not None
    }
    unlabeled = [i for i in index.image_ids if i not in label_of or label_of[i] is None]
    if unlabeled:
        raise ValueError(f"unlabeled entries: {', '.join(unlabeled)}")

    by_class: dict[str, set[str]] = {}
    for image_id, label in label_of.items():
        by_class.setdefault(label, set()).add(image_id)

    n = len(index)
    p_rows = []
    r_rows = []
    aps = []
    skipped = []
    notes = []
    if baseline == "latp" and latp_robust:
        from .latp import ROBUST_VERIFY_NOTE

        notes.append(ROBUST_VERIFY_NOTE)
    for query_id in index.image_ids:
        relevant = by_class[label_of[query_id]] - {query_id}
        if not relevant:
            skipped.append(query_id)
            continue
        req = QueryRequest(
            query_id=query_id,
            k=max(n - 1, 1),
            norm_mode=norm_mode,
            similarity=similarity,
            baseline=baseline,
            latp_mode=latp_mode,
            latp_robust=latp_robust,
        )
        ranked = [rec.target_id for rec in query(index, req).records]
        pr = [precision_recall_at_k(ranked, relevant, k) for k in K_RANGE]
        p_rows.append([p for p, _ in pr])
        r_rows.append([r for _, r in pr])
        aps.append(average_precision(ranked, relevant))

    p_mat = np.asarray(p_rows) if p_rows else np.zeros((0, len(K_RANGE)))
    r_mat = np.asarray(r_rows) if r_rows else np.zeros((0, len(K_RANGE)))
    mean_p = {k: float(p_mat[:, i].mean()) if len(p_rows) else 0.0 for i, k in enumerate(K_RANGE)}
    mean_r = {k: float(r_mat[:, i].mean()) if len(r_rows) else 0.0 for i, k in enumerate(K_RANGE)}
    return MetricsReport(
        mean_p_at_k=mean_p,
        mean_r_at_k=mean_r,
        mean_ap=float(np.mean(aps)) if aps else 0.0,
        query_count=len(aps),
        skipped_queries=tuple(skipped),
        params={
            "extract": index.params.fingerprint(),
            "norm_mode": str(NormMode(norm_mode).value),
            "filter_threshold": similarity.filter_threshold,
            "sort_method": similarity.sort_method.value,
            "baseline": baseline,
            "latp_mode": latp_mode if baseline == "latp" else None,
            "latp_robust": latp_robust if baseline == "latp" else None,
        },
        notes=tuple(notes),
    )


def prepare_scenes(scenes: list[PoseScene], rescale: bool = True, target: int = 1000) -> list[PoseScene]:
    return [rescale_to_longest_side(s, target) if rescale else s for s in scenes]


@dataclass(frozen=True, slots=True)
class GridSpec:
    """Value lists per hyperparameter; the search is their full product."""

    correction_deg: tuple[float, ...] = (20.0,)
    cone_opening_deg: tuple[float, ...] = (80.0,)
    cone_scale: tuple[float, ...] = (10.0,)
    cone_base_scale: tuple[float, ...] = (0.0,)
    poseline_fallback: tuple[bool, ...] = (False,)
    bisection_fallback: tuple[bool, ...] = (False,)
    filter_threshold: tuple[float | None, ...] = (None,)  # None = mode default
    norm_mode: tuple[str, ...] = ("none",)
    sort_method: tuple[str, ...] = ("cr_desc",)
    feature_weight: tuple[float, ...] = (0.5,)  # only active with attached features

    def __post_init__(self) -> None:
        for name in self.__dataclass_fields__:
            if not getattr(self, name):
                raise ValueError(f"grid list {name} is empty")

    def size(self) -> int:
        out = 1
        for name in self.__dataclass_fields__:
            out *= len(getattr(self, name))
        return out


def grid_search(
    spec: GridSpec,
    scenes: list[PoseScene],
    rescale: bool = True,
    features: dict[str, list[float]] | None = None,
    feature_metric: str = "euclidean",
    combine_mode: CombineMode = CombineMode.NONE,
) -> list[tuple[dict, MetricsReport]]:
    """Evaluate every parameter combination; best mP@1 first (ties: mAP).

    Canvases are re-extracted only when an extraction parameter changes;
    ranking-only parameters reuse the index. Feature weights only matter
    when a feature table and a combine mode are supplied.
    """
    prepared = prepare_scenes(scenes, rescale=rescale)
    results = []
    extract_grid = itertools.product(
        spec.correction_deg,
        spec.cone_opening_deg,
        spec.cone_scale,
        spec.cone_base_scale,
        spec.poseline_fallback,
        spec.bisection_fallback,
    )
    for rho, omega, sigma, eta, pf, bf in extract_grid:
        params = ExtractParams(
            correction_deg=rho,
            cone_opening_deg=omega,
            cone_scale=sigma,
            cone_base_scale=eta,
            poseline_fallback=pf,
            bisection_fallback=bf,
        )
        index = build_index(prepared, params)
        if features is not None:
            index = attach_features(index, features, feature_metric)
        for beta, norm_mode, sort_method, w_a in itertools.product(
            spec.filter_threshold, spec.norm_mode, spec.sort_method, spec.feature_weight
        ):
            beta_value = beta if beta is not None else default_filter_threshold(norm_mode)
            sim = SimilarityParams(
                filter_threshold=beta_value,
                sort_method=SortMethod(sort_method),
                feature_weight=w_a,
                combine_mode=combine_mode if features is not None else CombineMode.NONE,
            )
            report = evaluate(index, norm_mode=NormMode(norm_mode), similarity=sim)
            cell = {
                "correction_deg": rho,
                "cone_opening_deg": omega,
                "cone_scale": sigma,
                "cone_base_scale": eta,
                "poseline_fallback": pf,
                "bisection_fallback": bf,
                "filter_threshold": beta_value,
                "norm_mode": str(norm_mode),
                "sort_method": str(sort_method),
                "feature_weight": w_a,
            }
            results.append((cell, report))
    results.sort(key=lambda item: (-item[1].mp1, -item[1].mean_ap, repr(sorted(item[0].items()))))
    return results


def cluster_feature_vector(canvas: CompositionCanvas) -> np.ndarray:
    """7-D statistical summary of the action-region-normalized geometry.

    Poseline endpoints (normalized by the first action-region center, or
    the midpoint-mean fallback) and action-line endpoints shifted by the
    same center are flattened into one scalar array; the vector is
    [mean, population std, median, p5, p25, p75, p95]. Empty canvases map
    to zeros.
    """
    norm = normalize(canvas, NormMode.ACTION_REGION)
    first = norm.sets[0]
    values: list[float] = []
    for top, bottom in first.poselines:
        values.extend((top[0], top[1], bottom[0], bottom[1]))
    center = first.frame_tag if first.frame_tag is not None else (0.0, 0.0)
    for line in canvas.action_lines:
        values.extend(
            (line.p1[0] - center[0], line.p1[1] - center[1],
             line.p2[0] - center[0], line.p2[1] - center[1])
        )
    if not values:
        return np.zeros(7, dtype=np.float64)
    arr = np.sort(np.asarray(values, dtype=np.float64))
    return np.array(
        [
            arr.mean(),
            arr.std(),  # population std
            float(np.median(arr)),
            float(np.percentile(arr, 5)),
            float(np.percentile(arr, 25)),
            float(np.percentile(arr, 75)),
            float(np.percentile(arr, 95)),
        ]
    )


def export_cluster_features(index: CorpusIndex) -> str:
    """CSV of cluster vectors, one row per image."""
    lines = ["image_id,mean,std,median,p5,p25,p75,p95"]
    for image_id in index.image_ids:
        vec = cluster_feature_vector(index.entries[image_id].canvas)
        lines.append(image_id + "," + ",".join(repr(float(v)) for v in vec))
    return "\n".join(lines) + "\n"
