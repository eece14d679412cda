"""Compositional similarity scoring between normalized canvases.

Pipeline per image pair: build the complete bipartite graph of poselines
weighted by the mean endpoint distance, reduce it to an approximate
minimum-weight matching by a single greedy sweep over the sorted edges,
filter matches above the outlier threshold, and summarize the survivors
into three ratios:

* ``r_hr``  hit ratio of surviving matches over the larger poseline count;
* ``r_nmd`` normalized mean distance of survivors (1 = perfectly aligned);
* ``r_cr``  their product, the scalar compositional similarity.

Optionally fuses an external feature distance ``r_a`` (0 = most similar)
into ``r_combi1`` / ``r_combi2`` where lower is more similar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .geometry import Point
from .normalize import NormalizedCanvas

Segment = tuple[Point, Point]

# Default outlier thresholds: pixel-space modes vs min-max modes (150px on
# a 1000px image = 0.15 after min-max normalization).
BETA_PIXELS = 150.0
BETA_MINMAX = 0.15


class SortMethod(str, Enum):
    CR_DESC = "cr_desc"
    HR_DESC = "hr_desc"
    NMD_DESC = "nmd_desc"
    HR_MD_LEX = "hr_md_lex"
    COMBI1_ASC = "combi1_asc"
    COMBI2_ASC = "combi2_asc"
    A_ASC = "a_asc"


class CombineMode(str, Enum):
    MULTIPLICATIVE = "multiplicative"
    ADDITIVE = "additive"
    NONE = "none"


@dataclass(frozen=True, slots=True)
class SimilarityParams:
    filter_threshold: float = BETA_PIXELS  # beta, in the active normalization's units
    sort_method: SortMethod = SortMethod.CR_DESC
    feature_weight: float = 0.5  # w_a
    combine_mode: CombineMode = CombineMode.NONE

    def __post_init__(self) -> None:
        if self.filter_threshold <= 0.0:
            raise ValueError("filter_threshold must be positive")


def default_filter_threshold(mode: str) -> float:
    return BETA_MINMAX if str(mode) in ("image", "bbox") else BETA_PIXELS


@dataclass(frozen=True, slots=True)
class MatchList:
    """Accepted matching edges in acceptance order."""

    distances: tuple[float, ...]
    pairs: tuple[tuple[int, int], ...]  # (query poseline idx, target poseline idx)


@dataclass(frozen=True, slots=True)
class SimilarityRecord:
    query_id: str
    target_id: str
    r_hr: float
    r_nmd: float
    r_cr: float
    matched: MatchList
    r_md: float | None = None  # mean surviving distance; None when none survive
    r_a: float | None = None
    r_combi1: float | None = None
    r_combi2: float | None = None
    chosen_set_pair: tuple[int, int] | None = None


def poseline_distance(p_q: Segment, p_t: Segment) -> float:
    """Mean of the endpoint distances of two poselines."""
    (qt, qb), (tt, tb) = p_q, p_t
    return (math.hypot(qt[0] - tt[0], qt[1] - tt[1]) + math.hypot(qb[0] - tb[0], qb[1] - tb[1])) / 2.0


def _distance_matrix(p_q: list[Segment] | tuple[Segment, ...], p_t: list[Segment] | tuple[Segment, ...]) -> np.ndarray:
    q_top = np.array([s[0] for s in p_q], dtype=np.float64).reshape(-1, 1, 2)
    q_bot = np.array([s[1] for s in p_q], dtype=np.float64).reshape(-1, 1, 2)
    t_top = np.array([s[0] for s in p_t], dtype=np.float64).reshape(1, -1, 2)
    t_bot = np.array([s[1] for s in p_t], dtype=np.float64).reshape(1, -1, 2)
    d_top = np.hypot(q_top[..., 0] - t_top[..., 0], q_top[..., 1] - t_top[..., 1])
    d_bot = np.hypot(q_bot[..., 0] - t_bot[..., 0], q_bot[..., 1] - t_bot[..., 1])
    return (d_top + d_bot) / 2.0


def greedy_match_matrix(weights: np.ndarray) -> MatchList:
    """Greedy approximate minimum-weight bipartite matching.

    Sorts all edges ascending (ties broken by the index in the smaller
    side, then the larger side, which keeps the result invariant under
    swapping sides) and accepts each edge whose endpoints are both unused.
    Always returns min(n_rows, n_cols) edges.
    """
    nq, nt = weights.shape
    if nq == 0 or nt == 0:
        return MatchList(distances=(), pairs=())
    qi, ti = np.divmod(np.arange(nq * nt), nt)
    w = weights.ravel()
    if nq <= nt:
        order = np.lexsort((ti, qi, w))
    else:
        order = np.lexsort((qi, ti, w))
    q_used = np.zeros(nq, dtype=bool)
    t_used = np.zeros(nt, dtype=bool)
    distances: list[float] = []
    pairs: list[tuple[int, int]] = []
    want = min(nq, nt)
    for e in order:
        i, j = int(qi[e]), int(ti[e])
        if q_used[i] or t_used[j]:
            continue
        q_used[i] = True
        t_used[j] = True
        distances.append(float(w[e]))
        pairs.append((i, j))
        if len(pairs) == want:
            break
    return MatchList(distances=tuple(distances), pairs=tuple(pairs))


def greedy_bipartite_match(
    p_q: list[Segment] | tuple[Segment, ...], p_t: list[Segment] | tuple[Segment, ...]
) -> MatchList:
    """Greedy matching of two poseline lists under the mean endpoint distance."""
    if not p_q or not p_t:
        return MatchList(distances=(), pairs=())
    return greedy_match_matrix(_distance_matrix(p_q, p_t))


def summarize(match: MatchList, nq: int, nt: int, beta: float) -> tuple[float, float, float]:
    """(r_hr, r_nmd, r_cr) of a match list.

    Matches with distance >= beta are discarded as outliers. With no
    survivors both r_nmd and r_cr are 0 (guards the empty mean).
    """
    denom = max(nq, nt)
    if denom == 0:
        return (0.0, 0.0, 0.0)
    surviving = [d for d in match.distances if d < beta]
    r_hr = len(surviving) / denom
    if not surviving:
        return (r_hr, 0.0, 0.0)
    r_md = sum(surviving) / len(surviving)
    r_nmd = (beta - r_md) / beta
    return (r_hr, r_nmd, r_hr * r_nmd)


def _surviving_mean(match: MatchList, beta: float) -> float | None:
    surviving = [d for d in match.distances if d < beta]
    return sum(surviving) / len(surviving) if surviving else None


def compare_canvases(
    q: NormalizedCanvas, t: NormalizedCanvas, params: SimilarityParams
) -> SimilarityRecord:
    """Score a query canvas against a target canvas.

    Single-set modes compare the sets directly. The action-region mode
    evaluates every (query set, target set) pair and keeps the one with
    the highest r_cr (ties: higher r_hr, then lower set indices).
    """
    if q.mode != t.mode:
        raise ValueError(f"normalization mode mismatch: {q.mode.value} vs {t.mode.value}")
    beta = params.filter_threshold

    best: tuple[float, float, float] | None = None
    best_match = MatchList(distances=(), pairs=())
    best_pair = (0, 0)
    for i, qs in enumerate(q.sets):
        for j, ts in enumerate(t.sets):
            match = greedy_bipartite_match(qs.poselines, ts.poselines)
            scores = summarize(match, len(qs.poselines), len(ts.poselines), beta)
            key = (scores[2], scores[0], -i, -j)
            if best is None or key > (best[2], best[0], -best_pair[0], -best_pair[1]):
                best = scores
                best_match = match
                best_pair = (i, j)
    assert best is not None  # canvases always carry at least one set
    r_hr, r_nmd, r_cr = best
    multi_set = len(q.sets) > 1 or len(t.sets) > 1
    return SimilarityRecord(
        query_id=q.image_id,
        target_id=t.image_id,
        r_hr=r_hr,
        r_nmd=r_nmd,
        r_cr=r_cr,
        matched=best_match,
        r_md=_surviving_mean(best_match, beta),
        chosen_set_pair=best_pair if multi_set else None,
    )


def combine(rec: SimilarityRecord, r_a: float, w_a: float) -> SimilarityRecord:
    """Fuse an external feature distance into the record.

    r_a runs from 0 (most similar) upward. Both fused values are computed;
    lower is more similar for both:

        r_combi1 = (r_a * (1 - w_a)) * (1 - r_cr * w_a)
        r_combi2 = (r_a * (1 - w_a)) + (1 - r_cr * w_a)
    """
    if not (0.0 <= w_a <= 1.0):
        raise ValueError("w_a must be in [0, 1]")
    if r_a < 0.0:
        raise ValueError("r_a must be nonnegative")
    a_part = r_a * (1.0 - w_a)
    cr_part = 1.0 - rec.r_cr * w_a
    return replace(rec, r_a=r_a, r_combi1=a_part * cr_part, r_combi2=a_part + cr_part)


def _md_key(rec: SimilarityRecord) -> float:
    return rec.r_md if rec.r_md is not None else math.inf


def _require(rec: SimilarityRecord, field_name: str) -> float:
    value = getattr(rec, field_name)
    if value is None:
        raise ValueError(
            f"sort method needs {field_name} but record {rec.query_id}->{rec.target_id} has none"
        )
    return value


_SORT_KEYS = {
    SortMethod.CR_DESC: lambda r: (-r.r_cr, -r.r_hr, -r.r_nmd, r.target_id),
    SortMethod.HR_DESC: lambda r: (-r.r_hr, -r.r_nmd, r.target_id),
    SortMethod.NMD_DESC: lambda r: (-r.r_nmd, -r.r_hr, r.target_id),
    SortMethod.HR_MD_LEX: lambda r: (-r.r_hr, _md_key(r), r.target_id),
    SortMethod.COMBI1_ASC: lambda r: (_require(r, "r_combi1"), r.target_id),
    SortMethod.COMBI2_ASC: lambda r: (_require(r, "r_combi2"), r.target_id),
    SortMethod.A_ASC: lambda r: (_require(r, "r_a"), r.target_id),
}


def rank(records: list[SimilarityRecord], sort_method: SortMethod | str) -> list[SimilarityRecord]:
    """Stable-sort records by the method's key chain; ties end on target_id."""
    method = SortMethod(sort_method)
    return sorted(records, key=_SORT_KEYS[method])


def sort_method_for_combine(mode: CombineMode) -> SortMethod:
    if mode is CombineMode.MULTIPLICATIVE:
        return SortMethod.COMBI1_ASC
    if mode is CombineMode.ADDITIVE:
        return SortMethod.COMBI2_ASC
    return SortMethod.CR_DESC
