"""Corpus index: precomputed canvases, normalized caches, ranked queries.

An index is an immutable snapshot built from scenes with one parameter set;
queries never mutate it. Persistence uses a single file: magic ``ICCX``,
a little-endian u32 format version, then a zlib-compressed JSON payload
(so the payload stays human-debuggable after decompression).
"""

from __future__ import annotations

import json
import math
import struct
import zlib
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .canvas import (
    CompositionCanvas,
    ExtractParams,
    canvas_from_dict,
    canvas_to_dict,
    extract_canvas,
)
from .latp import latp_distance
from .normalize import DegenerateBboxError, NormMode, NormalizedCanvas, normalize
from .pose import PoseScene, parse_keypoint_file, scene_to_dict, serialize_scenes
from .similarity import (
    CombineMode,
    MatchList,
    SimilarityParams,
    SimilarityRecord,
    SortMethod,
    combine,
    compare_canvases,
    rank,
    sort_method_for_combine,
)

INDEX_MAGIC = b"ICCX"
INDEX_VERSION = 1

FEATURE_METRICS = ("euclidean", "neg_cosine")


class IndexBuildError(ValueError):
    pass


class IndexVersionError(ValueError):
    pass


class IndexIntegrityError(ValueError):
    pass


class QueryError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class IndexEntry:
    scene: PoseScene
    canvas: CompositionCanvas
    # Degenerate-bbox failures are cached and re-raised only when bbox
    # mode is actually requested, so one pathological scene cannot block
    # indexing a corpus queried under the other modes.
    normalized: dict[NormMode, NormalizedCanvas | DegenerateBboxError]

    def normalized_for(self, mode: NormMode) -> NormalizedCanvas:
        cached = self.normalized[mode]
        if isinstance(cached, DegenerateBboxError):
            raise cached
        return cached


@dataclass(frozen=True, slots=True)
class CorpusIndex:
    entries: dict[str, IndexEntry]
    labels: dict[str, str | None]
    params: ExtractParams
    params_fingerprint: str
    version: int = INDEX_VERSION
    features: dict[str, tuple[float, ...]] | None = None
    feature_metric: str | None = None

    @property
    def image_ids(self) -> list[str]:
        return sorted(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True, slots=True)
class QueryRequest:
    """One retrieval request against an index.

    Exactly one of query_id / scene identifies the query; inline scenes
    are extracted on the fly with the index's own parameters and compared
    as given, so their coordinates must follow the same scale convention
    as the indexed corpus (the evaluation tooling rescales the longest
    image side to 1000px by default).
    """

    query_id: str | None = None
    scene: PoseScene | None = None
    k: int = 10
    norm_mode: NormMode = NormMode.NONE
    similarity: SimilarityParams = field(default_factory=SimilarityParams)
    baseline: str | None = None  # None = canvas similarity, "latp" = pose baseline
    latp_mode: str = "min"
    latp_robust: bool = False

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if (self.query_id is None) == (self.scene is None):
            raise ValueError("provide exactly one of query_id or scene")


@dataclass(frozen=True, slots=True)
class RankedResults:
    query_id: str
    records: list[SimilarityRecord]
    params: dict


def _normalized_cache(canvas: CompositionCanvas) -> dict[NormMode, NormalizedCanvas | DegenerateBboxError]:
    cache: dict[NormMode, NormalizedCanvas | DegenerateBboxError] = {}
    for mode in NormMode:
        try:
            cache[mode] = normalize(canvas, mode)
        except DegenerateBboxError as exc:
            cache[mode] = exc
    return cache


def build_index(scenes: list[PoseScene], params: ExtractParams) -> CorpusIndex:
    """Extract and cache every scene; image ids must be unique."""
    entries: dict[str, IndexEntry] = {}
    labels: dict[str, str | None] = {}
    for scene in scenes:
        if scene.image_id in entries:
            raise IndexBuildError(f"duplicate image_id {scene.image_id!r}")
        canvas = extract_canvas(scene, params)
        entries[scene.image_id] = IndexEntry(
            scene=scene, canvas=canvas, normalized=_normalized_cache(canvas)
        )
        labels[scene.image_id] = scene.class_label
    return CorpusIndex(
        entries=entries,
        labels=labels,
        params=params,
        params_fingerprint=params.fingerprint(),
    )


def save_index(index: CorpusIndex, path: str) -> None:
    payload = {
        "params": asdict(index.params),
        "params_fingerprint": index.params_fingerprint,
        "scenes": [scene_to_dict(e.scene) for e in (index.entries[i] for i in index.image_ids)],
        "canvases": [canvas_to_dict(index.entries[i].canvas) for i in index.image_ids],
        "features": (
            {k: list(v) for k, v in sorted(index.features.items())}
            if index.features is not None
            else None
        ),
        "feature_metric": index.feature_metric,
    }
    blob = zlib.compress(json.dumps(payload).encode("utf-8"), level=6)
    with open(path, "wb") as fh:
        fh.write(INDEX_MAGIC)
        fh.write(struct.pack("<I", INDEX_VERSION))
        fh.write(blob)


def load_index(path: str) -> CorpusIndex:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 8 or raw[:4] != INDEX_MAGIC:
        raise IndexIntegrityError(f"{path}: not an index file (bad magic)")
    (version,) = struct.unpack("<I", raw[4:8])
    if version != INDEX_VERSION:
        raise IndexVersionError(f"{path}: index version {version}, expected {INDEX_VERSION}")
    try:
        payload = json.loads(zlib.decompress(raw[8:]).decode("utf-8"))
    except (zlib.error, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise IndexIntegrityError(f"{path}: corrupt index payload: {exc}") from exc

    scenes = parse_keypoint_file(json.dumps(payload["scenes"]))
    canvases = [canvas_from_dict(c) for c in payload["canvases"]]
    if len(scenes) != len(canvases):
        raise IndexIntegrityError(f"{path}: scene/canvas count mismatch")
    params = ExtractParams(**payload["params"])
    if payload["params_fingerprint"] != params.fingerprint():
        raise IndexIntegrityError(f"{path}: params fingerprint mismatch")
    entries = {}
    labels = {}
    for scene, canvas in zip(scenes, canvases):
        entries[scene.image_id] = IndexEntry(
            scene=scene, canvas=canvas, normalized=_normalized_cache(canvas)
        )
        labels[scene.image_id] = scene.class_label
    features = payload.get("features")
    return CorpusIndex(
        entries=entries,
        labels=labels,
        params=params,
        params_fingerprint=payload["params_fingerprint"],
        features={k: tuple(v) for k, v in features.items()} if features is not None else None,
        feature_metric=payload.get("feature_metric"),
    )


def attach_features(
    index: CorpusIndex, table: dict[str, list[float] | tuple[float, ...]], metric: str
) -> CorpusIndex:
    """New index with external feature vectors for fusion scoring.

    All vectors must share one dimension and every id must be indexed.
    """
    if metric not in FEATURE_METRICS:
        raise ValueError(f"metric must be one of {FEATURE_METRICS}")
    ids = sorted(table)
    if ids:
        dim = len(table[ids[0]])
        for image_id in ids:
            if len(table[image_id]) != dim:
                raise ValueError(f"feature dimension mismatch at {image_id!r}")
    for image_id in table:
        if image_id not in index.entries:
            raise ValueError(f"feature vector for unknown image_id {image_id!r}")
    return replace(
        index,
        features={k: tuple(float(x) for x in v) for k, v in table.items()},
        feature_metric=metric,
    )


def feature_distance(index: CorpusIndex, id_a: str, id_b: str) -> float:
    """External feature distance r_a (0 = most similar).

    euclidean: plain L2. neg_cosine: 1 - cosine similarity, in [0, 2].
    """
    if index.features is None or index.feature_metric is None:
        raise QueryError("no feature table attached")
    try:
        va = np.asarray(index.features[id_a], dtype=np.float64)
        vb = np.asarray(index.features[id_b], dtype=np.float64)
    except KeyError as exc:
        raise QueryError(f"feature vector missing for {exc}") from exc
    if index.feature_metric == "euclidean":
        return float(np.linalg.norm(va - vb))
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        return 1.0
    return float(1.0 - np.dot(va, vb) / (na * nb))


def _latp_records(
    index: CorpusIndex, query_id: str, query_scene: PoseScene, req: QueryRequest
) -> list[SimilarityRecord]:
    records = []
    for target_id in index.image_ids:
        if target_id == query_id:
            continue
        dist = latp_distance(
            query_scene,
            index.entries[target_id].scene,
            mode=req.latp_mode,
            robust=req.latp_robust,
            conf_threshold=index.params.conf_threshold,
        )
        # Reuse the record shape: the baseline distance rides in r_a and
        # ranks ascending; canvas ratios are not defined here.
        records.append(
            SimilarityRecord(
                query_id=query_id,
                target_id=target_id,
                r_hr=0.0,
                r_nmd=0.0,
                r_cr=0.0,
                matched=MatchList(distances=(), pairs=()),
                r_a=dist if math.isfinite(dist) else math.inf,
            )
        )
    return records


def query(index: CorpusIndex, req: QueryRequest) -> RankedResults:
    """Rank the corpus against a query; self-matches are excluded by id."""
    if not index.entries:
        raise QueryError("index is empty")
    if req.query_id is not None:
        if req.query_id not in index.entries:
            raise QueryError(f"unknown image_id {req.query_id!r}")
        query_id = req.query_id
        query_scene = index.entries[query_id].scene
        query_norm = index.entries[query_id].normalized_for(req.norm_mode)
    else:
        assert req.scene is not None
        query_id = req.scene.image_id
        query_scene = req.scene
        query_norm = normalize(extract_canvas(req.scene, index.params), req.norm_mode)

    if req.baseline == "latp":
        records = _latp_records(index, query_id, query_scene, req)
        ordered = rank(records, SortMethod.A_ASC)
    else:
        fuse = req.similarity.combine_mode is not CombineMode.NONE
        records = []
        for target_id in index.image_ids:
            if target_id == query_id:
                continue
            rec = compare_canvases(
                query_norm, index.entries[target_id].normalized_for(req.norm_mode), req.similarity
            )
            if fuse:
                rec = combine(
                    rec,
                    feature_distance(index, query_id, target_id),
                    req.similarity.feature_weight,
                )
            records.append(rec)
        sort_method = req.similarity.sort_method
        if fuse and sort_method is SortMethod.CR_DESC:
            sort_method = sort_method_for_combine(req.similarity.combine_mode)
        ordered = rank(records, sort_method)

    return RankedResults(
        query_id=query_id,
        records=ordered[: req.k],
        params=request_params_dict(index, req),
    )


def request_params_dict(index: CorpusIndex, req: QueryRequest) -> dict:
    return {
        "extract": asdict(index.params),
        "norm_mode": req.norm_mode.value,
        "filter_threshold": req.similarity.filter_threshold,
        "sort_method": req.similarity.sort_method.value,
        "feature_weight": req.similarity.feature_weight,
        "combine_mode": req.similarity.combine_mode.value,
        "baseline": req.baseline,
        "latp_mode": req.latp_mode,
        "latp_robust": req.latp_robust,
        "k": req.k,
    }
