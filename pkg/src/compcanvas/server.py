"""HTTP query service over an immutable index snapshot.

Routes (all JSON except the SVG overlay):

* ``GET  /api/images``            corpus ids and labels
* ``GET  /api/canvas/{id}``       canvas JSON for one image
* ``POST /api/query``             retrieval request -> ranked results
* ``GET  /api/overlay/{id}.svg``  SVG overlay, ``?elements=`` selects layers
* ``GET  /api/params``            current defaults and accepted choices

The service holds one index snapshot; concurrent reads are safe because
nothing mutates after startup.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel, Field

from .canvas import canvas_to_dict
from .index import (
    CorpusIndex,
    QueryError,
    QueryRequest,
    RankedResults,
    query,
)
from .normalize import DegenerateBboxError, NormMode
from .overlay import OverlayOptions, render_overlay
from .pose import KeypointSchemaError, parse_keypoint_file
from .similarity import (
    CombineMode,
    SimilarityParams,
    SimilarityRecord,
    SortMethod,
    default_filter_threshold,
)

_ELEMENT_NAMES = ("poselines", "cones", "regions", "centers", "lines", "latp_skeletons")


class QueryBody(BaseModel):
    query_id: str | None = None
    scene: dict | None = None
    k: int = Field(default=10, ge=1)
    norm: str = "none"
    beta: float | None = None  # None = mode default
    sort: str = "cr_desc"
    wa: float = Field(default=0.5, ge=0.0, le=1.0)
    combine: str = "none"
    baseline: str | None = None
    latp_mode: str = "min"
    latp_robust: bool = False


def _finite(value: float | None) -> float | None:
    if value is None or not math.isfinite(value):
        return None
    return value


def record_to_dict(rec: SimilarityRecord) -> dict:
    return {
        "query_id": rec.query_id,
        "target_id": rec.target_id,
        "r_hr": rec.r_hr,
        "r_nmd": rec.r_nmd,
        "r_cr": rec.r_cr,
        "r_md": _finite(rec.r_md),
        "r_a": _finite(rec.r_a),
        "r_combi1": _finite(rec.r_combi1),
        "r_combi2": _finite(rec.r_combi2),
        "chosen_set_pair": list(rec.chosen_set_pair) if rec.chosen_set_pair else None,
        "matched": {
            "distances": [_finite(d) for d in rec.matched.distances],
            "pairs": [list(p) for p in rec.matched.pairs],
        },
    }


def results_to_dict(results: RankedResults) -> dict:
    return {
        "query_id": results.query_id,
        "records": [record_to_dict(r) for r in results.records],
        "params": results.params,
    }


def build_request(index: CorpusIndex, body: QueryBody) -> QueryRequest:
    try:
        norm_mode = NormMode(body.norm)
        sort_method = SortMethod(body.sort)
        combine_mode = CombineMode(body.combine)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    beta = body.beta if body.beta is not None else default_filter_threshold(norm_mode)
    scene = None
    if body.scene is not None:
        try:
            scenes = parse_keypoint_file(json.dumps([body.scene]))
        except (KeypointSchemaError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        scene = scenes[0]
    try:
        similarity = SimilarityParams(
            filter_threshold=beta,
            sort_method=sort_method,
            feature_weight=body.wa,
            combine_mode=combine_mode,
        )
        return QueryRequest(
            query_id=body.query_id,
            scene=scene,
            k=body.k,
            norm_mode=norm_mode,
            similarity=similarity,
            baseline=body.baseline,
            latp_mode=body.latp_mode,
            latp_robust=body.latp_robust,
        )
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def create_app(index: CorpusIndex) -> FastAPI:
    app = FastAPI(title="composition canvas query service")

    @app.get("/api/images")
    def images() -> list[dict]:
        return [
            {"image_id": image_id, "label": index.labels.get(image_id)}
            for image_id in index.image_ids
        ]

    @app.get("/api/canvas/{image_id}")
    def canvas(image_id: str) -> dict:
        if image_id not in index.entries:
            raise HTTPException(status_code=404, detail=f"unknown image_id {image_id!r}")
        return canvas_to_dict(index.entries[image_id].canvas)

    @app.post("/api/query")
    def run_query(body: QueryBody) -> dict:
        req = build_request(index, body)
        try:
            results = query(index, req)
        except (QueryError, DegenerateBboxError, ValueError) as exc:
            status = 404 if isinstance(exc, QueryError) and "unknown" in str(exc) else 422
            raise HTTPException(status_code=status, detail=str(exc)) from exc
        return results_to_dict(results)

    @app.get("/api/overlay/{image_id}.svg")
    def overlay(image_id: str, elements: str | None = None) -> Response:
        if image_id not in index.entries:
            raise HTTPException(status_code=404, detail=f"unknown image_id {image_id!r}")
        toggles = {name: True for name in _ELEMENT_NAMES}
        toggles["latp_skeletons"] = False
        if elements is not None:
            wanted = {e.strip() for e in elements.split(",") if e.strip()}
            unknown = wanted - set(_ELEMENT_NAMES)
            if unknown:
                raise HTTPException(status_code=422, detail=f"unknown elements: {sorted(unknown)}")
            toggles = {name: name in wanted for name in _ELEMENT_NAMES}
        try:
            options = OverlayOptions(**toggles)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        entry = index.entries[image_id]
        svg = render_overlay(entry.canvas, options, scene=entry.scene)
        return Response(content=svg, media_type="image/svg+xml")

    @app.get("/api/params")
    def params() -> dict:
        return {
            "extract": asdict(index.params),
            "defaults": {
                "k": 10,
                "norm": NormMode.NONE.value,
                "beta": None,
                "beta_by_norm": {m.value: default_filter_threshold(m) for m in NormMode},
                "sort": SortMethod.CR_DESC.value,
                "wa": 0.5,
                "combine": CombineMode.NONE.value,
                "baseline": None,
            },
            "choices": {
                "norm": [m.value for m in NormMode],
                "sort": [s.value for s in SortMethod],
                "combine": [c.value for c in CombineMode],
                "baseline": [None, "latp"],
                "latp_mode": ["min", "bipart"],
                "elements": list(_ELEMENT_NAMES),
            },
            "features_attached": index.features is not None,
            "corpus_size": len(index),
        }

    return app
