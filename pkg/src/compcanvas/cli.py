"""Command-line interface.

Subcommands: extract, index, query, evaluate, gridsearch, render, synth,
serve. Hyperparameter flags use the conventional short names (--rho
correction angle, --omega cone opening, --sigma cone scale, --eta cone
base scale, --beta outlier threshold).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .canvas import ExtractParams, canvas_to_dict, extract_canvas
from .evaluation import (
    GridSpec,
    evaluate,
    export_cluster_features,
    grid_search,
    prepare_scenes,
)
from .index import (
    QueryRequest,
    attach_features,
    build_index,
    load_index,
    query,
    save_index,
)
from .normalize import NormMode
from .overlay import OverlayOptions, render_match, render_overlay
from .pose import parse_keypoint_file, serialize_scenes
from .similarity import (
    CombineMode,
    SimilarityParams,
    SortMethod,
    default_filter_threshold,
)
from .synthetic import SyntheticSpec, generate_synthetic_corpus


def _add_extract_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rho", type=float, default=20.0, help="correction angle, degrees")
    parser.add_argument("--omega", type=float, default=80.0, help="cone opening angle, degrees")
    parser.add_argument("--sigma", type=float, default=10.0, help="cone scale factor")
    parser.add_argument("--eta", type=float, default=0.0, help="cone base scale factor")
    parser.add_argument("--fallback-poseline", action="store_true",
                        help="extend the neck-nose segment when the lower body is missing")
    parser.add_argument("--fallback-bisection", action="store_true",
                        help="use a perpendicular body direction for straight bodies")
    parser.add_argument("--conf-threshold", type=float, default=0.1,
                        help="keypoint validity confidence cutoff")


def _add_similarity_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--beta", type=float, default=None,
                        help="outlier filter threshold (default depends on --norm)")
    parser.add_argument("--norm", choices=[m.value for m in NormMode], default="none")
    parser.add_argument("--sort", choices=[s.value for s in SortMethod], default="cr_desc")
    parser.add_argument("--wa", type=float, default=0.5, help="external feature weight")
    parser.add_argument("--combine", choices=[c.value for c in CombineMode], default="none")
    parser.add_argument("--features", type=Path, default=None,
                        help="JSON file mapping image_id to a feature vector")
    parser.add_argument("--feature-metric", choices=["euclidean", "neg_cosine"],
                        default="euclidean")


def _add_latp_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--baseline", choices=["latp"], default=None,
                        help="rank with the pose-distance baseline instead")
    parser.add_argument("--latp-mode", choices=["min", "bipart"], default="min")
    parser.add_argument("--latp-robust", action="store_true")


def _extract_params(args: argparse.Namespace) -> ExtractParams:
    return ExtractParams(
        correction_deg=args.rho,
        cone_opening_deg=args.omega,
        cone_scale=args.sigma,
        cone_base_scale=args.eta,
        poseline_fallback=args.fallback_poseline,
        bisection_fallback=args.fallback_bisection,
        conf_threshold=args.conf_threshold,
    )


def _similarity_params(args: argparse.Namespace) -> SimilarityParams:
    beta = args.beta if args.beta is not None else default_filter_threshold(args.norm)
    return SimilarityParams(
        filter_threshold=beta,
        sort_method=SortMethod(args.sort),
        feature_weight=args.wa,
        combine_mode=CombineMode(args.combine),
    )


def _load_scenes(path: Path, rescale: bool):
    scenes = parse_keypoint_file(path.read_bytes())
    return prepare_scenes(scenes, rescale=rescale)


def _load_feature_table(path: Path) -> dict:
    table = json.loads(path.read_text())
    if not isinstance(table, dict):
        raise SystemExit("feature file must be a JSON object of image_id -> vector")
    return table


def _loaded_index(args: argparse.Namespace):
    index = load_index(str(args.index))
    if getattr(args, "features", None):
        index = attach_features(index, _load_feature_table(args.features), args.feature_metric)
    return index


def cmd_extract(args: argparse.Namespace) -> int:
    scenes = _load_scenes(args.keypoints, rescale=args.rescale)
    params = _extract_params(args)
    canvases = [canvas_to_dict(extract_canvas(scene, params)) for scene in scenes]
    out = json.dumps(canvases, indent=1)
    if args.out:
        args.out.write_text(out)
    else:
        print(out)
    return 0


def cmd_index(args: argparse.Namespace) -> int:
    scenes = _load_scenes(args.keypoints, rescale=args.rescale)
    index = build_index(scenes, _extract_params(args))
    if args.features:
        index = attach_features(index, _load_feature_table(args.features), args.feature_metric)
    save_index(index, str(args.out))
    print(f"indexed {len(index)} images -> {args.out}")
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    index = _loaded_index(args)
    req = QueryRequest(
        query_id=args.query_id,
        k=args.k,
        norm_mode=NormMode(args.norm),
        similarity=_similarity_params(args),
        baseline=args.baseline,
        latp_mode=args.latp_mode,
        latp_robust=args.latp_robust,
    )
    from .server import results_to_dict

    print(json.dumps(results_to_dict(query(index, req)), indent=1))
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    index = _loaded_index(args)
    report = evaluate(
        index,
        norm_mode=NormMode(args.norm),
        similarity=_similarity_params(args),
        baseline=args.baseline,
        latp_mode=args.latp_mode,
        latp_robust=args.latp_robust,
    )
    if args.json:
        args.json.write_text(json.dumps(report.to_dict(), indent=1))
    if args.cluster_csv:
        args.cluster_csv.write_text(export_cluster_features(index))
    print(report.table())
    for note in report.notes:
        print(f"note: {note}")
    return 0


def cmd_gridsearch(args: argparse.Namespace) -> int:
    raw = json.loads(args.grid.read_text())
    spec = GridSpec(**{k: tuple(v) for k, v in raw.items()})
    print(f"grid size: {spec.size()} combinations", file=sys.stderr)
    scenes = parse_keypoint_file(args.keypoints.read_bytes())
    features = _load_feature_table(args.features) if args.features else None
    results = grid_search(
        spec,
        scenes,
        rescale=args.rescale,
        features=features,
        feature_metric=args.feature_metric,
        combine_mode=CombineMode(args.combine),
    )
    payload = [
        {"params": cell, "report": report.to_dict()} for cell, report in results
    ]
    if args.out:
        args.out.write_text(json.dumps(payload, indent=1))
    best_cell, best_report = results[0]
    print("best cell:", json.dumps(best_cell))
    print(best_report.table())
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    index = _loaded_index(args)
    toggles = dict.fromkeys(
        ("poselines", "cones", "regions", "centers", "lines"), True
    )
    if args.elements:
        wanted = {e.strip() for e in args.elements.split(",")}
        toggles = {k: k in wanted for k in
                   ("poselines", "cones", "regions", "centers", "lines", "latp_skeletons")}
    options = OverlayOptions(**toggles)
    args.out.mkdir(parents=True, exist_ok=True)
    ids = args.ids if args.ids else index.image_ids
    for image_id in ids:
        if image_id not in index.entries:
            raise SystemExit(f"unknown image_id {image_id!r}")
        entry = index.entries[image_id]
        svg = render_overlay(entry.canvas, options, scene=entry.scene)
        (args.out / f"{image_id}.svg").write_text(svg)
    if args.match_target:
        if len(ids) != 1:
            raise SystemExit("--match-target needs exactly one query id")
        req = QueryRequest(
            query_id=ids[0], k=max(len(index) - 1, 1),
            norm_mode=NormMode(args.norm), similarity=_similarity_params(args),
        )
        records = [r for r in query(index, req).records if r.target_id == args.match_target]
        if not records:
            raise SystemExit(f"{args.match_target!r} not found in results")
        svg = render_match(
            index.entries[ids[0]].canvas,
            index.entries[args.match_target].canvas,
            records[0],
            options,
        )
        (args.out / f"{ids[0]}__{args.match_target}.svg").write_text(svg)
    print(f"wrote {len(ids)} overlay file(s) to {args.out}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    spec = SyntheticSpec(
        images_per_class=args.per_class,
        jitter_sigma=args.jitter,
        drop_prob=args.drop,
        seed=args.seed,
    )
    scenes, _labels = generate_synthetic_corpus(spec)
    args.out.write_text(serialize_scenes(scenes))
    print(f"wrote {len(scenes)} scenes -> {args.out}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(_loaded_index(args))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compcanvas",
        description="composition-canvas retrieval for pose-annotated image corpora",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="keypoint file -> canvas JSON")
    p.add_argument("--keypoints", type=Path, required=True)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--no-rescale", dest="rescale", action="store_false",
                   help="keep original image scale instead of 1000px longest side")
    _add_extract_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("index", help="keypoint file -> index file")
    p.add_argument("--keypoints", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--no-rescale", dest="rescale", action="store_false")
    p.add_argument("--features", type=Path, default=None)
    p.add_argument("--feature-metric", choices=["euclidean", "neg_cosine"], default="euclidean")
    _add_extract_flags(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", help="rank the corpus against one query image")
    p.add_argument("--index", type=Path, required=True)
    p.add_argument("--query-id", required=True)
    p.add_argument("--k", type=int, default=10)
    _add_similarity_flags(p)
    _add_latp_flags(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("evaluate", help="leave-one-out retrieval metrics")
    p.add_argument("--index", type=Path, required=True)
    p.add_argument("--json", type=Path, default=None, help="write the full report as JSON")
    p.add_argument("--cluster-csv", type=Path, default=None,
                   help="also export 7-D cluster feature vectors as CSV")
    _add_similarity_flags(p)
    _add_latp_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gridsearch", help="exhaustive hyperparameter search")
    p.add_argument("--keypoints", type=Path, required=True)
    p.add_argument("--grid", type=Path, required=True,
                   help="JSON object of hyperparameter value lists")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--no-rescale", dest="rescale", action="store_false")
    p.add_argument("--features", type=Path, default=None)
    p.add_argument("--feature-metric", choices=["euclidean", "neg_cosine"], default="euclidean")
    p.add_argument("--combine", choices=[c.value for c in CombineMode], default="none")
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("render", help="write SVG overlays")
    p.add_argument("--index", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--ids", nargs="*", default=None)
    p.add_argument("--elements", default=None,
                   help="comma list: poselines,cones,regions,centers,lines,latp_skeletons")
    p.add_argument("--match-target", default=None,
                   help="also render a side-by-side match view against this target")
    _add_similarity_flags(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("synth", help="generate the synthetic benchmark corpus")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--per-class", type=int, default=20)
    p.add_argument("--jitter", type=float, default=15.0)
    p.add_argument("--drop", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="serve the HTTP query API")
    p.add_argument("--index", type=Path, required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8410)
    p.add_argument("--features", type=Path, default=None)
    p.add_argument("--feature-metric", choices=["euclidean", "neg_cosine"], default="euclidean")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
