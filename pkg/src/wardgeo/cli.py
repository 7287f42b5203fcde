"""Command-line interface.

Subcommands: ``dist`` (build a dissimilarity matrix), ``cluster`` (build a
dendrogram), ``cut`` (flat partition from a dendrogram), ``choicealpha``
(quality grid + SVG curves), ``render-map`` (annotate GeoJSON with cluster
labels).  Every run writes a JSON manifest next to its primary output with
resolved inputs, content digests, and all parameters, so results can be
reproduced exactly.

Exit codes: 0 success, 2 invalid input or arguments, 3 data-consistency
failure, 1 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .dissim import (
    adjacency_dissim,
    euclidean_dissim,
    geodesic_dissim,
    read_adjacency,
    read_dissim,
    read_feature_table,
    read_geo_points,
    read_weights,
    write_dissim,
)
from .errors import DataConsistencyError, ValidationError
from .geo_mixing import hclustgeo
from .quality import choice_alpha, parse_grid, write_qtable
from .svg import Series, line_chart
from .ward_core import (
    cut_tree,
    read_dendrogram,
    read_partition,
    write_dendrogram,
    write_partition,
)

__all__ = ["main"]


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(subcommand: str, inputs: dict[str, Path], parameters: dict,
                    outputs: list[Path], seed) -> None:
    primary = outputs[0]
    manifest = {
        "tool": "wardgeo",
        "version": __version__,
        "subcommand": subcommand,
        "inputs": {
            role: {"path": str(p.resolve()), "sha256": _sha256(p)}
            for role, p in inputs.items()
        },
        "parameters": parameters,
        "outputs": [str(p) for p in outputs],
        "seed": seed,
    }
    path = primary.with_suffix("").parent / (primary.with_suffix("").name + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _resolve_weights(args, d):
    if getattr(args, "weights", None) is None:
        return None, {}
    wt = read_weights(Path(args.weights))
    if len(wt) != d.n:
        raise ValidationError(
            f"weights file has {len(wt)} rows, matrix has {d.n} observations"
        )
    if d.ids is not None and wt.ids is not None and wt.ids != d.ids:
        if set(wt.ids) != set(d.ids):
            missing = sorted(set(d.ids) - set(wt.ids))[:5]
            raise ValidationError(f"weights file is missing ids {missing}")
        order = [wt.ids.index(i) for i in d.ids]
        wt = type(wt)(wt.weights[order], ids=d.ids)
    return wt, {"weights": str(Path(args.weights))}


def _cmd_dist(args) -> int:
    sources = {
        "features": args.features,
        "coords": args.coords,
        "adjacency": args.adjacency,
        "square_csv": args.square_csv,
    }
    given = [k for k, v in sources.items() if v is not None]
    if len(given) != 1:
        raise ValidationError(
            "exactly one of --features/--coords/--adjacency/--square-csv is required"
        )
    src = given[0]
    path = Path(sources[src])
    metric = args.metric
    if src == "features":
        if metric is None:
            metric = "euclidean"
        if metric != "euclidean":
            raise ValidationError(f"metric {metric!r} is not valid for --features")
        table = read_feature_table(path)
        if args.standardize:
            table = table.standardized()
        d = euclidean_dissim(table)
    elif src == "coords":
        if metric is None:
            metric = "haversine"
        if metric != "haversine":
            raise ValidationError(f"metric {metric!r} is not valid for --coords")
        d = geodesic_dissim(read_geo_points(path))
    elif src == "adjacency":
        if metric is not None:
            raise ValidationError("--metric does not apply to --adjacency")
        d = adjacency_dissim(read_adjacency(path))
    else:
        if metric is not None:
            raise ValidationError("--metric does not apply to --square-csv")
        d = read_dissim(path, format="square")
    out = Path(args.output)
    write_dissim(d, out, format=args.format)
    _write_manifest(
        "dist",
        {src: path},
        {
            "source": src,
            "metric": metric,
            "standardize": bool(args.standardize),
            "format": args.format,
        },
        [out],
        args.seed,
    )
    return 0


def _cmd_cluster(args) -> int:
    if args.d1 is None and args.alpha is not None:
        raise ValidationError("--alpha requires --d1")
    d0 = read_dissim(Path(args.d0))
    inputs = {"d0": Path(args.d0)}
    d1 = None
    if args.d1 is not None:
        d1 = read_dissim(Path(args.d1))
        inputs["d1"] = Path(args.d1)
    alpha = 0.0 if args.alpha is None else args.alpha
    wt, wt_params = _resolve_weights(args, d0)
    if args.weights:
        inputs["weights"] = Path(args.weights)
    tree = hclustgeo(d0, d1, alpha=alpha, scale=not args.no_scale, wt=wt,
                     kernel=args.kernel)
    out = Path(args.output)
    write_dendrogram(tree, out)
    _write_manifest(
        "cluster",
        inputs,
        {
            "alpha": alpha,
            "scale": not args.no_scale,
            "kernel": args.kernel,
            **wt_params,
        },
        [out],
        args.seed,
    )
    print(f"{tree.total_height():.7g}")
    return 0


def _cmd_cut(args) -> int:
    tree = read_dendrogram(Path(args.tree))
    part = cut_tree(tree, args.k)
    out = Path(args.output)
    write_partition(part, out)
    _write_manifest("cut", {"tree": Path(args.tree)}, {"k": args.k}, [out], args.seed)
    return 0


def _cmd_choicealpha(args) -> int:
    d0 = read_dissim(Path(args.d0))
    d1 = read_dissim(Path(args.d1))
    grid = parse_grid(args.grid)
    wt, wt_params = _resolve_weights(args, d0)
    qt = choice_alpha(d0, d1, grid, args.k, wt=wt, scale=not args.no_scale,
                      kernel=args.kernel)
    out = Path(args.output)
    write_qtable(qt, out)
    stem = out.with_suffix("")
    q_svg = stem.parent / (stem.name + ".q.svg")
    qn_svg = stem.parent / (stem.name + ".qnorm.svg")
    x = list(qt.grid)
    q_svg.write_text(
        line_chart(
            x,
            [Series("Q0", tuple(qt.q0)), Series("Q1", tuple(qt.q1), dashed=True)],
            title=f"K={qt.k}",
            xlabel="alpha",
            ylabel="proportion of explained pseudo-inertia",
        ),
        encoding="utf-8",
    )
    qn_svg.write_text(
        line_chart(
            x,
            [Series("Q0norm", tuple(qt.q0norm)), Series("Q1norm", tuple(qt.q1norm), dashed=True)],
            title=f"K={qt.k} (normalized)",
            xlabel="alpha",
            ylabel="normalized proportion of explained pseudo-inertia",
        ),
        encoding="utf-8",
    )
    inputs = {"d0": Path(args.d0), "d1": Path(args.d1)}
    if args.weights:
        inputs["weights"] = Path(args.weights)
    _write_manifest(
        "choicealpha",
        inputs,
        {
            "k": args.k,
            "grid": args.grid,
            "scale": not args.no_scale,
            "kernel": args.kernel,
            **wt_params,
        },
        [out, q_svg, qn_svg],
        args.seed,
    )
    return 0


def _feature_id(feature: dict, id_property: str, position: int):
    if "id" in feature:
        return str(feature["id"])
    props = feature.get("properties") or {}
    if id_property in props:
        return str(props[id_property])
    raise ValidationError(
        f"feature at position {position} has neither an 'id' member nor "
        f"a {id_property!r} property"
    )


def _cmd_render_map(args) -> int:
    map_path = Path(args.map)
    try:
        gj = json.loads(map_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValidationError(f"{map_path}: invalid JSON: {e}") from None
    if gj.get("type") != "FeatureCollection" or not isinstance(gj.get("features"), list):
        raise ValidationError(f"{map_path}: expected a GeoJSON FeatureCollection")
    part = read_partition(Path(args.labels))
    labels = dict(zip(part.ids, (int(v) for v in part.labels)))
    feature_ids = [
        _feature_id(f, args.id_property, i) for i, f in enumerate(gj["features"])
    ]
    missing_in_labels = [i for i in feature_ids if i not in labels]
    missing_in_map = [i for i in labels if i not in set(feature_ids)]
    if missing_in_labels or missing_in_map:
        raise DataConsistencyError(
            f"{len(missing_in_labels)} feature id(s) without labels: "
            f"{missing_in_labels[:10]}; "
            f"{len(missing_in_map)} label id(s) without features: {missing_in_map[:10]}"
        )
    for f, fid in zip(gj["features"], feature_ids):
        props = f.setdefault("properties", {})
        props["cluster"] = labels[fid]
    out = Path(args.output)
    out.write_text(json.dumps(gj, indent=2) + "\n", encoding="utf-8")
    _write_manifest(
        "render-map",
        {"map": map_path, "labels": Path(args.labels)},
        {"id_property": args.id_property},
        [out],
        args.seed,
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wardgeo",
        description="Ward-like hierarchical clustering with soft spatial constraints",
    )
    parser.add_argument("--version", action="version", version=f"wardgeo {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None,
                       help="recorded in the manifest; no operation is stochastic")
        p.add_argument("-o", "--output", required=True, help="primary output path")

    p = sub.add_parser("dist", help="build a dissimilarity matrix file")
    p.add_argument("--features", help="feature CSV (header, id column first)")
    p.add_argument("--coords", help="coordinates CSV with columns id,lat,lon")
    p.add_argument("--adjacency", help="adjacency JSON mapping id -> [neighbor ids]")
    p.add_argument("--square-csv", dest="square_csv", help="square symmetric CSV matrix")
    p.add_argument("--metric", choices=["euclidean", "haversine"], default=None)
    p.add_argument("--standardize", action="store_true",
                   help="z-score feature columns before computing distances")
    p.add_argument("--format", choices=["condensed", "square"], default="condensed")
    common(p)
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("cluster", help="build a dendrogram JSON")
    p.add_argument("--d0", required=True, help="feature-space matrix CSV")
    p.add_argument("--d1", help="constraint-space matrix CSV")
    p.add_argument("--alpha", type=float, default=None, help="mixing weight in [0,1]")
    p.add_argument("--weights", help="weights CSV with columns id,weight")
    p.add_argument("--no-scale", action="store_true",
                   help="skip dividing each matrix by its maximum")
    p.add_argument("--kernel", choices=["auto", "naive", "chain"], default="auto")
    common(p)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("cut", help="cut a dendrogram into K clusters")
    p.add_argument("--tree", required=True, help="dendrogram JSON")
    p.add_argument("--k", required=True, type=int)
    common(p)
    p.set_defaults(func=_cmd_cut)

    p = sub.add_parser("choicealpha", help="quality table and curves over an alpha grid")
    p.add_argument("--d0", required=True)
    p.add_argument("--d1", required=True)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--grid", required=True, help="start:stop:step, inclusive")
    p.add_argument("--weights")
    p.add_argument("--no-scale", action="store_true")
    p.add_argument("--kernel", choices=["auto", "naive", "chain"], default="auto")
    common(p)
    p.set_defaults(func=_cmd_choicealpha)

    p = sub.add_parser("render-map", help="copy GeoJSON with a cluster property per feature")
    p.add_argument("--map", required=True, help="GeoJSON FeatureCollection")
    p.add_argument("--labels", required=True, help="partition CSV (id,label)")
    p.add_argument("--id-property", default="id",
                   help="fallback property naming the feature id (default: id)")
    common(p)
    p.set_defaults(func=_cmd_render_map)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except DataConsistencyError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except BrokenPipeError:
        return 1
    except Exception as e:  # internal errors get code 1, not a traceback
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
