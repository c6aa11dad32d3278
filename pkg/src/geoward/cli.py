"""Command-line interface: ``geoward {cluster,tune,compare,describe,distances,batch}``.

On failure the process exits with status 1 and prints a single line
``error: <ErrorClass>: <message>`` to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .compare import entanglement, leaf_alignment, pearson_matrix
from .io import fmt, geojson_points, ingest, newick_leaf_order, read_assignments, to_json, write_matrix, write_table
from .pipeline import ClusterSummary, Scenario, cluster_summary, compare_runs, ingest_for, load_scenarios, prepare_matrices, run
from .tuner import TuningGrid


def _columns(text):
    return [c.strip() for c in text.split(",") if c.strip()] if text else None


def _add_inputs(p):
    p.add_argument("--features", required=True, help="CSV with an id column and feature columns")
    p.add_argument("--coords", help="CSV with id/lat/lon (default: read them from --features)")
    p.add_argument("--id-col", default="id")
    p.add_argument("--lat-col", default="lat")
    p.add_argument("--lon-col", default="lon")
    p.add_argument("--weight-col", help="optional observation-weight column")
    p.add_argument("--columns", help="comma-separated feature columns (default: all numeric)")


def _add_clustering(p):
    p.add_argument("--name", default="scenario", help="scenario name (output subdirectory)")
    p.add_argument("--summary", help="variable described per cluster (default: first feature)")
    p.add_argument("--index-matrix", choices=("mixed", "features"), default="mixed")
    p.add_argument("--mix", choices=("linear", "inertia"), default="linear")
    p.add_argument("--out-dir", default="out")
    p.add_argument("--format", choices=("csv", "json", "geojson"), default="csv",
                   help="encoding of the assignments printed to stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geoward", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster with fixed alpha and K")
    _add_inputs(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_clustering(p)

    p = sub.add_parser("tune", help="select alpha and K, then cluster")
    _add_inputs(p)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=15)
    p.add_argument("--alpha-step", type=float, default=0.01)
    p.add_argument("--jobs", type=int, default=1)
    _add_clustering(p)

    p = sub.add_parser("compare", help="ARI between assignment files, entanglement between dendrograms")
    p.add_argument("assignments", nargs="*", help="assignment CSV files (id, cluster)")
    p.add_argument("--newick", nargs=2, metavar=("LEFT", "RIGHT"), help="two Newick dendrogram files")
    p.add_argument("--entanglement-L", type=float, default=1.5)
    p.add_argument("--out", help="write the ARI matrix CSV here")

    p = sub.add_parser("describe", help="per-cluster statistics and the feature correlation matrix")
    _add_inputs(p)
    p.add_argument("--assignments", help="assignment CSV; enables per-cluster statistics")
    p.add_argument("--variable", help="variable summarized per cluster")
    p.add_argument("--out-dir", default="out")

    p = sub.add_parser("distances", help="write the normalized feature and geographic matrices")
    _add_inputs(p)
    p.add_argument("--out-dir", default="out")

    p = sub.add_parser("batch", help="run every scenario of an INI file")
    p.add_argument("config")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _inputs(args):
    return {
        "features": args.features,
        "coords": args.coords,
        "id_col": args.id_col,
        "lat_col": args.lat_col,
        "lon_col": args.lon_col,
        "weight_col": args.weight_col,
    }


def _ingest(args, columns=None):
    inputs = _inputs(args)
    return ingest(inputs.pop("features"), inputs.pop("coords"), feature_columns=columns, **inputs)


def _print_result(args, scenario, table, points, result):
    labels = result["labels"]
    if args.format == "json":
        print(json.dumps(to_json(result["report"]), indent=2))
    elif args.format == "geojson":
        print(json.dumps(to_json(geojson_points(table.ids, points, labels, scenario.name)), indent=2))
    else:
        print("id,cluster")
        for key, lab in zip(table.ids, labels):
            print(f"{key},{lab}")


def _cmd_cluster_or_tune(args):
    columns = _columns(args.columns)
    if args.command == "cluster":
        extra = {"alpha": args.alpha, "k": args.k}
    else:
        extra = {"grid": TuningGrid.regular(args.alpha_step, args.k_min, args.k_max)}
    if columns is None:
        columns = list(_ingest(args)[0].feature_names)
    scenario = Scenario(
        name=args.name,
        feature_columns=columns,
        index_matrix=args.index_matrix,
        mix=args.mix,
        summary_variable=args.summary,
        **extra,
    )
    table, points = ingest_for(scenario, _inputs(args))
    result = run(scenario, table, points, args.out_dir, n_jobs=getattr(args, "jobs", 1))
    _print_result(args, scenario, table, points, result)


def _cmd_compare(args):
    if not args.assignments and not args.newick:
        raise ValueError("give assignment files and/or --newick LEFT RIGHT")
    if args.assignments:
        names, M = compare_runs(args.assignments, out_path=args.out)
        print("," + ",".join(names))
        for name, row in zip(names, M):
            print(name + "," + ",".join(fmt(float(x)) for x in row))
    if args.newick:
        left, right = (newick_leaf_order(Path(p).read_text(encoding="utf-8")) for p in args.newick)
        v1, v2 = leaf_alignment(left, right)
        print(f"entanglement,{fmt(entanglement(v1, v2, L=args.entanglement_L))}")


def _cmd_describe(args):
    table, _ = _ingest(args, _columns(args.columns))
    out = Path(args.out_dir)
    names = list(table.feature_names)
    write_matrix(out / "pearson.csv", names, pearson_matrix(table))
    print(f"wrote {out / 'pearson.csv'}")
    if args.assignments:
        assigned = read_assignments(args.assignments)
        missing = [i for i in table.ids if i not in assigned]
        if missing:
            raise ValueError(f"ids without a cluster: {', '.join(missing)}")
        variable = args.variable or names[0]
        labels = [assigned[i] for i in table.ids]
        summary = cluster_summary(labels, table.column(variable), variable)
        write_table(out / "summary.csv", ClusterSummary.HEADER, summary.table())
        print(",".join(ClusterSummary.HEADER))
        for row in summary.table():
            print(",".join(fmt(x) for x in row))


def _cmd_distances(args):
    table, points = _ingest(args, _columns(args.columns))
    D0n, D1n = prepare_matrices(table, points)
    out = Path(args.out_dir)
    write_matrix(out / "d0_features.csv", table.ids, D0n)
    write_matrix(out / "d1_geographic.csv", table.ids, D1n)
    print(f"wrote {out / 'd0_features.csv'} and {out / 'd1_geographic.csv'}")


def _cmd_batch(args):
    for scenario, inputs in load_scenarios(args.config):
        table, points = ingest_for(scenario, inputs)
        result = run(scenario, table, points, inputs["out_dir"], n_jobs=args.jobs)
        print(f"{scenario.name},alpha={fmt(result['alpha'])},k={result['k']},dir={result['dir']}")


COMMANDS = {
    "cluster": _cmd_cluster_or_tune,
    "tune": _cmd_cluster_or_tune,
    "compare": _cmd_compare,
    "describe": _cmd_describe,
    "distances": _cmd_distances,
    "batch": _cmd_batch,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except Exception as exc:  # noqa: BLE001 - reported as one machine-readable line
        message = str(exc).replace("\n", " ")
        print(f"error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
