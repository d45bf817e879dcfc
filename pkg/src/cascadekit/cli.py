"""Command-line entry point.

Subcommands cover the full workflow: generate synthetic data, featurize and
label cascades, train and evaluate the classifier, rank single features,
and compute standalone statistics. ``pipeline`` chains the core steps from
one config file and writes a manifest with digests of every output, so a
run can be reproduced and verified byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import io
from .cascade import build_cascade
from .errors import CascadeKitError, ConfigInvalidError
from .features import FeatureVector, extract_features_batch
from .learner import (
    DEFAULT_LAMBDA,
    Metrics,
    cross_validate,
    evaluate_cluster,
    train,
)
from .stats import fit_powerlaw_alpha, gini
from .synth import SynthParams, generate_social_graph, simulate_cascades
from .tasks import (
    CascadeRecord,
    ClusterInstance,
    ClusterMember,
    build_cluster_task,
    group_summaries,
    label_growth,
    label_growth_fixed_R,
    label_structure,
    rank_single_feature_predictors,
)
from .virality import wiener_index_exact

__version__ = "0.1.0"


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument("--threads", type=int, default=1, help="worker threads")
    parser.add_argument("--out-dir", default=".", help="directory for output files")


def _resolve(out_dir: str, path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    return p if p.is_absolute() else Path(out_dir) / p


def _require(path: str | Path) -> Path:
    p = Path(path)
    if not p.exists():
        raise ConfigInvalidError(f"missing input file: {p}")
    return p


def _load_records(
    events_path: str, content_path: str | None
) -> list[CascadeRecord]:
    grouped = io.read_events(_require(events_path))
    contents = io.read_content_jsonl(_require(content_path)) if content_path else {}
    records = []
    for cid in sorted(grouped):
        tree = build_cascade(grouped[cid])
        records.append(CascadeRecord(tree=tree, content=contents.get(cid)))
    return records


def _load_graph(args):
    if getattr(args, "graph", None) is None:
        return None
    return io.read_edge_list(_require(args.graph), directed=args.directed)


def _print_metrics(metrics: Metrics, stream=None) -> None:
    stream = stream or sys.stdout
    print("metric    mean      sd", file=stream)
    print(f"accuracy  {metrics.accuracy:.6f}  {metrics.accuracy_sd:.6f}", file=stream)
    print(f"f1        {metrics.f1:.6f}  {metrics.f1_sd:.6f}", file=stream)
    print(f"auc       {metrics.auc:.6f}  {metrics.auc_sd:.6f}", file=stream)
    print(f"baseline  {metrics.majority_baseline:.6f}  -", file=stream)


def _write_metrics_csv(path: Path, metrics: Metrics) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["metric", "mean", "sd"])
        writer.writerow(["accuracy", io.fmt(metrics.accuracy), io.fmt(metrics.accuracy_sd)])
        writer.writerow(["f1", io.fmt(metrics.f1), io.fmt(metrics.f1_sd)])
        writer.writerow(["auc", io.fmt(metrics.auc), io.fmt(metrics.auc_sd)])
        writer.writerow(["baseline", io.fmt(metrics.majority_baseline), ""])


def _write_per_fold_csv(path: Path, metrics: Metrics) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["fold", "size", "accuracy", "f1", "auc"])
        for i, (size, acc, f1v, aucv) in enumerate(
            zip(metrics.fold_sizes, metrics.fold_accuracy, metrics.fold_f1, metrics.fold_auc)
        ):
            writer.writerow([str(i), str(size), io.fmt(acc), io.fmt(f1v), io.fmt(aucv)])


# --- subcommands ------------------------------------------------------------

def cmd_generate(args) -> int:
    cfg = io.read_config(_require(args.params))
    params = SynthParams.from_config(cfg)
    seed = params.seed
    graph = generate_social_graph(params, seed)
    cascades, contents = simulate_cascades(graph, params, seed)
    io.write_events_jsonl(_resolve(args.out_dir, args.out_events), cascades)
    io.write_edge_list(_resolve(args.out_dir, args.out_graph), graph)
    if args.out_content:
        io.write_content_jsonl(_resolve(args.out_dir, args.out_content), contents)
    n_events = sum(len(c) for c in cascades)
    print(f"generated {len(cascades)} cascades, {n_events} events, "
          f"{graph.edge_count()} graph edges")
    return 0


def cmd_featurize(args) -> int:
    records = _load_records(args.input, args.content)
    graph = _load_graph(args)
    usable = [(r.tree, r.content) for r in records if r.tree.size >= args.k]
    if not usable:
        raise ConfigInvalidError(f"no cascades with >= {args.k} reshares")
    extracted = extract_features_batch(
        usable, args.k, graph=graph,
        centered_slopes=args.centered_slopes, threads=args.threads,
    )
    io.write_features_csv(
        _resolve(args.out_dir, args.out),
        [(tree.cascade_id, fv) for tree, fv in extracted],
    )
    print(f"featurized {len(extracted)} cascades at k={args.k}")
    return 0


def cmd_label(args) -> int:
    records = _load_records(args.input, args.content)
    graph = _load_graph(args)
    out_path = _resolve(args.out_dir, args.out)
    common = dict(
        graph=graph, centered_slopes=args.centered_slopes, threads=args.threads
    )
    if args.task == "cluster":
        instances = build_cluster_task(
            records, args.k, m=args.m, seed=args.seed, **common
        )
        io.write_cluster_csv(out_path, instances)
        meta = {
            "task": "cluster",
            "k": args.k,
            "m": args.m,
            "seed": args.seed,
            "n_instances": len(instances),
        }
        print(f"wrote {len(instances)} cluster instances to {out_path}")
    else:
        if args.task == "growth" and args.R is not None:
            dataset = label_growth_fixed_R(records, args.k, args.R, **common)
        elif args.task == "growth":
            dataset = label_growth(records, args.k, quartiles=args.quartiles, **common)
        else:
            dataset = label_structure(records, args.k, **common)
        io.write_labeled_csv(out_path, dataset.examples)
        meta = dict(dataset.metadata)
        meta["seed"] = args.seed
        if graph is None:
            meta["did_leave_approximate"] = True
        print(
            f"wrote {len(dataset.examples)} examples to {out_path} "
            f"(threshold {dataset.threshold})"
        )
    if args.meta_out:
        io.write_manifest(_resolve(args.out_dir, args.meta_out), meta)
    return 0


def cmd_train(args) -> int:
    X, y, _, _, columns = io.read_labeled_csv(_require(args.input))
    model = train(X, y, lam=args.lam, seed=args.seed, feature_names=columns)
    io.write_model(_resolve(args.out_dir, args.model_out), model)
    status = "converged" if model.converged else "hit iteration cap"
    print(
        f"trained on {X.shape[0]} examples, {len(model.feature_names)} features "
        f"({len(model.dropped)} constant dropped), {model.iterations} iterations "
        f"({status}), loss {model.final_loss:.6f}"
    )
    if args.folds > 0:
        metrics = cross_validate(
            X, y, folds=args.folds, lam=args.lam, seed=args.seed, feature_names=columns
        )
        _print_metrics(metrics)
    return 0


def cmd_evaluate(args) -> int:
    if args.cluster:
        if not args.model:
            raise ConfigInvalidError("--cluster evaluation requires --model")
        model = io.read_model(_require(args.model))
        rows = io.read_cluster_csv(_require(args.cluster))
        by_cluster: dict[str, list[dict]] = {}
        for row in rows:
            by_cluster.setdefault(row["cluster_id"], []).append(row)
        instances = []
        for cid in sorted(by_cluster):
            members = by_cluster[cid]
            winner = next(i for i, r in enumerate(members) if r["is_winner"])
            instances.append(
                ClusterInstance(
                    cluster_id=cid,
                    members=tuple(
                        ClusterMember(
                            cascade_id=r["cascade_id"],
                            features=_vector_from_values(r["values"]),
                            final_size=r["final_size"],
                            epoch=0.0,
                        )
                        for r in members
                    ),
                    winner_index=winner,
                )
            )
        top1, mean_rr = evaluate_cluster(model, instances)
        print(f"clusters   {len(instances)}")
        print(f"top1_accuracy {top1:.6f}")
        print(f"mrr           {mean_rr:.6f}")
        return 0
    if not args.input:
        raise ConfigInvalidError("evaluate needs --in (labeled CSV) or --cluster")
    X, y, _, _, columns = io.read_labeled_csv(_require(args.input))
    metrics = cross_validate(
        X, y, folds=args.folds, lam=args.lam, seed=args.seed, feature_names=columns
    )
    _print_metrics(metrics)
    if args.metrics_out:
        _write_metrics_csv(_resolve(args.out_dir, args.metrics_out), metrics)
    if args.per_fold_out:
        _write_per_fold_csv(_resolve(args.out_dir, args.per_fold_out), metrics)
    return 0


def _vector_from_values(values: dict[str, float]) -> FeatureVector:
    """Rebuild a vector from CSV columns (values plus _missing indicators)."""
    names = [c for c in values if not c.endswith("_missing")]
    raw = {
        n: (None if values.get(f"{n}_missing", 0.0) == 1.0 else values[n])
        for n in names
    }
    return FeatureVector(names, raw)


def cmd_rank_features(args) -> int:
    X, y, sizes, ids, columns = io.read_labeled_csv(_require(args.input))
    examples = _examples_from_matrix(X, y, sizes, ids, columns, args.k)
    rankings = rank_single_feature_predictors(
        examples, folds=args.folds, seed=args.seed, lam=args.lam
    )
    out = _resolve(args.out_dir, args.out) if args.out else None
    lines = [("feature", "accuracy", "pearson_log_size")]
    lines += [
        (row.feature, io.fmt(row.accuracy), io.fmt(row.pearson_with_log_size))
        for row in rankings
    ]
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerows(lines)
    for feature, acc, r in lines[1 : args.top + 1]:
        print(f"{feature}\t{acc}\t{r}")
    return 0


def _examples_from_matrix(X, y, sizes, ids, columns, k):
    """Reconstruct LabeledExample objects from a labeled CSV's arrays."""
    from .tasks import LabeledExample

    value_cols = [c for c in columns if not c.endswith("_missing")]
    col_index = {c: i for i, c in enumerate(columns)}
    examples = []
    for i, cid in enumerate(ids):
        raw = {}
        for name in value_cols:
            miss_col = col_index.get(f"{name}_missing")
            if miss_col is not None and X[i, miss_col] == 1.0:
                raw[name] = None
            else:
                raw[name] = X[i, col_index[name]]
        examples.append(
            LabeledExample(
                cascade_id=cid,
                features=FeatureVector(value_cols, raw),
                label=int(y[i]),
                final_size=int(sizes[i]),
                k=k,
            )
        )
    return examples


def cmd_wiener(args) -> int:
    grouped = io.read_events(_require(args.file))
    for cid in sorted(grouped):
        tree = build_cascade(grouped[cid])
        print(f"{cid}\t{io.fmt(wiener_index_exact(tree))}")
    return 0


def _read_numbers(path: Path) -> list[float]:
    values = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                values.append(float(line))
    return values


def cmd_stats(args) -> int:
    values = _read_numbers(_require(args.file))
    if args.stat == "fit-alpha":
        print(io.fmt(fit_powerlaw_alpha(values, args.xmin)))
    else:
        print(io.fmt(gini(values)))
    return 0


def cmd_report(args) -> int:
    records = _load_records(args.input, args.content)
    graph = _load_graph(args)
    out_path = _resolve(args.out_dir, args.out) if args.out else None
    if args.kind == "groups":
        rows = group_summaries(records, args.group_by)
        lines = [("group", "count", "mean_final_size", "mean_wiener")]
        lines += [
            (r.group, str(r.count), io.fmt(r.mean_final_size), io.fmt(r.mean_wiener))
            for r in rows
        ]
    elif args.kind == "rank-features":
        dataset = label_growth(records, args.k, graph=graph, threads=args.threads)
        rankings = rank_single_feature_predictors(
            dataset.examples, folds=args.folds, seed=args.seed, lam=args.lam
        )
        lines = [("feature", "accuracy", "pearson_log_size")]
        lines += [
            (r.feature, io.fmt(r.accuracy), io.fmt(r.pearson_with_log_size))
            for r in rankings
        ]
    else:
        ks = [int(s) for s in args.ks.split(",")]
        lines = [
            (
                "k",
                "n",
                "threshold",
                "positive_fraction",
                "baseline",
                "accuracy",
                "accuracy_sd",
                "f1",
                "f1_sd",
                "auc",
                "auc_sd",
            )
        ]
        for k in ks:
            if args.R is not None:
                dataset = label_growth_fixed_R(
                    records, k, args.R, graph=graph, threads=args.threads
                )
            else:
                dataset = label_growth(records, k, graph=graph, threads=args.threads)
            X, y, columns = dataset.design_matrix()
            metrics = cross_validate(
                X, y, folds=args.folds, lam=args.lam, seed=args.seed,
                feature_names=columns,
            )
            lines.append(
                (
                    str(k),
                    str(len(dataset.examples)),
                    io.fmt(dataset.threshold),
                    io.fmt(metrics.positive_fraction),
                    io.fmt(metrics.majority_baseline),
                    io.fmt(metrics.accuracy),
                    io.fmt(metrics.accuracy_sd),
                    io.fmt(metrics.f1),
                    io.fmt(metrics.f1_sd),
                    io.fmt(metrics.auc),
                    io.fmt(metrics.auc_sd),
                )
            )
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerows(lines)
    for line in lines:
        print("\t".join(line))
    return 0


PIPELINE_OUTPUTS = (
    "events.jsonl",
    "graph.edges",
    "content.jsonl",
    "labeled.csv",
    "task_meta.json",
    "model.txt",
    "metrics.csv",
    "per_fold.csv",
)


def cmd_pipeline(args) -> int:
    """generate -> label (featurize inside) -> train -> evaluate -> manifest."""
    cfg = io.read_config(_require(args.config))
    params = SynthParams.from_config(cfg)
    k = int(cfg.get("k", "5"))
    task = cfg.get("task", "growth")
    if task not in ("growth", "structure"):
        raise ConfigInvalidError(f"task must be growth or structure, got {task!r}")
    quartiles = cfg.get("quartiles", "false").lower() == "true"
    lam = float(cfg.get("lambda", str(DEFAULT_LAMBDA)))
    folds = int(cfg.get("folds", "10"))
    use_graph = cfg.get("use_graph", "true").lower() == "true"
    centered = cfg.get("centered_slopes", "false").lower() == "true"

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {name: out_dir / name for name in PIPELINE_OUTPUTS}

    graph = generate_social_graph(params, params.seed)
    cascades, contents = simulate_cascades(graph, params, params.seed)
    io.write_events_jsonl(paths["events.jsonl"], cascades)
    io.write_edge_list(paths["graph.edges"], graph)
    io.write_content_jsonl(paths["content.jsonl"], contents)

    # Re-read what was written so the pipeline exercises the same file
    # surfaces external callers use.
    records = _load_records(str(paths["events.jsonl"]), str(paths["content.jsonl"]))
    feature_graph = (
        io.read_edge_list(paths["graph.edges"], directed=False) if use_graph else None
    )
    common = dict(graph=feature_graph, centered_slopes=centered, threads=args.threads)
    if task == "growth":
        dataset = label_growth(records, k, quartiles=quartiles, **common)
    else:
        dataset = label_structure(records, k, **common)
    io.write_labeled_csv(paths["labeled.csv"], dataset.examples)
    meta = dict(dataset.metadata)
    meta["seed"] = params.seed
    io.write_manifest(paths["task_meta.json"], meta)

    X, y, _, _, columns = io.read_labeled_csv(paths["labeled.csv"])
    model = train(X, y, lam=lam, seed=params.seed, feature_names=columns)
    io.write_model(paths["model.txt"], model)
    metrics = cross_validate(
        X, y, folds=folds, lam=lam, seed=params.seed, feature_names=columns
    )
    _write_metrics_csv(paths["metrics.csv"], metrics)
    _write_per_fold_csv(paths["per_fold.csv"], metrics)

    manifest = {
        "version": __version__,
        "config": dict(cfg),
        "seed": params.seed,
        "outputs": {
            name: io.sha256_file(path) for name, path in sorted(paths.items())
        },
    }
    io.write_manifest(out_dir / "manifest.json", manifest)
    _print_metrics(metrics)
    print(f"pipeline outputs in {out_dir}")
    return 0


# --- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cascadekit",
        description="Cascade growth analytics: trees, virality, features, prediction",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic graph and cascades")
    _common_flags(p)
    p.add_argument("--params", required=True, help="key=value config file")
    p.add_argument("--out-events", default="events.jsonl")
    p.add_argument("--out-graph", default="graph.edges")
    p.add_argument("--out-content", default="content.jsonl")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("featurize", help="extract feature vectors at a window k")
    _common_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--in", dest="input", required=True, help="events JSONL/CSV")
    p.add_argument("--content", help="content records JSONL")
    p.add_argument("--graph", help="social graph edge list")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--centered-slopes", action="store_true")
    p.add_argument("--out", required=True, help="output feature CSV")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("label", help="build a labeled task dataset")
    _common_flags(p)
    p.add_argument("task", choices=["growth", "structure", "cluster"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--R", type=int, help="growth: fixed minimum final size")
    p.add_argument("--m", type=int, default=10, help="cluster: members per instance")
    p.add_argument("--quartiles", action="store_true",
                   help="growth: top vs bottom quartile only")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--content")
    p.add_argument("--graph")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--centered-slopes", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--meta-out", help="JSON sidecar with threshold/counts/seed")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("train", help="fit the classifier and save a model file")
    _common_flags(p)
    p.add_argument("--in", dest="input", required=True, help="labeled CSV")
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--folds", type=int, default=10,
                   help="also cross-validate (0 to skip)")
    p.add_argument("--model-out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="cross-validate, or score cluster instances")
    _common_flags(p)
    p.add_argument("--in", dest="input", help="labeled CSV")
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--metrics-out", help="write the metrics table as CSV")
    p.add_argument("--per-fold-out", help="write per-fold metrics as CSV")
    p.add_argument("--cluster", help="cluster instance CSV (ranking evaluation)")
    p.add_argument("--model", help="model file for --cluster")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("rank-features", help="accuracy of each feature used alone")
    _common_flags(p)
    p.add_argument("--in", dest="input", required=True, help="labeled CSV")
    p.add_argument("--k", type=int, default=0, help="k recorded on examples")
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--top", type=int, default=20, help="rows to print")
    p.add_argument("--out", help="output CSV")
    p.set_defaults(func=cmd_rank_features)

    p = sub.add_parser("wiener", help="Wiener index per cascade")
    _common_flags(p)
    p.add_argument("file", help="events JSONL/CSV")
    p.set_defaults(func=cmd_wiener)

    p = sub.add_parser("stats", help="heavy-tail statistics over a number file")
    _common_flags(p)
    stats_sub = p.add_subparsers(dest="stat", required=True)
    pa = stats_sub.add_parser("fit-alpha", help="Hill tail-exponent estimate")
    _common_flags(pa)
    pa.add_argument("--xmin", type=float, required=True)
    pa.add_argument("file")
    pa.set_defaults(func=cmd_stats)
    pg = stats_sub.add_parser("gini", help="Gini coefficient")
    _common_flags(pg)
    pg.add_argument("file")
    pg.set_defaults(func=cmd_stats)

    p = sub.add_parser("report", help="figure-style tables as CSV")
    _common_flags(p)
    p.add_argument("kind", choices=["accuracy-vs-k", "rank-features", "groups"])
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--content")
    p.add_argument("--graph")
    p.add_argument("--directed", action="store_true")
    p.add_argument("--ks", default="5,10,25", help="comma-separated k values")
    p.add_argument("--k", type=int, default=5, help="window for rank-features")
    p.add_argument("--R", type=int, help="fixed minimum final size variant")
    p.add_argument("--group-by", default="category")
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--out", help="output CSV")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("pipeline", help="generate, label, train, evaluate, manifest")
    _common_flags(p)
    p.add_argument("--config", required=True, help="key=value pipeline config")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: missing input file: {exc.filename}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # Downstream consumer (e.g. head) closed the pipe; not an error.
        sys.stderr.close()
        return 0
    except CascadeKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
