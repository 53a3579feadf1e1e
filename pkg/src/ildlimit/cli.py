"""Command-line entry point: ``ildlimit <subcommand> ...``."""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import bucketizer, core, experiment, nb
from .bucketizer import AggregatedDataset, aggregate, classify_buckets
from .dataio import FeatureSchema, dump_encoded_csv, load_csv, load_schema
from .errors import DataError, DegenerateClassError, SchemaError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


@contextlib.contextmanager
def atomic_output(path: str | Path):
    """Yield a temp path next to ``path``; move it into place only on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        yield Path(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _write_json(obj, path) -> None:
    with atomic_output(path) as tmp:
        tmp.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def write_curve(curve: core.RocCurve, path, fmt: str) -> None:
    if fmt == "json":
        _write_json(curve.to_json_dict(), path)
        return
    with atomic_output(path) as tmp, tmp.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["fpr", "tpr"])
        for x, y in zip(curve.fpr.tolist(), curve.tpr.tolist()):
            w.writerow([repr(x), repr(y)])


def _load_schema(args) -> FeatureSchema | None:
    if not args.schema:
        return None
    if not Path(args.schema).is_file():
        raise InputError(f"schema file not found: {args.schema}")
    return load_schema(args.schema)


def _load_table(args):
    schema = _load_schema(args)
    if schema is None:
        raise InputError("--schema is required for raw CSV input")
    if not Path(args.input).is_file():
        raise InputError(f"input file not found: {args.input}")
    return load_csv(args.input, schema), schema


def _load_aggregated(args) -> tuple[AggregatedDataset, FeatureSchema | None]:
    """Raw CSV plus schema, or an already aggregated CSV/JSON file."""
    if not Path(args.input).is_file():
        raise InputError(f"input file not found: {args.input}")
    if args.schema:
        table, schema = _load_table(args)
        return aggregate(table), schema
    if args.input.endswith(".json"):
        return bucketizer.read_json(args.input), None
    return bucketizer.read_csv(args.input), None


def _out_path(args, default: str) -> Path:
    return Path(args.out) if args.out else Path(default)


def cmd_aggregate(args) -> int:
    table, schema = _load_table(args)
    B = aggregate(table)
    fmt = args.format or "csv"
    out = _out_path(args, f"aggregated.{fmt}")
    with atomic_output(out) as tmp:
        if fmt == "json":
            bucketizer.write_json(B, tmp, schema)
        else:
            bucketizer.write_csv(B, tmp, schema)
    if args.dump_encoded:
        with atomic_output(args.dump_encoded) as tmp:
            dump_encoded_csv(table, tmp)
    part = classify_buckets(B)
    print(f"N_B={B.n_buckets} M={B.M} M0={B.M0} M1={B.M1} perfect_buckets={part.perfect.size}")
    return EXIT_OK


def cmd_limits(args) -> int:
    B, _ = _load_aggregated(args)
    report = core.limit_report(B)
    _write_json(report.to_json_dict(), _out_path(args, "limits.json"))
    print(json.dumps(report.to_json_dict()))
    if report.max_auc is None:
        print("warning: single-class dataset, max_auc is undefined", file=sys.stderr)
        if args.roc_out:
            print("error: cannot write ROC curve for a single-class dataset", file=sys.stderr)
            return EXIT_FAILURE
        return EXIT_OK
    if args.roc_out:
        write_curve(core.ild_curve(B), args.roc_out, args.format or "csv")
    return EXIT_OK


def _suffixed(path: Path, tag: str) -> Path:
    return path.with_name(f"{path.stem}_{tag}{path.suffix}")


def cmd_roc(args) -> int:
    B, _ = _load_aggregated(args)
    fmt = args.format or "csv"
    out = _out_path(args, f"ild_roc.{fmt}")
    curve = core.ild_curve(B)
    write_curve(curve, out, fmt)
    print(f"ild_auc={curve.auc!r}")
    for i in range(args.random_flip_curves):
        seed = args.seed + i
        rc = core.roc_of_random_flips(B, seed)
        write_curve(rc, _suffixed(out, f"random{i + 1}"), fmt)
        print(f"random_flip seed={seed} auc={rc.auc!r}")
    return EXIT_OK


def cmd_nb(args) -> int:
    table, schema = _load_table(args)
    train, valid = experiment.split(
        table, experiment.SplitSpec(args.train_fraction, args.seed, args.stratified)
    )
    model = nb.fit(train, schema, alpha=args.alpha)
    threshold = nb.best_threshold(model, train)
    summary = {
        "seed": args.seed,
        "train_size": train.M,
        "valid_size": valid.M,
        "threshold": threshold,
        "valid_accuracy": nb.accuracy_at(model, valid, threshold),
    }
    try:
        curve = nb.nb_roc(model, valid)
        summary["valid_auc"] = curve.auc
    except DegenerateClassError:
        curve = None
        summary["valid_auc"] = None
        print("warning: validation split contains a single class", file=sys.stderr)
    model_path = _out_path(args, "nb_model.json")
    with atomic_output(model_path) as tmp:
        model.save(tmp)
    if args.roc_out and curve is not None:
        write_curve(curve, args.roc_out, args.format or "csv")
    print(json.dumps(summary))
    return EXIT_OK


def cmd_experiment(args) -> int:
    table, schema = _load_table(args)
    results = experiment.run_trials(
        table,
        args.trials,
        base_seed=args.seed,
        train_fraction=args.train_fraction,
        alpha=args.alpha,
        stratified=args.stratified,
        schema=schema,
        ild_mode=args.ild_mode,
    )
    with atomic_output(_out_path(args, "trials.csv")) as tmp:
        experiment.write_results_csv(results, tmp)
    s = experiment.summarize(results)
    print(
        f"trials={s['n_trials']} buckets_full={aggregate(table).n_buckets} "
        f"positive_diff={s['n_positive_diff']}"
    )
    for name in ("auc_ild", "auc_nb", "auc_diff", "acc_ild", "acc_nb"):
        st = s[name]
        if st["mean"] is None:
            print(f"{name}: undefined")
        else:
            print(f"{name}: mean={st['mean']:.4f} min={st['min']:.4f} max={st['max']:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ildlimit",
        description="Model-independent performance limits for categorical binary classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, schema_required: bool):
        p.add_argument("--input", required=True, help="input CSV (raw, or aggregated m0/m1 table)")
        p.add_argument("--schema", required=schema_required, help="TOML feature schema")
        p.add_argument("--out", help="output path")
        p.add_argument("--format", choices=("csv", "json"), help="table/curve output format")
        p.add_argument("--seed", type=int, default=0)

    def split_opts(p):
        p.add_argument("--alpha", type=float, default=1.0, help="naive Bayes smoothing")
        p.add_argument("--train-fraction", type=float, default=0.8)
        p.add_argument("--stratified", action="store_true")

    p = sub.add_parser("aggregate", help="bucket a raw CSV into (key, m0, m1) rows")
    common(p, schema_required=True)
    p.add_argument("--dump-encoded", help="also write the encoded observation table here")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("limits", help="max AUC, accuracy range and perfection index")
    common(p, schema_required=False)
    p.add_argument("--roc-out", help="also write the ILD ROC curve")
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("roc", help="ILD ROC curve, optionally with random-flip curves")
    common(p, schema_required=False)
    p.add_argument("--random-flip-curves", type=int, default=0, metavar="K")
    p.set_defaults(func=cmd_roc)

    p = sub.add_parser("nb", help="fit and evaluate the naive Bayes baseline on one split")
    common(p, schema_required=True)
    split_opts(p)
    p.add_argument("--roc-out", help="also write the validation ROC curve")
    p.set_defaults(func=cmd_nb)

    p = sub.add_parser("experiment", help="repeated splits: ILD vs naive Bayes")
    common(p, schema_required=True)
    split_opts(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument(
        "--ild-mode",
        choices=experiment.ILD_MODES,
        default="transfer",
        help="transfer: rank validation rows by train-bucket ratios; "
        "ceiling: maximal AUC of the validation buckets",
    )
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    tf = getattr(args, "train_fraction", None)
    if tf is not None and not 0 < tf < 1:
        print("error: --train-fraction must be in (0, 1)", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, SchemaError, DataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DegenerateClassError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
