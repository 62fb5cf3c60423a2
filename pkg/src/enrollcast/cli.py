"""Command-line interface.

Subcommands mirror the HTTP API: ingest, train, evaluate, predict, serve,
synth, report. Results print as JSON on stdout. Exit codes: 0 success,
1 usage error, 2 domain error (the error object prints to stderr as JSON).
The ENROLLCAST_STORE environment variable overrides --store.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .dataset import DROP_ROWS, IMPUTE_MODE, FeatureSchema, clean, load_csv, to_csv
from .errors import EnrollcastError, NotFound
from .featsel import BACKWARD, FORWARD, SearchConfig
from .logreg import FitConfig
from .dataset import SplitSpec
from .pipeline import evaluate_on_dataset, predict_record, train_pipeline
from .store import Store, TrainOptions, read_model_file, write_model_file
from .synth import generate, schema_for_csv_header

DEFAULT_STORE = "./enrollcast-store"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the CLI contract reserves 2 for
    # domain errors and uses 1 for usage problems
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _store_path(args) -> str:
    return os.environ.get("ENROLLCAST_STORE") or args.store


def _load_clean(args, policy: str):
    """Resolve --dataset ID (store) or --data/--schema files to a CleanDataset."""
    if getattr(args, "dataset", None):
        store = Store(_store_path(args))
        data = store.load_dataset(args.dataset)
        return data, args.dataset, store
    if not getattr(args, "data", None):
        raise NotFound("pass --dataset ID or --data FILE")
    source = sys.stdin.buffer.read() if args.data == "-" else Path(args.data).read_bytes()
    if args.schema:
        schema = FeatureSchema.from_json(Path(args.schema).read_bytes())
    else:
        # no schema file: match the bundled schema against the CSV header
        import csv as _csv
        import io as _io

        header = next(_csv.reader(_io.StringIO(source.decode("utf-8-sig").splitlines()[0])), [])
        schema = schema_for_csv_header(header)
    raw = load_csv(source, schema, source_name=str(args.data))
    return clean(raw, policy), None, None


def _load_model(args):
    """--model accepts a model file path or an id in the store."""
    candidate = Path(args.model)
    if candidate.is_file():
        return read_model_file(candidate)
    return Store(_store_path(args)).load_model(args.model)


def cmd_ingest(args) -> int:
    schema = FeatureSchema.from_json(Path(args.schema).read_bytes())
    raw = load_csv(Path(args.data).read_bytes(), schema, source_name=args.data)
    cleaned = clean(raw, args.policy)
    store = Store(_store_path(args))
    dataset_id = store.save_dataset(cleaned)
    _emit(
        {
            "dataset_id": dataset_id,
            "rows": len(cleaned.rows),
            "clean_report": cleaned.report.to_dict(),
        }
    )
    return 0


def cmd_train(args) -> int:
    data, dataset_id, store = _load_clean(args, args.policy)
    if store is None:
        store = Store(_store_path(args))
        dataset_id = store.save_dataset(data)
    fit_config = FitConfig(ridge=args.ridge)
    options = TrainOptions(
        select_features=args.select,
        search=SearchConfig(
            direction=args.direction,
            stale_limit=args.stale,
            merit_folds=args.merit_folds,
            seed=args.seed,
            fit=fit_config,
        ),
        fit=fit_config,
        split=SplitSpec(train_fraction=args.split, seed=args.seed),
        cv_folds=args.folds,
    )
    stored = train_pipeline(data, options, dataset_fingerprint=dataset_id)
    store.save_model(stored)
    out_path = None
    if args.out:
        out_path = str(write_model_file(stored, args.out))

    summary = {
        "model_id": stored.model_id,
        "dataset_id": dataset_id,
        "converged": stored.logistic.converged,
        "iterations_used": stored.logistic.iterations_used,
        "feature_names": list(stored.logistic.feature_names),
        "holdout": {
            "accuracy": stored.holdout_eval.positive.accuracy,
            "f_measure": stored.holdout_eval.positive.f_measure,
            "auc": stored.holdout_eval.roc.auc,
        },
        "cv": {
            "pooled_accuracy": stored.cv_eval.pooled.accuracy,
            "pooled_f_measure": stored.cv_eval.pooled.f_measure,
            "pooled_auc": stored.cv_eval.pooled_auc,
        },
    }
    if out_path:
        summary["out"] = out_path
    if stored.selected_subset is not None:
        summary["selection"] = {
            "selected": list(stored.selected_subset.selected),
            "selected_names": [
                stored.schema.feature_names[i] for i in stored.selected_subset.selected
            ],
            "merit": stored.selected_subset.merit,
            "subsets_evaluated": stored.selected_subset.subsets_evaluated,
            "nodes_expanded": stored.selected_subset.nodes_expanded,
        }
    _emit(summary)
    return 0


def cmd_evaluate(args) -> int:
    stored = _load_model(args)
    raw = load_csv(Path(args.data).read_bytes(), stored.schema, source_name=args.data)
    cleaned = clean(raw, args.policy)
    report = evaluate_on_dataset(stored, cleaned)
    _emit({"model_id": stored.model_id, "rows": len(cleaned.rows), "report": report.to_dict()})
    return 0


def cmd_predict(args) -> int:
    stored = _load_model(args)
    payload = json.loads(Path(args.input).read_text())
    if isinstance(payload, dict) and "feature_values" in payload:
        values = payload["feature_values"]
        applicant_id = str(payload.get("applicant_id", "adhoc"))
    else:
        values = payload
        applicant_id = "adhoc"
    record = predict_record(stored, values, applicant_id=applicant_id)
    _emit(record.to_dict())
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    store = Store(_store_path(args))
    dashboard = Path(args.dashboard) if args.dashboard else None
    app = create_app(store, dashboard_dir=dashboard)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_synth(args) -> int:
    dataset, truth = generate(
        rows=args.rows,
        features=args.features,
        informative=args.informative,
        seed=args.seed,
        missing_rate=args.missing_rate,
    )
    csv_text = to_csv(dataset)
    if args.stdout:
        sys.stdout.write(csv_text)
        return 0
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "data.csv").write_text(csv_text)
    (out_dir / "schema.json").write_text(json.dumps(truth.schema.to_dict(), indent=2))
    (out_dir / "truth.json").write_text(truth.to_json())
    _emit(
        {
            "out_dir": str(out_dir),
            "data": str(out_dir / "data.csv"),
            "schema": str(out_dir / "schema.json"),
            "truth": str(out_dir / "truth.json"),
            "rows": args.rows,
            "features": args.features,
            "informative_names": list(truth.informative_names),
        }
    )
    return 0


def cmd_report(args) -> int:
    from .report import render_dataset_summaries, render_model_report

    stored = _load_model(args)
    files = render_model_report(stored, args.out_dir)
    if args.data:
        raw = load_csv(Path(args.data).read_bytes(), stored.schema, source_name=args.data)
        files += render_dataset_summaries(clean(raw, args.policy), args.out_dir)
    elif args.dataset:
        store = Store(_store_path(args))
        files += render_dataset_summaries(store.load_dataset(args.dataset), args.out_dir)
    _emit({"out_dir": str(args.out_dir), "files": sorted(p.name for p in files)})
    return 0


def _add_store_arg(parser) -> None:
    parser.add_argument(
        "--store",
        default=DEFAULT_STORE,
        help=f"registry directory (default {DEFAULT_STORE}; ENROLLCAST_STORE overrides)",
    )


def _add_policy_arg(parser) -> None:
    parser.add_argument(
        "--policy", choices=[IMPUTE_MODE, DROP_ROWS], default=IMPUTE_MODE,
        help="missing-value policy",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="enrollcast", description="Enrolment decision-support pipeline")
    parser.add_argument("--version", action="version", version=f"enrollcast {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load + clean a CSV into the registry")
    p.add_argument("--data", required=True, help="CSV file")
    p.add_argument("--schema", required=True, help="schema JSON file")
    _add_policy_arg(p)
    _add_store_arg(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train a model (optionally with feature selection)")
    p.add_argument("--dataset", help="dataset id in the registry")
    p.add_argument("--data", help="CSV file (or - for stdin) instead of --dataset")
    p.add_argument(
        "--schema",
        help="schema JSON file (default: bundled schema matched to the CSV header)",
    )
    p.add_argument("--select", action="store_true", help="run wrapper feature selection")
    p.add_argument("--ridge", type=float, default=1e-8)
    p.add_argument("--folds", type=int, default=10, help="cross-validation folds")
    p.add_argument("--merit-folds", dest="merit_folds", type=int, default=5)
    p.add_argument("--stale", type=int, default=5, help="stale expansion limit")
    p.add_argument("--direction", choices=[BACKWARD, FORWARD], default=BACKWARD)
    p.add_argument("--split", type=float, default=0.8, help="train fraction")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the model file here")
    _add_policy_arg(p)
    _add_store_arg(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a stored model against labeled CSV data")
    p.add_argument("--model", required=True, help="model file or id in the registry")
    p.add_argument("--data", required=True, help="labeled CSV file")
    _add_policy_arg(p)
    _add_store_arg(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="score one applicant from a JSON file")
    p.add_argument("--model", required=True, help="model file or id in the registry")
    p.add_argument("--input", required=True, help="JSON file of feature values")
    _add_store_arg(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--dashboard", help="built dashboard directory to mount at /app")
    _add_store_arg(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("synth", help="generate synthetic applicant data")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--features", type=int, default=19)
    p.add_argument("--informative", type=int, default=11)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--missing-rate", dest="missing_rate", type=float, default=0.0)
    p.add_argument("--out-dir", dest="out_dir", default="./synth-out")
    p.add_argument("--stdout", action="store_true", help="print CSV to stdout instead")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="render metric CSVs and figures for a model")
    p.add_argument("--model", required=True, help="model file or id in the registry")
    p.add_argument("--out-dir", dest="out_dir", default="./report-out")
    p.add_argument("--data", help="CSV to render dataset summary charts from")
    p.add_argument("--dataset", help="dataset id to render summary charts from")
    _add_policy_arg(p)
    _add_store_arg(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EnrollcastError as exc:
        body = {"code": exc.code, "message": str(exc)}
        if exc.field is not None:
            body["field"] = exc.field
        print(json.dumps(body, sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
