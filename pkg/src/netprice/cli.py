"""Command line entry point.

Exit codes: 0 success, 2 input or configuration error, 3 no successful
model rows.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import pipeline
from .comparison import NoSuccessfulRows, compare
from .exceptions import NetPriceError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_MODELS = 3

log = logging.getLogger("netprice")


def _spec(args):
    return pipeline.load_run_spec(args.spec, seed=args.seed)


def cmd_ingest(args) -> int:
    spec = _spec(args)
    labeled, report = pipeline.run_ingest(spec, args.jobs)
    print(f"rows read: {report['rows_read']}  dropped (no label): "
          f"{report['rows_dropped_no_label']}  kept: {report['rows_kept']}")
    if report["columns_dropped_for_missingness"]:
        print("dropped for missingness: " + ", ".join(report["columns_dropped_for_missingness"]))
    print(f"snapshot: {spec.snapshot_path}")
    return EXIT_OK


def cmd_train(args) -> int:
    spec = _spec(args)
    report = pipeline.run_train(spec, args.jobs)
    try:
        comparison = compare(report["rows"])
    except NoSuccessfulRows as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_MODELS
    print(comparison.to_text(), end="")
    print(f"report: {spec.report_path}")
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        payload = json.loads(Path(args.inp).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read {args.inp}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    rows = payload["rows"] if isinstance(payload, dict) else payload
    try:
        comparison = compare(rows)
    except NoSuccessfulRows as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_MODELS
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.with_suffix(".json").write_text(pipeline.dump_json(comparison.to_dict()), encoding="utf-8")
        out.with_suffix(".txt").write_text(comparison.to_text(), encoding="utf-8")
    if args.text:
        print(comparison.to_text(), end="")
    else:
        print(pipeline.dump_json(comparison.to_dict()), end="")
    return EXIT_OK


def cmd_importance(args) -> int:
    spec = _spec(args)
    _, text = pipeline.run_importance(spec, args.model)
    print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netprice", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_spec(p):
        p.add_argument("--spec", required=True, help="run spec JSON")
        p.add_argument("--seed", type=int, default=None, help="override the spec seed")
        p.add_argument("--jobs", type=int, default=1, help="maximum worker threads")
        return p

    with_spec(sub.add_parser("ingest", help="load CSVs and write the labeled snapshot")) \
        .set_defaults(func=cmd_ingest)
    with_spec(sub.add_parser("train", help="tune and evaluate every estimator/validator pair")) \
        .set_defaults(func=cmd_train)
    p = sub.add_parser("compare", help="rank report rows by accuracy and fit time")
    p.add_argument("--in", dest="inp", required=True, help="report JSON from train")
    p.add_argument("--text", action="store_true", help="print the aligned text table")
    p.add_argument("--out", default=None, help="also write <out>.json and <out>.txt")
    p.set_defaults(func=cmd_compare)
    p = with_spec(sub.add_parser("importance", help="permutation importance of a saved model"))
    p.add_argument("--model", required=True, help="model JSON written by train")
    p.set_defaults(func=cmd_importance)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (NetPriceError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
