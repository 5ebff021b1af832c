"""Command line entry point: ``grassmann-kernel run <file>``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dsl import emit_report, parse_model, run_model

EXIT_OK, EXIT_NO, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="grassmann-kernel", description="Exact Grassmann algebra kernel")
    sub = parser.add_subparsers(dest="action", required=True)
    run = sub.add_parser("run", help="parse a model file and execute its commands")
    run.add_argument("file", help="model file ('-' for stdin)")
    run.add_argument("--json", metavar="OUT", help="write the JSON report to OUT ('-' for stdout)")
    run.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    run.add_argument("--max-degree", type=int, metavar="D", help="override the truncation degree D")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        print(f"grassmann-kernel: cannot read {args.file}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.max_degree is not None and args.max_degree < 0:
        print("grassmann-kernel: --max-degree must be non-negative", file=sys.stderr)
        return EXIT_USAGE

    model = parse_model(text)
    if model.diagnostics:
        for diag in model.diagnostics:
            print(f"{args.file}:{diag}", file=sys.stderr)
        if args.json:
            payload = json.dumps({"diagnostics": [
                {"code": d.code, "message": d.message, "line": d.line, "col": d.col,
                 "expected": list(d.expected)} for d in model.diagnostics]}, sort_keys=True)
            _write(args.json, payload)
        return EXIT_USAGE

    outcomes = run_model(model, seed=args.seed, max_degree=args.max_degree)
    # keep stdout pure JSON when the report goes there
    summary_stream = sys.stderr if args.json == "-" else sys.stdout
    for out in outcomes:
        print(out.summary, file=summary_stream)
    if args.json:
        _write(args.json, emit_report([o.result for o in outcomes], indent=2))
    return EXIT_OK if all(o.ok for o in outcomes) else EXIT_NO


def _write(target: str, payload: str) -> None:
    if target == "-":
        print(payload)
    else:
        Path(target).write_text(payload + "\n", encoding="utf-8")


if __name__ == "__main__":
    sys.exit(main())
