"""Command line: ``gqnarrow query`` and ``gqnarrow props``.

Exit codes: 0 success, 1 parse or validation error, 2 evaluation error,
3 mismatch between the two engines (or a failing property run).
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import CheckMismatch, EmptySelectList, EvaluationError, GQLError, GQLSyntaxError, InvalidPattern
from .frontend import ENGINES, evaluate_query
from .props import run_properties
from .syntax import format_result, parse_graph, parse_query, result_to_json, trace_to_json

EXIT_OK, EXIT_INPUT, EXIT_EVAL, EXIT_MISMATCH = 0, 1, 2, 3


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; keep 2 for evaluation failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="gqnarrow", description="Evaluate graph queries by narrowing.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("query", help="evaluate a query over a graph file")
    q.add_argument("-g", "--graph", required=True, help="graph file in triple format")
    src = q.add_mutually_exclusive_group(required=True)
    src.add_argument("-q", "--query-file", help="file holding the query")
    src.add_argument("-e", "--expr", help="query text given inline")
    q.add_argument("--engine", choices=ENGINES, default="narrowing")
    q.add_argument("--check", action="store_const", const="check", dest="engine",
                   help="same as --engine check")
    q.add_argument("--trace", choices=("off", "summary", "full"), default="off")
    q.add_argument("--trace-out", help="write the trace here instead of standard error")
    q.add_argument("--lenient", action="store_true",
                   help="drop matches whose expressions fail instead of aborting")
    q.add_argument("--output", choices=("text", "json"), default="text")

    p = sub.add_parser("props", help="run the seeded engine-vs-oracle property harness")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--cases", type=_positive, default=200)
    return ap


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit_trace(trace, args, result_text: str):
    if args.trace == "off" or trace is None:
        return
    if args.output == "json" and args.trace_out is None:
        return
    body = trace.format(verbose=args.trace == "full") + "\n\n" + result_text
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stderr.write(body)


def cmd_query(args, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        graph = parse_graph(_read(args.graph))
        query = parse_query(_read(args.query_file) if args.query_file else args.expr)
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except GQLSyntaxError as exc:
        err.write(f"syntax error: {exc}\n")
        return EXIT_INPUT
    try:
        result, trace = evaluate_query(query, graph, args.engine, args.lenient)
    except (InvalidPattern, EmptySelectList) as exc:
        err.write(f"invalid query: {exc}\n")
        return EXIT_INPUT
    except CheckMismatch as exc:
        err.write("engines disagree\n--- narrowing\n" + format_result(exc.narrowing)
                  + "--- oracle\n" + format_result(exc.oracle))
        return EXIT_MISMATCH
    except EvaluationError as exc:
        err.write(f"evaluation error: {type(exc).__name__}: {exc}\n")
        return EXIT_EVAL
    except GQLError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_EVAL
    text = format_result(result)
    if args.output == "json":
        doc = result_to_json(result)
        if trace is not None and args.trace != "off" and args.trace_out is None:
            doc["trace"] = trace_to_json(trace)
        out.write(json.dumps(doc, ensure_ascii=False, indent=2) + "\n")
    else:
        out.write(text)
    _emit_trace(trace, args, text)
    return EXIT_OK


def cmd_props(args, out=None) -> int:
    out = out or sys.stdout
    report = run_properties(args.seed, args.cases)
    out.write(report.format())
    return EXIT_OK if report.ok else EXIT_MISMATCH


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "query":
        return cmd_query(args)
    return cmd_props(args)


if __name__ == "__main__":
    sys.exit(main())
