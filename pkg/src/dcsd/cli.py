"""Command-line front end.

Subcommands:

* ``discover`` — load a CSV, build the proposition pool, run
  branch-and-bound, and print the top-k subgroup reports plus trace
  summary (json, csv, or text).
* ``bench``    — run the same dispersion-corrected search twice, once
  bounded by the level-1 suffix estimator and once by the tight linear
  estimator, and emit a CSV comparison of node counts and times.
* ``check``    — run the randomized brute-force self-check suites.

Exit codes: 0 success, 1 incomplete (budget hit), 2 usage error,
3 data error, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys

from . import checks, evalstats, fixtures, lang
from .dataset import build_propositions, load_csv
from .errors import DataError, UsageError
from .objectives import GlobalStats, OBJECTIVE_NAMES, make_objective
from .search import SearchConfig, run_search

EXIT_OK = 0
EXIT_INCOMPLETE = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4

_ESTIMATOR_FLAG = {"top": "top", "general": "general", "linear": "linear"}

# Fixed column order of csv reports; keep stable for diffability.
REPORT_COLUMNS = ("rank", "selector", "prop_ids", "value", "size", "coverage",
                  "median", "amd", "mean", "variance", "epsilon", "lcb",
                  "lcb_score")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcsd",
        description="Optimal subgroup discovery for numeric targets with "
                    "dispersion-corrected objectives")
    sub = parser.add_subparsers(dest="command", required=True)

    disc = sub.add_parser("discover", help="search a dataset for subgroups")
    disc.add_argument("--input", required=True, help="CSV file path")
    disc.add_argument("--target", required=True, help="target column name")
    disc.add_argument("--objective", choices=OBJECTIVE_NAMES, default="f1")
    disc.add_argument("--language", choices=("cnj", "ccj"), default="ccj")
    disc.add_argument("--estimator", choices=tuple(_ESTIMATOR_FLAG),
                      default=None,
                      help="bounding strategy (default: natural choice for "
                           "the objective)")
    disc.add_argument("--a", type=float, default=1.0,
                      help="approximation factor in (0, 1]")
    disc.add_argument("--depth", type=int, default=None,
                      help="depth limit (refinement steps from the root)")
    disc.add_argument("--top-k", type=int, default=1)
    disc.add_argument("--cuts", type=int, default=5,
                      help="cut points per numeric attribute")
    disc.add_argument("--binning", choices=("equal-frequency", "equal-width"),
                      default="equal-frequency")
    disc.add_argument("--delta", type=float, default=0.05,
                      help="confidence parameter for the lower-bound score")
    disc.add_argument("--format", choices=("json", "csv", "text"),
                      default="text")
    disc.add_argument("--trace", default=None,
                      help="write one JSON line per expansion to this path")
    disc.add_argument("--node-budget", type=int, default=None)
    disc.add_argument("--time-budget", type=float, default=None)
    disc.set_defaults(func=cmd_discover)

    bench = sub.add_parser(
        "bench", help="compare the suffix-sequence and tight linear "
                      "estimators on the same dispersion-corrected search")
    bench.add_argument("--input", default=None,
                       help="CSV file (default: generated planted fixture)")
    bench.add_argument("--target", default=None,
                       help="target column (required with --input)")
    bench.add_argument("--seed", type=int, default=0,
                       help="seed for the generated fixture")
    bench.add_argument("--rows", type=int, default=160,
                       help="rows of the generated fixture")
    bench.add_argument("--language", choices=("cnj", "ccj"), default="ccj")
    bench.add_argument("--a", type=float, default=1.0)
    bench.add_argument("--depth", type=int, default=None)
    bench.add_argument("--cuts", type=int, default=3)
    bench.add_argument("--binning", choices=("equal-frequency", "equal-width"),
                       default="equal-frequency")
    bench.set_defaults(func=cmd_bench)

    chk = sub.add_parser("check", help="run randomized brute-force "
                                       "self-check suites")
    chk.add_argument("--trials", type=int, default=200)
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--max-m", type=int, default=14,
                     help="largest multiset for estimator equivalence")
    chk.add_argument("--max-props", type=int, default=10)
    chk.add_argument("--max-rows", type=int, default=20)
    chk.set_defaults(func=cmd_check)

    return parser


def _load_table(args):
    table = load_csv(args.input, args.target)
    pool = build_propositions(table, cuts=args.cuts, strategy=args.binning)
    return table, pool


def _result_payload(rank, record, pool, table, delta):
    report = evalstats.subgroup_report(
        lang.describe(record.selector, pool),
        table.target[record.selector.extension.mask],
        table.target, delta)
    payload = {"rank": rank, "prop_ids": list(record.selector.props),
               "value": record.value}
    payload.update(report.as_dict())
    return payload


def _print_json(payload, stream):
    stream.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _print_csv_report(results, stream):
    import csv as _csv
    writer = _csv.writer(stream)
    writer.writerow(REPORT_COLUMNS)
    def cell(value):
        return "" if value is None else value

    for row in results:
        writer.writerow([
            row["rank"], row["selector"],
            "|".join(str(p) for p in row["prop_ids"]),
            row["value"], row["size"], row["coverage"], row["median"],
            row["amd"], row["mean"], cell(row["variance"]),
            cell(row["epsilon"]), cell(row["lcb"]), cell(row["lcb_score"]),
        ])


def _print_text_report(payload, stream):
    glob = payload["global"]
    stream.write(f"population: size={glob['size']} median={glob['median']} "
                 f"amd={glob['amd']:.6g} max={glob['max']}\n")
    if payload["dataset"]["dropped_rows"]:
        stream.write(f"dropped rows: {payload['dataset']['dropped_rows']}\n")
    for row in payload["results"]:
        score = ("n/a" if row["lcb_score"] is None
                 else f"{row['lcb_score']:.6g}")
        stream.write(
            f"{row['rank']}. {row['selector']}\n"
            f"   value={row['value']:.6g} size={row['size']} "
            f"coverage={row['coverage']:.4g} median={row['median']:.6g} "
            f"amd={row['amd']:.6g} lcb_score={score}\n")
    trace = payload["trace"]
    status = "incomplete" if trace["incomplete"] else "complete"
    stream.write(f"search: {status}, nodes_expanded={trace['nodes_expanded']} "
                 f"nodes_enqueued={trace['nodes_enqueued']} "
                 f"wall_time={trace['wall_time']:.3f}s\n")


def cmd_discover(args, stdout) -> int:
    table, pool = _load_table(args)
    pop = GlobalStats.from_values(table.target)
    objective = make_objective(args.objective, pop)
    config = SearchConfig(a=args.a, depth_limit=args.depth, top_k=args.top_k,
                          language=args.language, estimator=args.estimator,
                          node_budget=args.node_budget,
                          time_budget=args.time_budget)
    with contextlib.ExitStack() as stack:
        writer = None
        if args.trace:
            writer = stack.enter_context(
                open(args.trace, "w", encoding="utf-8"))
        results, trace = run_search(table, pool, objective, config,
                                    trace_writer=writer)
    rows = [_result_payload(i + 1, record, pool, table, args.delta)
            for i, record in enumerate(results)]
    payload = {
        "dataset": {"rows": table.rows, "target": table.target_name,
                    "dropped_rows": table.dropped_rows,
                    "propositions": len(pool)},
        "global": {"size": pop.size, "median": pop.median, "amd": pop.amd,
                   "mean": pop.mean, "max": pop.max_value},
        "config": {"objective": args.objective, "language": args.language,
                   "estimator": args.estimator or "auto", "a": args.a,
                   "depth_limit": args.depth, "top_k": args.top_k,
                   "cuts": args.cuts, "binning": args.binning,
                   "delta": args.delta},
        "results": rows,
        "trace": {"nodes_expanded": trace.nodes_expanded,
                  "nodes_enqueued": trace.nodes_enqueued,
                  "wall_time": trace.wall_time,
                  "incomplete": trace.incomplete},
    }
    if args.format == "json":
        _print_json(payload, stdout)
    elif args.format == "csv":
        _print_csv_report(rows, stdout)
    else:
        _print_text_report(payload, stdout)
    return EXIT_INCOMPLETE if trace.incomplete else EXIT_OK


def cmd_bench(args, stdout) -> int:
    if args.input is not None:
        if not args.target:
            raise UsageError("--target is required with --input")
        table = load_csv(args.input, args.target)
        source = args.input
    else:
        table = fixtures.planted(args.seed, rows=args.rows)
        source = f"planted fixture (seed={args.seed}, rows={args.rows})"
    pool = build_propositions(table, cuts=args.cuts, strategy=args.binning)
    pop = GlobalStats.from_values(table.target)
    objective = make_objective("f1", pop)

    runs = []
    for estimator in ("top", "linear"):
        config = SearchConfig(a=args.a, depth_limit=args.depth,
                              language=args.language, estimator=estimator)
        results, trace = run_search(table, pool, objective, config)
        optimum = results[0].value if results else 0.0
        runs.append((estimator, optimum, trace))

    stdout.write(f"# dataset: {source}; objective f1; language "
                 f"{args.language}; a={args.a}\n")
    stdout.write("estimator,optimum,nodes_expanded,nodes_enqueued,"
                 "wall_time_s\n")
    for estimator, optimum, trace in runs:
        stdout.write(f"{estimator},{optimum!r},{trace.nodes_expanded},"
                     f"{trace.nodes_enqueued},{trace.wall_time:.6f}\n")

    if runs[0][1] != runs[1][1]:
        stdout.write(f"ERROR: estimators disagree on the optimum: "
                     f"{runs[0][1]!r} vs {runs[1][1]!r}\n")
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_check(args, stdout) -> int:
    if args.trials == 0:
        stdout.write("warning: 0 trials requested; all suites pass "
                     "vacuously\n")
        return EXIT_OK
    if args.trials < 0:
        raise UsageError("--trials must be >= 0")
    suites = checks.run_all(args.trials, args.seed, max_m=args.max_m,
                            max_props=args.max_props, max_rows=args.max_rows)
    failed = False
    for suite in suites:
        status = "pass" if suite.ok else "FAIL"
        stdout.write(f"{suite.name}: {status} ({suite.trials} trials)\n")
        for line in suite.failures:
            stdout.write(f"  counterexample: {line}\n")
        failed = failed or not suite.ok
    return EXIT_INTERNAL if failed else EXIT_OK


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, stdout)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except DataError as exc:
        stderr.write(f"data error: {exc}\n")
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - surfaced as invariant failure
        stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


def main_entry() -> None:  # console_scripts hook
    sys.exit(main())
