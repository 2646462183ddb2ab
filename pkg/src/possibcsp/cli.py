"""Command-line interface: ``possibcsp {solve,ac,oracle,check,menu}``."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from .core import ProblemError
from .io import format_number, menu_text, parse_problem, write_problem
from .oracle import DEFAULT_BUDGET, BudgetExceeded, enumerate_best
from .propagate import enforce_ac
from .search import Heuristic, SearchOptions, Status, ValueOrder, solve

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ALPHA_PRUNED = 2


def _labeling_line(problem, labeling):
    return " ".join(f"{n}={labeling[n]}" for n in problem.names)


def _labeling_json(problem, labeling):
    return {n: labeling[n] for n in problem.names}


def _read(path):
    text = Path(path).read_text(encoding="utf-8")
    return text, parse_problem(text)


def cmd_solve(args, problem, out):
    if args.order:
        order = [v.strip() for v in args.order.split(",") if v.strip()]
    else:
        order = Heuristic(args.heuristic)
    opts = SearchOptions(
        variable_order=order,
        value_order=ValueOrder(args.value_order),
        alpha0=args.alpha,
        beta0=args.beta,
        all_best=args.all_best,
        node_limit=args.node_limit,
        forward_check=args.forward_check,
    )
    trace_lines = []

    def trace(ev):
        line = f"{ev.depth} {ev.var}={ev.label} bound={format_number(ev.bound)} {ev.action.value}"
        trace_lines.append(line)
        if not args.json:
            print(line, file=sys.stderr)

    result = solve(problem, opts, trace if args.trace else None)
    code = EXIT_ALPHA_PRUNED if result.status is Status.ALPHA_PRUNED else EXIT_OK
    payload = {
        "consistency": result.best_value,
        "labelings": [_labeling_json(problem, lab) for lab in result.best_labelings],
        "status": result.status.value,
        "order": list(result.order),
        "nodes_expanded": result.nodes_expanded,
        "cutoffs": result.cutoffs,
    }
    if args.trace:
        payload["trace"] = trace_lines
    if not args.json:
        print(f"consistency {format_number(result.best_value)}", file=out)
        for lab in result.best_labelings:
            print(_labeling_line(problem, lab), file=out)
        print(f"status {result.status.value} nodes {result.nodes_expanded} "
              f"cutoffs {result.cutoffs}", file=sys.stderr)
    return code, payload


def cmd_ac(args, problem, out):
    result = enforce_ac(problem, args.gamma)
    if args.output:
        Path(args.output).write_text(write_problem(result.closed_problem), encoding="utf-8")
    payload = {
        "delta": result.delta,
        "arc_consistent": result.arc_consistent,
        "rounds": result.rounds,
        "inferences": [
            {"variable": i.variable, "label": i.label, "necessity": i.necessity}
            for i in result.inferences
        ],
    }
    if args.output:
        payload["output"] = str(args.output)
    if not args.json:
        print(f"delta {format_number(result.delta)}", file=out)
        for i in result.inferences:
            print(f"forbid {i.variable}={i.label} necessity {format_number(i.necessity)}", file=out)
    return EXIT_OK, payload


def cmd_oracle(args, problem, out):
    best = enumerate_best(problem, budget=args.budget)
    payload = {"consistency": best.consistency, "best_count": len(best.labelings)}
    if args.all_best:
        payload["labelings"] = [_labeling_json(problem, lab) for lab in best.labelings]
    if not args.json:
        print(f"consistency {format_number(best.consistency)}", file=out)
        if args.all_best:
            for lab in best.labelings:
                print(_labeling_line(problem, lab), file=out)
    return EXIT_OK, payload


def cmd_check(args, problem, out):
    payload = {
        "problem": problem.name,
        "variables": len(problem.variables),
        "constraints": len(problem.constraints),
        "max_arity": max((len(vc.scope) for vc in problem.constraints), default=0),
    }
    if not args.json:
        print(f"problem {problem.name}", file=out)
        print(f"variables {payload['variables']}", file=out)
        print(f"constraints {payload['constraints']}", file=out)
        print(f"max-arity {payload['max_arity']}", file=out)
    return EXIT_OK, payload


COMMANDS = {"solve": cmd_solve, "ac": cmd_ac, "oracle": cmd_oracle, "check": cmd_check}


def _unit(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is outside [0, 1]")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="possibcsp", description="Possibilistic CSP solver")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("file", help="problem in PCSP format")
        p.add_argument("--json", action="store_true", help="structured JSON output")
        return p

    p = add("solve", "branch and bound search")
    p.add_argument("--order", help="explicit variable order v1,v2,...")
    p.add_argument("--heuristic", default="declared", choices=[h.value for h in Heuristic])
    p.add_argument("--value-order", default="declared", choices=[v.value for v in ValueOrder])
    p.add_argument("--alpha", type=_unit, default=0.0)
    p.add_argument("--beta", type=_unit, default=1.0)
    p.add_argument("--all-best", action="store_true")
    p.add_argument("--forward-check", action="store_true")
    p.add_argument("--node-limit", type=int)
    p.add_argument("--trace", action="store_true")

    p = add("ac", "possibilistic arc-consistency")
    p.add_argument("--gamma", type=_unit, default=0.0)
    p.add_argument("--output", help="write the closed problem here")

    p = add("oracle", "exhaustive enumeration")
    p.add_argument("--all-best", action="store_true")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    add("check", "validate a file and summarize it")

    sub.add_parser("menu", help="print the built-in menu problem")
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.command == "menu":
        out.write(menu_text())
        return EXIT_OK
    try:
        text, problem = _read(args.file)
        code, payload = COMMANDS[args.command](args, problem, out)
    except (OSError, ProblemError, BudgetExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if getattr(args, "json", False):
            print(json.dumps({"command": args.command, "argv": argv, "exit_code": EXIT_ERROR,
                              "error": str(exc)}), file=out)
        return EXIT_ERROR
    if args.json:
        report = {
            "command": args.command,
            "argv": argv,
            "input_sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
            "exit_code": code,
            "result": payload,
        }
        print(json.dumps(report, indent=2), file=out)
    return code


if __name__ == "__main__":
    sys.exit(main())
