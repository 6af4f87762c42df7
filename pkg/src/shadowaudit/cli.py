"""Command-line driver: ``audit``, ``eval``, ``shadow-eval``, ``scenarios``
and ``cost-model`` subcommands.

Exit status: 0 = all comparisons pass, 1 = at least one FAIL,
2 = configuration or parse error.  Diagnostics go to stderr; reports and
CSV go to stdout or ``--out``.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from typing import List, Optional

from .audit import Tolerance, format_report, run_audit
from .binding import load_bindings
from .cost import DEFAULT_AROUND_RATIO, DEFAULT_COST_MINUTES, emit_curves
from .errors import ShadowAuditError
from .formula.engine import recalculate
from .scenarios import emit_scenarios, gen_suite
from .shadow.eval import evaluate, load_data_file, query, unused_inputs
from .shadow.parser import load_model
from .workbook import CellAddress, load_workbook


def _write_output(text: str, out_path: Optional[str]) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_scenario_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--suite", choices=("full", "default", "oat", "pairwise"),
                        default="full")
    parser.add_argument("--random", type=int, default=0, metavar="N",
                        help="append N seeded random scenarios")
    parser.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shadowaudit")
    sub = parser.add_subparsers(dest="command", required=True)

    audit = sub.add_parser("audit", help="run the control-around audit")
    audit.add_argument("--workbook", required=True)
    audit.add_argument("--model", required=True)
    audit.add_argument("--bindings", required=True)
    _add_scenario_flags(audit)
    audit.add_argument("--abs-tol", type=float, default=Tolerance().abs)
    audit.add_argument("--rel-tol", type=float, default=Tolerance().rel)
    audit.add_argument("--report", choices=("human", "csv"), default="human")
    audit.add_argument("--out")

    ev = sub.add_parser("eval", help="recalculate a workbook and print values")
    ev.add_argument("--workbook", required=True)
    ev.add_argument("--cell", help="single cell like Results!B2")
    ev.add_argument("--out")

    shadow = sub.add_parser("shadow-eval", help="evaluate a shadow model over a data file")
    shadow.add_argument("--model", required=True)
    shadow.add_argument("--data", required=True)
    shadow.add_argument("--out")

    scen = sub.add_parser("scenarios", help="emit the generated test set for review")
    scen.add_argument("--model", required=True)
    scen.add_argument("--bindings", required=True)
    _add_scenario_flags(scen)
    scen.add_argument("--out")

    cost = sub.add_parser("cost-model", help="emit audit-effort comparison curves as CSV")
    cost.add_argument("--dims", default="1,2,3,4", help="comma list of dimension counts")
    cost.add_argument("--levels", default="1..30", help="inclusive range A..B")
    cost.add_argument("--cost-minutes", type=float, default=DEFAULT_COST_MINUTES)
    cost.add_argument("--ratio", type=float, default=DEFAULT_AROUND_RATIO)
    cost.add_argument("--out")
    return parser


def _scenarios_for(args, bindings):
    if args.random and args.seed is None:
        raise ShadowAuditError("--random requires --seed for replayability")
    return gen_suite(
        bindings.input_vars,
        suite=args.suite,
        random_count=args.random,
        seed=args.seed if args.seed is not None else 0,
    )


def cmd_audit(args) -> int:
    wb = load_workbook(args.workbook)
    ir = load_model(args.model)
    bindings = load_bindings(args.bindings, ir)
    scenarios = _scenarios_for(args, bindings)
    tol = Tolerance(abs=args.abs_tol, rel=args.rel_tol)
    report = run_audit(wb, ir, bindings, scenarios, tol)
    _write_output(format_report(report, args.report), args.out)
    return 1 if report.n_fail else 0


def cmd_eval(args) -> int:
    wb = load_workbook(args.workbook)
    grid = recalculate(wb)
    lines = []
    if args.cell:
        addr = CellAddress.parse(args.cell)
        lines.append(f"{addr.a1()} = {grid.value_at(addr)!r}")
    else:
        for addr, _source in wb.formula_cells():
            lines.append(f"{addr.a1()} = {grid.formula_values[addr]!r}")
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def cmd_shadow_eval(args) -> int:
    ir = load_model(args.model)
    store = load_data_file(ir, args.data)
    evaluate(ir, store)
    lines = []
    for name in unused_inputs(ir):
        print(f"warning: unused input parameter {name}", file=sys.stderr)
    for name in ir.defined_params():
        decl = ir.params[name]
        if not decl.indexes:
            lines.append(f"{name} = {query(store, name, ())!r}")
            continue
        for combo in itertools.product(*(ir.index_elements(i) for i in decl.indexes)):
            lines.append(f"{name}({','.join(combo)}) = {query(store, name, combo)!r}")
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def cmd_scenarios(args) -> int:
    ir = load_model(args.model)
    bindings = load_bindings(args.bindings, ir)
    scenarios = _scenarios_for(args, bindings)
    _write_output(emit_scenarios(scenarios), args.out)
    return 0


def _parse_level_range(text: str) -> range:
    parts = text.split("..")
    if len(parts) != 2:
        raise ShadowAuditError(f"bad level range {text!r}; expected A..B")
    try:
        lo, hi = int(parts[0]), int(parts[1])
    except ValueError:
        raise ShadowAuditError(f"bad level range {text!r}; expected A..B") from None
    if lo < 1 or hi < lo:
        raise ShadowAuditError(f"bad level range {text!r}")
    return range(lo, hi + 1)


def cmd_cost_model(args) -> int:
    try:
        dims = [int(part) for part in args.dims.split(",") if part.strip()]
    except ValueError:
        raise ShadowAuditError(f"bad --dims value {args.dims!r}") from None
    if not dims or any(d < 1 for d in dims):
        raise ShadowAuditError(f"bad --dims value {args.dims!r}")
    levels = _parse_level_range(args.levels)
    if args.cost_minutes <= 0 or args.ratio <= 0:
        raise ShadowAuditError("--cost-minutes and --ratio must be positive")
    _write_output(emit_curves(dims, levels, args.cost_minutes, args.ratio), args.out)
    return 0


_COMMANDS = {
    "audit": cmd_audit,
    "eval": cmd_eval,
    "shadow-eval": cmd_shadow_eval,
    "scenarios": cmd_scenarios,
    "cost-model": cmd_cost_model,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ShadowAuditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
