"""Control-around audit orchestration.

Per scenario: inject the values into a copy of the workbook, recalculate,
feed the same inputs through the bindings into the shadow store, evaluate,
and compare every bound output element.  A scenario whose evaluation fails
still yields one (FAIL) finding per expected output element, so one bad
scenario never masks the others.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .binding import BindingSet, expand, import_inputs, inject_scenario, read_outputs
from .errors import ShadowAuditError
from .formula.engine import recalculate
from .scenarios import Scenario
from .shadow.eval import evaluate, load_data, query, unused_inputs
from .shadow.model import ShadowModelIR
from .workbook import Workbook

DEFAULT_ABS_TOL = 1e-9
DEFAULT_REL_TOL = 1e-6


@dataclass(frozen=True)
class Tolerance:
    abs: float = DEFAULT_ABS_TOL
    rel: float = DEFAULT_REL_TOL

    def passes(self, a: float, b: float) -> bool:
        diff = abs(a - b)
        return diff <= self.abs or diff <= self.rel * max(abs(a), abs(b))


@dataclass
class AuditFinding:
    scenario_id: str
    param: str
    tup: Tuple[str, ...]
    cell: str
    sheet_value: Optional[float]
    shadow_value: Optional[float]
    abs_diff: Optional[float]
    rel_diff: Optional[float]
    verdict: str  # "PASS" | "FAIL"
    warnings: List[str] = field(default_factory=list)
    note: Optional[str] = None


@dataclass
class AuditReport:
    findings: List[AuditFinding]
    warnings: List[str]
    scenario_ids: List[str]

    @property
    def n_fail(self) -> int:
        return sum(1 for f in self.findings if f.verdict == "FAIL")

    @property
    def n_total(self) -> int:
        return len(self.findings)

    def failed(self) -> List[AuditFinding]:
        return [f for f in self.findings if f.verdict == "FAIL"]


def _output_elements(wb: Workbook, ir: ShadowModelIR, bindings: BindingSet):
    elements = []
    for binding in bindings.output_bindings():
        for tup, addr in expand(binding, wb, ir):
            elements.append((binding.param, tup, addr))
    return elements


def _run_scenario(
    wb: Workbook,
    ir: ShadowModelIR,
    bindings: BindingSet,
    scenario: Scenario,
    tol: Tolerance,
) -> List[AuditFinding]:
    try:
        injected = inject_scenario(wb, bindings, scenario, ir)
        grid = recalculate(injected)
        assignments, warnings = import_inputs(grid, bindings, ir, injected)
        store = evaluate(ir, load_data(ir, assignments))
        readings = read_outputs(grid, bindings, ir, injected)
    except ShadowAuditError as exc:
        note = f"scenario error: {exc}"
        return [
            AuditFinding(scenario.id, param, tup, addr.a1(), None, None, None, None,
                         "FAIL", ["scenario-error"], note)
            for param, tup, addr in _output_elements(wb, ir, bindings)
        ]

    findings: List[AuditFinding] = []
    for reading in readings:
        entry_warnings = list(warnings) + list(reading.warnings)
        if scenario.degenerate:
            entry_warnings.append("degenerate-scenario")
        if reading.error is not None:
            findings.append(
                AuditFinding(scenario.id, reading.param, reading.tup,
                             reading.address.a1(), None, None, None, None,
                             "FAIL", entry_warnings, reading.error)
            )
            continue
        try:
            shadow_value = query(store, reading.param, reading.tup)
        except ShadowAuditError as exc:
            findings.append(
                AuditFinding(scenario.id, reading.param, reading.tup,
                             reading.address.a1(), reading.value, None, None, None,
                             "FAIL", entry_warnings, str(exc))
            )
            continue
        abs_diff = abs(reading.value - shadow_value)
        scale = max(abs(reading.value), abs(shadow_value))
        rel_diff = abs_diff / scale if scale > 0 else 0.0
        verdict = "PASS" if tol.passes(reading.value, shadow_value) else "FAIL"
        findings.append(
            AuditFinding(scenario.id, reading.param, reading.tup,
                         reading.address.a1(), reading.value, shadow_value,
                         abs_diff, rel_diff, verdict, entry_warnings)
        )
    return findings


def run_audit(
    wb: Workbook,
    ir: ShadowModelIR,
    bindings: BindingSet,
    scenarios: Sequence[Scenario],
    tol: Tolerance = Tolerance(),
    threads: Optional[int] = None,
) -> AuditReport:
    """Audit every scenario; findings are ordered by scenario, then binding,
    then row-major tuple order, regardless of execution parallelism."""
    if threads is None:
        threads = int(os.environ.get("SHADOW_AUDIT_THREADS", "0") or "0")
    report_warnings = [f"unused-input:{name}" for name in unused_inputs(ir)]

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(
                pool.map(
                    lambda s: _run_scenario(wb.copy(), ir, bindings, s, tol),
                    scenarios,
                )
            )
    else:
        blocks = [_run_scenario(wb, ir, bindings, s, tol) for s in scenarios]

    findings = [finding for block in blocks for finding in block]
    return AuditReport(findings, report_warnings, [s.id for s in scenarios])


# ---------------------------------------------------------------------------
# Report formatting

CSV_COLUMNS = (
    "scenario_id", "parameter", "tuple", "cell", "sheet_value", "shadow_value",
    "abs_diff", "rel_diff", "verdict", "warnings",
)


def _tuple_text(tup: Tuple[str, ...]) -> str:
    return "(" + ",".join(tup) + ")" if tup else "()"


def _value_text(value: Optional[float]) -> str:
    return "" if value is None else repr(value)


def format_report(report: AuditReport, mode: str = "human") -> str:
    if mode == "csv":
        return _format_csv(report)
    if mode == "human":
        return _format_human(report)
    raise ValueError(f"unknown report mode {mode!r}")


def _format_csv(report: AuditReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for f in report.findings:
        writer.writerow([
            f.scenario_id, f.param, _tuple_text(f.tup), f.cell,
            _value_text(f.sheet_value), _value_text(f.shadow_value),
            _value_text(f.abs_diff), _value_text(f.rel_diff),
            f.verdict, "; ".join(f.warnings),
        ])
    return buffer.getvalue()


def _format_human(report: AuditReport) -> str:
    headers = ("scenario", "output", "cell", "sheet", "shadow", "abs diff", "verdict")
    rows = []
    for f in report.findings:
        rows.append((
            f.scenario_id,
            f"{f.param}{_tuple_text(f.tup)}",
            f.cell,
            _value_text(f.sheet_value) or "-",
            _value_text(f.shadow_value) or "-",
            _value_text(f.abs_diff) or "-",
            f.verdict + ("" if not f.warnings else " [" + "; ".join(f.warnings) + "]"),
        ))
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in rows)) if rows else len(headers[i])
        for i in range(len(headers))
    ]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    lines.append("")
    for warning in report.warnings:
        lines.append(f"warning: {warning}")
    notes = [f for f in report.findings if f.note]
    for f in notes:
        lines.append(f"note [{f.scenario_id} {f.param}{_tuple_text(f.tup)}]: {f.note}")
    lines.append(
        f"FAIL: {report.n_fail} / {report.n_total} "
        f"({len(report.scenario_ids)} scenarios)"
    )
    return "\n".join(lines) + "\n"
