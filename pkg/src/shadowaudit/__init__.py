"""Spreadsheet assurance by comparison against an independent shadow model.

Subpackages: ``workbook`` (text workbook format), ``formula`` (parser and
recalculation engine), ``shadow`` (modelling-language parser and
evaluator), ``binding`` (sheet-to-parameter mappings), ``scenarios`` (test
set generation), ``audit`` (orchestration and reports), ``cost``
(audit-effort comparison).
"""

__version__ = "0.1.0"

from .audit import AuditFinding, AuditReport, Tolerance, format_report, run_audit
from .binding import BindingSet, load_bindings, parse_bindings
from .scenarios import InputVar, Scenario, gen_suite
from .shadow.parser import load_model, parse_model
from .workbook import CellAddress, CellContent, Workbook, load_workbook, save_workbook

__all__ = [
    "AuditFinding",
    "AuditReport",
    "BindingSet",
    "CellAddress",
    "CellContent",
    "InputVar",
    "Scenario",
    "Tolerance",
    "Workbook",
    "__version__",
    "format_report",
    "gen_suite",
    "load_bindings",
    "load_model",
    "load_workbook",
    "parse_bindings",
    "parse_model",
    "run_audit",
    "save_workbook",
]
