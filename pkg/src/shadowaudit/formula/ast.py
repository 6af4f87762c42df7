"""AST node types for spreadsheet formulas, plus the canonical printer."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from ..workbook import column_letter

# Function names accepted by the engine (canonical upper-case).
FUNCTIONS = ("SUM", "MAX", "MIN", "AVERAGE", "IF", "NPV")

# Aggregates may take range arguments directly.
AGGREGATE_FUNCTIONS = ("SUM", "MAX", "MIN", "AVERAGE", "NPV")

COMPARE_OPS = ("=", "<>", "<", "<=", ">", ">=")


class Node:
    __slots__ = ()


@dataclass(frozen=True)
class NumberLit(Node):
    value: float


@dataclass(frozen=True)
class CellRef(Node):
    sheet: Optional[str]  # None = unqualified, resolved against the home sheet
    column: int
    row: int


@dataclass(frozen=True)
class RangeRef(Node):
    sheet: Optional[str]
    start_column: int
    start_row: int
    end_column: int
    end_row: int


@dataclass(frozen=True)
class Unary(Node):
    op: str  # "-"
    operand: Node


@dataclass(frozen=True)
class Binary(Node):
    op: str  # + - * / ^
    left: Node
    right: Node


@dataclass(frozen=True)
class Compare(Node):
    op: str  # = <> < <= > >=
    left: Node
    right: Node


@dataclass(frozen=True)
class Call(Node):
    name: str  # canonical upper-case
    args: Tuple[Node, ...]


# Precedence levels, loosest to tightest.  Unary minus sits between * / and ^,
# so -2^2 prints (and parses) as -(2^2).
_PREC_CMP = 1
_PREC_ADD = 2
_PREC_MUL = 3
_PREC_UNARY = 4
_PREC_POW = 5


def _prec(node: Node) -> int:
    if isinstance(node, Compare):
        return _PREC_CMP
    if isinstance(node, Binary):
        if node.op in "+-":
            return _PREC_ADD
        if node.op in "*/":
            return _PREC_MUL
        return _PREC_POW
    if isinstance(node, Unary):
        return _PREC_UNARY
    return 10


def _ref_text(sheet: Optional[str], column: int, row: int) -> str:
    prefix = f"{sheet}!" if sheet else ""
    return f"{prefix}{column_letter(column)}{row}"


def _num_text(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _render(node: Node) -> str:
    if isinstance(node, NumberLit):
        return _num_text(node.value)
    if isinstance(node, CellRef):
        return _ref_text(node.sheet, node.column, node.row)
    if isinstance(node, RangeRef):
        return (
            _ref_text(node.sheet, node.start_column, node.start_row)
            + ":"
            + _ref_text(node.sheet, node.end_column, node.end_row)
        )
    if isinstance(node, Unary):
        return "-" + _wrap(node.operand, _PREC_UNARY, left_side=False)
    if isinstance(node, Binary):
        prec = _prec(node)
        if node.op == "^":
            # Right-associative: parenthesize a ^ on the left.
            left = _wrap(node.left, prec + 1, left_side=True)
            right = _wrap(node.right, prec, left_side=False)
        else:
            left = _wrap(node.left, prec, left_side=True)
            right = _wrap(node.right, prec + 1, left_side=False)
        return f"{left}{node.op}{right}"
    if isinstance(node, Compare):
        left = _wrap(node.left, _PREC_CMP + 1, left_side=True)
        right = _wrap(node.right, _PREC_CMP + 1, left_side=False)
        return f"{left}{node.op}{right}"
    if isinstance(node, Call):
        return node.name + "(" + ",".join(_render(a) for a in node.args) + ")"
    raise TypeError(f"not a formula node: {node!r}")


def _wrap(node: Node, min_prec: int, left_side: bool) -> str:
    text = _render(node)
    if _prec(node) < min_prec:
        return f"({text})"
    return text


def print_formula(node: Node) -> str:
    """Render an AST back to ``=...`` source; reparsing yields an equal AST."""
    return "=" + _render(node)
