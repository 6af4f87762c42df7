"""IR for the shadow-modelling language: sets, indexed parameters and
definitions, plus the expression node types and the canonical printer.

The language keeps data and relationships separate: the IR holds only
symbolic declarations, never element-level values (those live in the
evaluator's data store).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..errors import InputError


class ModelError(InputError):
    pass


class UnknownSet(ModelError):
    pass


class UnknownParam(ModelError):
    pass


class UnknownIndex(ModelError):
    pass


class DuplicateName(ModelError):
    pass


class FreeIndexError(ModelError):
    def __init__(self, definition: str, index: str):
        self.definition = definition
        self.index = index
        super().__init__(
            f"definition {definition}: index {index!r} is neither in the target "
            f"domain nor bound by an aggregate"
        )


class CyclicDefinitionError(ModelError):
    def __init__(self, path: List[str]):
        self.path = path
        super().__init__("cyclic definitions: " + " -> ".join(path))


# ---------------------------------------------------------------------------
# Expression nodes

class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class IndexRef(Expr):
    name: str


@dataclass(frozen=True)
class ParamRef(Expr):
    name: str
    args: Tuple[str, ...]  # index names


@dataclass(frozen=True)
class First(Expr):
    set_name: str


@dataclass(frozen=True)
class Agg(Expr):
    kind: str  # SUM | MAX | MIN
    indices: Tuple[str, ...]
    filter: Optional[Expr]
    body: Expr


@dataclass(frozen=True)
class IfExpr(Expr):
    cond: Expr
    then: Expr
    otherwise: Expr


@dataclass(frozen=True)
class UnaryOp(Expr):
    op: str  # "-"
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # + - * / ^
    left: Expr
    right: Expr


@dataclass(frozen=True)
class CmpOp(Expr):
    op: str  # = <> < <= > >=
    left: Expr
    right: Expr


# ---------------------------------------------------------------------------
# Declarations

@dataclass
class SetDecl:
    name: str
    index: str
    parent: Optional[str] = None
    elements: Optional[List[str]] = None  # None = inherit from parent

    def __eq__(self, other):
        if not isinstance(other, SetDecl):
            return NotImplemented
        return (self.name, self.index, self.parent, self.elements) == (
            other.name, other.index, other.parent, other.elements)


@dataclass
class ParamDecl:
    name: str
    indexes: Tuple[str, ...]
    role: str  # "input" | "defined"


@dataclass
class Definition:
    target: str
    expr: Expr


class ShadowModelIR:
    """Parsed model: declaration order is preserved and meaningful."""

    def __init__(self) -> None:
        self.sets: Dict[str, SetDecl] = {}
        self.params: Dict[str, ParamDecl] = {}
        self.definitions: Dict[str, Definition] = {}
        self.index_to_set: Dict[str, str] = {}
        # target -> referenced parameter names, and a dependency-respecting
        # evaluation order over defined parameters (filled by the parser).
        self.def_reads: Dict[str, List[str]] = {}
        self.eval_order: List[str] = []

    def set_elements(self, name: str) -> List[str]:
        decl = self.sets.get(name)
        if decl is None:
            raise UnknownSet(f"unknown set: {name}")
        if decl.elements is not None:
            return decl.elements
        if decl.parent is None:
            return []
        return self.set_elements(decl.parent)

    def index_elements(self, index: str) -> List[str]:
        try:
            return self.set_elements(self.index_to_set[index])
        except KeyError:
            raise UnknownIndex(f"unknown index: {index}") from None

    def set_ancestry(self, name: str) -> List[str]:
        """The set and its transitive parents, nearest first."""
        chain = []
        while name is not None:
            chain.append(name)
            name = self.sets[name].parent
        return chain

    def input_params(self) -> List[str]:
        return [p.name for p in self.params.values() if p.role == "input"]

    def defined_params(self) -> List[str]:
        return [p.name for p in self.params.values() if p.role == "defined"]

    def downstream_of(self, param: str) -> List[str]:
        """Defined parameters that (in)directly read ``param``."""
        reverse: Dict[str, List[str]] = {}
        for target, reads in self.def_reads.items():
            for read in reads:
                reverse.setdefault(read, []).append(target)
        seen: List[str] = []
        stack = [param]
        while stack:
            current = stack.pop()
            for reader in reverse.get(current, ()):
                if reader not in seen:
                    seen.append(reader)
                    stack.append(reader)
        return seen

    def __eq__(self, other):
        if not isinstance(other, ShadowModelIR):
            return NotImplemented
        return (
            list(self.sets.values()) == list(other.sets.values())
            and list(self.params.values()) == list(other.params.values())
            and list(self.definitions.values()) == list(other.definitions.values())
        )


# ---------------------------------------------------------------------------
# Canonical printing

_PREC_CMP = 1
_PREC_ADD = 2
_PREC_MUL = 3
_PREC_UNARY = 4
_PREC_POW = 5


def _prec(expr: Expr) -> int:
    if isinstance(expr, CmpOp):
        return _PREC_CMP
    if isinstance(expr, BinOp):
        if expr.op in "+-":
            return _PREC_ADD
        if expr.op in "*/":
            return _PREC_MUL
        return _PREC_POW
    if isinstance(expr, UnaryOp):
        return _PREC_UNARY
    if isinstance(expr, IfExpr):
        return 0  # always parenthesized when nested
    return 10


def _num_text(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def print_expr(expr: Expr) -> str:
    if isinstance(expr, Num):
        return _num_text(expr.value)
    if isinstance(expr, IndexRef):
        return expr.name
    if isinstance(expr, ParamRef):
        if not expr.args:
            return expr.name
        return f"{expr.name}({', '.join(expr.args)})"
    if isinstance(expr, First):
        return f"FIRST({expr.set_name})"
    if isinstance(expr, Agg):
        binding = f"({', '.join(expr.indices)})"
        if expr.filter is not None:
            binding += f" | {print_expr(expr.filter)}"
        return f"{expr.kind}({binding}, {print_expr(expr.body)})"
    if isinstance(expr, IfExpr):
        return (
            f"IF {print_expr(expr.cond)} THEN {print_expr(expr.then)} "
            f"ELSE {print_expr(expr.otherwise)} ENDIF"
        )
    if isinstance(expr, UnaryOp):
        return "-" + _wrap(expr.operand, _PREC_UNARY)
    if isinstance(expr, BinOp):
        prec = _prec(expr)
        if expr.op == "^":
            left = _wrap(expr.left, prec + 1)
            right = _wrap(expr.right, prec)
        else:
            left = _wrap(expr.left, prec)
            right = _wrap(expr.right, prec + 1)
        return f"{left} {expr.op} {right}"
    if isinstance(expr, CmpOp):
        return f"{_wrap(expr.left, _PREC_CMP + 1)} {expr.op} {_wrap(expr.right, _PREC_CMP + 1)}"
    raise TypeError(f"not a model expression: {expr!r}")


def _wrap(expr: Expr, min_prec: int) -> str:
    text = print_expr(expr)
    if _prec(expr) < min_prec:
        return f"({text})"
    return text


def print_model(ir: ShadowModelIR) -> str:
    """Canonical model text; reparsing yields a structurally equal IR."""
    lines: List[str] = []
    for decl in ir.sets.values():
        line = f"SET {decl.name}({decl.index})"
        if decl.parent:
            line += f" SUBSET {decl.parent}"
        if decl.elements is not None:
            line += " := {" + ", ".join(decl.elements) + "}"
        lines.append(line + ";")
    for param in ir.params.values():
        if param.role != "input":
            continue
        if param.indexes:
            lines.append(f"PARAM {param.name}({', '.join(param.indexes)});")
        else:
            lines.append(f"PARAM {param.name};")
    for definition in ir.definitions.values():
        target = ir.params[definition.target]
        head = definition.target
        if target.indexes:
            head += f"({', '.join(target.indexes)})"
        lines.append(f"DEF {head} := {print_expr(definition.expr)};")
    return "\n".join(lines) + ("\n" if lines else "")
