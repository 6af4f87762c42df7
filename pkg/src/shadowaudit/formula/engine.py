"""Dependency-ordered recalculation of workbook formulas.

Builds the cross-sheet dependency graph, topologically orders the formula
cells and evaluates each AST once.  Empty cells read as 0 in arithmetic;
text cells read in arithmetic raise :class:`FormulaTypeError` (silent
text-as-zero would hide exactly the errors an audit should find).
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Set

from ..arith import ArithmeticFault, checked_div, checked_pow
from ..errors import EvalError
from ..workbook import CellAddress, CellContent, CellKind, Workbook
from .ast import Binary, Call, CellRef, Compare, Node, NumberLit, RangeRef, Unary
from .parser import parse_formula


class CycleError(EvalError):
    def __init__(self, path: List[CellAddress]):
        self.path = path
        pretty = " -> ".join(a.a1() for a in path)
        super().__init__(f"circular reference: {pretty}")


class FormulaTypeError(EvalError):
    def __init__(self, address: CellAddress, message: str):
        self.address = address
        super().__init__(f"{address.a1()}: {message}")


class DivideByZero(EvalError):
    def __init__(self, address: CellAddress):
        self.address = address
        super().__init__(f"{address.a1()}: division by zero")


class UnknownSheetRef(EvalError):
    def __init__(self, address: CellAddress, sheet: str):
        self.address = address
        super().__init__(f"{address.a1()}: reference to unknown sheet {sheet!r}")


def extract_dependencies(node: Node, home_sheet: str) -> Set[CellAddress]:
    """All cell addresses an AST reads, with ranges fully expanded."""
    deps: Set[CellAddress] = set()

    def walk(n: Node) -> None:
        if isinstance(n, CellRef):
            deps.add(CellAddress(n.sheet or home_sheet, n.column, n.row))
        elif isinstance(n, RangeRef):
            sheet = n.sheet or home_sheet
            for row in range(n.start_row, n.end_row + 1):
                for col in range(n.start_column, n.end_column + 1):
                    deps.add(CellAddress(sheet, col, row))
        elif isinstance(n, Unary):
            walk(n.operand)
        elif isinstance(n, (Binary, Compare)):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, Call):
            for arg in n.args:
                walk(arg)

    walk(node)
    return deps


class DependencyGraph:
    """Edges run from each referenced cell to the formula cells reading it."""

    def __init__(self, wb: Workbook):
        self.asts: Dict[CellAddress, Node] = {}
        self.reads: Dict[CellAddress, Set[CellAddress]] = {}
        self.readers: Dict[CellAddress, Set[CellAddress]] = {}
        for addr, source in wb.formula_cells():
            ast = parse_formula(source)
            self.asts[addr] = ast
            self.reads[addr] = extract_dependencies(ast, addr.sheet)
        for addr, deps in self.reads.items():
            for dep in deps:
                if dep in self.asts:
                    self.readers.setdefault(dep, set()).add(addr)

    def _order_key(self, wb: Workbook):
        sheet_rank = {name: i for i, name in enumerate(wb.sheet_order)}

        def key(addr: CellAddress):
            return (sheet_rank.get(addr.sheet, len(sheet_rank)), addr.row, addr.column)

        return key

    def topo_order(self, wb: Workbook) -> List[CellAddress]:
        key = self._order_key(wb)
        indegree = {
            addr: sum(1 for dep in deps if dep in self.asts)
            for addr, deps in self.reads.items()
        }
        ready = sorted((a for a, d in indegree.items() if d == 0), key=key)
        order: List[CellAddress] = []
        while ready:
            addr = ready.pop(0)
            order.append(addr)
            for reader in sorted(self.readers.get(addr, ()), key=key):
                indegree[reader] -= 1
                if indegree[reader] == 0:
                    ready.append(reader)
            ready.sort(key=key)
        if len(order) < len(self.asts):
            raise CycleError(self.find_cycle())
        return order

    def find_cycle(self) -> List[CellAddress]:
        """One full cycle path, closed (first element repeated last)."""
        visiting: List[CellAddress] = []
        on_stack: Set[CellAddress] = set()
        done: Set[CellAddress] = set()

        def dfs(addr: CellAddress) -> Optional[List[CellAddress]]:
            visiting.append(addr)
            on_stack.add(addr)
            for dep in sorted(self.reads.get(addr, ()), key=lambda a: (a.sheet, a.row, a.column)):
                if dep not in self.asts:
                    continue
                if dep in on_stack:
                    start = visiting.index(dep)
                    return visiting[start:] + [dep]
                if dep not in done:
                    found = dfs(dep)
                    if found:
                        return found
            visiting.pop()
            on_stack.discard(addr)
            done.add(addr)
            return None

        for addr in self.asts:
            if addr not in done:
                found = dfs(addr)
                if found:
                    return found
        raise AssertionError("find_cycle called on an acyclic graph")


class ValueGrid:
    """Computed numeric view of a workbook after recalculation."""

    def __init__(self, wb: Workbook, formula_values: Dict[CellAddress, float]):
        self._wb = wb
        self.formula_values = formula_values

    def value_at(self, addr: CellAddress) -> float:
        """Numeric value of a cell: Empty reads 0, Text raises."""
        content = self._wb.get_cell(addr)
        if content.kind is CellKind.FORMULA:
            return self.formula_values[addr]
        if content.kind is CellKind.NUMBER:
            return content.number
        if content.kind is CellKind.EMPTY:
            return 0.0
        raise FormulaTypeError(addr, f"text used as a number: {content.text!r}")

    def content_at(self, addr: CellAddress) -> CellContent:
        return self._wb.get_cell(addr)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ValueGrid):
            return NotImplemented
        return self.formula_values == other.formula_values


class _Evaluator:
    def __init__(self, wb: Workbook, values: Dict[CellAddress, float]):
        self.wb = wb
        self.values = values

    def cell_value(self, addr: CellAddress, at: CellAddress) -> float:
        if not self.wb.has_sheet(addr.sheet):
            raise UnknownSheetRef(at, addr.sheet)
        content = self.wb.get_cell(addr)
        if content.kind is CellKind.FORMULA:
            return self.values[addr]  # topo order guarantees presence
        if content.kind is CellKind.NUMBER:
            return content.number
        if content.kind is CellKind.EMPTY:
            return 0.0
        raise FormulaTypeError(at, f"reads text cell {addr.a1()} in arithmetic")

    def range_values(self, n: RangeRef, at: CellAddress) -> List[float]:
        sheet = n.sheet or at.sheet
        out = []
        for row in range(n.start_row, n.end_row + 1):
            for col in range(n.start_column, n.end_column + 1):
                out.append(self.cell_value(CellAddress(sheet, col, row), at))
        return out

    def eval(self, n: Node, at: CellAddress) -> float:
        if isinstance(n, NumberLit):
            return n.value
        if isinstance(n, CellRef):
            return self.cell_value(CellAddress(n.sheet or at.sheet, n.column, n.row), at)
        if isinstance(n, Unary):
            return -self.eval(n.operand, at)
        if isinstance(n, Binary):
            left = self.eval(n.left, at)
            right = self.eval(n.right, at)
            try:
                if n.op == "+":
                    return left + right
                if n.op == "-":
                    return left - right
                if n.op == "*":
                    return left * right
                if n.op == "/":
                    return checked_div(left, right)
                return checked_pow(left, right)
            except ArithmeticFault as fault:
                if fault.kind == "div0":
                    raise DivideByZero(at) from None
                raise FormulaTypeError(at, str(fault)) from None
        if isinstance(n, Compare):
            left = self.eval(n.left, at)
            right = self.eval(n.right, at)
            result = {
                "=": left == right,
                "<>": left != right,
                "<": left < right,
                "<=": left <= right,
                ">": left > right,
                ">=": left >= right,
            }[n.op]
            return 1.0 if result else 0.0
        if isinstance(n, Call):
            return self.call(n, at)
        raise TypeError(f"not a formula node: {n!r}")

    def flatten_args(self, args: Iterable[Node], at: CellAddress) -> List[float]:
        out: List[float] = []
        for arg in args:
            if isinstance(arg, RangeRef):
                out.extend(self.range_values(arg, at))
            else:
                out.append(self.eval(arg, at))
        return out

    def call(self, n: Call, at: CellAddress) -> float:
        if n.name == "IF":
            if len(n.args) != 3:
                raise FormulaTypeError(at, "IF takes exactly 3 arguments")
            cond = self.eval(n.args[0], at)
            return self.eval(n.args[1] if cond != 0.0 else n.args[2], at)
        if n.name == "NPV":
            if len(n.args) < 2:
                raise FormulaTypeError(at, "NPV takes a rate and at least one value")
            rate = self.eval(n.args[0], at)
            values = self.flatten_args(n.args[1:], at)
            total = 0.0
            for i, value in enumerate(values, start=1):
                try:
                    total += checked_div(value, checked_pow(1.0 + rate, float(i)))
                except ArithmeticFault:
                    raise DivideByZero(at) from None
            return total
        values = self.flatten_args(n.args, at)
        if n.name == "SUM":
            total = 0.0
            for value in values:
                total += value
            return total
        if n.name == "MAX":
            return max(values)
        if n.name == "MIN":
            return min(values)
        if n.name == "AVERAGE":
            total = 0.0
            for value in values:
                total += value
            return total / len(values)
        raise FormulaTypeError(at, f"unknown function {n.name}")


def recalculate(wb: Workbook) -> ValueGrid:
    """Evaluate every formula cell; raises CycleError on circular references."""
    graph = DependencyGraph(wb)
    order = graph.topo_order(wb)
    values: Dict[CellAddress, float] = {}
    evaluator = _Evaluator(wb, values)
    for addr in order:
        values[addr] = evaluator.eval(graph.asts[addr], addr)
    return ValueGrid(wb, values)


def recalc_after_set(wb: Workbook, addr: CellAddress, content: CellContent) -> ValueGrid:
    """Recalculate after a single cell edit.

    Contractually identical to a full recalculation of the mutated
    workbook; at desk scale a full recompute is the simplest way to
    guarantee that.
    """
    updated = wb.copy()
    updated.set_cell(addr, content)
    return recalculate(updated)
