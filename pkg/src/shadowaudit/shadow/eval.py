"""Evaluation of a shadow model against loaded data.

Input parameters are sparse maps (unstored tuples read as 0); defined
parameters are computed dense over their full index domain, in dependency
order.  Changing an input invalidates exactly the defined parameters that
transitively read it; a subsequent evaluate recomputes only the invalid
ones and, by construction, equals a from-scratch evaluation.
"""

from __future__ import annotations

import itertools
import re
from typing import Dict, Iterable, List, Optional, Tuple

from ..arith import ArithmeticFault, checked_div, checked_pow
from ..errors import EvalError, InputError
from .model import (
    Agg,
    BinOp,
    CmpOp,
    Expr,
    First,
    IfExpr,
    IndexRef,
    Num,
    ParamRef,
    ShadowModelIR,
    UnaryOp,
)

Value = object  # float, or str for element labels


class DataError(InputError):
    pass


class UnknownElement(DataError):
    def __init__(self, param: str, position: int, label: str):
        self.param = param
        self.position = position
        self.label = label
        super().__init__(f"{param}: label {label!r} at position {position} is not in the domain set")


class ArityMismatch(DataError):
    pass


class AssignToDefined(DataError):
    pass


class StaleValue(EvalError):
    pass


class ShadowTypeError(EvalError):
    pass


class ShadowDivideByZero(EvalError):
    def __init__(self, param: str, tup: Tuple[str, ...]):
        super().__init__(f"division by zero computing {param}{tup or ''}")


class EmptyAggregate(EvalError):
    pass


class DataStore:
    def __init__(self, ir: ShadowModelIR):
        self.ir = ir
        self.inputs: Dict[str, Dict[Tuple[str, ...], float]] = {
            name: {} for name in ir.input_params()
        }
        self.defined: Dict[str, Dict[Tuple[str, ...], float]] = {}
        self.valid: Dict[str, bool] = {name: False for name in ir.defined_params()}

    def copy(self) -> "DataStore":
        clone = DataStore(self.ir)
        clone.inputs = {name: dict(vals) for name, vals in self.inputs.items()}
        clone.defined = {name: dict(vals) for name, vals in self.defined.items()}
        clone.valid = dict(self.valid)
        return clone


def _check_tuple(ir: ShadowModelIR, param: str, tup: Tuple[str, ...]) -> None:
    decl = ir.params[param]
    if len(tup) != len(decl.indexes):
        raise ArityMismatch(
            f"{param} takes {len(decl.indexes)} labels, got {len(tup)}"
        )
    for position, (label, index) in enumerate(zip(tup, decl.indexes), start=1):
        if label not in ir.index_elements(index):
            raise UnknownElement(param, position, label)


def load_data(ir: ShadowModelIR, assignments: Iterable[Tuple[str, Tuple[str, ...], float]]) -> DataStore:
    store = DataStore(ir)
    for param, tup, value in assignments:
        _store_input(store, param, tuple(tup), float(value))
    return store


def _store_input(store: DataStore, param: str, tup: Tuple[str, ...], value: float) -> None:
    ir = store.ir
    decl = ir.params.get(param)
    if decl is None:
        raise DataError(f"unknown parameter: {param}")
    if decl.role != "input":
        raise AssignToDefined(f"{param} is a defined parameter")
    _check_tuple(ir, param, tup)
    store.inputs[param][tup] = value


def set_input(store: DataStore, param: str, tup: Tuple[str, ...], value: float) -> None:
    """Store one input value and invalidate its downstream definitions."""
    _store_input(store, param, tuple(tup), float(value))
    for name in store.ir.downstream_of(param):
        store.valid[name] = False


class _Evaluator:
    def __init__(self, ir: ShadowModelIR, store: DataStore, target: str):
        self.ir = ir
        self.store = store
        self.target = target

    def as_number(self, value: Value) -> float:
        if isinstance(value, float):
            return value
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ShadowTypeError(
                f"{self.target}: non-numeric label {value!r} used in arithmetic"
            ) from None

    def eval(self, expr: Expr, env: Dict[str, str]) -> Value:
        if isinstance(expr, Num):
            return expr.value
        if isinstance(expr, IndexRef):
            return env[expr.name]
        if isinstance(expr, First):
            elements = self.ir.set_elements(expr.set_name)
            if not elements:
                raise EmptyAggregate(f"FIRST over empty set {expr.set_name}")
            return elements[0]
        if isinstance(expr, ParamRef):
            tup = tuple(env[a] for a in expr.args)
            decl = self.ir.params[expr.name]
            if decl.role == "input":
                return self.store.inputs[expr.name].get(tup, 0.0)
            return self.store.defined[expr.name][tup]
        if isinstance(expr, UnaryOp):
            return -self.as_number(self.eval(expr.operand, env))
        if isinstance(expr, BinOp):
            left = self.as_number(self.eval(expr.left, env))
            right = self.as_number(self.eval(expr.right, env))
            try:
                if expr.op == "+":
                    return left + right
                if expr.op == "-":
                    return left - right
                if expr.op == "*":
                    return left * right
                if expr.op == "/":
                    return checked_div(left, right)
                return checked_pow(left, right)
            except ArithmeticFault as fault:
                if fault.kind == "div0":
                    raise ShadowDivideByZero(self.target, tuple(env.values())) from None
                raise ShadowTypeError(f"{self.target}: {fault}") from None
        if isinstance(expr, CmpOp):
            return self.compare(expr, env)
        if isinstance(expr, IfExpr):
            cond = self.as_number(self.eval(expr.cond, env))
            return self.eval(expr.then if cond != 0.0 else expr.otherwise, env)
        if isinstance(expr, Agg):
            return self.aggregate(expr, env)
        raise TypeError(f"not a model expression: {expr!r}")

    def compare(self, expr: CmpOp, env: Dict[str, str]) -> float:
        left = self.eval(expr.left, env)
        right = self.eval(expr.right, env)
        if expr.op in ("=", "<>") and isinstance(left, str) and isinstance(right, str):
            equal = left == right
            return 1.0 if (equal if expr.op == "=" else not equal) else 0.0
        lnum, rnum = self.as_number(left), self.as_number(right)
        result = {
            "=": lnum == rnum,
            "<>": lnum != rnum,
            "<": lnum < rnum,
            "<=": lnum <= rnum,
            ">": lnum > rnum,
            ">=": lnum >= rnum,
        }[expr.op]
        return 1.0 if result else 0.0

    def aggregate(self, expr: Agg, env: Dict[str, str]) -> float:
        element_lists = [self.ir.index_elements(i) for i in expr.indices]
        total = 0.0
        best: Optional[float] = None
        seen = False
        for combo in itertools.product(*element_lists):
            inner = dict(env)
            inner.update(zip(expr.indices, combo))
            if expr.filter is not None:
                if self.as_number(self.eval(expr.filter, inner)) == 0.0:
                    continue
            value = self.as_number(self.eval(expr.body, inner))
            seen = True
            if expr.kind == "SUM":
                total += value
            elif expr.kind == "MAX":
                best = value if best is None else max(best, value)
            else:
                best = value if best is None else min(best, value)
        if expr.kind == "SUM":
            return total
        if not seen:
            raise EmptyAggregate(
                f"{self.target}: {expr.kind} over an empty tuple space"
            )
        return best


def evaluate(ir: ShadowModelIR, store: DataStore) -> DataStore:
    """Compute all invalid defined parameters, in dependency order."""
    for name in ir.eval_order:
        if store.valid.get(name):
            continue
        definition = ir.definitions[name]
        decl = ir.params[name]
        evaluator = _Evaluator(ir, store, name)
        values: Dict[Tuple[str, ...], float] = {}
        element_lists = [ir.index_elements(i) for i in decl.indexes]
        for combo in itertools.product(*element_lists):
            env = dict(zip(decl.indexes, combo))
            values[combo] = evaluator.as_number(evaluator.eval(definition.expr, env))
        store.defined[name] = values
        store.valid[name] = True
    return store


def query(store: DataStore, param: str, tup: Tuple[str, ...]) -> float:
    ir = store.ir
    decl = ir.params.get(param)
    if decl is None:
        raise DataError(f"unknown parameter: {param}")
    tup = tuple(tup)
    _check_tuple(ir, param, tup)
    if decl.role == "input":
        return store.inputs[param].get(tup, 0.0)
    if not store.valid.get(param):
        raise StaleValue(f"{param} queried before (re)evaluation")
    return store.defined[param][tup]


_DATA_LINE_RE = re.compile(
    r"(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"(?:\((?P<labels>[^)]*)\))?"
    r"\s*=\s*(?P<value>[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)\s*\Z"
)


def parse_data_text(text: str) -> List[Tuple[str, Tuple[str, ...], float]]:
    """Parse data-file lines ``Param(label, ...) = number``; '#' comments."""
    assignments = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _DATA_LINE_RE.match(stripped)
        if m is None:
            raise DataError(f"line {lineno}: bad data line: {stripped!r}")
        labels = m.group("labels")
        tup = tuple(l.strip() for l in labels.split(",")) if labels else ()
        assignments.append((m.group("name"), tup, float(m.group("value"))))
    return assignments


def load_data_file(ir: ShadowModelIR, path) -> DataStore:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read data file {path}: {exc}") from exc
    return load_data(ir, parse_data_text(text))


def unused_inputs(ir: ShadowModelIR) -> List[str]:
    """Input parameters no definition reads; flagged by the audit."""
    read = set()
    for reads in ir.def_reads.values():
        read.update(reads)
    return [name for name in ir.input_params() if name not in read]
