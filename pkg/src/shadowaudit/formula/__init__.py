from .ast import (
    AGGREGATE_FUNCTIONS,
    Binary,
    Call,
    CellRef,
    Compare,
    FUNCTIONS,
    Node,
    NumberLit,
    RangeRef,
    Unary,
    print_formula,
)
from .engine import (
    CycleError,
    DependencyGraph,
    DivideByZero,
    FormulaTypeError,
    UnknownSheetRef,
    ValueGrid,
    extract_dependencies,
    recalc_after_set,
    recalculate,
)
from .parser import FormulaSyntaxError, UnknownFunction, parse_formula

__all__ = [
    "AGGREGATE_FUNCTIONS",
    "Binary",
    "Call",
    "CellRef",
    "Compare",
    "CycleError",
    "DependencyGraph",
    "DivideByZero",
    "FormulaSyntaxError",
    "FormulaTypeError",
    "FUNCTIONS",
    "Node",
    "NumberLit",
    "RangeRef",
    "Unary",
    "UnknownFunction",
    "UnknownSheetRef",
    "ValueGrid",
    "extract_dependencies",
    "parse_formula",
    "print_formula",
    "recalc_after_set",
    "recalculate",
]
