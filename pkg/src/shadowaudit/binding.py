"""Declarative mapping between workbook regions and shadow parameters.

A binding file has one directive per line (``#`` comments):

    INPUT Distance(o,d) FROM Inputs!B2:D4 ROWS o = {Ams,Rot,Ber} COLS d = {Ams,Rot,Ber} TRIANGULAR LOWER
    INPUT Volume(o,d,t,s) FROM Year_{t}!B2:D4 ROWS o = {...} COLS d = {...} BLOCK s STEP (0,5)
    INPUT WACC FROM Inputs!B12
    OUTPUT NPV(s) FROM Results!B2:B4 ROWS s = {worst,base,best}
    VAR Inputs!B12 DEFAULT 0.1 MIN 0.05 MAX 0.2

Sheet-name templates (``Year_{t}``) enumerate one sheet per element of the
index's set; ``BLOCK i STEP (dr,dc)`` shifts the region by a fixed offset
per element.  Row/column labels may be inline (``= {a,b}``) or read from a
header range (``ROWS o FROM A2:A4``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import EvalError, InputError
from .formula.engine import ValueGrid
from .scenarios import InputVar, Scenario, Target
from .shadow.model import ShadowModelIR
from .workbook import (
    CellAddress,
    CellContent,
    CellKind,
    Workbook,
    column_index,
    format_number,
)


class BindingError(InputError):
    pass


class UnknownBindingParam(BindingError):
    pass


class DomainMismatch(BindingError):
    def __init__(self, param: str, missing: Sequence[str], extra: Sequence[str]):
        self.param = param
        self.missing = list(missing)
        self.extra = list(extra)
        details = []
        if missing:
            details.append(f"unmapped indices {self.missing}")
        if extra:
            details.append(f"extra indices {self.extra}")
        super().__init__(f"{param}: {'; '.join(details)}")


class DuplicateInputBinding(BindingError):
    pass


class MissingSheet(EvalError):
    pass


class RegionOutOfGrid(EvalError):
    pass


class TargetIsFormula(EvalError):
    def __init__(self, address: CellAddress):
        self.address = address
        super().__init__(
            f"scenario target {address.a1()} holds a formula; "
            f"the 'input' cell carries logic"
        )


@dataclass
class AxisMap:
    index: str
    labels: Optional[List[str]] = None  # inline form
    header_start: Optional[Tuple[int, int]] = None  # (row, col), header form
    header_end: Optional[Tuple[int, int]] = None
    header_sheet: Optional[str] = None  # None = the binding's expanded sheet


@dataclass
class Binding:
    direction: str  # "input" | "output"
    param: str
    sheet_template: str
    start: Tuple[int, int]  # (row, col)
    end: Tuple[int, int]
    row_axis: Optional[AxisMap] = None
    col_axis: Optional[AxisMap] = None
    block_index: Optional[str] = None
    block_step: Tuple[int, int] = (0, 0)  # (dr, dc)
    triangular_lower: bool = False

    def template_indices(self) -> List[str]:
        return re.findall(r"\{([A-Za-z_][A-Za-z0-9_]*)\}", self.sheet_template)

    def mapped_indices(self) -> List[str]:
        out = list(self.template_indices())
        if self.block_index:
            out.append(self.block_index)
        if self.row_axis:
            out.append(self.row_axis.index)
        if self.col_axis:
            out.append(self.col_axis.index)
        return out


@dataclass
class BindingSet:
    bindings: List[Binding] = field(default_factory=list)
    input_vars: List[InputVar] = field(default_factory=list)

    def input_binding_for(self, param: str) -> Optional[Binding]:
        for binding in self.bindings:
            if binding.direction == "input" and binding.param == param:
                return binding
        return None

    def output_bindings(self) -> List[Binding]:
        return [b for b in self.bindings if b.direction == "output"]


# ---------------------------------------------------------------------------
# Parsing

_RANGE_RE = re.compile(
    r"(?:(?P<sheet>[A-Za-z0-9_{}]+)!)?"
    r"(?P<c1>[A-Za-z]+)(?P<r1>[0-9]+)"
    r"(?::(?P<c2>[A-Za-z]+)(?P<r2>[0-9]+))?\Z"
)


def _split_words(line: str) -> List[str]:
    """Split a directive line on whitespace, keeping {...} and (...) groups."""
    words: List[str] = []
    depth = 0
    current = ""
    for ch in line:
        if ch in "{(":
            depth += 1
        elif ch in "})":
            depth -= 1
        if ch.isspace() and depth == 0:
            if current:
                words.append(current)
                current = ""
        else:
            current += ch
    if current:
        words.append(current)
    return words


def _parse_labels(text: str, where: str) -> List[str]:
    if not (text.startswith("{") and text.endswith("}")):
        raise BindingError(f"{where}: expected {{label, ...}}, got {text!r}")
    labels = [part.strip() for part in text[1:-1].split(",")]
    if any(not label for label in labels):
        raise BindingError(f"{where}: empty label in {text!r}")
    return labels


def _parse_region(text: str, where: str):
    m = _RANGE_RE.match(text)
    if m is None:
        raise BindingError(f"{where}: bad range {text!r}")
    sheet = m.group("sheet")
    if sheet is None:
        raise BindingError(f"{where}: range needs a sheet qualifier: {text!r}")
    start = (int(m.group("r1")), column_index(m.group("c1")))
    if m.group("c2"):
        end = (int(m.group("r2")), column_index(m.group("c2")))
    else:
        end = start
    if end[0] < start[0] or end[1] < start[1]:
        raise BindingError(f"{where}: inverted range {text!r}")
    return sheet, start, end


def _parse_param_head(text: str, where: str) -> Tuple[str, Tuple[str, ...]]:
    m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)(?:\(([^)]*)\))?\Z", text)
    if m is None:
        raise BindingError(f"{where}: bad parameter reference {text!r}")
    name = m.group(1)
    if m.group(2) is None:
        return name, ()
    return name, tuple(part.strip() for part in m.group(2).split(","))


def _parse_axis(words: List[str], pos: int, where: str) -> Tuple[AxisMap, int]:
    # words[pos] is ROWS or COLS; consumes "IDX = {...}" or "IDX FROM range".
    index = words[pos + 1]
    mode = words[pos + 2]
    if mode == "=":
        labels = _parse_labels(words[pos + 3], where)
        return AxisMap(index, labels=labels), pos + 4
    if mode == "FROM":
        m = _RANGE_RE.match(words[pos + 3])
        if m is None or m.group("c2") is None:
            raise BindingError(f"{where}: bad header range {words[pos + 3]!r}")
        axis = AxisMap(
            index,
            header_sheet=m.group("sheet"),
            header_start=(int(m.group("r1")), column_index(m.group("c1"))),
            header_end=(int(m.group("r2")), column_index(m.group("c2"))),
        )
        return axis, pos + 4
    raise BindingError(f"{where}: expected '=' or FROM after index, got {mode!r}")


def _parse_binding_line(words: List[str], ir: ShadowModelIR, where: str) -> Binding:
    direction = "input" if words[0] == "INPUT" else "output"
    param, declared = _parse_param_head(words[1], where)
    decl = ir.params.get(param)
    if decl is None:
        raise UnknownBindingParam(f"{where}: unknown parameter {param!r}")
    if declared and declared != decl.indexes:
        raise DomainMismatch(
            param,
            [i for i in decl.indexes if i not in declared],
            [i for i in declared if i not in decl.indexes],
        )
    if direction == "output" and decl.role != "defined":
        raise BindingError(f"{where}: OUTPUT {param} must be a defined parameter")
    if words[2] != "FROM":
        raise BindingError(f"{where}: expected FROM, got {words[2]!r}")
    sheet, start, end = _parse_region(words[3], where)
    binding = Binding(direction, param, sheet, start, end)
    pos = 4
    while pos < len(words):
        word = words[pos]
        if word == "ROWS":
            binding.row_axis, pos = _parse_axis(words, pos, where)
        elif word == "COLS":
            binding.col_axis, pos = _parse_axis(words, pos, where)
        elif word == "BLOCK":
            binding.block_index = words[pos + 1]
            if words[pos + 2] != "STEP":
                raise BindingError(f"{where}: expected STEP after BLOCK index")
            m = re.match(r"\((-?\d+),(-?\d+)\)\Z", words[pos + 3].replace(" ", ""))
            if m is None:
                raise BindingError(f"{where}: bad STEP offset {words[pos + 3]!r}")
            binding.block_step = (int(m.group(1)), int(m.group(2)))
            pos += 4
        elif word == "TRIANGULAR":
            if pos + 1 >= len(words) or words[pos + 1] != "LOWER":
                raise BindingError(f"{where}: expected LOWER after TRIANGULAR")
            binding.triangular_lower = True
            pos += 2
        else:
            raise BindingError(f"{where}: unexpected {word!r}")

    mapped = binding.mapped_indices()
    if len(mapped) != len(set(mapped)):
        raise BindingError(f"{where}: index mapped twice in {param} binding")
    missing = [i for i in decl.indexes if i not in mapped]
    extra = [i for i in mapped if i not in decl.indexes]
    if missing or extra:
        raise DomainMismatch(param, missing, extra)
    for index in mapped:
        if index not in ir.index_to_set:
            raise BindingError(f"{where}: unknown index {index!r}")
    # Inline labels must be elements of the index's set.
    for axis in (binding.row_axis, binding.col_axis):
        if axis and axis.labels is not None:
            elements = set(ir.index_elements(axis.index))
            bad = [l for l in axis.labels if l not in elements]
            if bad:
                raise BindingError(
                    f"{where}: labels {bad} are not elements of {axis.index}'s set"
                )
    _check_region_shape(binding, where)
    return binding


def _check_region_shape(binding: Binding, where: str) -> None:
    rows = binding.end[0] - binding.start[0] + 1
    cols = binding.end[1] - binding.start[1] + 1
    for axis, count, axis_name in (
        (binding.row_axis, rows, "ROWS"),
        (binding.col_axis, cols, "COLS"),
    ):
        if axis and axis.labels is not None and len(axis.labels) != count:
            raise BindingError(
                f"{where}: {axis_name} has {len(axis.labels)} labels for a "
                f"{count}-cell extent"
            )
    if binding.row_axis is None and rows != 1:
        raise BindingError(f"{where}: multi-row region without a ROWS mapping")
    if binding.col_axis is None and cols != 1:
        raise BindingError(f"{where}: multi-column region without a COLS mapping")


def _parse_var_line(words: List[str], ir: ShadowModelIR, where: str) -> InputVar:
    if len(words) != 8 or words[2] != "DEFAULT" or words[4] != "MIN" or words[6] != "MAX":
        raise BindingError(f"{where}: expected VAR target DEFAULT x MIN y MAX z")
    target_text = words[1]
    target: Target
    if "!" in target_text:
        try:
            target = CellAddress.parse(target_text)
        except ValueError as exc:
            raise BindingError(f"{where}: {exc}") from None
    else:
        name, tup = _parse_param_head(target_text, where)
        decl = ir.params.get(name)
        if decl is None:
            raise UnknownBindingParam(f"{where}: unknown parameter {name!r}")
        if decl.role != "input":
            raise BindingError(f"{where}: VAR {name} must be an input parameter")
        if len(tup) != len(decl.indexes):
            raise BindingError(
                f"{where}: {name} takes {len(decl.indexes)} labels, got {len(tup)}"
            )
        target = (name, tup)
    try:
        values = [float(words[i]) for i in (3, 5, 7)]
    except ValueError:
        raise BindingError(f"{where}: non-numeric DEFAULT/MIN/MAX") from None
    return InputVar(target, default=values[0], vmin=values[1], vmax=values[2])


def parse_bindings(text: str, ir: ShadowModelIR) -> BindingSet:
    bset = BindingSet()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        where = f"line {lineno}"
        words = _split_words(stripped)
        if words[0] in ("INPUT", "OUTPUT"):
            binding = _parse_binding_line(words, ir, where)
            if binding.direction == "input" and bset.input_binding_for(binding.param):
                raise DuplicateInputBinding(
                    f"{where}: second INPUT binding for {binding.param}"
                )
            bset.bindings.append(binding)
        elif words[0] == "VAR":
            bset.input_vars.append(_parse_var_line(words, ir, where))
        else:
            raise BindingError(f"{where}: expected INPUT, OUTPUT or VAR")
    return bset


def load_bindings(path, ir: ShadowModelIR) -> BindingSet:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise BindingError(f"cannot read bindings {path}: {exc}") from exc
    return parse_bindings(text, ir)


# ---------------------------------------------------------------------------
# Expansion

def _header_labels(axis: AxisMap, sheet: str, wb: Workbook) -> List[str]:
    labels = []
    use_sheet = axis.header_sheet or sheet
    (r1, c1), (r2, c2) = axis.header_start, axis.header_end
    for row in range(r1, r2 + 1):
        for col in range(c1, c2 + 1):
            content = wb.get_cell(CellAddress(use_sheet, col, row))
            if content.kind is CellKind.TEXT:
                labels.append(content.text)
            elif content.kind is CellKind.NUMBER:
                labels.append(format_number(content.number))
            else:
                raise BindingError(
                    f"header cell {use_sheet}!r{row}c{col} holds no label"
                )
    return labels


def _axis_labels(axis: AxisMap, sheet: str, wb: Workbook, ir: ShadowModelIR) -> List[str]:
    if axis.labels is not None:
        return axis.labels
    labels = _header_labels(axis, sheet, wb)
    elements = set(ir.index_elements(axis.index))
    bad = [l for l in labels if l not in elements]
    if bad:
        raise BindingError(
            f"header labels {bad} are not elements of {axis.index}'s set"
        )
    return labels


def expand(binding: Binding, wb: Workbook, ir: ShadowModelIR) -> List[Tuple[Tuple[str, ...], CellAddress]]:
    """(index tuple, cell) pairs, ordered slice-major then row-major."""
    decl = ir.params[binding.param]
    template_indices = binding.template_indices()
    slice_lists = [ir.index_elements(i) for i in template_indices]
    block_elements = (
        ir.index_elements(binding.block_index) if binding.block_index else [None]
    )
    out: List[Tuple[Tuple[str, ...], CellAddress]] = []
    for slice_combo in product(*slice_lists):
        sheet = binding.sheet_template
        for index, element in zip(template_indices, slice_combo):
            sheet = sheet.replace("{" + index + "}", element)
        if not wb.has_sheet(sheet):
            raise MissingSheet(f"sheet {sheet!r} (from template {binding.sheet_template!r}) not in workbook")
        row_labels = (
            _axis_labels(binding.row_axis, sheet, wb, ir) if binding.row_axis else [None]
        )
        col_labels = (
            _axis_labels(binding.col_axis, sheet, wb, ir) if binding.col_axis else [None]
        )
        for block_pos, block_element in enumerate(block_elements):
            top = (
                binding.start[0] + binding.block_step[0] * block_pos,
                binding.start[1] + binding.block_step[1] * block_pos,
            )
            bottom = (
                top[0] + (binding.end[0] - binding.start[0]),
                top[1] + (binding.end[1] - binding.start[1]),
            )
            max_row, max_col = wb.dimensions(sheet)
            if bottom[0] > max_row or bottom[1] > max_col:
                raise RegionOutOfGrid(
                    f"{binding.param}: region ending at row {bottom[0]}, column "
                    f"{bottom[1]} exceeds sheet {sheet!r} extent ({max_row}, {max_col})"
                )
            for row_pos, row_label in enumerate(row_labels):
                for col_pos, col_label in enumerate(col_labels):
                    by_index: Dict[str, str] = dict(zip(template_indices, slice_combo))
                    if block_element is not None:
                        by_index[binding.block_index] = block_element
                    if row_label is not None:
                        by_index[binding.row_axis.index] = row_label
                    if col_label is not None:
                        by_index[binding.col_axis.index] = col_label
                    tup = tuple(by_index[i] for i in decl.indexes)
                    addr = CellAddress(sheet, top[1] + col_pos, top[0] + row_pos)
                    out.append((tup, addr))
    return out


def import_inputs(
    grid: ValueGrid, bindings: BindingSet, ir: ShadowModelIR, wb: Workbook
) -> Tuple[List[Tuple[str, Tuple[str, ...], float]], List[str]]:
    """Assignments for every non-empty mapped input cell, plus warnings."""
    assignments: List[Tuple[str, Tuple[str, ...], float]] = []
    warnings: List[str] = []
    for binding in bindings.bindings:
        if binding.direction != "input":
            continue
        cells = expand(binding, wb, ir)
        if binding.triangular_lower:
            warnings.extend(_triangular_violations(binding, wb, ir))
        for tup, addr in cells:
            content = wb.get_cell(addr)
            if content.kind is CellKind.EMPTY:
                continue
            assignments.append((binding.param, tup, grid.value_at(addr)))
    return assignments, warnings


def _triangular_violations(binding: Binding, wb: Workbook, ir: ShadowModelIR) -> List[str]:
    if binding.row_axis is None or binding.col_axis is None:
        return []
    out = []
    for tup, addr in expand(binding, wb, ir):
        row_pos = addr.row - binding.start[0]
        col_pos = addr.column - binding.start[1]
        if col_pos > row_pos and not wb.get_cell(addr).is_empty():
            out.append(
                f"triangular-violation:{binding.param}:{addr.a1()}"
            )
    return out


def resolve_target(
    target: Target, bindings: BindingSet, wb: Workbook, ir: ShadowModelIR
) -> CellAddress:
    if isinstance(target, CellAddress):
        return target
    param, tup = target
    binding = bindings.input_binding_for(param)
    if binding is None:
        raise BindingError(f"no INPUT binding for scenario target {param}")
    for candidate, addr in expand(binding, wb, ir):
        if candidate == tup:
            return addr
    raise BindingError(f"tuple {tup} not covered by the {param} binding")


def inject_scenario(
    wb: Workbook, bindings: BindingSet, scenario: Scenario, ir: ShadowModelIR
) -> Workbook:
    """New workbook with the scenario's values written to their cells.

    Formula targets are refused: an 'input' cell that computes is itself an
    audit finding.
    """
    out = wb.copy()
    for target, value in scenario.assignments:
        addr = resolve_target(target, bindings, wb, ir)
        if wb.get_cell(addr).kind is CellKind.FORMULA:
            raise TargetIsFormula(addr)
        out.set_cell(addr, CellContent.of_number(value))
    return out


@dataclass
class OutputReading:
    param: str
    tup: Tuple[str, ...]
    address: CellAddress
    value: Optional[float]
    warnings: List[str] = field(default_factory=list)
    error: Optional[str] = None


def read_outputs(
    grid: ValueGrid, bindings: BindingSet, ir: ShadowModelIR, wb: Workbook
) -> List[OutputReading]:
    readings: List[OutputReading] = []
    for binding in bindings.output_bindings():
        for tup, addr in expand(binding, wb, ir):
            content = wb.get_cell(addr)
            if content.kind is CellKind.EMPTY:
                readings.append(
                    OutputReading(binding.param, tup, addr, 0.0, ["empty-output"])
                )
            elif content.kind is CellKind.TEXT:
                readings.append(
                    OutputReading(
                        binding.param, tup, addr, None,
                        ["text-output"], f"output cell holds text {content.text!r}",
                    )
                )
            else:
                readings.append(
                    OutputReading(binding.param, tup, addr, grid.value_at(addr))
                )
    return readings
