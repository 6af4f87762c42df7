"""In-memory workbook model and the plain-text workbook file format.

The file format is line oriented UTF-8: a ``[sheet: NAME]`` header starts a
sheet, every following non-comment line is one row with cells separated by
``|`` (surrounding spaces are trimmed).  A cell starting with ``=`` is a
formula, a cell that parses as a decimal literal is a number, an empty cell
is empty and anything else is text.  ``#`` starts a comment line.  Because
``|`` is the separator it may not occur inside cell text.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple

from .errors import InputError

SHEET_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")
_NUMBER_RE = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?\Z")
_HEADER_RE = re.compile(r"\[sheet:\s*([^\]]*)\]\s*\Z")
_A1_RE = re.compile(r"(?:([A-Za-z0-9_]+)!)?([A-Za-z]+)([0-9]+)\Z")


class WorkbookError(InputError):
    pass


class MalformedHeader(WorkbookError):
    pass


class DuplicateSheet(WorkbookError):
    pass


class UnknownSheet(WorkbookError):
    pass


class UnencodableCell(WorkbookError):
    pass


def column_letter(column: int) -> str:
    """1 -> "A", 27 -> "AA"."""
    if column < 1:
        raise ValueError("column ordinals are 1-based")
    out = ""
    while column > 0:
        column, rem = divmod(column - 1, 26)
        out = chr(ord("A") + rem) + out
    return out


def column_index(letters: str) -> int:
    value = 0
    for ch in letters:
        if not ch.isalpha():
            raise ValueError(f"bad column letters: {letters!r}")
        value = value * 26 + (ord(ch.upper()) - ord("A") + 1)
    return value


@dataclass(frozen=True, order=True)
class CellAddress:
    sheet: str
    column: int
    row: int

    def __post_init__(self):
        if not SHEET_NAME_RE.match(self.sheet):
            raise ValueError(f"invalid sheet name: {self.sheet!r}")
        if self.column < 1 or self.row < 1:
            raise ValueError("row/column ordinals are 1-based")

    def a1(self) -> str:
        return f"{self.sheet}!{column_letter(self.column)}{self.row}"

    def __str__(self) -> str:
        return self.a1()

    @classmethod
    def parse(cls, text: str, default_sheet: Optional[str] = None) -> "CellAddress":
        m = _A1_RE.match(text.strip())
        if m is None:
            raise ValueError(f"not an A1-style address: {text!r}")
        sheet, col, row = m.groups()
        if sheet is None:
            if default_sheet is None:
                raise ValueError(f"address lacks a sheet qualifier: {text!r}")
            sheet = default_sheet
        return cls(sheet, column_index(col), int(row))


class CellKind(Enum):
    EMPTY = "empty"
    NUMBER = "number"
    TEXT = "text"
    FORMULA = "formula"


@dataclass(frozen=True)
class CellContent:
    kind: CellKind
    number: Optional[float] = None
    text: Optional[str] = None
    formula_source: Optional[str] = None

    @staticmethod
    def empty() -> "CellContent":
        return _EMPTY

    @staticmethod
    def of_number(value: float) -> "CellContent":
        value = float(value)
        if not math.isfinite(value):
            raise ValueError("cell numbers must be finite")
        return CellContent(CellKind.NUMBER, number=value)

    @staticmethod
    def of_text(value: str) -> "CellContent":
        return CellContent(CellKind.TEXT, text=value)

    @staticmethod
    def of_formula(source: str) -> "CellContent":
        if not source.startswith("="):
            raise ValueError("formula source must start with '='")
        return CellContent(CellKind.FORMULA, formula_source=source)

    def is_empty(self) -> bool:
        return self.kind is CellKind.EMPTY


_EMPTY = CellContent(CellKind.EMPTY)


def format_number(value: float) -> str:
    """Shortest decimal text that reloads to the same float.

    Integral values render without a fractional part so hand-written files
    stay stable under save/load/save.
    """
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def classify_cell(raw: str) -> CellContent:
    text = raw.strip()
    if text == "":
        return CellContent.empty()
    if text.startswith("="):
        return CellContent.of_formula(text)
    if _NUMBER_RE.match(text):
        value = float(text)
        if math.isfinite(value):
            return CellContent.of_number(value)
    return CellContent.of_text(text)


class Workbook:
    """Ordered sheets of sparse cell grids; single-writer after load."""

    def __init__(self) -> None:
        self.sheet_order: List[str] = []
        self._cells: Dict[str, Dict[Tuple[int, int], CellContent]] = {}

    def add_sheet(self, name: str) -> None:
        if not SHEET_NAME_RE.match(name):
            raise MalformedHeader(f"invalid sheet name: {name!r}")
        if name in self._cells:
            raise DuplicateSheet(f"duplicate sheet: {name}")
        self.sheet_order.append(name)
        self._cells[name] = {}

    def has_sheet(self, name: str) -> bool:
        return name in self._cells

    def dimensions(self, sheet: str) -> Tuple[int, int]:
        """(max populated row, max populated column), (0, 0) when empty."""
        cells = self._sheet(sheet)
        if not cells:
            return (0, 0)
        return (max(r for r, _ in cells), max(c for _, c in cells))

    def _sheet(self, name: str) -> Dict[Tuple[int, int], CellContent]:
        try:
            return self._cells[name]
        except KeyError:
            raise UnknownSheet(f"unknown sheet: {name}") from None

    def get_cell(self, addr: CellAddress) -> CellContent:
        return self._sheet(addr.sheet).get((addr.row, addr.column), _EMPTY)

    def set_cell(self, addr: CellAddress, content: CellContent) -> None:
        if addr.sheet not in self._cells:
            self.add_sheet(addr.sheet)
        if content.is_empty():
            self._cells[addr.sheet].pop((addr.row, addr.column), None)
        else:
            self._cells[addr.sheet][(addr.row, addr.column)] = content

    def cells(self, sheet: str) -> Dict[Tuple[int, int], CellContent]:
        return dict(self._sheet(sheet))

    def formula_cells(self) -> Iterator[Tuple[CellAddress, str]]:
        """All formula cells in sheet order, then row-major."""
        for name in self.sheet_order:
            for (row, col) in sorted(self._cells[name]):
                content = self._cells[name][(row, col)]
                if content.kind is CellKind.FORMULA:
                    yield CellAddress(name, col, row), content.formula_source

    def copy(self) -> "Workbook":
        wb = Workbook()
        wb.sheet_order = list(self.sheet_order)
        wb._cells = {name: dict(cells) for name, cells in self._cells.items()}
        return wb

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Workbook):
            return NotImplemented
        return self.sheet_order == other.sheet_order and self._cells == other._cells

    def __repr__(self) -> str:
        return f"<Workbook sheets={self.sheet_order}>"


def _render_cell(content: CellContent) -> str:
    if content.kind is CellKind.EMPTY:
        return ""
    if content.kind is CellKind.NUMBER:
        return format_number(content.number)
    if content.kind is CellKind.FORMULA:
        payload = content.formula_source
    else:
        payload = content.text
        # The format trims cells and classifies on reload, so text that
        # would come back different (padded, numeric-looking, '='-prefixed)
        # cannot be stored faithfully.
        if classify_cell(payload) != content:
            raise UnencodableCell(f"text cell does not survive reload: {payload!r}")
    if "|" in payload or len(payload.splitlines()) > 1:
        raise UnencodableCell(f"cell payload contains reserved characters: {payload!r}")
    return payload


def dump_workbook(wb: Workbook) -> str:
    """Serialize to the text format; trailing empty rows/cells are trimmed."""
    lines: List[str] = []
    for name in wb.sheet_order:
        lines.append(f"[sheet: {name}]")
        cells = wb.cells(name)
        max_row = max((r for r, _ in cells), default=0)
        for row in range(1, max_row + 1):
            row_cells = {c: content for (r, c), content in cells.items() if r == row}
            max_col = max(row_cells, default=0)
            rendered = [_render_cell(row_cells.get(c, _EMPTY)) for c in range(1, max_col + 1)]
            line = " | ".join(rendered) if rendered else ""
            first = rendered[0] if rendered else ""
            if first.startswith("#") or first.startswith("["):
                raise UnencodableCell(
                    f"row would be mistaken for a comment/header line: {line!r}"
                )
            lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")


def parse_workbook(text: str) -> Workbook:
    wb = Workbook()
    current: Optional[str] = None
    row_count: Dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("#"):
            continue
        if stripped.startswith("["):
            m = _HEADER_RE.match(stripped)
            if m is None:
                raise MalformedHeader(f"line {lineno}: bad sheet header: {stripped!r}")
            name = m.group(1).strip()
            if not SHEET_NAME_RE.match(name):
                raise MalformedHeader(f"line {lineno}: invalid sheet name: {name!r}")
            wb.add_sheet(name)
            current = name
            row_count[name] = 0
            continue
        if current is None:
            if stripped == "":
                continue
            raise MalformedHeader(f"line {lineno}: cell data before any sheet header")
        row_count[current] += 1
        row = row_count[current]
        for col, raw in enumerate(line.split("|"), start=1):
            content = classify_cell(raw)
            if not content.is_empty():
                wb.set_cell(CellAddress(current, col, row), content)
    return wb


def load_workbook(path) -> Workbook:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise WorkbookError(f"cannot read workbook {path}: {exc}") from exc
    return parse_workbook(text)


def save_workbook(wb: Workbook, path) -> None:
    text = dump_workbook(wb)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise WorkbookError(f"cannot write workbook {path}: {exc}") from exc
