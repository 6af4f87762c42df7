"""Recursive-descent parser for spreadsheet formulas.

Precedence, loosest to tightest: comparisons; ``+ -``; ``* /``; unary
minus; ``^`` (right-associative).  Note unary minus binds looser than
``^``: ``-2^2`` is ``-(2^2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from ..errors import InputError
from ..workbook import column_index
from .ast import (
    AGGREGATE_FUNCTIONS,
    COMPARE_OPS,
    FUNCTIONS,
    Binary,
    Call,
    CellRef,
    Compare,
    Node,
    NumberLit,
    RangeRef,
    Unary,
)


class FormulaSyntaxError(InputError):
    def __init__(self, position: int, expected: Tuple[str, ...], found: str):
        self.position = position
        self.expected = expected
        self.found = found
        super().__init__(
            f"position {position}: expected {' or '.join(expected)}, found {found}"
        )


class UnknownFunction(InputError):
    pass


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><>|<=|>=|[=<>+\-*/^(),:!])
    """,
    re.VERBOSE,
)

_CELL_RE = re.compile(r"([A-Za-z]+)([0-9]+)\Z")


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "ident" | "op" | "eof"
    text: str
    position: int


def _tokenize(source: str) -> List[_Token]:
    tokens: List[_Token] = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise FormulaSyntaxError(pos, ("token",), repr(source[pos]))
        pos = m.end()
        if m.lastgroup == "ws":
            continue
        tokens.append(_Token(m.lastgroup, m.group(), m.start()))
    tokens.append(_Token("eof", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, tokens: List[_Token]):
        self.tokens = tokens
        self.index = 0

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.tokens[self.index]
        if token.kind != "eof":
            self.index += 1
        return token

    def expect_op(self, *ops: str) -> _Token:
        token = self.peek()
        if token.kind == "op" and token.text in ops:
            return self.advance()
        raise FormulaSyntaxError(token.position, ops, token.text or "end of input")

    def at_op(self, *ops: str) -> bool:
        token = self.peek()
        return token.kind == "op" and token.text in ops

    # expr := cmp
    def parse_expr(self) -> Node:
        left = self.parse_add()
        if self.at_op(*COMPARE_OPS):
            op = self.advance().text
            right = self.parse_add()
            return Compare(op, left, right)
        return left

    def parse_add(self) -> Node:
        node = self.parse_mul()
        while self.at_op("+", "-"):
            op = self.advance().text
            node = Binary(op, node, self.parse_mul())
        return node

    def parse_mul(self) -> Node:
        node = self.parse_unary()
        while self.at_op("*", "/"):
            op = self.advance().text
            node = Binary(op, node, self.parse_unary())
        return node

    def parse_unary(self) -> Node:
        if self.at_op("-"):
            self.advance()
            return Unary("-", self.parse_unary())
        return self.parse_pow()

    def parse_pow(self) -> Node:
        base = self.parse_primary()
        if self.at_op("^"):
            self.advance()
            return Binary("^", base, self.parse_unary())
        return base

    def parse_primary(self) -> Node:
        token = self.peek()
        if token.kind == "number":
            self.advance()
            return NumberLit(float(token.text))
        if token.kind == "op" and token.text == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        if token.kind == "ident":
            return self.parse_ident()
        raise FormulaSyntaxError(
            token.position,
            ("number", "reference", "function call", "("),
            token.text or "end of input",
        )

    def parse_ident(self) -> Node:
        token = self.advance()
        nxt = self.peek()
        if nxt.kind == "op" and nxt.text == "(":
            name = token.text.upper()
            if name not in FUNCTIONS:
                raise UnknownFunction(f"unknown function: {token.text}")
            self.advance()
            args = [self.parse_expr()]
            while self.at_op(","):
                self.advance()
                args.append(self.parse_expr())
            self.expect_op(")")
            return Call(name, tuple(args))
        if nxt.kind == "op" and nxt.text == "!":
            self.advance()
            cell = self.peek()
            if cell.kind != "ident" or not _CELL_RE.match(cell.text):
                raise FormulaSyntaxError(
                    cell.position, ("cell reference",), cell.text or "end of input"
                )
            self.advance()
            return self.finish_ref(token.text, cell.text, cell.position)
        m = _CELL_RE.match(token.text)
        if m is None:
            raise FormulaSyntaxError(token.position, ("cell reference",), token.text)
        return self.finish_ref(None, token.text, token.position)

    def finish_ref(self, sheet: Optional[str], cell_text: str, position: int) -> Node:
        m = _CELL_RE.match(cell_text)
        if m is None:
            raise FormulaSyntaxError(position, ("cell reference",), cell_text)
        col, row = column_index(m.group(1)), int(m.group(2))
        if not self.at_op(":"):
            return CellRef(sheet, col, row)
        self.advance()
        end_sheet = sheet
        token = self.peek()
        if token.kind != "ident":
            raise FormulaSyntaxError(
                token.position, ("cell reference",), token.text or "end of input"
            )
        self.advance()
        if self.at_op("!"):
            self.advance()
            end_sheet = token.text
            token = self.peek()
            if token.kind != "ident":
                raise FormulaSyntaxError(
                    token.position, ("cell reference",), token.text or "end of input"
                )
            self.advance()
        m2 = _CELL_RE.match(token.text)
        if m2 is None:
            raise FormulaSyntaxError(token.position, ("cell reference",), token.text)
        if end_sheet != sheet:
            raise FormulaSyntaxError(
                token.position, ("range on a single sheet",), f"{end_sheet}!{token.text}"
            )
        end_col, end_row = column_index(m2.group(1)), int(m2.group(2))
        if end_col < col or end_row < row:
            raise FormulaSyntaxError(
                token.position, ("range end at or after start",), token.text
            )
        return RangeRef(sheet, col, row, end_col, end_row)


def _check_ranges(node: Node, parent_is_aggregate: bool) -> None:
    if isinstance(node, RangeRef):
        if not parent_is_aggregate:
            raise FormulaSyntaxError(
                0, ("range only inside SUM/MAX/MIN/AVERAGE/NPV",), "range reference"
            )
        return
    if isinstance(node, Call):
        aggregate = node.name in AGGREGATE_FUNCTIONS
        for arg in node.args:
            _check_ranges(arg, aggregate)
        return
    for child in getattr(node, "__dataclass_fields__", {}):
        value = getattr(node, child)
        if isinstance(value, Node):
            _check_ranges(value, False)


def parse_formula(source: str) -> Node:
    """Parse ``=...`` source text into an AST."""
    if not source.startswith("="):
        raise FormulaSyntaxError(0, ("'='",), source[:1] or "end of input")
    parser = _Parser(_tokenize(source[1:]))
    node = parser.parse_expr()
    trailing = parser.peek()
    if trailing.kind != "eof":
        raise FormulaSyntaxError(trailing.position, ("end of input",), trailing.text)
    _check_ranges(node, False)
    return node
