"""Parser for the shadow-model language and the INCLUDE pre-pass.

Declarations: ``SET``, ``PARAM``, ``DEF`` and ``INCLUDE "file";``.
Keywords are upper-case and case-sensitive; ``#`` starts a line comment.
Forward references between definitions are legal (so mutual recursion is
reported as a definition cycle, not as an unknown name).
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from ..errors import InputError
from .model import (
    Agg,
    BinOp,
    CmpOp,
    CyclicDefinitionError,
    Definition,
    DuplicateName,
    Expr,
    First,
    FreeIndexError,
    IfExpr,
    IndexRef,
    ModelError,
    Num,
    ParamDecl,
    ParamRef,
    SetDecl,
    ShadowModelIR,
    UnaryOp,
    UnknownIndex,
    UnknownParam,
    UnknownSet,
)

KEYWORDS = {
    "SET", "PARAM", "DEF", "SUM", "MAX", "MIN",
    "IF", "THEN", "ELSE", "ENDIF", "FIRST", "SUBSET", "INCLUDE",
}

AGG_KEYWORDS = ("SUM", "MAX", "MIN")

_CMP_OPS = ("=", "<>", "<", "<=", ">", ">=")


class ModelSyntaxError(ModelError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class IncludeCycle(InputError):
    pass


class IncludeIoError(InputError):
    pass


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<op><>|<=|>=|:=|[=<>+\-*/^(){},;|])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int


def _tokenize(source: str) -> List[_Token]:
    tokens: List[_Token] = []
    pos = 0
    line = 1
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ModelSyntaxError(line, f"unexpected character {source[pos]!r}")
        text = m.group()
        if m.lastgroup not in ("ws", "comment"):
            tokens.append(_Token(m.lastgroup, text, line))
        line += text.count("\n")
        pos = m.end()
    tokens.append(_Token("eof", "", line))
    return tokens


# ---------------------------------------------------------------------------
# INCLUDE resolution (textual splice, before parsing)

_INCLUDE_RE = re.compile(r'^\s*INCLUDE\s+"([^"]+)"\s*;\s*$')


def include_resolve(source: str, include_dirs: List[str], _chain: Optional[List[str]] = None) -> str:
    """Splice ``INCLUDE "file";`` lines; duplicate declarations are left to
    parse_model to report."""
    chain = _chain or []
    out: List[str] = []
    for line in source.splitlines():
        m = _INCLUDE_RE.match(line)
        if m is None:
            out.append(line)
            continue
        name = m.group(1)
        resolved = None
        for base in include_dirs:
            candidate = os.path.abspath(os.path.join(base, name))
            if os.path.isfile(candidate):
                resolved = candidate
                break
        if resolved is None:
            raise IncludeIoError(
                f"cannot find include {name!r} (chain: {' -> '.join(chain) or 'top level'})"
            )
        if resolved in chain:
            raise IncludeCycle(" -> ".join(chain + [resolved]))
        try:
            with open(resolved, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise IncludeIoError(f"cannot read include {resolved}: {exc}") from exc
        nested_dirs = [os.path.dirname(resolved)] + include_dirs
        out.append(include_resolve(text, nested_dirs, chain + [resolved]))
    return "\n".join(out)


# ---------------------------------------------------------------------------
# Parsing

class _Stream:
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

    def at(self, text: str) -> bool:
        token = self.peek()
        return token.text == text and token.kind in ("op", "ident")

    def expect(self, text: str) -> _Token:
        token = self.peek()
        if token.text == text:
            return self.advance()
        raise ModelSyntaxError(token.line, f"expected {text!r}, found {token.text or 'end of input'!r}")

    def expect_ident(self, what: str = "identifier") -> _Token:
        token = self.peek()
        if token.kind != "ident" or token.text in KEYWORDS:
            raise ModelSyntaxError(token.line, f"expected {what}, found {token.text or 'end of input'!r}")
        return self.advance()


class _ModelParser:
    def __init__(self, source: str):
        self.stream = _Stream(_tokenize(source))
        self.ir = ShadowModelIR()
        self.pending_defs: List[Tuple[str, List[_Token]]] = []

    # -- pass 1: declarations ------------------------------------------------

    def parse(self) -> ShadowModelIR:
        while self.stream.peek().kind != "eof":
            token = self.stream.peek()
            if token.text == "SET":
                self.parse_set()
            elif token.text == "PARAM":
                self.parse_param()
            elif token.text == "DEF":
                self.parse_def_header()
            elif token.text == "INCLUDE":
                raise ModelSyntaxError(
                    token.line, "unresolved INCLUDE; run include resolution first"
                )
            else:
                raise ModelSyntaxError(
                    token.line, f"expected SET, PARAM or DEF, found {token.text!r}"
                )
        for target, tokens in self.pending_defs:
            expr = _ExprParser(self.ir, _Stream(tokens)).parse_full()
            self.check_indices(target, expr)
            self.ir.definitions[target] = Definition(target, expr)
        self.build_dependency_order()
        return self.ir

    def declare(self, name: str, line: int) -> None:
        if name in self.ir.sets or name in self.ir.params or name in self.ir.index_to_set:
            raise DuplicateName(f"line {line}: duplicate declaration of {name!r}")

    def parse_set(self) -> None:
        self.stream.expect("SET")
        name_tok = self.stream.expect_ident("set name")
        self.declare(name_tok.text, name_tok.line)
        self.stream.expect("(")
        index_tok = self.stream.expect_ident("index name")
        self.declare(index_tok.text, index_tok.line)
        self.stream.expect(")")
        parent = None
        if self.stream.at("SUBSET"):
            self.stream.advance()
            parent_tok = self.stream.expect_ident("parent set name")
            if parent_tok.text not in self.ir.sets:
                raise UnknownSet(f"line {parent_tok.line}: unknown parent set {parent_tok.text!r}")
            parent = parent_tok.text
        elements = None
        if self.stream.at(":="):
            self.stream.advance()
            self.stream.expect("{")
            elements = []
            while not self.stream.at("}"):
                token = self.stream.peek()
                if token.kind not in ("ident", "number") or token.text in KEYWORDS:
                    raise ModelSyntaxError(token.line, "expected an element label")
                self.stream.advance()
                if token.text in elements:
                    raise DuplicateName(
                        f"line {token.line}: duplicate element {token.text!r} in set {name_tok.text}"
                    )
                elements.append(token.text)
                if self.stream.at(","):
                    self.stream.advance()
                    continue
                break
            self.stream.expect("}")
        self.stream.expect(";")
        if parent is not None and elements is not None:
            parent_elements = set(self.ir.set_elements(parent))
            extra = [e for e in elements if e not in parent_elements]
            if extra:
                raise ModelError(
                    f"subset {name_tok.text} has elements outside {parent}: {extra}"
                )
        decl = SetDecl(name_tok.text, index_tok.text, parent, elements)
        self.ir.sets[decl.name] = decl
        self.ir.index_to_set[decl.index] = decl.name

    def parse_domain(self) -> Tuple[str, ...]:
        if not self.stream.at("("):
            return ()
        self.stream.advance()
        indexes = []
        while True:
            token = self.stream.expect_ident("index name")
            if token.text not in self.ir.index_to_set:
                raise UnknownIndex(f"line {token.line}: unknown index {token.text!r}")
            indexes.append(token.text)
            if self.stream.at(","):
                self.stream.advance()
                continue
            break
        self.stream.expect(")")
        return tuple(indexes)

    def parse_param(self) -> None:
        self.stream.expect("PARAM")
        name_tok = self.stream.expect_ident("parameter name")
        self.declare(name_tok.text, name_tok.line)
        indexes = self.parse_domain()
        self.stream.expect(";")
        self.ir.params[name_tok.text] = ParamDecl(name_tok.text, indexes, "input")

    def parse_def_header(self) -> None:
        self.stream.expect("DEF")
        name_tok = self.stream.expect_ident("parameter name")
        self.declare(name_tok.text, name_tok.line)
        indexes = self.parse_domain()
        self.stream.expect(":=")
        # Collect the expression tokens up to the closing ';' for pass 2.
        tokens: List[_Token] = []
        while True:
            token = self.stream.peek()
            if token.kind == "eof":
                raise ModelSyntaxError(token.line, "unterminated definition (missing ';')")
            if token.text == ";":
                self.stream.advance()
                break
            tokens.append(self.stream.advance())
        tokens.append(_Token("eof", "", name_tok.line))
        self.ir.params[name_tok.text] = ParamDecl(name_tok.text, indexes, "defined")
        self.pending_defs.append((name_tok.text, tokens))

    # -- pass 2 checks -------------------------------------------------------

    def check_indices(self, target: str, expr: Expr) -> None:
        domain = set(self.ir.params[target].indexes)

        def check_arg_compat(param: str, args: Tuple[str, ...], bound: Set[str]) -> None:
            decl = self.ir.params.get(param)
            assert decl is not None
            if len(args) != len(decl.indexes):
                raise ModelError(
                    f"definition {target}: {param} takes {len(decl.indexes)} "
                    f"indices, got {len(args)}"
                )
            for arg, domain_index in zip(args, decl.indexes):
                if arg not in bound:
                    raise FreeIndexError(target, arg)
                arg_set = self.ir.index_to_set[arg]
                domain_set = self.ir.index_to_set[domain_index]
                if (domain_set not in self.ir.set_ancestry(arg_set)
                        and arg_set not in self.ir.set_ancestry(domain_set)):
                    raise ModelError(
                        f"definition {target}: index {arg!r} (over {arg_set}) is "
                        f"incompatible with {param}'s index {domain_index!r} (over {domain_set})"
                    )

        def walk(node: Expr, bound: Set[str]) -> None:
            if isinstance(node, IndexRef):
                if node.name not in bound:
                    raise FreeIndexError(target, node.name)
            elif isinstance(node, ParamRef):
                check_arg_compat(node.name, node.args, bound)
            elif isinstance(node, Agg):
                for index in node.indices:
                    if index in bound:
                        raise ModelError(
                            f"definition {target}: aggregate rebinds index {index!r}"
                        )
                inner = bound | set(node.indices)
                if node.filter is not None:
                    walk(node.filter, inner)
                walk(node.body, inner)
            elif isinstance(node, IfExpr):
                walk(node.cond, bound)
                walk(node.then, bound)
                walk(node.otherwise, bound)
            elif isinstance(node, UnaryOp):
                walk(node.operand, bound)
            elif isinstance(node, (BinOp, CmpOp)):
                walk(node.left, bound)
                walk(node.right, bound)

        walk(expr, domain)

    def build_dependency_order(self) -> None:
        ir = self.ir
        for target, definition in ir.definitions.items():
            reads: List[str] = []

            def collect(node: Expr) -> None:
                if isinstance(node, ParamRef):
                    if node.name not in reads:
                        reads.append(node.name)
                elif isinstance(node, Agg):
                    if node.filter is not None:
                        collect(node.filter)
                    collect(node.body)
                elif isinstance(node, IfExpr):
                    collect(node.cond)
                    collect(node.then)
                    collect(node.otherwise)
                elif isinstance(node, UnaryOp):
                    collect(node.operand)
                elif isinstance(node, (BinOp, CmpOp)):
                    collect(node.left)
                    collect(node.right)

            collect(definition.expr)
            ir.def_reads[target] = reads

        order: List[str] = []
        state: Dict[str, int] = {}  # 1 = visiting, 2 = done
        stack_path: List[str] = []

        def visit(name: str) -> None:
            if state.get(name) == 2:
                return
            if state.get(name) == 1:
                start = stack_path.index(name)
                raise CyclicDefinitionError(stack_path[start:] + [name])
            state[name] = 1
            stack_path.append(name)
            for read in ir.def_reads.get(name, ()):
                if read in ir.definitions:
                    visit(read)
            stack_path.pop()
            state[name] = 2
            order.append(name)

        for name in ir.definitions:
            visit(name)
        ir.eval_order = order


class _ExprParser:
    """Expression grammar; precedence matches the spreadsheet formulas."""

    def __init__(self, ir: ShadowModelIR, stream: _Stream):
        self.ir = ir
        self.stream = stream

    def parse_full(self) -> Expr:
        expr = self.parse_expr()
        trailing = self.stream.peek()
        if trailing.kind != "eof":
            raise ModelSyntaxError(trailing.line, f"unexpected {trailing.text!r}")
        return expr

    def parse_expr(self) -> Expr:
        left = self.parse_add()
        token = self.stream.peek()
        if token.kind == "op" and token.text in _CMP_OPS:
            self.stream.advance()
            right = self.parse_add()
            return CmpOp(token.text, left, right)
        return left

    def parse_add(self) -> Expr:
        node = self.parse_mul()
        while self.stream.peek().text in ("+", "-") and self.stream.peek().kind == "op":
            op = self.stream.advance().text
            node = BinOp(op, node, self.parse_mul())
        return node

    def parse_mul(self) -> Expr:
        node = self.parse_unary()
        while self.stream.peek().text in ("*", "/") and self.stream.peek().kind == "op":
            op = self.stream.advance().text
            node = BinOp(op, node, self.parse_unary())
        return node

    def parse_unary(self) -> Expr:
        if self.stream.peek().text == "-" and self.stream.peek().kind == "op":
            self.stream.advance()
            return UnaryOp("-", self.parse_unary())
        return self.parse_pow()

    def parse_pow(self) -> Expr:
        base = self.parse_primary()
        if self.stream.peek().text == "^":
            self.stream.advance()
            return BinOp("^", base, self.parse_unary())
        return base

    def parse_primary(self) -> Expr:
        token = self.stream.peek()
        if token.kind == "number":
            self.stream.advance()
            return Num(float(token.text))
        if token.text == "(":
            self.stream.advance()
            inner = self.parse_expr()
            self.stream.expect(")")
            return inner
        if token.text in AGG_KEYWORDS:
            return self.parse_aggregate()
        if token.text == "IF":
            return self.parse_if()
        if token.text == "FIRST":
            self.stream.advance()
            self.stream.expect("(")
            set_tok = self.stream.expect_ident("set name")
            if set_tok.text not in self.ir.sets:
                raise UnknownSet(f"line {set_tok.line}: unknown set {set_tok.text!r}")
            self.stream.expect(")")
            return First(set_tok.text)
        if token.kind == "ident" and token.text not in KEYWORDS:
            return self.parse_name()
        raise ModelSyntaxError(token.line, f"unexpected {token.text or 'end of input'!r}")

    def parse_name(self) -> Expr:
        token = self.stream.advance()
        if self.stream.at("("):
            if token.text not in self.ir.params:
                raise UnknownParam(f"line {token.line}: unknown parameter {token.text!r}")
            self.stream.advance()
            args = []
            while True:
                arg = self.stream.expect_ident("index name")
                if arg.text not in self.ir.index_to_set:
                    raise UnknownIndex(f"line {arg.line}: unknown index {arg.text!r}")
                args.append(arg.text)
                if self.stream.at(","):
                    self.stream.advance()
                    continue
                break
            self.stream.expect(")")
            return ParamRef(token.text, tuple(args))
        if token.text in self.ir.index_to_set:
            return IndexRef(token.text)
        if token.text in self.ir.params:
            return ParamRef(token.text, ())
        raise UnknownParam(
            f"line {token.line}: {token.text!r} is neither an index nor a parameter"
        )

    def parse_aggregate(self) -> Expr:
        kind = self.stream.advance().text
        self.stream.expect("(")
        indices: List[str] = []
        if self.stream.at("("):
            self.stream.advance()
            while True:
                tok = self.stream.expect_ident("index name")
                indices.append(tok.text)
                if self.stream.at(","):
                    self.stream.advance()
                    continue
                break
            self.stream.expect(")")
        else:
            # Single-index shorthand: SUM(t, ...) for SUM((t), ...).
            tok = self.stream.expect_ident("index name")
            indices.append(tok.text)
        for index in indices:
            if index not in self.ir.index_to_set:
                raise UnknownIndex(f"unknown index {index!r} in {kind} binding")
        filter_expr = None
        if self.stream.at("|"):
            self.stream.advance()
            filter_expr = self.parse_expr()
        self.stream.expect(",")
        body = self.parse_expr()
        self.stream.expect(")")
        return Agg(kind, tuple(indices), filter_expr, body)

    def parse_if(self) -> Expr:
        self.stream.expect("IF")
        cond = self.parse_expr()
        self.stream.expect("THEN")
        then = self.parse_expr()
        self.stream.expect("ELSE")
        otherwise = self.parse_expr()
        self.stream.expect("ENDIF")
        return IfExpr(cond, then, otherwise)


def parse_model(source: str) -> ShadowModelIR:
    """Parse flattened model source into a checked IR."""
    return _ModelParser(source).parse()


def load_model(path) -> ShadowModelIR:
    """Read a model file, resolve INCLUDEs relative to it, and parse."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        raise IncludeIoError(f"cannot read model {path}: {exc}") from exc
    flattened = include_resolve(source, [os.path.dirname(os.path.abspath(path))],
                                [os.path.abspath(path)])
    return parse_model(flattened)
