"""Text syntax for formulas.

Grammar (``#`` starts a comment that runs to end of line)::

    formula := iff
    iff     := imp ('<->' imp)*        left-associative
    imp     := or ('->' imp)?          right-associative
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '!' unary | '(' formula ')' | 'true' | 'false' | IDENT

Chains of the same connective are left-folded into binary nodes, except
``->`` which nests to the right.
"""
from __future__ import annotations

import re

from cnfenum.formula import FormulaStore, Kind, NodeId


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<op><->|->|[!&|()])|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
)


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("op", "ident"):
            tokens.append((kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, store: FormulaStore, text: str):
        self.store = store
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        kind, value, _, _ = self.tokens[self.i]
        return value if kind == "op" else kind

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str):
        _, value, line, col = self.tokens[self.i]
        raise ParseError(f"{message}, got {value or 'end of input'!r}", line, col)

    def expect(self, op: str):
        if self.peek() != op:
            self.fail(f"expected {op!r}")
        self.take()

    def parse(self) -> NodeId:
        node = self.iff()
        if self.peek() != "eof":
            self.fail("unexpected token")
        return node

    def iff(self) -> NodeId:
        node = self.imp()
        while self.peek() == "<->":
            self.take()
            node = self.store.iff(node, self.imp())
        return node

    def imp(self) -> NodeId:
        node = self.or_()
        if self.peek() == "->":
            self.take()
            node = self.store.implies(node, self.imp())
        return node

    def or_(self) -> NodeId:
        node = self.and_()
        while self.peek() == "|":
            self.take()
            node = self.store.or_(node, self.and_())
        return node

    def and_(self) -> NodeId:
        node = self.unary()
        while self.peek() == "&":
            self.take()
            node = self.store.and_(node, self.unary())
        return node

    def unary(self) -> NodeId:
        tok = self.peek()
        if tok == "!":
            self.take()
            return self.store.not_(self.unary())
        if tok == "(":
            self.take()
            node = self.iff()
            self.expect(")")
            return node
        if tok == "ident":
            _, value, _, _ = self.take()
            if value == "true":
                return self.store.true()
            if value == "false":
                return self.store.false()
            return self.store.atom(value)
        self.fail("expected a formula")


def parse(store: FormulaStore, text: str) -> NodeId:
    """Parse ``text`` into ``store`` and return the root node."""
    return _Parser(store, text).parse()


_PREC = {Kind.IFF: 1, Kind.IMPLIES: 2, Kind.OR: 3, Kind.AND: 4}
_SYMBOL = {Kind.IFF: "<->", Kind.IMPLIES: "->", Kind.OR: "|", Kind.AND: "&"}


def _prec(store: FormulaStore, nid: NodeId) -> int:
    return _PREC.get(store.kind(nid), 5)


def format_formula(store: FormulaStore, root: NodeId) -> str:
    """Render ``root`` so that :func:`parse` rebuilds the same node.

    Shared subformulas are printed once per occurrence.
    """
    node = store.node(root)
    k = node.kind
    if k is Kind.TRUE:
        return "true"
    if k is Kind.FALSE:
        return "false"
    if k is Kind.ATOM:
        return node.name
    if k is Kind.NOT:
        child = node.children[0]
        inner = format_formula(store, child)
        return "!" + (f"({inner})" if _prec(store, child) < 5 else inner)
    p = _PREC[k]
    a, b = node.children
    left = format_formula(store, a)
    right = format_formula(store, b)
    if _prec(store, a) < p or (_prec(store, a) == p and k is Kind.IMPLIES):
        left = f"({left})"
    if _prec(store, b) < p or (_prec(store, b) == p and k is not Kind.IMPLIES):
        right = f"({right})"
    return f"{left} {_SYMBOL[k]} {right}"
