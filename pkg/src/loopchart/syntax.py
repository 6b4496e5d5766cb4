"""Abstract and concrete syntax of star expressions and stacked star expressions.

Star expressions are regular expressions read as process terms:

    e ::= 0 | 1 | a | e + e | e . e | e*

Stacked star expressions add applicative layers that mark a descent into a
star body:

    E ::= e | E . e | E * e*        (the last layer rendered with ``@``)

A product layer over a plain head is the same term as a plain product, so we
keep stacked values canonical: ``sprod`` collapses ``SProd(Plain(h), t)`` to
``Plain(Prod(h, t))``.  ``SStack`` layers never collapse.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional, Union


class ParseError(Exception):
    """Malformed expression text."""

    def __init__(self, message: str, offset: int, expected: frozenset[str]):
        super().__init__(f"{message} at offset {offset} (expected: {', '.join(sorted(expected))})")
        self.offset = offset
        self.expected = expected


# ---------------------------------------------------------------------------
# star expressions

class StarExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Zero(StarExpr):
    pass


@dataclass(frozen=True)
class One(StarExpr):
    pass


@dataclass(frozen=True)
class Act(StarExpr):
    name: str

    def __post_init__(self):
        if not IDENT_RE.fullmatch(self.name):
            raise ValueError(f"invalid action name {self.name!r}")


@dataclass(frozen=True)
class Sum(StarExpr):
    left: StarExpr
    right: StarExpr


@dataclass(frozen=True)
class Prod(StarExpr):
    left: StarExpr
    right: StarExpr


@dataclass(frozen=True)
class Star(StarExpr):
    body: StarExpr


IDENT_RE = re.compile(r"[A-Za-z][A-Za-z]*[0-9]*")


# ---------------------------------------------------------------------------
# stacked star expressions

class StackedExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Plain(StackedExpr):
    expr: StarExpr


@dataclass(frozen=True)
class SProd(StackedExpr):
    head: StackedExpr
    tail: StarExpr

    def __post_init__(self):
        # canonical form: a plain head belongs in a plain product (use sprod)
        if isinstance(self.head, Plain):
            raise ValueError("SProd over a Plain head; use sprod() to build products")


@dataclass(frozen=True)
class SStack(StackedExpr):
    head: StackedExpr
    tail: Star

    def __post_init__(self):
        if not isinstance(self.tail, Star):
            raise ValueError("SStack tail must be a Star")


def sprod(head: StackedExpr, tail: StarExpr) -> StackedExpr:
    """Product layer over a stacked head, collapsing plain heads."""
    if isinstance(head, Plain):
        return Plain(Prod(head.expr, tail))
    return SProd(head, tail)


# ---------------------------------------------------------------------------
# applicative contexts

class AppCxt:
    __slots__ = ()


@dataclass(frozen=True)
class Hole(AppCxt):
    pass


@dataclass(frozen=True)
class CProd(AppCxt):
    inner: AppCxt
    tail: StarExpr


@dataclass(frozen=True)
class CStack(AppCxt):
    inner: AppCxt
    tail: Star


def fill(cxt: AppCxt, value: StackedExpr) -> StackedExpr:
    """Substitute `value` for the hole of `cxt`."""
    if isinstance(cxt, Hole):
        return value
    if isinstance(cxt, CProd):
        return sprod(fill(cxt.inner, value), cxt.tail)
    if isinstance(cxt, CStack):
        return SStack(fill(cxt.inner, value), cxt.tail)
    raise TypeError(cxt)


def decompose(value: StackedExpr) -> tuple[AppCxt, StarExpr]:
    """Split a stacked expression into its applicative layers and plain core.

    fill(cxt, Plain(core)) reconstructs the input.
    """
    if isinstance(value, Plain):
        return Hole(), value.expr
    if isinstance(value, SProd):
        cxt, core = decompose(value.head)
        return _wrap_outer(cxt, CProd(Hole(), value.tail)), core
    if isinstance(value, SStack):
        cxt, core = decompose(value.head)
        return _wrap_outer(cxt, CStack(Hole(), value.tail)), core
    raise TypeError(value)


def _wrap_outer(inner: AppCxt, outer: AppCxt) -> AppCxt:
    """Plug `inner` into the hole of the single-layer context `outer`."""
    if isinstance(outer, CProd):
        return CProd(inner, outer.tail)
    if isinstance(outer, CStack):
        return CStack(inner, outer.tail)
    raise TypeError(outer)


# ---------------------------------------------------------------------------
# measures and projection

def star_height(value: Union[StarExpr, StackedExpr]) -> int:
    if isinstance(value, (Zero, One, Act)):
        return 0
    if isinstance(value, (Sum, Prod)):
        return max(star_height(value.left), star_height(value.right))
    if isinstance(value, Star):
        return 1 + star_height(value.body)
    if isinstance(value, Plain):
        return star_height(value.expr)
    if isinstance(value, (SProd, SStack)):
        return max(star_height(value.head), star_height(value.tail))
    raise TypeError(value)


def project(value: StackedExpr) -> StarExpr:
    """Read every stacked layer as an ordinary product."""
    if isinstance(value, Plain):
        return value.expr
    if isinstance(value, (SProd, SStack)):
        return Prod(project(value.head), value.tail)
    raise TypeError(value)


def actions_of(e: StarExpr) -> frozenset[str]:
    """All action names occurring in e."""
    if isinstance(e, Act):
        return frozenset({e.name})
    if isinstance(e, (Sum, Prod)):
        return actions_of(e.left) | actions_of(e.right)
    if isinstance(e, Star):
        return actions_of(e.body)
    return frozenset()


# ---------------------------------------------------------------------------
# rendering

# precedence levels: sum < stack(@) is kept lowest for stacked values
_SUM, _PROD, _STAR, _ATOM = 0, 1, 2, 3


def _level(e: StarExpr) -> int:
    if isinstance(e, Sum):
        return _SUM
    if isinstance(e, Prod):
        return _PROD
    if isinstance(e, Star):
        return _STAR
    return _ATOM


def _render_expr(e: StarExpr, need: int) -> str:
    if isinstance(e, Zero):
        s = "0"
    elif isinstance(e, One):
        s = "1"
    elif isinstance(e, Act):
        s = e.name
    elif isinstance(e, Sum):
        s = _render_expr(e.left, _SUM) + " + " + _render_expr(e.right, _PROD)
    elif isinstance(e, Prod):
        s = _render_expr(e.left, _PROD) + "." + _render_expr(e.right, _STAR)
    elif isinstance(e, Star):
        s = _render_expr(e.body, _STAR) + "*"
    else:
        raise TypeError(e)
    if _level(e) < need:
        return "(" + s + ")"
    return s


def render(value: Union[StarExpr, StackedExpr]) -> str:
    """Parenthesization-minimal text; `@` is the stacked-star layer token."""
    if isinstance(value, StarExpr):
        return _render_expr(value, _SUM)
    if isinstance(value, Plain):
        return _render_expr(value.expr, _SUM)
    if isinstance(value, SProd):
        head = render(value.head)
        if isinstance(value.head, SStack):
            head = "(" + head + ")"
        return head + "." + _render_expr(value.tail, _STAR)
    if isinstance(value, SStack):
        head = render(value.head)
        if isinstance(value.head, Plain) and isinstance(value.head.expr, Sum):
            head = "(" + head + ")"
        return head + " @ " + _render_expr(value.tail, _STAR)
    raise TypeError(value)


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"\s*(?:(?P<ident>[A-Za-z]+[0-9]*)|(?P<op>[01+.*()]))")


def _tokenize(text: str) -> Iterator[tuple[str, str, int]]:
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos,
                             frozenset({"expression"}))
        if m.group("ident") is not None:
            yield "ident", m.group("ident"), m.start("ident")
        else:
            yield m.group("op"), m.group("op"), m.start("op")
        pos = m.end()
    yield "end", "", len(text)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = list(_tokenize(text))
        self.index = 0

    @property
    def current(self) -> tuple[str, str, int]:
        return self.tokens[self.index]

    def advance(self) -> None:
        self.index += 1

    def fail(self, expected: set[str]) -> None:
        kind, value, offset = self.current
        what = "end of input" if kind == "end" else repr(value)
        raise ParseError(f"unexpected {what}", offset, frozenset(expected))

    def parse_expr(self) -> StarExpr:
        left = self.parse_prodterm()
        while self.current[0] == "+":
            self.advance()
            left = Sum(left, self.parse_prodterm())
        return left

    def parse_prodterm(self) -> StarExpr:
        left = self.parse_starterm()
        while self.current[0] == ".":
            self.advance()
            left = Prod(left, self.parse_starterm())
        return left

    def parse_starterm(self) -> StarExpr:
        e = self.parse_atom()
        while self.current[0] == "*":
            self.advance()
            e = Star(e)
        return e

    def parse_atom(self) -> StarExpr:
        kind, value, _ = self.current
        if kind == "0":
            self.advance()
            return Zero()
        if kind == "1":
            self.advance()
            return One()
        if kind == "ident":
            self.advance()
            return Act(value)
        if kind == "(":
            self.advance()
            e = self.parse_expr()
            if self.current[0] != ")":
                self.fail({")"})
            self.advance()
            return e
        self.fail({"0", "1", "identifier", "("})


def parse_star_expr(text: str) -> StarExpr:
    parser = _Parser(text)
    e = parser.parse_expr()
    if parser.current[0] != "end":
        parser.fail({"+", ".", "*", "end of input"})
    return e
