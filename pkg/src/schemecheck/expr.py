"""A small language for naming finite rings.

Grammar (whitespace-insensitive)::

    expr  := term ('x' term)*
    term  := atom ('/' '(' gens ')')?
    atom  := 'Z' '/' nat
           | 'GF' '(' prime ')' '[' var ']' '/' '(' poly ')'
           | '(' expr ')'
    gens  := nat (',' nat)*
    poly  := ['+'|'-'] mono (('+'|'-') mono)*
    mono  := nat ['*'] [var ['^' nat]] | var ['^' nat]

Products associate to the left.  Quotient generators are element indices of
the ring being quotiented.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import MalformedInput
from .ring_core import (
    DEFAULT_MAX_RING_SIZE,
    FiniteRing,
    ideal_generated_by,
    is_prime,
    mk_gf_poly_quotient,
    mk_product,
    mk_quotient,
    mk_zmod,
    poly_to_text,
)


@dataclass(frozen=True)
class ZMod:
    n: int


@dataclass(frozen=True)
class GFQuot:
    p: int
    poly: tuple[int, ...]  # lowest degree first, monic


@dataclass(frozen=True)
class Product:
    left: "RingExpr"
    right: "RingExpr"


@dataclass(frozen=True)
class Quotient:
    ring: "RingExpr"
    gens: tuple[int, ...]


RingExpr = Union[ZMod, GFQuot, Product, Quotient]


class RingExprError(MalformedInput):
    pass


class RingExprSyntaxError(RingExprError):
    def __init__(self, text: str, pos: int, expected: set[str]):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        found = repr(text[pos]) if pos < len(text) else "end of input"
        super().__init__(f"line {line}, column {col}: expected one of {sorted(expected)}, found {found}")
        self.line, self.column, self.expected = line, col, expected


class RingExprSemanticError(RingExprError):
    pass


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, token: str) -> bool:
        self.ws()
        return self.text.startswith(token, self.pos)

    def accept(self, token: str) -> bool:
        if self.peek(token):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str):
        if not self.accept(token):
            raise RingExprSyntaxError(self.text, self.pos, {token})

    def nat(self) -> int:
        self.ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise RingExprSyntaxError(self.text, self.pos, {"natural number"})
        return int(self.text[start : self.pos])

    def ident(self) -> str:
        self.ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalpha():
            self.pos += 1
        if start == self.pos:
            raise RingExprSyntaxError(self.text, self.pos, {"variable"})
        return self.text[start : self.pos]

    # grammar

    def parse(self) -> RingExpr:
        e = self.expr()
        self.ws()
        if self.pos != len(self.text):
            raise RingExprSyntaxError(self.text, self.pos, {"x", "/", "end of input"})
        return e

    def expr(self) -> RingExpr:
        e = self.term()
        while self.accept("x"):
            e = Product(e, self.term())
        return e

    def term(self) -> RingExpr:
        a = self.atom()
        if self.accept("/"):
            self.expect("(")
            gens = [self.nat()]
            while self.accept(","):
                gens.append(self.nat())
            self.expect(")")
            return Quotient(a, tuple(gens))
        return a

    def atom(self) -> RingExpr:
        if self.accept("GF"):
            self.expect("(")
            pos = self.pos
            p = self.nat()
            if not is_prime(p):
                raise RingExprSemanticError(f"column {pos + 1}: GF({p}) needs a prime")
            self.expect(")")
            self.expect("[")
            var = self.ident()
            self.expect("]")
            self.expect("/")
            self.expect("(")
            pos = self.pos
            coeffs = self.poly(p, var)
            self.expect(")")
            if len(coeffs) < 2:
                raise RingExprSemanticError(f"column {pos + 1}: polynomial must have degree >= 1")
            if coeffs[-1] != 1:
                raise RingExprSemanticError(f"column {pos + 1}: polynomial must be monic")
            return GFQuot(p, tuple(coeffs))
        if self.accept("Z"):
            self.expect("/")
            pos = self.pos
            n = self.nat()
            if n < 1:
                raise RingExprSemanticError(f"column {pos + 1}: Z/n needs n >= 1")
            return ZMod(n)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.ws()
        raise RingExprSyntaxError(self.text, self.pos, {"Z", "GF", "("})

    def poly(self, p: int, var: str) -> list[int]:
        coeffs: dict[int, int] = {}
        sign = -1 if self.accept("-") else (self.accept("+") and 1) or 1
        while True:
            c, d = self.mono(var)
            coeffs[d] = (coeffs.get(d, 0) + sign * c) % p
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            else:
                break
        deg = max((d for d, c in coeffs.items() if c), default=0)
        return [coeffs.get(d, 0) for d in range(deg + 1)]

    def mono(self, var: str) -> tuple[int, int]:
        self.ws()
        coeff = 1
        has_coeff = self.pos < len(self.text) and self.text[self.pos].isdigit()
        if has_coeff:
            coeff = self.nat()
            star = self.accept("*")
            if not self.peek(var):
                if star:
                    raise RingExprSyntaxError(self.text, self.pos, {var})
                return coeff, 0
        if not self.accept(var):
            raise RingExprSyntaxError(self.text, self.pos, {var, "coefficient"})
        degree = self.nat() if self.accept("^") else 1
        return coeff, degree


def parse_ring_expr(text: str) -> RingExpr:
    return _Parser(text).parse()


def to_text(e: RingExpr) -> str:
    if isinstance(e, ZMod):
        return f"Z/{e.n}"
    if isinstance(e, GFQuot):
        return f"GF({e.p})[x]/({poly_to_text(e.poly)})"
    if isinstance(e, Product):
        right = to_text(e.right)
        if isinstance(e.right, Product):
            right = f"({right})"
        return f"{to_text(e.left)} x {right}"
    if isinstance(e, Quotient):
        inner = to_text(e.ring)
        if isinstance(e.ring, (Product, Quotient)):
            inner = f"({inner})"
        return f"{inner}/({','.join(map(str, e.gens))})"
    raise TypeError(e)


def to_ring(e: RingExpr, max_size: int = DEFAULT_MAX_RING_SIZE) -> FiniteRing:
    if isinstance(e, ZMod):
        return mk_zmod(e.n, max_size=max_size)
    if isinstance(e, GFQuot):
        return mk_gf_poly_quotient(e.p, e.poly, max_size=max_size)
    if isinstance(e, Product):
        return mk_product(to_ring(e.left, max_size), to_ring(e.right, max_size), max_size=max_size)
    if isinstance(e, Quotient):
        R = to_ring(e.ring, max_size)
        bad = [g for g in e.gens if g >= R.size]
        if bad:
            raise RingExprSemanticError(f"element {bad[0]} is out of range for a ring of size {R.size}")
        Q, _ = mk_quotient(R, ideal_generated_by(R, e.gens))
        return Q
    raise TypeError(e)


def ring_from_text(text: str, max_size: int = DEFAULT_MAX_RING_SIZE) -> FiniteRing:
    return to_ring(parse_ring_expr(text), max_size)
