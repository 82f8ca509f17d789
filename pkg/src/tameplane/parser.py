"""Recursive-descent parser for the polynomial expression grammar.

Grammar (whitespace-insensitive)::

    poly     := sign? term (('+' | '-') term)*
    term     := factor ('*'? factor)*
    factor   := base ('^' nat)?
    base     := rational | 'i' | 'x' | 'y' | '(' poly ')'
    rational := nat ('/' nat)?

Adjacency is implicit multiplication and '^' binds tighter than '*'.
The imaginary unit 'i' is only accepted in gaussian mode.  Errors carry the
0-based input position of the offending character.
"""

from __future__ import annotations

from fractions import Fraction

from .polynomials import (
    GAUSSIAN,
    RATIONAL,
    GaussianRational,
    Polynomial,
    PolyMap,
)


class ParseError(ValueError):
    """Syntax error with the 0-based position where parsing failed."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


_SYMBOLS = set("+-*/^()")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    k = 0
    n = len(src)
    while k < n:
        ch = src[k]
        if ch.isspace():
            k += 1
            continue
        if ch.isdigit():
            start = k
            while k < n and src[k].isdigit():
                k += 1
            tokens.append(("num", src[start:k], start))
            continue
        if ch in ("x", "y", "i"):
            tokens.append(("var", ch, k))
            k += 1
            continue
        if ch in _SYMBOLS:
            tokens.append((ch, ch, k))
            k += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", k)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, src: str, mode: str):
        self.tokens = _tokenize(src)
        self.pos = 0
        self.mode = mode

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> tuple[str, str, int]:
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2])
        return self.advance()

    def parse(self) -> Polynomial:
        poly = self.poly()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return poly

    def poly(self) -> Polynomial:
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.advance()[0] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> Polynomial:
        acc = self.factor()
        while True:
            tok = self.peek()
            if tok[0] == "*":
                self.advance()
                acc = acc * self.factor()
            elif tok[0] in ("num", "var", "("):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> Polynomial:
        base = self.base()
        if self.peek()[0] == "^":
            self.advance()
            tok = self.expect("num")
            base = base ** int(tok[1])
        return base

    def base(self) -> Polynomial:
        tok = self.peek()
        if tok[0] == "num":
            return Polynomial.const(self.rational(), self.mode)
        if tok[0] == "var":
            self.advance()
            if tok[1] == "i":
                if self.mode != GAUSSIAN:
                    raise ParseError(
                        "imaginary unit requires gaussian mode (--field qi)",
                        tok[2])
                return Polynomial.const(
                    GaussianRational(Fraction(0), Fraction(1)), self.mode)
            return Polynomial.variable(tok[1], self.mode)
        if tok[0] == "(":
            self.advance()
            inner = self.poly()
            self.expect(")")
            return inner
        raise ParseError(f"expected a polynomial, found {tok[1]!r}"
                         if tok[0] != "end" else "unexpected end of input",
                         tok[2])

    def rational(self) -> Fraction:
        num_tok = self.expect("num")
        value = Fraction(int(num_tok[1]))
        if self.peek()[0] == "/":
            self.advance()
            den_tok = self.expect("num")
            den = int(den_tok[1])
            if den == 0:
                raise ParseError("zero denominator", den_tok[2])
            value /= den
        return value


def parse_poly(src: str, mode: str = RATIONAL) -> Polynomial:
    """Parse an exact polynomial from text."""
    return _Parser(src, mode).parse()


def parse_map(src: str, mode: str = RATIONAL) -> PolyMap:
    """Parse a plane map "P; Q" with a semicolon separator."""
    parts = src.split(";")
    if len(parts) != 2:
        raise ParseError("a map needs exactly one ';' separating P and Q",
                         len(src) if ";" not in src else src.index(";"))
    return PolyMap(parse_poly(parts[0], mode), parse_poly(parts[1], mode))
