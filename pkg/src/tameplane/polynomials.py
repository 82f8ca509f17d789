"""Exact sparse bivariate polynomials over the rationals or Gaussian rationals.

A polynomial is a finite map from exponent pairs ``(i, j)`` (powers of x and
y) to nonzero coefficients.  Coefficients are ``fractions.Fraction`` in
rational mode or :class:`GaussianRational` in gaussian mode; every operation
in this module is exact.  The zero polynomial stores no terms, and its degree
is the sentinel ``NEG_INF``.

Printing uses graded-lexicographic order with y ranked before x, so
``x + y**2`` renders as ``"y^2 + x"``.  The same text is accepted back by
:mod:`tameplane.parser`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

RATIONAL = "rational"
GAUSSIAN = "gaussian"

NEG_INF = float("-inf")

Exponent = tuple[int, int]


class FieldMismatchError(ValueError):
    """Raised when operands do not share a field mode."""


@dataclass(frozen=True)
class GaussianRational:
    """A Gaussian rational a + b*i with exact Fraction parts."""

    re: Fraction
    im: Fraction

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "GaussianRational") -> "GaussianRational":
        norm = other.re * other.re + other.im * other.im
        if norm == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / norm,
            (self.im * other.re - self.re * other.im) / norm,
        )

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    @staticmethod
    def from_rational(value: Union[int, Fraction]) -> "GaussianRational":
        return GaussianRational(Fraction(value), Fraction(0))


Coefficient = Union[Fraction, GaussianRational]

I_UNIT = GaussianRational(Fraction(0), Fraction(1))


def coeff_zero(mode: str) -> Coefficient:
    return Fraction(0) if mode == RATIONAL else GaussianRational.from_rational(0)


def coeff_one(mode: str) -> Coefficient:
    return Fraction(1) if mode == RATIONAL else GaussianRational.from_rational(1)


def as_coeff(value, mode: str) -> Coefficient:
    """Coerce an int/Fraction/GaussianRational into the given field mode."""
    if isinstance(value, GaussianRational):
        if mode != GAUSSIAN:
            raise FieldMismatchError("Gaussian coefficient in rational mode")
        return value
    if isinstance(value, (int, Fraction)):
        frac = Fraction(value)
        return frac if mode == RATIONAL else GaussianRational(frac, Fraction(0))
    raise TypeError(f"cannot use {value!r} as a coefficient")


def coeff_to_complex(c: Coefficient) -> complex:
    if isinstance(c, GaussianRational):
        return complex(c)
    return complex(float(c), 0.0)


def render_coeff(c: Coefficient) -> str:
    """Exact text for a coefficient: "3", "-3/2", "i", "(1/2-3*i)"."""
    if isinstance(c, Fraction):
        return str(c)
    if not c.im:
        return str(c.re)
    if not c.re:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        return f"{c.im}*i"
    im = f"+{c.im}*i" if c.im > 0 else f"-{-c.im}*i"
    if abs(c.im) == 1:
        im = im[0] + "i"
    return f"({c.re}{im})"


class Polynomial:
    """Immutable sparse bivariate polynomial in canonical form."""

    __slots__ = ("terms", "mode", "_hash")

    def __init__(self, terms: Mapping[Exponent, Coefficient] | None = None,
                 mode: str = RATIONAL):
        if mode not in (RATIONAL, GAUSSIAN):
            raise ValueError(f"unknown field mode {mode!r}")
        clean: dict[Exponent, Coefficient] = {}
        if terms:
            for (i, j), c in terms.items():
                if i < 0 or j < 0:
                    raise ValueError("exponents must be non-negative")
                c = as_coeff(c, mode)
                if c:
                    clean[(i, j)] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *args):  # pragma: no cover - immutability guard
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(mode: str = RATIONAL) -> "Polynomial":
        return Polynomial({}, mode)

    @staticmethod
    def const(value, mode: str = RATIONAL) -> "Polynomial":
        return Polynomial({(0, 0): as_coeff(value, mode)}, mode)

    @staticmethod
    def variable(name: str, mode: str = RATIONAL) -> "Polynomial":
        if name == "x":
            return Polynomial({(1, 0): 1}, mode)
        if name == "y":
            return Polynomial({(0, 1): 1}, mode)
        raise ValueError(f"unknown variable {name!r}")

    @staticmethod
    def monomial(i: int, j: int, coeff, mode: str = RATIONAL) -> "Polynomial":
        return Polynomial({(i, j): coeff}, mode)

    # -- ring operations ----------------------------------------------

    def _check_mode(self, other: "Polynomial") -> None:
        if self.mode != other.mode:
            raise FieldMismatchError(
                f"field modes differ: {self.mode} vs {other.mode}")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_mode(other)
        acc = dict(self.terms)
        zero = coeff_zero(self.mode)
        for ij, c in other.terms.items():
            acc[ij] = acc.get(ij, zero) + c
        return Polynomial(acc, self.mode)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_mode(other)
        acc = dict(self.terms)
        zero = coeff_zero(self.mode)
        for ij, c in other.terms.items():
            acc[ij] = acc.get(ij, zero) - c
        return Polynomial(acc, self.mode)

    def __neg__(self) -> "Polynomial":
        return Polynomial({ij: -c for ij, c in self.terms.items()}, self.mode)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check_mode(other)
            acc: dict[Exponent, Coefficient] = {}
            zero = coeff_zero(self.mode)
            for (i1, j1), c1 in self.terms.items():
                for (i2, j2), c2 in other.terms.items():
                    key = (i1 + i2, j1 + j2)
                    acc[key] = acc.get(key, zero) + c1 * c2
            return Polynomial(acc, self.mode)
        return self.scale(other)

    def __rmul__(self, other) -> "Polynomial":
        return self.scale(other)

    def scale(self, value) -> "Polynomial":
        c = as_coeff(value, self.mode)
        if not c:
            return Polynomial.zero(self.mode)
        return Polynomial({ij: t * c for ij, t in self.terms.items()}, self.mode)

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial power requires a non-negative integer")
        result = Polynomial.const(1, self.mode)
        for _ in range(n):
            result = result * self
        return result

    # -- comparisons ---------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.mode == other.mode and self.terms == other.terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.mode, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- queries --------------------------------------------------------

    def degree(self):
        """Total degree, or NEG_INF for the zero polynomial."""
        if not self.terms:
            return NEG_INF
        return max(i + j for i, j in self.terms)

    def degree_in(self, var: str) -> Union[int, float]:
        if not self.terms:
            return NEG_INF
        k = 0 if var == "x" else 1
        return max(ij[k] for ij in self.terms)

    def coeff(self, i: int, j: int) -> Coefficient:
        return self.terms.get((i, j), coeff_zero(self.mode))

    def is_constant(self) -> bool:
        return all(ij == (0, 0) for ij in self.terms)

    def constant_value(self) -> Coefficient:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.coeff(0, 0)

    def is_monic_in_y(self) -> bool:
        """True when the top power of y carries the constant coefficient 1."""
        dy = self.degree_in("y")
        if dy is NEG_INF:
            return False
        top = [(i, j) for i, j in self.terms if j == dy]
        return top == [(0, dy)] and self.coeff(0, dy) == coeff_one(self.mode)

    # -- rendering -------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponent, Coefficient]]:
        """Terms in graded-lex order, y before x."""
        return sorted(self.terms.items(),
                      key=lambda item: (-(item[0][0] + item[0][1]), -item[0][1]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces: list[str] = []
        for (i, j), c in self.sorted_terms():
            mono = []
            if i:
                mono.append("x" if i == 1 else f"x^{i}")
            if j:
                mono.append("y" if j == 1 else f"y^{j}")
            body = "*".join(mono)
            sign, mag = _signed_coeff_text(c)
            if body:
                text = body if mag == "1" else f"{mag}*{body}"
            else:
                text = mag
            if not pieces:
                pieces.append(text if sign > 0 else f"-{text}")
            else:
                pieces.append(("+ " if sign > 0 else "- ") + text)
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def _signed_coeff_text(c: Coefficient) -> tuple[int, str]:
    """Split a coefficient into a printable sign and magnitude text."""
    if isinstance(c, Fraction):
        return (1, str(c)) if c > 0 else (-1, str(-c))
    if not c.im:
        return (1, str(c.re)) if c.re > 0 else (-1, str(-c.re))
    if not c.re:
        if c.im > 0:
            return 1, ("i" if c.im == 1 else f"{c.im}*i")
        return -1, ("i" if c.im == -1 else f"{-c.im}*i")
    return 1, render_coeff(c)


@dataclass(frozen=True)
class PolyMap:
    """An ordered pair (P, Q) of polynomials, a map of the plane."""

    p: Polynomial
    q: Polynomial

    def __post_init__(self):
        if self.p.mode != self.q.mode:
            raise FieldMismatchError("PolyMap components must share field mode")

    @property
    def mode(self) -> str:
        return self.p.mode

    @staticmethod
    def identity(mode: str = RATIONAL) -> "PolyMap":
        return PolyMap(Polynomial.variable("x", mode), Polynomial.variable("y", mode))

    def __str__(self) -> str:
        return f"{self.p}; {self.q}"


@dataclass(frozen=True)
class LinearChange:
    """Audit record for monic normalization: source shear x -> x + lam*y and
    the target-side scalings applied to each component."""

    lam: Coefficient
    scale_p: Coefficient
    scale_q: Coefficient


def degree(p: Polynomial):
    return p.degree()


def leading_form(p: Polynomial) -> Polynomial:
    """The homogeneous top-total-degree part of a nonzero polynomial."""
    if not p:
        raise ValueError("leading form of the zero polynomial is undefined")
    d = p.degree()
    return Polynomial({ij: c for ij, c in p.terms.items() if ij[0] + ij[1] == d},
                      p.mode)


def partial(p: Polynomial, var: str) -> Polynomial:
    """Formal partial derivative with respect to "x" or "y"."""
    if var not in ("x", "y"):
        raise ValueError("var must be 'x' or 'y'")
    acc: dict[Exponent, Coefficient] = {}
    for (i, j), c in p.terms.items():
        if var == "x" and i > 0:
            acc[(i - 1, j)] = c * as_coeff(i, p.mode)
        elif var == "y" and j > 0:
            acc[(i, j - 1)] = c * as_coeff(j, p.mode)
    return Polynomial(acc, p.mode)


def jacobian(f: PolyMap) -> Polynomial:
    """The Jacobian determinant P_x*Q_y - P_y*Q_x."""
    return (partial(f.p, "x") * partial(f.q, "y")
            - partial(f.p, "y") * partial(f.q, "x"))


def evaluate(p: Polynomial, x0, y0) -> Coefficient:
    """Exact evaluation at coefficient arguments."""
    x0 = as_coeff(x0, p.mode)
    y0 = as_coeff(y0, p.mode)
    xpow = _coeff_powers(x0, p.degree_in("x"), p.mode)
    ypow = _coeff_powers(y0, p.degree_in("y"), p.mode)
    acc = coeff_zero(p.mode)
    for (i, j), c in p.terms.items():
        acc = acc + c * xpow[i] * ypow[j]
    return acc


def _coeff_powers(c: Coefficient, n, mode: str) -> list[Coefficient]:
    if n is NEG_INF:
        n = 0
    powers = [coeff_one(mode)]
    for _ in range(int(n)):
        powers.append(powers[-1] * c)
    return powers


def substitute(p: Polynomial, px: Polynomial, py: Polynomial) -> Polynomial:
    """p(px, py), exactly."""
    p._check_mode(px)
    p._check_mode(py)
    max_i = 0 if p.degree_in("x") is NEG_INF else int(p.degree_in("x"))
    max_j = 0 if p.degree_in("y") is NEG_INF else int(p.degree_in("y"))
    xpow = _poly_powers(px, max_i)
    ypow = _poly_powers(py, max_j)
    acc = Polynomial.zero(p.mode)
    for (i, j), c in p.terms.items():
        acc = acc + (xpow[i] * ypow[j]).scale(c)
    return acc


def _poly_powers(p: Polynomial, n: int) -> list[Polynomial]:
    powers = [Polynomial.const(1, p.mode)]
    for _ in range(n):
        powers.append(powers[-1] * p)
    return powers


def compose(outer: PolyMap, inner: PolyMap) -> PolyMap:
    """outer after inner: (outer.p(inner.p, inner.q), outer.q(inner.p, inner.q))."""
    if outer.mode != inner.mode:
        raise FieldMismatchError("composed maps must share field mode")
    return PolyMap(substitute(outer.p, inner.p, inner.q),
                   substitute(outer.q, inner.p, inner.q))


def monic_normalize(f: PolyMap) -> tuple[PolyMap, LinearChange]:
    """Precompose with the smallest shear x -> x + lam*y (lam = 0, 1, 2, ...)
    that keeps both leading forms nonzero at (lam, 1), then rescale each
    component so it is monic in y of its total degree."""
    if not f.p or not f.q:
        raise ValueError("monic_normalize requires nonzero components")
    lf_p = leading_form(f.p)
    lf_q = leading_form(f.q)
    mode = f.mode
    lam = 0
    while True:
        vp = evaluate(lf_p, lam, 1)
        vq = evaluate(lf_q, lam, 1)
        if vp and vq:
            break
        lam += 1
    lam_c = as_coeff(lam, mode)
    if lam:
        shear_x = Polynomial({(1, 0): 1, (0, 1): lam_c}, mode)
        shear_y = Polynomial.variable("y", mode)
        p = substitute(f.p, shear_x, shear_y)
        q = substitute(f.q, shear_x, shear_y)
    else:
        p, q = f.p, f.q
    one = coeff_one(mode)
    sp = one / vp
    sq = one / vq
    return (PolyMap(p.scale(sp), q.scale(sq)),
            LinearChange(lam=lam_c, scale_p=sp, scale_q=sq))
