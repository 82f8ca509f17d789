"""Tame decomposition of plane polynomial automorphisms.

The degree-reduction loop peels one elementary factor per round: when the
bigger component's leading form is a constant multiple of a power of the
smaller one's, subtracting that multiple strictly drops the degree.  A map
survives to the end iff it is a composition of affine and triangular
automorphisms; everything else is rejected with machine-checkable evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .polynomials import (
    Coefficient,
    NEG_INF,
    PolyMap,
    Polynomial,
    as_coeff,
    coeff_one,
    coeff_zero,
    jacobian,
    leading_form,
    render_coeff,
)

# Rejection reasons
NON_CONSTANT_JACOBIAN = "non_constant_jacobian"
ZERO_JACOBIAN = "zero_jacobian"
DEGREE_NOT_DIVISIBLE = "degree_not_divisible"
LEADING_FORM_MISMATCH = "leading_form_mismatch"
SINGULAR_AFFINE_TAIL = "singular_affine_tail"
DEGENERATE_COMPONENT = "degenerate_component"


@dataclass(frozen=True)
class RejectionEvidence:
    """Why a map is not a tame automorphism, with the offending object."""

    reason: str
    detail: object

    def __str__(self) -> str:
        return f"{self.reason}: {self.detail}"


class RejectionError(Exception):
    """Carries RejectionEvidence out of the decomposition pipeline."""

    def __init__(self, evidence: RejectionEvidence):
        super().__init__(str(evidence))
        self.evidence = evidence


def _reject(reason: str, detail) -> "RejectionError":
    return RejectionError(RejectionEvidence(reason, detail))


@dataclass(frozen=True)
class Affine:
    """(x, y) -> (a*x + b*y + e, c*x + d*y + f) with ad - bc != 0."""

    a: Coefficient
    b: Coefficient
    c: Coefficient
    d: Coefficient
    e: Coefficient
    f: Coefficient

    def det(self) -> Coefficient:
        return self.a * self.d - self.b * self.c

    def __post_init__(self):
        if not self.det():
            raise ValueError("affine factor must have ad - bc != 0")

    @staticmethod
    def identity(mode: str) -> "Affine":
        one = coeff_one(mode)
        zero = coeff_zero(mode)
        return Affine(one, zero, zero, one, zero, zero)

    def apply(self, m: PolyMap) -> PolyMap:
        return PolyMap(m.p.scale(self.a) + m.q.scale(self.b)
                       + Polynomial.const(self.e, m.mode),
                       m.p.scale(self.c) + m.q.scale(self.d)
                       + Polynomial.const(self.f, m.mode))

    def inverse(self) -> "Affine":
        det = self.det()
        ia, ib = self.d / det, -self.b / det
        ic, id_ = -self.c / det, self.a / det
        return Affine(ia, ib, ic, id_,
                      -(ia * self.e + ib * self.f),
                      -(ic * self.e + id_ * self.f))

    def jacobian_const(self) -> Coefficient:
        return self.det()

    def is_identity(self) -> bool:
        return (self.a == self.d and not self.b and not self.c
                and not self.e and not self.f
                and self.a * self.a == self.a and bool(self.a))


def _check_shift_poly(shift: Polynomial, var: str) -> None:
    for (i, j) in shift.terms:
        banned = i if var == "y" else j
        if banned:
            raise ValueError(f"triangular shift must be univariate in {var}")
    d = shift.degree()
    if shift and (d is NEG_INF or d < 2):
        raise ValueError("triangular shift must have degree >= 2 or be zero")
    if shift:
        low = min(i + j for i, j in shift.terms)
        if low < 2:
            raise ValueError(
                "degree <= 1 content of a triangular shift belongs in an "
                "affine factor")


@dataclass(frozen=True)
class TriangularX:
    """(x, y) -> (x + p(y), y) with p a polynomial in y of degree >= 2."""

    shift: Polynomial

    def __post_init__(self):
        _check_shift_poly(self.shift, "y")

    def apply(self, m: PolyMap) -> PolyMap:
        return PolyMap(m.p + _eval_shift(self.shift, m.q, "y"), m.q)

    def inverse(self) -> "TriangularX":
        return TriangularX(-self.shift)

    def jacobian_const(self) -> Coefficient:
        return coeff_one(self.shift.mode)


@dataclass(frozen=True)
class TriangularY:
    """(x, y) -> (x, y + q(x)) with q a polynomial in x of degree >= 2."""

    shift: Polynomial

    def __post_init__(self):
        _check_shift_poly(self.shift, "x")

    def apply(self, m: PolyMap) -> PolyMap:
        return PolyMap(m.p, m.q + _eval_shift(self.shift, m.p, "x"))

    def inverse(self) -> "TriangularY":
        return TriangularY(-self.shift)

    def jacobian_const(self) -> Coefficient:
        return coeff_one(self.shift.mode)


Factor = Union[Affine, TriangularX, TriangularY]


def _eval_shift(shift: Polynomial, at: Polynomial, var: str) -> Polynomial:
    """Evaluate a univariate shift polynomial at another polynomial."""
    acc = Polynomial.zero(at.mode)
    if not shift:
        return acc
    powers = {0: Polynomial.const(1, at.mode)}
    top = int(shift.degree())
    cur = Polynomial.const(1, at.mode)
    for k in range(1, top + 1):
        cur = cur * at
        powers[k] = cur
    for (i, j), c in shift.terms.items():
        k = j if var == "y" else i
        acc = acc + powers[k].scale(c)
    return acc


@dataclass(frozen=True)
class Decomposition:
    """Ordered factors, first-applied-first: [f1, ..., fn] is fn o ... o f1."""

    factors: tuple[Factor, ...]
    mode: str = "rational"


def recompose(d: Decomposition) -> PolyMap:
    """Fold the factors back into a map, respecting the list convention."""
    cur = PolyMap.identity(d.mode)
    for factor in d.factors:
        cur = factor.apply(cur)
    return cur


def factor_jacobian(factor: Factor) -> Coefficient:
    return factor.jacobian_const()


def is_keller(f: PolyMap) -> tuple[bool, Polynomial]:
    """True iff the Jacobian determinant is a nonzero constant; returns it."""
    j = jacobian(f)
    return bool(j) and j.is_constant(), j


def leading_match(big: Polynomial, small: Polynomial
                  ) -> Optional[tuple[int, Coefficient]]:
    """(m, c) with leading_form(big) = c * leading_form(small)**m, if any."""
    db, ds = big.degree(), small.degree()
    if db is NEG_INF or ds is NEG_INF or ds < 1 or db < ds:
        raise ValueError("leading_match requires degree(big) >= degree(small) >= 1")
    if db % ds:
        return None
    m = db // ds
    lf_big = leading_form(big)
    lf_small_m = leading_form(small) ** m
    if set(lf_big.terms) != set(lf_small_m.terms):
        return None
    items = iter(lf_small_m.terms.items())
    ij, base = next(items)
    c = lf_big.terms[ij] / base
    if lf_small_m.scale(c) != lf_big:
        return None
    return m, c


def reduce_step(f: PolyMap) -> tuple[Factor, PolyMap]:
    """One round of degree reduction.

    Subtracts c * (smaller component)**m from the bigger component via a
    triangular factor (an affine shear when m = 1) and returns the factor
    together with the strictly smaller residual map.
    """
    dp, dq = f.p.degree(), f.q.degree()
    if dp is NEG_INF or dq is NEG_INF or dp < 1 or dq < 1:
        raise _reject(DEGENERATE_COMPONENT, f.p if dp < 1 else f.q)
    p_is_big = dp >= dq
    big, small = (f.p, f.q) if p_is_big else (f.q, f.p)
    db, ds = (dp, dq) if p_is_big else (dq, dp)
    if db % ds:
        raise _reject(DEGREE_NOT_DIVISIBLE, (int(db), int(ds)))
    match = leading_match(big, small)
    if match is None:
        raise _reject(LEADING_FORM_MISMATCH, leading_form(big))
    m, c = match
    mode = f.mode
    if m >= 2:
        mono = Polynomial.monomial(0 if p_is_big else m,
                                   m if p_is_big else 0, -c, mode)
        factor: Factor = TriangularX(mono) if p_is_big else TriangularY(mono)
    else:
        one = coeff_one(mode)
        zero = coeff_zero(mode)
        if p_is_big:
            factor = Affine(one, -c, zero, one, zero, zero)
        else:
            factor = Affine(one, zero, -c, one, zero, zero)
    residual = factor.apply(f)
    reduced = residual.p if p_is_big else residual.q
    if reduced.degree() is NEG_INF or reduced.degree() < 1:
        raise _reject(DEGENERATE_COMPONENT, reduced)
    assert reduced.degree() < db, "reduction must strictly drop the degree"
    return factor, residual


def _affine_tail(f: PolyMap) -> Affine:
    """Extract the affine factor from a map whose components are degree <= 1."""
    a, b, e = f.p.coeff(1, 0), f.p.coeff(0, 1), f.p.coeff(0, 0)
    c, d, f2 = f.q.coeff(1, 0), f.q.coeff(0, 1), f.q.coeff(0, 0)
    if not (a * d - b * c):
        raise _reject(SINGULAR_AFFINE_TAIL, (render_coeff(a), render_coeff(b),
                                             render_coeff(c), render_coeff(d)))
    return Affine(a, b, c, d, e, f2)


def decompose(f: PolyMap) -> Decomposition:
    """Write f as a composition of triangular and affine factors.

    Raises RejectionError with evidence when f is not a tame automorphism.
    The returned list satisfies recompose(decompose(f)) == f exactly.
    """
    for comp in (f.p, f.q):
        if comp.degree() is NEG_INF or comp.degree() < 1:
            raise _reject(DEGENERATE_COMPONENT, comp)
    ok, j = is_keller(f)
    if not ok:
        raise _reject(ZERO_JACOBIAN if not j else NON_CONSTANT_JACOBIAN, j)
    steps: list[Factor] = []
    cur = f
    while max(cur.p.degree(), cur.q.degree()) >= 2:
        factor, cur = reduce_step(cur)
        steps.append(factor)
    tail = _affine_tail(cur)
    factors = (tail,) + tuple(s.inverse() for s in reversed(steps))
    result = Decomposition(factors, f.mode)
    if recompose(result) != f:
        raise RuntimeError("internal error: recomposition mismatch")
    return result


def invert(f: PolyMap) -> PolyMap:
    """The exact inverse map; compose(invert(f), f) is the identity."""
    d = decompose(f)
    cur = PolyMap.identity(d.mode)
    for factor in reversed(d.factors):
        cur = factor.inverse().apply(cur)
    return cur


def factor_to_json(factor: Factor) -> dict:
    if isinstance(factor, Affine):
        return {
            "type": "affine",
            "matrix": [[render_coeff(factor.a), render_coeff(factor.b)],
                       [render_coeff(factor.c), render_coeff(factor.d)]],
            "shift": [render_coeff(factor.e), render_coeff(factor.f)],
        }
    axis = "x" if isinstance(factor, TriangularX) else "y"
    return {"type": "triangular", "axis": axis, "poly": str(factor.shift)}


def decomposition_to_json(d: Decomposition) -> list[dict]:
    return [factor_to_json(factor) for factor in d.factors]
