"""Newton-Puiseux expansions at infinity of plane curves.

Solves h(x, y) = 0 for y as fractional-power series in x at x -> infinity,
via the classical Newton polygon iteration: pick an edge of the exponent
polygon, solve its face polynomial for the leading coefficient, substitute
and recurse.  Exponents are exact Fractions throughout; coefficients are
complex floats, with roots of face polynomials found by simultaneous
(Durand-Kerner) iteration.

The working representation is a dict mapping ``(x_exponent, z_power)`` to a
complex coefficient, where z is the still-unknown tail of the series being
built.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Optional, Sequence

from .polynomials import NEG_INF, Polynomial, coeff_to_complex

TWO_PI = 2.0 * math.pi


class PuiseuxError(Exception):
    """Base class for expansion failures."""


class NotMonicError(PuiseuxError):
    pass


class RootRefinementError(PuiseuxError):
    def __init__(self, message: str, face: tuple[complex, ...]):
        super().__init__(message)
        self.face = face


class InsufficientTruncationError(PuiseuxError):
    pass


class NonSimpleRootError(PuiseuxError):
    pass


class TruncationTooShallowError(PuiseuxError):
    pass


class DegenerateThetaError(PuiseuxError):
    pass


@dataclass(frozen=True)
class PuiseuxConfig:
    """Numeric policy for the expansion engine.

    Coefficients live in double precision; exponent bookkeeping is exact.
    trunc_terms = None means 2 * deg(h) + 4 significant terms.  clean_tol is
    the float-noise floor used while substituting; drop_tol is the
    significance threshold for emitted series terms and face levels.  When a
    branch's coefficients grow geometrically, double precision runs out of
    dynamic range at some depth; past it the engine emits the certified
    prefix with a truncation marker rather than fabricating terms.
    """

    drop_tol: float = 1e-10
    clean_tol: float = 5e-14
    root_tol: float = 1e-12
    simple_tol: float = 1e-8
    cluster_tol: float = 1e-6
    max_iter: int = 200
    trunc_terms: Optional[int] = None


DEFAULT_CONFIG = PuiseuxConfig()


# ---------------------------------------------------------------------------
# dense complex univariate helpers (ascending coefficient lists)

def polyval(coeffs: Sequence[complex], z: complex) -> complex:
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def polyder(coeffs: Sequence[complex]) -> tuple[complex, ...]:
    return tuple(k * c for k, c in enumerate(coeffs))[1:] or (0j,)


def polymul(a: Sequence[complex], b: Sequence[complex]) -> tuple[complex, ...]:
    out = [0j] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return tuple(out)


def _strip(coeffs: Sequence[complex], rel_tol: float) -> list[complex]:
    cs = list(coeffs)
    scale = max((abs(c) for c in cs), default=0.0)
    if scale == 0.0:
        return []
    while cs and abs(cs[-1]) <= rel_tol * scale:
        cs.pop()
    return cs


def all_roots(coeffs: Sequence[complex],
              cfg: PuiseuxConfig = DEFAULT_CONFIG) -> list[complex]:
    """All complex roots by Durand-Kerner simultaneous iteration.

    Multiple roots stall the iteration on a ring of radius about
    eps**(1/multiplicity); the sweep therefore stops on stagnation and the
    approximants are refined afterwards by clustered_roots, which is the
    entry point the expansion machinery uses.
    """
    cs = _strip(coeffs, cfg.drop_tol)
    if len(cs) <= 1:
        return []
    lc = cs[-1]
    monic = [c / lc for c in cs]
    n = len(monic) - 1
    if n == 1:
        return [-monic[0]]
    radius = 1.0 + max(abs(c) for c in monic[:-1])
    z = [radius * (0.4 + 0.9j) ** (k + 1) for k in range(n)]
    best = float("inf")
    stagnant = 0
    for _ in range(cfg.max_iter):
        shift = 0.0
        for i in range(n):
            num = polyval(monic, z[i])
            den = 1.0 + 0j
            for j in range(n):
                if j != i:
                    den *= z[i] - z[j]
            if den == 0:
                den = complex(cfg.root_tol)
            step = num / den
            z[i] -= step
            shift = max(shift, abs(step) / (1.0 + abs(z[i])))
        if shift <= cfg.root_tol:
            break
        if shift < 0.98 * best:
            best = shift
            stagnant = 0
        else:
            stagnant += 1
            if stagnant >= 25:
                break  # stalled on a multiple-root ring
    for w in z:
        if not (abs(w) < 1e12 * radius) or w != w:
            raise RootRefinementError(
                "root refinement diverged", tuple(coeffs))
    return sorted(z, key=lambda w: (w.real, w.imag))


def _derivative_chain(coeffs: Sequence[complex]) -> list[tuple[complex, ...]]:
    chain = [tuple(coeffs)]
    while len(chain[-1]) > 1:
        chain.append(polyder(chain[-1]))
    return chain


def _eval_scale(coeffs: Sequence[complex], z: complex) -> float:
    return sum(abs(c) * abs(z) ** k for k, c in enumerate(coeffs)) or 1.0


def _polish_cluster(chain: list[tuple[complex, ...]], center: complex,
                    mu: int, cfg: PuiseuxConfig) -> Optional[complex]:
    """Newton-refine a mu-fold root candidate on the (mu-1)-th derivative,
    where it is simple, then validate all lower derivatives vanish there."""
    target = chain[mu - 1]
    deriv = chain[mu]
    zbar = center
    for _ in range(60):
        dv = polyval(deriv, zbar)
        if dv == 0:
            return None
        step = polyval(target, zbar) / dv
        zbar -= step
        if abs(step) <= cfg.root_tol * (1.0 + abs(zbar)):
            break
    else:
        return None
    vtol = 1e-8
    for k in range(mu):
        if abs(polyval(chain[k], zbar)) > vtol * _eval_scale(chain[k], zbar):
            return None
    if mu < len(chain) - 1:
        if abs(polyval(chain[mu], zbar)) <= vtol * _eval_scale(chain[mu], zbar):
            return None  # still a root of the next derivative: mu too small
    return zbar


def clustered_roots(coeffs: Sequence[complex],
                    cfg: PuiseuxConfig = DEFAULT_CONFIG
                    ) -> list[tuple[complex, int]]:
    """Roots with certified multiplicities: (center, multiplicity) pairs.

    Greedy largest-first grouping of the Durand-Kerner approximants, with
    each candidate group validated and polished via the derivative chain.
    """
    approx = all_roots(coeffs, cfg)
    if not approx:
        return []
    chain = _derivative_chain(_strip(coeffs, cfg.drop_tol))
    remaining = list(approx)
    out: list[tuple[complex, int]] = []
    while remaining:
        seed = remaining[0]
        by_dist = sorted(remaining, key=lambda w: abs(w - seed))
        placed = False
        for mu in range(len(by_dist), 0, -1):
            members = by_dist[:mu]
            center = sum(members) / mu
            polished = _polish_cluster(chain, center, mu, cfg)
            if polished is not None:
                out.append((polished, mu))
                for w in members:
                    remaining.remove(w)
                placed = True
                break
        if not placed:
            # accept the raw approximant as a simple root (validation can
            # reject everything when conditioning is poor)
            out.append((seed, 1))
            remaining.remove(seed)
    out.sort(key=lambda t: (t[0].real, t[0].imag))
    return out


def cluster_roots(roots: Iterable[complex], tol: float
                  ) -> list[tuple[complex, int]]:
    """Group near-coincident points into (center, count) clusters."""
    clusters: list[list[complex]] = []
    for z in sorted(roots, key=lambda w: (w.real, w.imag)):
        for members in clusters:
            center = sum(members) / len(members)
            if abs(z - center) <= tol * (1.0 + abs(center)):
                members.append(z)
                break
        else:
            clusters.append([z])
    return [(sum(ms) / len(ms), len(ms)) for ms in clusters]


# ---------------------------------------------------------------------------
# series types

@dataclass(frozen=True)
class PuiseuxSeries:
    """Truncated fractional-power series at infinity.

    terms are (exponent, coefficient) pairs in strictly descending exponent
    order; ram is the lcm of the exponent denominators after normalization.
    trunc_ord marks the exponent at and below which coefficients are unknown
    (None for series that terminate exactly); residual_ord is the order of
    h(x, u) left by the truncation, used to predict residual decay.
    """

    ram: int
    terms: tuple[tuple[Fraction, complex], ...]
    trunc_ord: Optional[Fraction] = None
    residual_ord: Optional[Fraction] = None

    def coeff(self, e: Fraction) -> complex:
        for exp, c in self.terms:
            if exp == e:
                return c
        return 0j

    def evaluate(self, x: complex) -> complex:
        """Principal-branch value of the series at a complex point."""
        if x == 0:
            raise ValueError("series at infinity cannot be evaluated at 0")
        logx = cmath.log(x)
        return sum(c * cmath.exp(float(e) * logx) for e, c in self.terms)

    def render(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{_fmt_complex(c)} * x^({e.numerator}/{e.denominator})"
                          if e.denominator != 1
                          else f"{_fmt_complex(c)} * x^{e.numerator}"
                          for e, c in self.terms)

    def to_json(self) -> dict:
        return {
            "ram": self.ram,
            "terms": [{"exp": [e.numerator, e.denominator],
                       "coeff": [c.real, c.imag]} for e, c in self.terms],
            "trunc_ord": None if self.trunc_ord is None else
                         [self.trunc_ord.numerator, self.trunc_ord.denominator],
        }


def _fmt_complex(z: complex) -> str:
    re, im = z.real, z.imag
    if abs(im) < 1e-12 * max(1.0, abs(re)):
        return f"{re:.10g}"
    if abs(re) < 1e-12 * max(1.0, abs(im)):
        return f"{im:.10g}i"
    sign = "+" if im >= 0 else "-"
    return f"({re:.10g}{sign}{abs(im):.10g}i)"


@dataclass(frozen=True)
class BranchSet:
    """One representative per conjugacy class; rams sum to the y-degree."""

    branches: tuple[PuiseuxSeries, ...]
    degree_y: int

    def __post_init__(self):
        total = sum(b.ram for b in self.branches)
        if total != self.degree_y:
            raise PuiseuxError(
                f"branch ramifications sum to {total}, expected {self.degree_y}")

    def all_roots(self) -> list[PuiseuxSeries]:
        return [conjugate(b, i) for b in self.branches for i in range(b.ram)]


@dataclass(frozen=True)
class ParamSeries:
    """A truncated series with a parameter slot at its lowest exponent.

    Terms c_k sit at exponents 1 - k/m_phi for 0 <= k < n_phi, and the
    parameter occupies the slot at 1 - n_phi/m_phi.  Normalized so that the
    index gcd (including m_phi) is 1.
    """

    m_phi: int
    n_phi: int
    coeffs: tuple[tuple[int, complex], ...]  # (k, c_k), ascending k

    @property
    def theta(self) -> Fraction:
        return Fraction(self.m_phi - self.n_phi, self.m_phi)

    def fixed_terms(self) -> list[tuple[Fraction, complex]]:
        return [(Fraction(self.m_phi - k, self.m_phi), c) for k, c in self.coeffs]

    def render(self) -> str:
        parts = [f"{_fmt_complex(c)} * x^({(self.m_phi - k)}/{self.m_phi})"
                 for k, c in self.coeffs]
        th = self.theta
        parts.append(f"xi * x^({th.numerator}/{th.denominator})")
        return " + ".join(parts)

    def to_json(self) -> dict:
        th = self.theta
        return {
            "m_phi": self.m_phi,
            "n_phi": self.n_phi,
            "terms": [{"k": k,
                       "exp": [self.m_phi - k, self.m_phi],
                       "coeff": [c.real, c.imag]} for k, c in self.coeffs],
            "param_exp": [th.numerator, th.denominator],
        }


@dataclass(frozen=True)
class FaceData:
    """Top level of h(x, phi(x, xi)): exponent numerator a (over m_phi), the
    face polynomial in xi, and the exponent gap down to the next level."""

    a: int
    face_poly: tuple[complex, ...]
    tail_bound: Fraction


# ---------------------------------------------------------------------------
# working representation: dict[(Fraction exponent, z power)] -> complex

_PP = dict[tuple[Fraction, int], complex]


def _pp_from_poly(h: Polynomial) -> _PP:
    return {(Fraction(i), j): coeff_to_complex(c)
            for (i, j), c in h.terms.items()}


def _pp_clean(H: _PP, rel_tol: float) -> _PP:
    """Drop noise-level terms and rescale so the largest magnitude is 1.

    Only the zero set of H matters downstream (faces, roots, residual
    orders), so the rescaling is free and keeps the dynamic range of deep
    substitutions inside double precision.
    """
    scale = max((abs(c) for c in H.values()), default=0.0)
    if scale == 0.0:
        return {}
    cutoff = rel_tol * scale
    return {k: c / scale for k, c in H.items() if abs(c) > cutoff}


def _pp_subst(H: _PP, c: complex, e: Fraction) -> _PP:
    """Replace z by c * x**e + z."""
    out: _PP = {}
    for (ee, j), a in H.items():
        # binomial expansion of (c x^e + z)^j
        for l in range(j, -1, -1):
            key = (ee + e * (j - l), l)
            out[key] = out.get(key, 0j) + a * math.comb(j, l) * c ** (j - l)
    return out


def _upper_hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    """Upper convex hull of (j, exponent) vertices, j ascending."""
    hull: list[tuple[int, Fraction]] = []
    for p in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            cross = (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1)
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def _faces(H: _PP, e_prev: Optional[Fraction]
           ) -> list[tuple[Fraction, list[complex], int, int]]:
    """Polygon faces usable for the next term: (e, face coeffs, j1, j2).

    Only edges with exponent strictly below e_prev qualify; face coefficient
    lists are indexed from j1 (ascending z-power along the supporting line).
    """
    tops: dict[int, Fraction] = {}
    for (e, j), _ in H.items():
        if j not in tops or e > tops[j]:
            tops[j] = e
    hull = _upper_hull([(j, e) for j, e in tops.items()])
    faces = []
    for (j1, e1), (j2, e2) in zip(hull, hull[1:]):
        e = (e1 - e2) / (j2 - j1)
        if e_prev is not None and e >= e_prev:
            continue
        level = e1 + e * j1
        coeffs = [H.get((level - e * j, j), 0j) for j in range(j1, j2 + 1)]
        faces.append((e, coeffs, j1, j2))
    return faces


def _make_series(terms: list[tuple[Fraction, complex]],
                 trunc_ord: Optional[Fraction],
                 residual_ord: Optional[Fraction],
                 drop_tol: float) -> PuiseuxSeries:
    kept = tuple((e, c) for e, c in terms if abs(c) > drop_tol)
    ram = 1
    for e, _ in kept:
        ram = lcm(ram, e.denominator)
    return PuiseuxSeries(ram=ram, terms=kept, trunc_ord=trunc_ord,
                         residual_ord=residual_ord)


def _expand_roots(h: Polynomial, trunc_terms: int,
                  cfg: PuiseuxConfig) -> list[PuiseuxSeries]:
    """All deg_y(h) Puiseux roots at infinity, each counted once.

    Every stack node owes a known number of roots (the multiplicity of the
    face root that spawned it).  When the numerics cannot resolve deeper
    structure, the owed roots are emitted as truncated prefixes instead of
    being lost, so the root count is exact by construction.
    """
    results: list[PuiseuxSeries] = []
    deg_y = int(h.degree_in("y"))
    stack: list[tuple[_PP, list, Optional[Fraction], int]] = [
        (_pp_from_poly(h), [], None, deg_y)]
    while stack:
        H, terms, e_prev, owed = stack.pop()
        H = _pp_clean(H, cfg.clean_tol)

        def emit_truncated(count: int) -> None:
            residual_ord = max((e for (e, j) in H if j == 0), default=None)
            trunc_ord = e_prev if e_prev is not None else Fraction(0)
            results.extend(
                [_make_series(terms, trunc_ord, residual_ord,
                              cfg.drop_tol)] * count)

        if not H:
            emit_truncated(owed)
            continue
        r = min(j for (_, j) in H)
        if r >= 1:
            # z = 0 solves exactly: the accumulated series is a full root
            exact = _make_series(terms, None, None, cfg.drop_tol)
            results.extend([exact] * min(r, owed))
            owed -= min(r, owed)
            H = {(e, j - r): c for (e, j), c in H.items()}
        if owed == 0:
            continue
        if max(j for (_, j) in H) == 0:
            emit_truncated(owed)
            continue
        faces = _faces(H, e_prev)
        if not faces:
            emit_truncated(owed)
            continue
        if len(terms) >= trunc_terms:
            residual_ord = max((e for (e, j) in H if j == 0), default=None)
            trunc_ord = max(e for (e, _, _, _) in faces)
            truncated = _make_series(terms, trunc_ord, residual_ord,
                                     cfg.drop_tol)
            results.extend([truncated] * owed)
            continue
        delivered = 0
        for e, coeffs, j1, j2 in faces:
            span = j2 - j1
            face_total = 0
            for c, mu in clustered_roots(coeffs, cfg):
                mu = min(mu, span - face_total, owed - delivered - face_total)
                if mu <= 0:
                    break
                stack.append((_pp_subst(H, c, e), terms + [(e, c)], e, mu))
                face_total += mu
            delivered += face_total
        if delivered < owed:
            emit_truncated(owed - delivered)
    return results


def _series_key(u: PuiseuxSeries):
    return tuple((-float(e), -c.real, -c.imag) for e, c in u.terms)


def _series_match(u: PuiseuxSeries, v: PuiseuxSeries, tol: float) -> bool:
    if u.ram != v.ram or len(u.terms) != len(v.terms):
        return False
    scale = max([1.0] + [abs(c) for _, c in u.terms])
    for (e1, c1), (e2, c2) in zip(u.terms, v.terms):
        if e1 != e2 or abs(c1 - c2) > tol * scale:
            return False
    return True


def expansions_at_infinity(h: Polynomial, trunc_terms: Optional[int] = None,
                           cfg: PuiseuxConfig = DEFAULT_CONFIG) -> BranchSet:
    """All Puiseux roots of a monic-in-y curve at x -> infinity, grouped into
    conjugacy classes (one representative per irreducible branch)."""
    if not h.is_monic_in_y():
        raise NotMonicError("h must be monic in y (normalize first)")
    deg_y = int(h.degree_in("y"))
    if deg_y < 1:
        raise NotMonicError("h must have positive degree in y")
    if trunc_terms is None:
        trunc_terms = cfg.trunc_terms or (2 * int(h.degree()) + 4)
    roots = _expand_roots(h, trunc_terms, cfg)
    if len(roots) != deg_y:
        raise PuiseuxError(
            f"found {len(roots)} roots, expected {deg_y}")
    pool = sorted(roots, key=_series_key)
    reps: list[PuiseuxSeries] = []
    while pool:
        u = pool.pop(0)
        for i in range(1, u.ram):
            ui = conjugate(u, i)
            for k, w in enumerate(pool):
                if _series_match(ui, w, cfg.cluster_tol):
                    del pool[k]
                    break
            else:
                raise PuiseuxError(
                    "conjugacy grouping failed; deepen the truncation")
        reps.append(u)
    return BranchSet(tuple(reps), deg_y)


def multiplicity(u: PuiseuxSeries) -> int:
    """The ramification index after gcd normalization (the series is stored
    normalized, so this is just the ram field)."""
    return u.ram


def conjugate(u: PuiseuxSeries, i: int) -> PuiseuxSeries:
    """Substitute x**(1/m) -> eps**i x**(1/m) with eps = exp(2 pi i / m)."""
    if not 0 <= i < u.ram:
        raise ValueError(f"conjugation index {i} out of range [0, {u.ram})")
    if i == 0:
        return u
    m = u.ram
    new_terms = []
    for e, c in u.terms:
        k = e * m
        assert k.denominator == 1
        angle = TWO_PI * ((i * int(k)) % m) / m
        new_terms.append((e, c * cmath.exp(1j * angle)))
    return PuiseuxSeries(ram=u.ram, terms=tuple(new_terms),
                         trunc_ord=u.trunc_ord, residual_ord=u.residual_ord)


def ord_at_infinity(s: PuiseuxSeries):
    """Largest exponent with a stored coefficient; NEG_INF for the zero
    series (for a truncated series this means: indistinguishable from zero
    down to trunc_ord)."""
    if not s.terms:
        return NEG_INF
    return s.terms[0][0]


# ---------------------------------------------------------------------------
# series-in-x arithmetic used by the product and substitution operations

_Series = dict[Fraction, complex]


def _series_mul(a: _Series, b: _Series) -> _Series:
    out: _Series = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            key = e1 + e2
            out[key] = out.get(key, 0j) + c1 * c2
    return out


def _series_add(a: _Series, b: _Series, scale: complex = 1.0) -> _Series:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0j) + scale * c
    return out


def fact1_product(u: PuiseuxSeries, d: int,
                  cfg: PuiseuxConfig = DEFAULT_CONFIG,
                  frac_tol: float = 1e-8) -> dict[tuple[int, int], complex]:
    """Expand prod_i (y - u(eps^i x^(1/d))) back into a polynomial.

    Returns exponent-pair -> complex coefficient.  Raises
    InsufficientTruncationError when the truncation cannot certify all
    exponents >= 0 or a fractional-exponent term fails to cancel.
    """
    if d != u.ram:
        raise ValueError("d must equal the ramification index of u")
    lead = ord_at_infinity(u)
    lead_pos = max(float(lead), 0.0) if lead is not NEG_INF else 0.0
    if u.trunc_ord is not None:
        determined = float(u.trunc_ord) + (d - 1) * lead_pos
        if determined > 0.0:
            raise InsufficientTruncationError(
                f"truncation order {u.trunc_ord} cannot determine all "
                f"polynomial exponents; deepen to below {-(d - 1) * lead_pos}")
    else:
        determined = float("-inf")
    # polynomial in y whose coefficients are series in x
    prod: list[_Series] = [{Fraction(0): 1.0 + 0j}]
    for i in range(d):
        ui = conjugate(u, i)
        neg_ui = {e: -c for e, c in ui.terms}
        new: list[_Series] = [{} for _ in range(len(prod) + 1)]
        for j, series in enumerate(prod):
            new[j + 1] = _series_add(new[j + 1], series)
            if neg_ui:
                new[j] = _series_add(new[j], _series_mul(series, neg_ui))
        prod = new
    out: dict[tuple[int, int], complex] = {}
    scale = max([1.0] + [abs(c) for series in prod for c in series.values()])
    for j, series in enumerate(prod):
        for e, c in series.items():
            if float(e) < determined:
                continue
            if e.denominator == 1 and e >= 0:
                if abs(c) > frac_tol * scale:
                    out[(int(e), j)] = c
            elif abs(c) > frac_tol * scale:
                raise InsufficientTruncationError(
                    f"uncancelled non-polynomial term x^{e} y^{j} "
                    f"of size {abs(c):.3g}")
    return out


def substitute_param(h: Polynomial, phi: ParamSeries,
                     cfg: PuiseuxConfig = DEFAULT_CONFIG) -> FaceData:
    """Top level of h(x, phi(x, xi)) collected by powers of x**(1/m_phi)."""
    if not h:
        raise ValueError("substitute_param requires a nonzero polynomial")
    m = phi.m_phi
    theta = phi.theta
    fixed: _Series = {e: c for e, c in phi.fixed_terms()}
    # powers of phi as polynomials in xi with series coefficients
    max_j = int(h.degree_in("y")) if h.degree_in("y") is not NEG_INF else 0
    phi_pows: list[list[_Series]] = [[{Fraction(0): 1.0 + 0j}]]
    base: list[_Series] = [dict(fixed), {theta: 1.0 + 0j}]
    for _ in range(max_j):
        prev = phi_pows[-1]
        nxt: list[_Series] = [{} for _ in range(len(prev) + 1)]
        for l, series in enumerate(prev):
            for dl, bs in enumerate(base):
                if bs:
                    nxt[l + dl] = _series_add(nxt[l + dl],
                                              _series_mul(series, bs))
        phi_pows.append(nxt)
    # accumulate h(x, phi): level[exponent][xi_power]
    levels: dict[Fraction, dict[int, complex]] = {}
    for (i, j), coeff in h.terms.items():
        c = coeff_to_complex(coeff)
        for l, series in enumerate(phi_pows[j]):
            for e, s in series.items():
                key = e + i
                lev = levels.setdefault(key, {})
                lev[l] = lev.get(l, 0j) + c * s
    scale = max(abs(c) for lev in levels.values() for c in lev.values())
    cutoff = cfg.drop_tol * scale
    live = sorted((e for e, lev in levels.items()
                   if any(abs(c) > cutoff for c in lev.values())),
                  reverse=True)
    if not live:
        raise PuiseuxError("substitution produced no significant terms")
    top = live[0]
    a = top * m
    assert a.denominator == 1
    lev = levels[top]
    face = [lev.get(l, 0j) for l in range(max(lev) + 1)]
    while face and abs(face[-1]) <= cutoff:
        face.pop()
    tail_bound = (top - live[1]) if len(live) > 1 else Fraction(0)
    return FaceData(a=int(a), face_poly=tuple(face), tail_bound=tail_bound)


def lift_simple_root(h: Polynomial, phi: ParamSeries, c: complex,
                     trunc_terms: int,
                     cfg: PuiseuxConfig = DEFAULT_CONFIG) -> PuiseuxSeries:
    """Extend phi(x, c + lower terms) to a series with h(x, u) = 0 to the
    truncation order, by iterated linearized corrections.

    Requires c to be a simple root of the face polynomial of (h, phi);
    refuses non-simple roots rather than branching.
    """
    face = substitute_param(h, phi, cfg)
    h0 = face.face_poly
    scale = max([1.0] + [abs(v) for v in h0])
    # residual gate: refinement stops on steps of size root_tol, which the
    # derivative amplifies into a residual of about root_tol * scale * deg
    scale_at_c = sum(abs(v) * abs(c) ** k for k, v in enumerate(h0)) or 1.0
    if abs(polyval(h0, c)) > cfg.root_tol * scale_at_c * (len(h0) + 1):
        raise NonSimpleRootError("c is not a root of the face polynomial")
    if abs(polyval(polyder(h0), c)) < cfg.simple_tol * scale:
        raise NonSimpleRootError("c is not a simple root of the face polynomial")
    theta = phi.theta
    terms: list[tuple[Fraction, complex]] = list(phi.fixed_terms())
    if abs(c) > cfg.drop_tol:
        terms.append((theta, c))
    H = _pp_from_poly(h)
    for e, coeff in terms:
        H = _pp_subst(H, coeff, e)
    e_prev = theta
    guard = 0
    trunc_ord: Optional[Fraction] = None
    residual_ord: Optional[Fraction] = None
    while len(terms) < trunc_terms:
        guard += 1
        if guard > max(4 * trunc_terms, 64):
            raise PuiseuxError("correction loop failed to make progress")
        H = _pp_clean(H, cfg.clean_tol)
        resid = {e: c2 for (e, j), c2 in H.items() if j == 0}
        if not resid:
            break  # exact solution reached
        lin = {e: c2 for (e, j), c2 in H.items() if j == 1}
        if not lin:
            raise PuiseuxError("no linear term available for correction")
        omega = max(resid)
        lam = max(lin)
        step_exp = omega - lam
        if step_exp >= e_prev:
            raise PuiseuxError("correction failed to descend; root may not "
                               "be simple at this tolerance")
        delta = -resid[omega] / lin[lam]
        H = _pp_subst(H, delta, step_exp)
        terms.append((step_exp, delta))
        e_prev = step_exp
    else:
        H = _pp_clean(H, cfg.clean_tol)
        resid = {e: c2 for (e, j), c2 in H.items() if j == 0}
        if resid:
            lin = {e: c2 for (e, j), c2 in H.items() if j == 1}
            residual_ord = max(resid)
            trunc_ord = residual_ord - max(lin) if lin else residual_ord
    return _make_series(terms, trunc_ord, residual_ord, cfg.drop_tol)


# ---------------------------------------------------------------------------
# evaluation helpers used by residual checks

def poly_complex_eval(p: Polynomial, x: complex, y: complex) -> complex:
    acc = 0j
    for (i, j), c in p.terms.items():
        acc += coeff_to_complex(c) * x ** i * y ** j
    return acc


def poly_eval_scale(p: Polynomial, x: complex, y: complex) -> float:
    """Sum of term magnitudes: the natural scale for relative residuals."""
    return sum(abs(coeff_to_complex(c)) * abs(x) ** i * abs(y) ** j
               for (i, j), c in p.terms.items())


def branch_residual(h: Polynomial, u: PuiseuxSeries, x: complex
                    ) -> tuple[float, float]:
    """(|h(x, u(x))|, evaluation scale) at a complex sample point."""
    y = u.evaluate(x) if u.terms else 0j
    return abs(poly_complex_eval(h, x, y)), poly_eval_scale(h, x, y)
