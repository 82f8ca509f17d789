"""Machine verification of degree divisibility for plane automorphisms.

For a Keller map (P, Q), both curves P = 0 and Q = 0 have a single
irreducible branch at infinity.  The verifier expands both, locates the
deepest agreement order theta over all conjugate pairs, replaces everything
at and below theta in the P-branch by a parameter slot, and reads off the
face polynomials of both components.  The report records every derived
object together with named pass/fail verdicts and numeric margins, ending in
the divisibility conclusion for the component degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Optional

from .decompose import is_keller
from .polynomials import (
    Coefficient,
    NEG_INF,
    PolyMap,
    Polynomial,
    coeff_to_complex,
    jacobian,
    monic_normalize,
)
from .puiseux import (
    BranchSet,
    DegenerateThetaError,
    FaceData,
    ParamSeries,
    PuiseuxConfig,
    PuiseuxSeries,
    TruncationTooShallowError,
    all_roots,
    conjugate,
    expansions_at_infinity,
    polyder,
    polyval,
    substitute_param,
)


class NotKellerError(ValueError):
    """Input rejected upfront: the Jacobian is not a nonzero constant."""

    def __init__(self, jac: Polynomial):
        super().__init__(f"Jacobian is not a nonzero constant: {jac}")
        self.jacobian = jac


@dataclass(frozen=True)
class VerifyConfig:
    tol: float = 1e-7
    trunc_terms: Optional[int] = None
    max_retries: int = 4
    puiseux: PuiseuxConfig = field(default_factory=PuiseuxConfig)


@dataclass(frozen=True)
class Verdict:
    passed: bool
    margin: float


@dataclass(frozen=True)
class WitnessReport:
    theta: Fraction
    phi: ParamSeries
    p_face: FaceData
    q_face: FaceData
    alpha_u: complex
    beta_v: complex
    j_phi: tuple[complex, ...]
    jacobian_const: Coefficient
    deg_p: int
    deg_q: int
    swapped: bool
    verdicts: dict[str, Verdict]
    conclusion: str

    @property
    def m_phi(self) -> int:
        return self.phi.m_phi

    @property
    def n_phi(self) -> int:
        return self.phi.n_phi

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts.values())

    def to_json(self) -> dict:
        def c2(z: complex) -> list[float]:
            return [z.real, z.imag]

        j_const = self.j_phi[0] if self.j_phi else 0j
        return {
            "theta": [self.theta.numerator, self.theta.denominator],
            "phi": self.phi.to_json(),
            "P_phi": _render_xi_poly(self.p_face.face_poly),
            "Q_phi": _render_xi_poly(self.q_face.face_poly),
            "a_phi": self.p_face.a,
            "b_phi": self.q_face.a,
            "m_phi": self.m_phi,
            "n_phi": self.n_phi,
            "alpha_u": c2(self.alpha_u),
            "beta_v": c2(self.beta_v),
            "J_phi_const": c2(j_const),
            "verdicts": {
                **{name: v.passed for name, v in self.verdicts.items()},
                "margins": {name: v.margin for name, v in self.verdicts.items()},
            },
            "conclusion": self.conclusion,
        }


def _render_xi_poly(coeffs: tuple[complex, ...]) -> str:
    from .puiseux import _fmt_complex
    if not coeffs:
        return "0"
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if abs(c) == 0.0:
            continue
        mono = "" if k == 0 else ("xi" if k == 1 else f"xi^{k}")
        text = _fmt_complex(c)
        parts.append(f"{text}*{mono}" if mono else text)
    return " + ".join(parts) if parts else "0"


def series_difference_ord(u: PuiseuxSeries, v: PuiseuxSeries, drop_tol: float
                          ) -> tuple[object, bool]:
    """(ord(u - v), certified).  Uncertified means the series agree on every
    exponent above the truncation bound, so the true order lies below it."""
    bounds = [s.trunc_ord for s in (u, v) if s.trunc_ord is not None]
    cutoff = max(bounds) if bounds else None
    cu = dict(u.terms)
    cv = dict(v.terms)
    scale = max([1.0] + [abs(c) for c in cu.values()]
                + [abs(c) for c in cv.values()])
    for e in sorted(set(cu) | set(cv), reverse=True):
        if cutoff is not None and e <= cutoff:
            return None, False
        if abs(cu.get(e, 0j) - cv.get(e, 0j)) > drop_tol * scale:
            return e, True
    if cutoff is None:
        return NEG_INF, True  # exactly identical series
    return None, False


def compute_theta(us: BranchSet, vs: BranchSet,
                  cfg: PuiseuxConfig = PuiseuxConfig()
                  ) -> tuple[Fraction, int, int]:
    """Minimize ord(u_i - v_j) over all conjugate pairs.

    Returns (theta, i, j) with flat conjugate indices; ties break toward the
    smallest (i, j).  Raises TruncationTooShallowError when any pair still
    agrees at the truncation horizon, and DegenerateThetaError when a pair is
    exactly identical.
    """
    roots_u = us.all_roots()
    roots_v = vs.all_roots()
    if not roots_u or not roots_v:
        raise ValueError("both branch sets must be nonempty")
    best = None
    arg = (0, 0)
    shallow = False
    for i, u in enumerate(roots_u):
        for j, v in enumerate(roots_v):
            o, certified = series_difference_ord(u, v, cfg.drop_tol)
            if not certified:
                shallow = True
                continue
            if o is NEG_INF:
                raise DegenerateThetaError(
                    "branches of the two curves coincide")
            if best is None or o < best:
                best = o
                arg = (i, j)
    if shallow:
        raise TruncationTooShallowError(
            "series truncation too shallow to certify theta")
    assert best is not None
    return best, arg[0], arg[1]


def build_phi(u: PuiseuxSeries, theta: Fraction) -> ParamSeries:
    """Keep the terms of u strictly above theta and put the parameter slot at
    theta, normalizing the exponent grid."""
    kept = [(e, c) for e, c in u.terms if e > theta]
    m = theta.denominator
    for e, _ in kept:
        m = lcm(m, e.denominator)
    n_scaled = (1 - theta) * m
    assert n_scaled.denominator == 1
    n = int(n_scaled)
    ks = []
    for e, c in kept:
        k = (1 - e) * m
        assert k.denominator == 1
        ks.append((int(k), c))
    g = gcd(m, abs(n), *(k for k, _ in ks)) if ks else gcd(m, abs(n))
    if g == 0:
        g = m  # theta == 1 with no kept terms
    if g > 1:
        m //= g
        n = n // g if n >= 0 else -((-n) // g)
        ks = [(k // g, c) for k, c in ks]
    return ParamSeries(m_phi=m, n_phi=n, coeffs=tuple(sorted(ks)))


def j_phi(p_face: FaceData, q_face: FaceData) -> tuple[complex, ...]:
    """a * P_phi * dQ_phi/dxi - b * Q_phi * dP_phi/dxi."""
    from .puiseux import polymul
    a, b = p_face.a, q_face.a
    p, q = p_face.face_poly, q_face.face_poly
    left = polymul(p, polyder(q))
    right = polymul(q, polyder(p))
    size = max(len(left), len(right))
    out = [0j] * size
    for k in range(size):
        lv = left[k] if k < len(left) else 0j
        rv = right[k] if k < len(right) else 0j
        out[k] = a * lv - b * rv
    while out and abs(out[-1]) == 0.0:
        out.pop()
    return tuple(out) if out else (0j,)


def _discriminant_margin(coeffs: tuple[complex, ...],
                         cfg: PuiseuxConfig) -> float:
    """Scaled product of squared root gaps; large means simple zeros."""
    stripped = [c for c in coeffs]
    while stripped and abs(stripped[-1]) == 0.0:
        stripped.pop()
    if len(stripped) <= 2:
        return float("inf")
    roots = all_roots(tuple(stripped), cfg)
    scale = max(1.0, max(abs(r) for r in roots))
    margin = 1.0
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            margin *= (abs(roots[i] - roots[j]) / scale) ** 2
    return margin


def verify_division(f: PolyMap, cfg: VerifyConfig = VerifyConfig()
                    ) -> WitnessReport:
    """Run the full witness pipeline on a Keller map.

    Verdict failures are recorded in the report (never raised); structurally
    invalid inputs (non-Keller) are rejected upfront.
    """
    ok, jac = is_keller(f)
    if not ok:
        raise NotKellerError(jac)
    dp0 = int(f.p.degree())
    dq0 = int(f.q.degree())
    swapped = dq0 > dp0
    work = PolyMap(f.q, f.p) if swapped else f
    norm, _change = monic_normalize(work)
    jac_norm = jacobian(norm)
    jconst = coeff_to_complex(jac_norm.coeff(0, 0))
    deg_p = int(norm.p.degree())
    deg_q = int(norm.q.degree())

    # start shallow: theta usually resolves within a few terms, and shallow
    # truncations keep the float dynamic range of deep substitutions small
    trunc = cfg.trunc_terms or 8
    us = vs = None
    for attempt in range(cfg.max_retries + 1):
        try:
            us = expansions_at_infinity(norm.p, trunc, cfg.puiseux)
            vs = expansions_at_infinity(norm.q, trunc, cfg.puiseux)
            theta, iu, iv = compute_theta(us, vs, cfg.puiseux)
            break
        except TruncationTooShallowError:
            if attempt == cfg.max_retries:
                raise
            trunc *= 2
    assert us is not None and vs is not None

    u_star = _flat_root(us, iu)
    v_star = _flat_root(vs, iv)
    phi = build_phi(u_star, theta)
    p_face = substitute_param(norm.p, phi, cfg.puiseux)
    q_face = substitute_param(norm.q, phi, cfg.puiseux)
    alpha = u_star.coeff(theta)
    beta = v_star.coeff(theta)
    jphi = j_phi(p_face, q_face)

    tol = cfg.tol
    verdicts: dict[str, Verdict] = {}

    scale_p = max([1.0] + [abs(c) for c in p_face.face_poly])
    scale_q = max([1.0] + [abs(c) for c in q_face.face_poly])

    verdicts["one_branch"] = Verdict(
        len(us.branches) == 1 and len(vs.branches) == 1
        and us.branches[0].ram == deg_p and vs.branches[0].ram == deg_q,
        float(min(len(us.branches), len(vs.branches))))

    r1 = abs(polyval(p_face.face_poly, alpha)) / scale_p
    r2 = abs(polyval(q_face.face_poly, beta)) / scale_q
    verdicts["claim1a"] = Verdict(r1 <= tol and r2 <= tol, max(r1, r2))

    p_roots = all_roots(p_face.face_poly, cfg.puiseux)
    q_roots = all_roots(q_face.face_poly, cfg.puiseux)
    sep = float("inf")
    for z in p_roots + q_roots:
        sep = min(sep, max(abs(polyval(p_face.face_poly, z)) / scale_p,
                           abs(polyval(q_face.face_poly, z)) / scale_q))
    verdicts["claim1b"] = Verdict(sep > tol, sep)

    verdicts["positivity"] = Verdict(p_face.a > 0 and q_face.a > 0,
                                     float(min(p_face.a, q_face.a)))

    j0 = abs(jphi[0])
    nonconst = max((abs(c) for c in jphi[1:]), default=0.0)
    rel_nonconst = nonconst / max(j0, 1e-300)
    verdicts["claim2_constant"] = Verdict(rel_nonconst <= tol, rel_nonconst)

    expected = phi.m_phi * abs(jconst)
    mag_err = abs(j0 - expected) / max(expected, 1e-300)
    verdicts["claim2_magnitude"] = Verdict(mag_err <= tol, mag_err)

    disc_p = _discriminant_margin(p_face.face_poly, cfg.puiseux)
    disc_q = _discriminant_margin(q_face.face_poly, cfg.puiseux)
    simple_margin = min(disc_p, disc_q)
    verdicts["claim2_simple_zeros"] = Verdict(
        simple_margin > cfg.puiseux.simple_tol, simple_margin)

    relation = p_face.a + q_face.a + phi.n_phi
    verdicts["degree_relation"] = Verdict(relation == 2 * phi.m_phi,
                                          float(relation - 2 * phi.m_phi))

    if deg_p > deg_q:
        ok_ab = abs(alpha) > tol and abs(beta) <= tol
        margin_ab = abs(alpha) - abs(beta)
    else:
        # equal degrees: the lemma is immediate, only root distinctness holds
        ok_ab = abs(alpha - beta) > tol
        margin_ab = abs(alpha - beta)
    verdicts["finale_alpha_beta"] = Verdict(ok_ab, margin_ab)

    verdicts["finale_m_phi"] = Verdict(phi.m_phi == deg_p,
                                       float(abs(phi.m_phi - deg_p)))

    verdicts["divisibility"] = Verdict(deg_p % deg_q == 0,
                                       float(deg_p % deg_q))

    conclusion = "degP_divides_degQ" if swapped else "degQ_divides_degP"
    return WitnessReport(theta=theta, phi=phi, p_face=p_face, q_face=q_face,
                         alpha_u=alpha, beta_v=beta, j_phi=jphi,
                         jacobian_const=jac_norm.coeff(0, 0),
                         deg_p=deg_p, deg_q=deg_q, swapped=swapped,
                         verdicts=verdicts, conclusion=conclusion)


def _flat_root(bs: BranchSet, index: int) -> PuiseuxSeries:
    k = index
    for rep in bs.branches:
        if k < rep.ram:
            return conjugate(rep, k)
        k -= rep.ram
    raise IndexError("flat conjugate index out of range")
