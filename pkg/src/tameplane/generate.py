"""Seeded random construction of tame automorphisms with known factorizations.

Factors alternate triangular and affine, starting triangular, so the worst
case composed degree is max_tri_degree ** ceil(depth / 2).  Configs whose
worst case exceeds 64 are rejected to keep exact arithmetic desk-scale.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .decompose import Affine, Decomposition, Factor, TriangularX, TriangularY, recompose
from .polynomials import (
    GAUSSIAN,
    RATIONAL,
    GaussianRational,
    PolyMap,
    Polynomial,
    as_coeff,
)

MAX_COMPOSED_DEGREE = 64


@dataclass(frozen=True)
class GenConfig:
    seed: int
    depth: int
    max_tri_degree: int = 4
    coeff_bound: int = 5
    field_mode: str = RATIONAL

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.max_tri_degree < 2:
            raise ValueError("max_tri_degree must be >= 2")
        if self.coeff_bound < 1:
            raise ValueError("coeff_bound must be >= 1")
        tri_count = (self.depth + 1) // 2
        if self.max_tri_degree ** tri_count > MAX_COMPOSED_DEGREE:
            raise ValueError(
                f"worst-case composed degree {self.max_tri_degree}**{tri_count} "
                f"exceeds {MAX_COMPOSED_DEGREE}")


def _rand_rational(rng: random.Random, bound: int, nonzero: bool = False) -> Fraction:
    while True:
        num = rng.randint(-bound, bound)
        if num or not nonzero:
            return Fraction(num, rng.randint(1, bound))


def _rand_coeff(rng: random.Random, cfg: GenConfig, nonzero: bool = False):
    if cfg.field_mode == GAUSSIAN:
        while True:
            re = _rand_rational(rng, cfg.coeff_bound)
            im = _rand_rational(rng, cfg.coeff_bound)
            if (re or im) or not nonzero:
                return GaussianRational(re, im)
    return _rand_rational(rng, cfg.coeff_bound, nonzero)


def _rand_triangular(rng: random.Random, cfg: GenConfig) -> Factor:
    axis = rng.choice("xy")
    deg = rng.randint(2, cfg.max_tri_degree)
    terms = {}
    for k in range(2, deg + 1):
        c = _rand_coeff(rng, cfg, nonzero=(k == deg))
        if c:
            key = (0, k) if axis == "x" else (k, 0)
            terms[key] = c
    shift = Polynomial(terms, cfg.field_mode)
    return TriangularX(shift) if axis == "x" else TriangularY(shift)


def _rand_affine(rng: random.Random, cfg: GenConfig) -> Affine:
    while True:
        a = _rand_coeff(rng, cfg)
        b = _rand_coeff(rng, cfg)
        c = _rand_coeff(rng, cfg)
        d = _rand_coeff(rng, cfg)
        if a * d - b * c:
            break
    e = _rand_coeff(rng, cfg)
    f = _rand_coeff(rng, cfg)
    return Affine(*(as_coeff(v, cfg.field_mode) for v in (a, b, c, d, e, f)))


def random_tame(cfg: GenConfig) -> tuple[PolyMap, Decomposition]:
    """Deterministic tame map plus its ground-truth factor list."""
    rng = random.Random(cfg.seed)
    factors: list[Factor] = []
    for k in range(cfg.depth):
        if k % 2 == 0:
            factors.append(_rand_triangular(rng, cfg))
        else:
            factors.append(_rand_affine(rng, cfg))
    decomposition = Decomposition(tuple(factors), cfg.field_mode)
    return recompose(decomposition), decomposition
