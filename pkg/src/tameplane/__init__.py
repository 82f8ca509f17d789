"""Tame decomposition of plane polynomial automorphisms, Newton-Puiseux
expansions at infinity, and machine-checked degree-divisibility witnesses."""

from .polynomials import (
    GAUSSIAN,
    RATIONAL,
    NEG_INF,
    Coefficient,
    FieldMismatchError,
    GaussianRational,
    LinearChange,
    PolyMap,
    Polynomial,
    compose,
    degree,
    evaluate,
    jacobian,
    leading_form,
    monic_normalize,
    partial,
    substitute,
)
from .parser import ParseError, parse_map, parse_poly
from .decompose import (
    Affine,
    Decomposition,
    Factor,
    RejectionError,
    RejectionEvidence,
    TriangularX,
    TriangularY,
    decompose,
    invert,
    is_keller,
    leading_match,
    recompose,
    reduce_step,
)
from .generate import GenConfig, random_tame
from .puiseux import (
    BranchSet,
    FaceData,
    ParamSeries,
    PuiseuxConfig,
    PuiseuxError,
    PuiseuxSeries,
    conjugate,
    expansions_at_infinity,
    fact1_product,
    lift_simple_root,
    multiplicity,
    ord_at_infinity,
    substitute_param,
)
from .witness import (
    NotKellerError,
    VerifyConfig,
    WitnessReport,
    build_phi,
    compute_theta,
    j_phi,
    verify_division,
)

__version__ = "0.1.0"
