"""Exact Gram matrices of crossingless-connection bases on the annulus
and Mobius band, with determinant and rank verification over Z[d,z,x,y,w]."""

__version__ = "0.1.0"

from .polyring import (
    Polynomial,
    FactoredPolynomial,
    NotDivisible,
    chebyshev_T,
    exact_div,
    DEFAULT_PRIME,
)
from .diagrams import (
    AnnularDiagram,
    MobiusDiagram,
    BasisFamily,
    CapExceededError,
    ParseError,
    enumerate_basis,
    invert,
    is_noncrossing,
    serialize,
    parse,
)
from .pairing import (
    GluedCurve,
    glue_and_trace,
    classify_annulus,
    classify_klein,
    bilinear_B,
    bilinear_Mb,
)
from .gram import (
    GramMatrix,
    RankReport,
    build_gram,
    det_exact,
    det_matches_formula_probabilistic,
    rank_at_substitution,
)
from .verify import (
    FormulaSpec,
    VerificationReport,
    formula,
    check_equality,
    check_divisibility,
    check_nullity,
)

__all__ = [
    "__version__",
    "Polynomial", "FactoredPolynomial", "NotDivisible", "chebyshev_T",
    "exact_div", "DEFAULT_PRIME",
    "AnnularDiagram", "MobiusDiagram", "BasisFamily", "CapExceededError",
    "ParseError", "enumerate_basis", "invert", "is_noncrossing", "serialize",
    "parse",
    "GluedCurve", "glue_and_trace", "classify_annulus", "classify_klein",
    "bilinear_B", "bilinear_Mb",
    "GramMatrix", "RankReport", "build_gram", "det_exact",
    "det_matches_formula_probabilistic", "rank_at_substitution",
    "FormulaSpec", "VerificationReport", "formula", "check_equality",
    "check_divisibility", "check_nullity",
]
