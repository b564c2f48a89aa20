"""Closed-formula construction and determinant verification jobs.

Each verification target is a FormulaSpec tag naming what the formula says,
paired with the basis family it speaks about:

    thm-b         proved product formula for the annular determinant
    chen-mb       conjectured formula for the full Mobius-band determinant
    conj-mb1      conjectured formula for the once-through-crosscap family
    div-dz        (d-z)^C(2n,n-1) divides the full Mobius determinant
    div-wxy       (w(d+z)-2xy)^C(2n,n-1) divides the full Mobius determinant
    div-wxy-mb1   the same factor divides the once-through determinant
    div-cheb2     ((d^2-2-z)(w^2-2)-2(2-z))^C(2n,n-2) divides the full det
    cheb-product  prod_k (T_k(d)+(-1)^k z)^C(2n,n-k) divides the
                  once-through determinant (proved via the nullity bound)

Equality checks run exactly (Bareiss + expansion) or probabilistically
(Schwartz-Zippel).  Divisibility checks are exact only: random evaluation
cannot certify divisibility of symbolic objects.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .diagrams import BasisFamily
from .gram import (
    DEFAULT_EXACT_CAP,
    DEFAULT_TRIALS,
    GramMatrix,
    build_gram,
    det_exact,
    det_matches_formula_probabilistic,
    rank_at_substitution,
)
from .polyring import (
    DEFAULT_PRIME,
    FactoredPolynomial,
    Polynomial,
    chebyshev_T,
    raw_divmod,
)

FORMULA_TAGS = (
    "thm-b", "chen-mb", "conj-mb1",
    "div-dz", "div-wxy", "div-wxy-mb1", "div-cheb2", "cheb-product",
)

EQUALITY_FAMILY = {"thm-b": "b", "chen-mb": "mbfull", "conj-mb1": "mb1union"}

DIVISIBILITY_FAMILY = {
    "div-dz": "mbfull",
    "div-wxy": "mbfull",
    "div-cheb2": "mbfull",
    "div-wxy-mb1": "mb1union",
    "cheb-product": "mb1union",
}


class UnsupportedNError(ValueError):
    """The formula has no nontrivial instance at the requested n."""


@dataclass(frozen=True)
class FormulaSpec:
    """A verification target: formula tag plus matrix size."""

    tag: str
    n: int

    def __post_init__(self):
        if self.tag not in FORMULA_TAGS:
            raise ValueError(f"unknown formula tag {self.tag!r}; "
                             f"expected one of {FORMULA_TAGS}")
        if self.n < 1:
            raise ValueError("n must be positive")


def _merge(factors: list[tuple[Polynomial, int]]) -> FactoredPolynomial:
    merged: dict[Polynomial, int] = {}
    order: list[Polynomial] = []
    for base, e in factors:
        if base not in merged:
            order.append(base)
            merged[base] = 0
        merged[base] += e
    return FactoredPolynomial(tuple((b, merged[b]) for b in order))


def formula(spec: FormulaSpec) -> FactoredPolynomial:
    """The closed formula as a factored polynomial with exact exponents."""
    n = spec.n
    d, z = Polynomial.var("d"), Polynomial.var("z")
    x, y, w = Polynomial.var("x"), Polynomial.var("y"), Polynomial.var("w")
    binom = lambda k: math.comb(2 * n, n - k)
    factors: list[tuple[Polynomial, int]] = []

    if spec.tag == "thm-b":
        for i in range(1, n + 1):
            factors.append((chebyshev_T(i) ** 2 - z ** 2, binom(i)))
    elif spec.tag == "chen-mb":
        for k in range(1, n + 1):
            sign = 1 if k % 2 == 0 else -1
            factors.append((chebyshev_T(k) + sign * z, binom(k)))
        for k in range(1, n + 1, 2):
            factors.append(((chebyshev_T(k) + z) * chebyshev_T(k, "w") - 2 * x * y,
                            binom(k)))
        for k in range(2, n + 1, 2):
            factors.append(((chebyshev_T(k) - z) * chebyshev_T(k, "w")
                            - Polynomial.const(4) + 2 * z, binom(k)))
        for i in range(1, n):
            for k in range(i + 1, n + 1):
                factors.append((chebyshev_T(2 * k) - 2, binom(k)))
    elif spec.tag == "conj-mb1":
        factors.append((d - z, binom(1)))
        factors.append(((d + z) * w - 2 * x * y, binom(1)))
        for k in range(2, n + 1):
            factors.append((chebyshev_T(k) ** 2 - z ** 2, binom(k)))
        for k in range(2, n + 1):
            factors.append((chebyshev_T(2 * k) - 2, binom(k)))
    elif spec.tag == "div-dz":
        factors.append((d - z, binom(1)))
    elif spec.tag in ("div-wxy", "div-wxy-mb1"):
        factors.append((w * (d + z) - 2 * x * y, binom(1)))
    elif spec.tag == "div-cheb2":
        if n < 2:
            raise UnsupportedNError("the quadratic divisor needs n >= 2")
        factors.append(((d ** 2 - 2 - z) * (w ** 2 - 2)
                        - Polynomial.const(4) + 2 * z, binom(2)))
    elif spec.tag == "cheb-product":
        for k in range(1, n + 1):
            sign = 1 if k % 2 == 0 else -1
            factors.append((chebyshev_T(k) + sign * z, binom(k)))
    return _merge(factors)


# ---------------------------------------------------------------------------
# Verification reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    tag: str
    n: int
    mode: str
    verdict: str
    witness: dict
    duration_ms: float
    seed: int | None = None
    prime: int | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == "Pass"

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "n": self.n,
            "mode": self.mode,
            "verdict": self.verdict,
            "seed": self.seed,
            "prime": self.prime,
            "duration_ms": self.duration_ms,
            "witness": self.witness,
        }


def _poly_summary(p: Polynomial, inline_terms: int = 40) -> dict:
    out: dict = {"degree": p.total_degree(), "terms": len(p)}
    if len(p) <= inline_terms:
        out["text"] = p.text()
    elif not p.is_zero():
        key, coeff = p.leading_term()
        out["leading"] = Polynomial({key: coeff}).text()
    return out


def _require_family(family: BasisFamily, spec: FormulaSpec, table: dict) -> None:
    want = table.get(spec.tag)
    if want is None:
        raise ValueError(f"{spec.tag!r} is not a target for this check")
    if family.tag != want:
        raise ValueError(f"{spec.tag!r} speaks about family {want!r}, "
                         f"got {family.tag!r}")
    if family.n != spec.n:
        raise ValueError("family and formula disagree on n")


def check_equality(
    family: BasisFamily,
    spec: FormulaSpec,
    mode: str = "exact",
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    prime: int = DEFAULT_PRIME,
    exact_cap: int = DEFAULT_EXACT_CAP,
    gram: GramMatrix | None = None,
    det: Polynomial | None = None,
) -> VerificationReport:
    """Does the family's determinant equal the formula?"""
    _require_family(family, spec, EQUALITY_FAMILY)
    started = time.perf_counter()
    f = formula(spec)
    if gram is None:
        gram = build_gram(family)
    if mode == "exact":
        if det is None:
            det = det_exact(gram, cap=exact_cap)
        expanded = f.expand()
        if det == expanded:
            verdict, witness = "Pass", {"quotient": "1"}
        else:
            verdict = "Fail"
            witness = {
                "determinant": _poly_summary(det),
                "formula": _poly_summary(expanded),
                "difference": _poly_summary(det - expanded),
            }
        report_seed, report_prime = None, None
    elif mode == "probabilistic":
        verdict_obj = det_matches_formula_probabilistic(
            gram, f, trials=trials, seed=seed, prime=prime)
        verdict = "Pass" if verdict_obj.passed else "Fail"
        witness = verdict_obj.to_json()
        report_seed, report_prime = seed, prime
    else:
        raise ValueError(f"unknown mode {mode!r}")
    duration = (time.perf_counter() - started) * 1000.0
    return VerificationReport(spec.tag, spec.n, mode, verdict, witness,
                              duration, report_seed, report_prime)


def check_divisibility(
    family: BasisFamily,
    spec: FormulaSpec,
    mode: str = "exact",
    exact_cap: int = DEFAULT_EXACT_CAP,
    gram: GramMatrix | None = None,
    det: Polynomial | None = None,
) -> VerificationReport:
    """Does the formula divide the family's determinant, exactly?"""
    if mode != "exact":
        raise ValueError("divisibility is certified by exact division only")
    _require_family(family, spec, DIVISIBILITY_FAMILY)
    started = time.perf_counter()
    divisor = formula(spec).expand()
    if gram is None:
        gram = build_gram(family)
    if det is None:
        det = det_exact(gram, cap=exact_cap)
    quo, rem = raw_divmod(det.raw, divisor.raw)
    if rem:
        verdict = "Fail"
        witness = {"remainder": _poly_summary(Polynomial(rem))}
    else:
        verdict = "Pass"
        witness = {"quotient": _poly_summary(Polynomial(quo))}
    duration = (time.perf_counter() - started) * 1000.0
    return VerificationReport(spec.tag, spec.n, mode, verdict, witness, duration)


def check_nullity(
    n: int,
    k: int,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    prime: int = DEFAULT_PRIME,
    gram: GramMatrix | None = None,
) -> VerificationReport:
    """Monte Carlo nullity bound after z -> (-1)^(k-1) T_k(d).

    Passes when every trial leaves nullity >= C(2n, n-k) on the
    once-through-crosscap family's matrix.
    """
    started = time.perf_counter()
    if gram is None:
        gram = build_gram(BasisFamily("mb1union", n))
    report = rank_at_substitution(gram, k, trials=trials, seed=seed, prime=prime)
    duration = (time.perf_counter() - started) * 1000.0
    return VerificationReport(
        tag="nullity",
        n=n,
        mode="probabilistic",
        verdict=report.verdict,
        witness=report.to_json(),
        duration_ms=duration,
        seed=seed,
        prime=prime,
    )
