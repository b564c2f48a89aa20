"""Gram matrices over Z[d,z,x,y,w]: exact and modular determinants, ranks.

Exact determinants use fraction-free (Bareiss) elimination: every division
is by the previous pivot and must be exact by the Sylvester identity, so a
failed division signals an arithmetic bug, never a data condition.  Beyond
the exact cap, identities are tested probabilistically by evaluation at
uniform random points over a large prime field with Schwartz-Zippel bounds.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from datetime import datetime, timezone

from . import __version__
from .diagrams import BasisFamily, CapExceededError, Diagram, enumerate_basis, serialize
from .pairing import bilinear_B, bilinear_Mb
from .polyring import (
    DEFAULT_PRIME,
    FactoredPolynomial,
    KEY_ONE,
    Polynomial,
    chebyshev_T,
    raw_divide_exact,
    raw_eval_mod,
    raw_mul,
    raw_sub,
)

DEFAULT_EXACT_CAP = 70
DEFAULT_TRIALS = 20


class InternalNondivisibilityError(Exception):
    """A Bareiss division failed; the elimination state is corrupt."""


@dataclass(frozen=True)
class GramMatrix:
    """An ordered basis with the square array of its pairing monomials."""

    family: BasisFamily
    basis: tuple[Diagram, ...]
    entries: tuple[tuple[Polynomial, ...], ...]
    built_at: str
    code_version: str

    @property
    def side(self) -> int:
        return len(self.basis)

    def entry_degree_bound(self) -> int:
        """Degree bound for the determinant: sum of row maxima."""
        return sum(max(e.total_degree() for e in row) for row in self.entries)

    def to_json(self) -> dict:
        return {
            "family": self.family.tag,
            "n": self.family.n,
            "basis": [serialize(b) for b in self.basis],
            "entries": [[e.to_json_terms() for e in row] for row in self.entries],
            "built_at": self.built_at,
            "code_version": self.code_version,
        }

    @staticmethod
    def from_json(data: dict) -> GramMatrix:
        from .diagrams import parse

        basis = tuple(parse(s) for s in data["basis"])
        entries = tuple(
            tuple(Polynomial.from_json_terms(cell) for cell in row)
            for row in data["entries"]
        )
        return GramMatrix(
            family=BasisFamily(data["family"], data["n"]),
            basis=basis,
            entries=entries,
            built_at=data["built_at"],
            code_version=data["code_version"],
        )


def build_gram(family: BasisFamily, cap: int | None = None) -> GramMatrix:
    """Assemble the family's Gram matrix over its canonical basis order."""
    basis = tuple(enumerate_basis(family, cap=cap))
    form = bilinear_B if family.tag == "b" else bilinear_Mb
    entries = tuple(
        tuple(form(bi, bj) for bj in basis)
        for bi in basis
    )
    for row in entries:
        for e in row:
            if not (e.is_monomial() and e.leading_term()[1] == 1):
                raise AssertionError(f"non-monomial Gram entry {e}")
    return GramMatrix(
        family=family,
        basis=basis,
        entries=entries,
        built_at=datetime.now(timezone.utc).isoformat(),
        code_version=__version__,
    )


# ---------------------------------------------------------------------------
# Exact determinant
# ---------------------------------------------------------------------------

def _bareiss(rows: list[list[dict[int, int]]]) -> dict[int, int]:
    """Fraction-free determinant of a square matrix of raw poly dicts.

    Mutates rows.  Pivoting takes the first nonzero entry in row order; an
    all-zero pivot column short-circuits to determinant zero.
    """
    n = len(rows)
    sign = 1
    prev: dict[int, int] | None = None
    for k in range(n - 1):
        if not rows[k][k]:
            for i in range(k + 1, n):
                if rows[i][k]:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return {}
        pivot = rows[k][k]
        for i in range(k + 1, n):
            row_i = rows[i]
            rik = row_i[k]
            for j in range(k + 1, n):
                num = raw_sub(raw_mul(pivot, row_i[j]), raw_mul(rik, rows[k][j]))
                if prev is not None and num:
                    quo = raw_divide_exact(num, prev)
                    if quo is None:
                        raise InternalNondivisibilityError(
                            f"Sylvester division failed at step {k}, entry ({i},{j})")
                    num = quo
                row_i[j] = num
            row_i[k] = {}
        prev = pivot
    final = rows[n - 1][n - 1]
    return final if sign == 1 else {k: -c for k, c in final.items()}


def det_exact(g: GramMatrix, cap: int = DEFAULT_EXACT_CAP) -> Polynomial:
    """The exact determinant, independent of basis order."""
    if g.side > cap:
        raise CapExceededError(
            f"matrix side {g.side} exceeds the exact determinant cap {cap}")
    rows = [[dict(e.raw) for e in row] for row in g.entries]
    return Polynomial(_bareiss(rows))


# ---------------------------------------------------------------------------
# Modular linear algebra
# ---------------------------------------------------------------------------

def _det_mod(m: list[list[int]], p: int) -> int:
    n = len(m)
    det = 1
    for k in range(n):
        pivot_row = next((i for i in range(k, n) if m[i][k] % p), None)
        if pivot_row is None:
            return 0
        if pivot_row != k:
            m[k], m[pivot_row] = m[pivot_row], m[k]
            det = -det
        pivot = m[k][k] % p
        det = det * pivot % p
        inv = pow(pivot, p - 2, p)
        for i in range(k + 1, n):
            factor = m[i][k] * inv % p
            if factor:
                row_i, row_k = m[i], m[k]
                for j in range(k, n):
                    row_i[j] = (row_i[j] - factor * row_k[j]) % p
    return det % p


def _rank_mod(m: list[list[int]], p: int) -> int:
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    rank = 0
    row = 0
    for col in range(cols):
        pivot_row = next((i for i in range(row, rows) if m[i][col] % p), None)
        if pivot_row is None:
            continue
        m[row], m[pivot_row] = m[pivot_row], m[row]
        inv = pow(m[row][col] % p, p - 2, p)
        for i in range(row + 1, rows):
            factor = m[i][col] * inv % p
            if factor:
                row_i, row_r = m[i], m[row]
                for j in range(col, cols):
                    row_i[j] = (row_i[j] - factor * row_r[j]) % p
        rank += 1
        row += 1
        if row == rows:
            break
    return rank


def _entries_mod(g: GramMatrix, point: tuple[int, ...], p: int) -> list[list[int]]:
    return [[raw_eval_mod(e.raw, point, p) for e in row] for row in g.entries]


# ---------------------------------------------------------------------------
# Probabilistic identity testing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityVerdict:
    """Outcome of a Schwartz-Zippel determinant/formula comparison."""

    passed: bool
    trials: int
    seed: int
    prime: int
    degree_bound: int
    failing_point: tuple[int, ...] | None

    @property
    def per_trial_failure_bound(self) -> float:
        return self.degree_bound / self.prime

    def to_json(self) -> dict:
        return {
            "verdict": "Pass" if self.passed else "Fail",
            "trials": self.trials,
            "seed": self.seed,
            "prime": self.prime,
            "degree_bound": self.degree_bound,
            "per_trial_failure_bound": self.per_trial_failure_bound,
            "failing_point": list(self.failing_point) if self.failing_point else None,
        }


def det_matches_formula_probabilistic(
    g: GramMatrix,
    f: FactoredPolynomial,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    prime: int = DEFAULT_PRIME,
) -> IdentityVerdict:
    """Compare det(g) with f at seeded uniform points over GF(prime)."""
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = random.Random(seed)
    degree_bound = max(g.entry_degree_bound(), f.total_degree())
    for _ in range(trials):
        point = tuple(rng.randrange(prime) for _ in range(5))
        lhs = _det_mod(_entries_mod(g, point, prime), prime)
        rhs = f.eval_mod(point, prime)
        if lhs != rhs:
            return IdentityVerdict(False, trials, seed, prime, degree_bound, point)
    return IdentityVerdict(True, trials, seed, prime, degree_bound, None)


# ---------------------------------------------------------------------------
# Rank under the Chebyshev substitution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RankReport:
    """Monte Carlo rank of a matrix after substituting z -> +-T_k(d).

    The observed rank is the maximum over trials, a certain lower bound for
    the generic rank; the nullity verdict is corroboration, not proof.
    """

    matrix_id: str
    substitution: str
    prime: int
    seed: int
    trial_ranks: tuple[int, ...]
    side: int
    nullity_bound_tested: int
    verdict: str

    @property
    def observed_rank(self) -> int:
        return max(self.trial_ranks)

    @property
    def observed_nullity(self) -> int:
        return self.side - self.observed_rank

    def to_json(self) -> dict:
        return {
            "matrix": self.matrix_id,
            "substitution": self.substitution,
            "prime": self.prime,
            "seed": self.seed,
            "trial_ranks": list(self.trial_ranks),
            "side": self.side,
            "observed_rank": self.observed_rank,
            "observed_nullity": self.observed_nullity,
            "nullity_bound_tested": self.nullity_bound_tested,
            "verdict": self.verdict,
        }


def rank_at_substitution(
    g: GramMatrix,
    k: int,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    prime: int = DEFAULT_PRIME,
) -> RankReport:
    """Substitute z := (-1)^(k-1) T_k(d), then measure rank at random points."""
    n = g.family.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if trials < 1:
        raise ValueError("need at least one trial")
    sub = chebyshev_T(k) if k % 2 else -chebyshev_T(k)
    substituted = [[e.substitute_z(sub) for e in row] for row in g.entries]
    rng = random.Random(seed)
    ranks: list[int] = []
    for _ in range(trials):
        dv, xv, yv, wv = (rng.randrange(prime) for _ in range(4))
        point = (dv, 0, xv, yv, wv)  # z already eliminated
        numeric = [[raw_eval_mod(e.raw, point, prime) for e in row]
                   for row in substituted]
        ranks.append(_rank_mod(numeric, prime))
    bound = math.comb(2 * n, n - k)
    verdict = "Pass" if g.side - max(ranks) >= bound else "Fail"
    sign = "" if k % 2 else "-"
    return RankReport(
        matrix_id=f"{g.family.tag}:n={n}",
        substitution=f"z -> {sign}T_{k}(d)",
        prime=prime,
        seed=seed,
        trial_ranks=tuple(ranks),
        side=g.side,
        nullity_bound_tested=bound,
        verdict=verdict,
    )
