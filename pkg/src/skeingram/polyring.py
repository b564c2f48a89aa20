"""Exact sparse polynomial arithmetic in Z[d, z, x, y, w].

Polynomials are stored as dicts mapping a packed monomial key to a nonzero
arbitrary-precision integer coefficient.  A monomial key packs the total
degree and the five exponents into one int::

    key = deg << 80 | e_d << 64 | e_z << 48 | e_x << 32 | e_y << 16 | e_w

so plain integer comparison of keys is graded lexicographic order with
variable precedence d > z > x > y > w.  Monomial multiplication is key
addition (fields are 16 bits wide, far beyond any degree reached here).

Chebyshev polynomials of the first kind use the normalization T_0 = 2,
T_1 = v, T_{k+1} = v*T_k - T_{k-1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

VARIABLES = ("d", "z", "x", "y", "w")

_BITS = 16
_MASK = (1 << _BITS) - 1
_SHIFTS = tuple((4 - i) * _BITS for i in range(5))  # d, z, x, y, w
_DEG_SHIFT = 5 * _BITS

KEY_ONE = 0  # the unit monomial


def pack_exponents(exponents: Iterable[int]) -> int:
    """Pack (e_d, e_z, e_x, e_y, e_w) into a single ordered key."""
    exps = tuple(exponents)
    if len(exps) != 5 or any(e < 0 or e > _MASK for e in exps):
        raise ValueError(f"need five exponents in [0, {_MASK}], got {exps!r}")
    key = sum(exps) << _DEG_SHIFT
    for e, s in zip(exps, _SHIFTS):
        key |= e << s
    return key


def unpack_exponents(key: int) -> tuple[int, int, int, int, int]:
    """Inverse of pack_exponents (degree field dropped)."""
    return tuple((key >> s) & _MASK for s in _SHIFTS)  # type: ignore[return-value]


def key_degree(key: int) -> int:
    return key >> _DEG_SHIFT


def _monomial_divides(kq: int, kp: int) -> bool:
    """True if the monomial kq divides the monomial kp (fieldwise <=)."""
    return all(((kq >> s) & _MASK) <= ((kp >> s) & _MASK) for s in _SHIFTS)


# ---------------------------------------------------------------------------
# Raw dict arithmetic.  These back the Polynomial class and are also used
# directly by the elimination core in gram.py, where wrapper overhead counts.
# ---------------------------------------------------------------------------

def raw_add(p: dict[int, int], q: dict[int, int]) -> dict[int, int]:
    r = dict(p)
    for k, c in q.items():
        s = r.get(k, 0) + c
        if s:
            r[k] = s
        elif k in r:
            del r[k]
    return r


def raw_sub(p: dict[int, int], q: dict[int, int]) -> dict[int, int]:
    r = dict(p)
    for k, c in q.items():
        s = r.get(k, 0) - c
        if s:
            r[k] = s
        elif k in r:
            del r[k]
    return r


def raw_mul(p: dict[int, int], q: dict[int, int]) -> dict[int, int]:
    if not p or not q:
        return {}
    if len(p) > len(q):
        p, q = q, p
    r: dict[int, int] = {}
    get = r.get
    for kp, cp in p.items():
        for kq, cq in q.items():
            k = kp + kq
            s = get(k, 0) + cp * cq
            if s:
                r[k] = s
            elif k in r:
                del r[k]
    return r


def raw_divide_exact(p: dict[int, int], q: dict[int, int]) -> dict[int, int] | None:
    """Quotient p/q when q divides p exactly in Z[d,z,x,y,w], else None.

    Multivariate division by the single divisor q with respect to the
    graded-lex key order.  If q | p, the remainder is forced to stay empty:
    any nonzero remainder r = q*(true quotient - partial quotient) would have
    a leading term divisible by the leading term of q.  So the first
    unreducible leading term certifies non-divisibility.
    """
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    if not p:
        return {}
    kq = max(q)
    cq = q[kq]
    rem = dict(p)
    quo: dict[int, int] = {}
    while rem:
        kr = max(rem)
        cr = rem[kr]
        if cr % cq or not _monomial_divides(kq, kr):
            return None
        kt = kr - kq
        ct = cr // cq
        quo[kt] = ct
        for k, c in q.items():
            key = k + kt
            s = rem.get(key, 0) - c * ct
            if s:
                rem[key] = s
            elif key in rem:
                del rem[key]
    return quo


def raw_divmod(p: dict[int, int], q: dict[int, int]) -> tuple[dict[int, int], dict[int, int]]:
    """Full division p = q*quo + rem; no term of rem is reducible by q's lead."""
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    kq = max(q)
    cq = q[kq]
    work = dict(p)
    quo: dict[int, int] = {}
    rem: dict[int, int] = {}
    while work:
        kr = max(work)
        cr = work[kr]
        if cr % cq or not _monomial_divides(kq, kr):
            rem[kr] = cr
            del work[kr]
            continue
        kt = kr - kq
        ct = cr // cq
        quo[kt] = ct
        for k, c in q.items():
            key = k + kt
            s = work.get(key, 0) - c * ct
            if s:
                work[key] = s
            elif key in work:
                del work[key]
    return quo, rem


def raw_pow(p: dict[int, int], k: int) -> dict[int, int]:
    if k < 0:
        raise ValueError("negative power of a polynomial")
    result = {KEY_ONE: 1}
    base = p
    while k:
        if k & 1:
            result = raw_mul(result, base)
        k >>= 1
        if k:
            base = raw_mul(base, base)
    return result


def raw_eval_mod(p: dict[int, int], point: tuple[int, ...], prime: int) -> int:
    """Evaluate p at the five residues (d, z, x, y, w) modulo prime."""
    if len(point) != 5:
        raise ValueError("need residues for all of d, z, x, y, w")
    powers: list[dict[int, int]] = [{0: 1} for _ in range(5)]

    def var_pow(i: int, e: int) -> int:
        cache = powers[i]
        got = cache.get(e)
        if got is None:
            got = pow(point[i] % prime, e, prime)
            cache[e] = got
        return got

    total = 0
    for key, coeff in p.items():
        v = coeff % prime
        for i, s in enumerate(_SHIFTS):
            e = (key >> s) & _MASK
            if e:
                v = v * var_pow(i, e) % prime
        total = (total + v) % prime
    return total


# ---------------------------------------------------------------------------
# Polynomial values
# ---------------------------------------------------------------------------

class NotDivisibleType:
    """Singleton result of exact_div when no exact quotient exists."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NotDivisible"

    def __bool__(self) -> bool:
        return False


NotDivisible = NotDivisibleType()


class InvalidSubstituentError(ValueError):
    """Raised when a substituent polynomial involves a forbidden variable."""


class Polynomial:
    """Immutable element of Z[d, z, x, y, w].

    >>> d, z = Polynomial.var("d"), Polynomial.var("z")
    >>> (d - z) * (d + z) == d**2 - z**2
    True
    >>> print((d**2 - z**2).text())
    d^2 - z^2
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: dict[int, int] | None = None):
        self._terms = {} if terms is None else {k: c for k, c in terms.items() if c}
        self._hash: int | None = None

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> Polynomial:
        return Polynomial()

    @staticmethod
    def one() -> Polynomial:
        return Polynomial({KEY_ONE: 1})

    @staticmethod
    def const(c: int) -> Polynomial:
        return Polynomial({KEY_ONE: c} if c else {})

    @staticmethod
    def var(name: str) -> Polynomial:
        i = VARIABLES.index(name)
        return Polynomial({pack_exponents(tuple(int(j == i) for j in range(5))): 1})

    @staticmethod
    def monomial(coeff: int, exponents: Iterable[int]) -> Polynomial:
        return Polynomial({pack_exponents(exponents): coeff} if coeff else {})

    # -- inspection ----------------------------------------------------------

    @property
    def raw(self) -> dict[int, int]:
        """The underlying key->coeff dict.  Treat as read-only."""
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def __len__(self) -> int:
        return len(self._terms)

    def total_degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        if not self._terms:
            return -1
        return key_degree(max(self._terms))

    def leading_term(self) -> tuple[int, int]:
        """(key, coeff) of the graded-lex leading term."""
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        k = max(self._terms)
        return k, self._terms[k]

    def terms(self) -> Iterator[tuple[tuple[int, int, int, int, int], int]]:
        """Yield (exponents, coeff) in descending canonical order."""
        for k in sorted(self._terms, reverse=True):
            yield unpack_exponents(k), self._terms[k]

    def coefficient(self, exponents: Iterable[int]) -> int:
        return self._terms.get(pack_exponents(exponents), 0)

    def variables(self) -> set[str]:
        used: set[str] = set()
        for k in self._terms:
            for name, s in zip(VARIABLES, _SHIFTS):
                if (k >> s) & _MASK:
                    used.add(name)
        return used

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> Polynomial | None:
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, int):
            return Polynomial.const(other)
        return None

    def __add__(self, other) -> Polynomial:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Polynomial(raw_add(self._terms, o._terms))

    __radd__ = __add__

    def __sub__(self, other) -> Polynomial:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Polynomial(raw_sub(self._terms, o._terms))

    def __rsub__(self, other) -> Polynomial:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Polynomial(raw_sub(o._terms, self._terms))

    def __neg__(self) -> Polynomial:
        return Polynomial({k: -c for k, c in self._terms.items()})

    def __mul__(self, other) -> Polynomial:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Polynomial(raw_mul(self._terms, o._terms))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Polynomial:
        return Polynomial(raw_pow(self._terms, k))

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(sorted(self._terms.items())))
        return self._hash

    # -- ring operations beyond +,* ------------------------------------------

    def substitute_z(self, s: Polynomial) -> Polynomial:
        """Replace z by s, which may involve only d (and constants)."""
        bad = s.variables() - {"d"}
        if bad:
            raise InvalidSubstituentError(
                f"substituent may involve only d, found {sorted(bad)}")
        z_shift = _SHIFTS[1]
        s_pows: dict[int, dict[int, int]] = {0: {KEY_ONE: 1}, 1: dict(s._terms)}

        def s_pow(e: int) -> dict[int, int]:
            got = s_pows.get(e)
            if got is None:
                got = raw_mul(s_pow(e - 1), s._terms)
                s_pows[e] = got
            return got

        acc: dict[int, int] = {}
        for k, c in self._terms.items():
            ez = (k >> z_shift) & _MASK
            base = k - (ez << z_shift) - (ez << _DEG_SHIFT)
            piece = raw_mul({base: c}, s_pow(ez)) if ez else {base: c}
            acc = raw_add(acc, piece)
        return Polynomial(acc)

    def eval_mod(self, point: tuple[int, ...], prime: int) -> int:
        """Value at the five residues (d, z, x, y, w) with arithmetic mod prime."""
        if prime <= (1 << 30):
            raise ValueError("prime must exceed 2^30")
        return raw_eval_mod(self._terms, point, prime)

    # -- serialization ---------------------------------------------------------

    def text(self) -> str:
        """Canonical text form, terms in descending graded-lex order.

        >>> print(Polynomial.var("d") ** 2 - 2)
        d^2 - 2
        """
        if not self._terms:
            return "0"
        pieces: list[str] = []
        for exps, c in self.terms():
            factors = [
                f"{v}^{e}" if e > 1 else v
                for v, e in zip(VARIABLES, exps)
                if e
            ]
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            if not pieces:
                pieces.append(body if c > 0 else "-" + body)
            else:
                pieces.append((" + " if c > 0 else " - ") + body)
        return "".join(pieces)

    def to_json_terms(self) -> list[list]:
        """JSON form: [[coeff-string, [e_d, e_z, e_x, e_y, e_w]], ...]."""
        return [[str(c), list(exps)] for exps, c in self.terms()]

    @staticmethod
    def from_json_terms(data: Iterable) -> Polynomial:
        terms: dict[int, int] = {}
        for coeff_str, exps in data:
            terms[pack_exponents(exps)] = int(coeff_str)
        return Polynomial(terms)

    def __str__(self) -> str:
        return self.text()

    def __repr__(self) -> str:
        return f"Polynomial({self.text()!r})"


def exact_div(p: Polynomial, q: Polynomial) -> Polynomial | NotDivisibleType:
    """Exact quotient p/q in the ring, or NotDivisible.

    A successful division is re-verified by multiplication.
    """
    if q.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    quo = raw_divide_exact(p.raw, q.raw)
    if quo is None:
        return NotDivisible
    if raw_mul(quo, q.raw) != p.raw:
        return NotDivisible
    return Polynomial(quo)


@lru_cache(maxsize=None)
def chebyshev_T(k: int, var: str = "d") -> Polynomial:
    """First-kind Chebyshev polynomial, normalization T_0 = 2, T_1 = var.

    >>> print(chebyshev_T(4))
    d^4 - 4*d^2 + 2
    """
    if k < 0:
        raise ValueError("Chebyshev index must be non-negative")
    if k == 0:
        return Polynomial.const(2)
    if k == 1:
        return Polynomial.var(var)
    return Polynomial.var(var) * chebyshev_T(k - 1, var) - chebyshev_T(k - 2, var)


@dataclass(frozen=True)
class FactoredPolynomial:
    """A product of polynomial factors with positive integer exponents.

    Kept unexpanded so large closed formulas can be evaluated factorwise.
    """

    factors: tuple[tuple[Polynomial, int], ...]

    def __post_init__(self):
        for base, e in self.factors:
            if base.is_zero():
                raise ValueError("zero factor in factored polynomial")
            if e < 1:
                raise ValueError("factor exponents must be positive")

    def expand(self) -> Polynomial:
        acc = {KEY_ONE: 1}
        for base, e in self.factors:
            acc = raw_mul(acc, raw_pow(base.raw, e))
        return Polynomial(acc)

    def eval_mod(self, point: tuple[int, ...], prime: int) -> int:
        total = 1
        for base, e in self.factors:
            total = total * pow(raw_eval_mod(base.raw, point, prime), e, prime) % prime
        return total

    def total_degree(self) -> int:
        return sum(base.total_degree() * e for base, e in self.factors)

    def text(self) -> str:
        return " * ".join(
            f"({base.text()})^{e}" if e > 1 else f"({base.text()})"
            for base, e in self.factors
        ) or "1"

    def __str__(self) -> str:
        return self.text()


# ---------------------------------------------------------------------------
# Modular utilities
# ---------------------------------------------------------------------------

# 2^62 - 57, prime; comfortably above the 2^61 preferred for identity testing.
DEFAULT_PRIME = 4611686018427387847

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for every n < 3.3 * 10^24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        v = pow(a, d, n)
        if v in (1, n - 1):
            continue
        for _ in range(r - 1):
            v = v * v % n
            if v == n - 1:
                break
        else:
            return False
    return True
