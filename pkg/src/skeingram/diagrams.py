"""Crossingless-connection diagram bases on the annulus and Mobius band.

Boundary points are labeled 1..2n counterclockwise on the outer circle.  A
fixed seam runs from the hole (or crosscap) to the boundary between point 2n
and point 1.  A plain arc is a triple (i, j, seam) with i < j; its seam bit
records whether it crosses the seam, equivalently which side of the hole it
passes.  Arcs lift to chords on the integer line:

    (i, j, False) -> chord (i, j)          (i, j, True) -> chord (j, i + 2n)

together with all translates by 2n.  A set of arcs is realizable without
crossings iff no two lifted chords of distinct arcs interleave.

A through arc enters the crosscap once and re-emerges at the antipode.  With
2t through endpoints e_1 < ... < e_2t, embedded disjointness forces the
antipodal pairing e_q <-> e_{q+t}, and confines every plain arc to one of the
2t sectors cut out by the through arcs (its seam bit is then determined by
whether the arc spans the seam inside the wrap-around sector).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Union

Arc = tuple[int, int, bool]


class CapExceededError(Exception):
    """Requested size is above the configured enumeration or matrix cap."""


class ParseError(ValueError):
    """Malformed canonical diagram text; carries the failing position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# ---------------------------------------------------------------------------
# Noncrossing test
# ---------------------------------------------------------------------------

def _lift(arc: Arc, n: int) -> tuple[int, int]:
    i, j, seam = arc
    return (j, i + 2 * n) if seam else (i, j)


def _interleave(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[0] < a[1] < b[1] or b[0] < a[0] < b[1] < a[1]


def _arcs_cross(a: Arc, b: Arc, n: int) -> bool:
    ca, cb = _lift(a, n), _lift(b, n)
    period = 2 * n
    return any(
        _interleave(ca, (cb[0] + k * period, cb[1] + k * period))
        for k in (-2, -1, 0, 1, 2)
    )


def is_noncrossing(arcs: Iterable[Arc], n: int) -> bool:
    """True iff the arcs can be simultaneously embedded in the annulus.

    Endpoints must form a partial matching of {1, ..., 2n}.
    """
    arcs = list(arcs)
    seen: set[int] = set()
    for i, j, _ in arcs:
        if not (1 <= i < j <= 2 * n):
            raise ValueError(f"arc endpoints ({i},{j}) out of range for n={n}")
        if i in seen or j in seen:
            raise ValueError("arc endpoints are not a partial matching")
        seen.update((i, j))
    return not any(
        _arcs_cross(a, b, n) for a, b in combinations(arcs, 2)
    )


# ---------------------------------------------------------------------------
# Diagram types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnnularDiagram:
    """A crossingless perfect matching of 2n boundary points in the annulus.

    Also serves as a Mobius-band diagram whose arcs avoid the crosscap (the
    crosscap acts as the hole for the combinatorics).
    """

    n: int
    arcs: frozenset[Arc]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        endpoints = sorted(p for i, j, _ in self.arcs for p in (i, j))
        if endpoints != list(range(1, 2 * self.n + 1)):
            raise ValueError("arcs must perfectly match the 2n boundary points")
        if not is_noncrossing(self.arcs, self.n):
            raise ValueError("arcs cross")

    @property
    def through_arcs(self) -> tuple[tuple[int, int], ...]:
        return ()

    @property
    def plain_arcs(self) -> frozenset[Arc]:
        return self.arcs

    def __str__(self) -> str:
        return serialize(self)


@dataclass(frozen=True)
class MobiusDiagram:
    """A crossingless connection in the Mobius band.

    plain_arcs avoid the crosscap; each pair in through_arcs passes through
    it exactly once.
    """

    n: int
    plain_arcs: frozenset[Arc]
    through_arcs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        _validate_mobius(self.n, self.plain_arcs, self.through_arcs)

    def __str__(self) -> str:
        return serialize(self)


Diagram = Union[AnnularDiagram, MobiusDiagram]


def _through_endpoints(through_arcs: Iterable[tuple[int, int]]) -> list[int]:
    return sorted(p for pair in through_arcs for p in pair)


def antipodal_pairing(endpoints: Iterable[int]) -> tuple[tuple[int, int], ...]:
    """The unique crossingless pairing of through endpoints: q with q+t."""
    e = sorted(endpoints)
    if len(e) % 2:
        raise ValueError("odd number of through endpoints")
    t = len(e) // 2
    return tuple((e[q], e[q + t]) for q in range(t))


def _sectors(n: int, endpoints: list[int]) -> list[list[int]]:
    """Boundary points strictly between consecutive through endpoints.

    The last sector wraps across the seam; its points are listed in
    traversal order (after e_2t, then before e_1).
    """
    out: list[list[int]] = []
    m = len(endpoints)
    for idx in range(m):
        a = endpoints[idx]
        if idx < m - 1:
            out.append(list(range(a + 1, endpoints[idx + 1])))
        else:
            out.append(list(range(a + 1, 2 * n + 1)) + list(range(1, endpoints[0])))
    return out


def _wrap_seam_bit(n: int, endpoints: list[int], i: int, j: int) -> bool:
    # Inside the wrap sector, an arc crosses the seam iff it joins a point
    # after e_2t with a point before e_1.
    return i < endpoints[0] and j > endpoints[-1]


def _validate_mobius(n: int, plain_arcs: frozenset[Arc],
                     through_arcs: tuple[tuple[int, int], ...]) -> None:
    if n < 1:
        raise ValueError("n must be positive")
    t = len(through_arcs)
    if t > n:
        raise ValueError("more through arcs than boundary pairs")
    endpoints = _through_endpoints(through_arcs)
    if len(set(endpoints)) != len(endpoints):
        raise ValueError("repeated through endpoints")
    all_points = sorted(
        [p for i, j, _ in plain_arcs for p in (i, j)] + endpoints)
    if all_points != list(range(1, 2 * n + 1)):
        raise ValueError("arcs must perfectly match the 2n boundary points")
    if t == 0:
        if not is_noncrossing(plain_arcs, n):
            raise ValueError("plain arcs cross")
        return
    if tuple(sorted(through_arcs)) != antipodal_pairing(endpoints):
        raise ValueError("through arcs must realize the antipodal pairing")
    sectors = _sectors(n, endpoints)
    position: dict[int, tuple[int, int]] = {}
    for s_idx, pts in enumerate(sectors):
        for p_idx, p in enumerate(pts):
            position[p] = (s_idx, p_idx)
    wrap_idx = len(sectors) - 1
    by_sector: dict[int, list[tuple[int, int]]] = {}
    for i, j, seam in plain_arcs:
        si, pi = position[i]
        sj, pj = position[j]
        if si != sj:
            raise ValueError(f"plain arc ({i},{j}) crosses a through arc")
        expected = si == wrap_idx and _wrap_seam_bit(n, endpoints, i, j)
        if seam != expected:
            raise ValueError(f"arc ({i},{j}) carries seam bit {seam}, "
                             f"geometry forces {expected}")
        by_sector.setdefault(si, []).append((min(pi, pj), max(pi, pj)))
    for pairs in by_sector.values():
        for a, b in combinations(pairs, 2):
            if _interleave(a, b):
                raise ValueError("plain arcs cross inside a sector")


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def _annular_arc_sets(n: int) -> Iterator[frozenset[Arc]]:
    """All noncrossing seam-decorated perfect matchings, by backtracking."""

    def extend(unmatched: list[int], placed: list[Arc]) -> Iterator[frozenset[Arc]]:
        if not unmatched:
            yield frozenset(placed)
            return
        i = unmatched[0]
        for pos in range(1, len(unmatched)):
            j = unmatched[pos]
            rest = unmatched[1:pos] + unmatched[pos + 1:]
            for seam in (False, True):
                arc = (i, j, seam)
                if all(not _arcs_cross(arc, other, n) for other in placed):
                    yield from extend(rest, placed + [arc])

    yield from extend(list(range(1, 2 * n + 1)), [])


def _disk_pairings(seq: list[int]) -> Iterator[list[tuple[int, int]]]:
    """Noncrossing pairings of seq with respect to its list order."""
    if not seq:
        yield []
        return
    for m in range(1, len(seq), 2):
        for inside in _disk_pairings(seq[1:m]):
            for outside in _disk_pairings(seq[m + 1:]):
                yield [(seq[0], seq[m])] + inside + outside


def _mobius_with_through(n: int, t: int) -> Iterator[MobiusDiagram]:
    """All diagrams with exactly t >= 1 through arcs."""
    for endpoint_set in combinations(range(1, 2 * n + 1), 2 * t):
        endpoints = list(endpoint_set)
        sectors = _sectors(n, endpoints)
        if any(len(pts) % 2 for pts in sectors):
            continue
        through = antipodal_pairing(endpoints)
        wrap_idx = len(sectors) - 1
        per_sector = [list(_disk_pairings(pts)) for pts in sectors]
        for combo in product(*per_sector):
            plain: list[Arc] = []
            for s_idx, pairs in enumerate(combo):
                for p, q in pairs:
                    i, j = min(p, q), max(p, q)
                    seam = s_idx == wrap_idx and _wrap_seam_bit(n, endpoints, i, j)
                    plain.append((i, j, seam))
            yield MobiusDiagram(n, frozenset(plain), through)


VALID_TAGS = ("b", "mb0", "mb1", "mb1union", "mbfull")

DEFAULT_CAPS = {"b": 8, "mb0": 8, "mb1": 6, "mb1union": 6, "mbfull": 4}


@dataclass(frozen=True)
class BasisFamily:
    """One of the five crossingless-connection bases, at size n."""

    tag: str
    n: int

    def __post_init__(self):
        if self.tag not in VALID_TAGS:
            raise ValueError(f"unknown family tag {self.tag!r}; "
                             f"expected one of {VALID_TAGS}")
        if self.n < 1:
            raise ValueError("n must be positive")

    def expected_size(self) -> int:
        n = self.n
        if self.tag in ("b", "mb0"):
            return math.comb(2 * n, n)
        if self.tag == "mb1":
            return math.comb(2 * n, n - 1)
        if self.tag == "mb1union":
            return math.comb(2 * n, n) + math.comb(2 * n, n - 1)
        return sum(math.comb(2 * n, k) for k in range(n + 1))

    def stratum_sizes(self) -> dict[int, int]:
        """Expected diagram count per number of through arcs."""
        n = self.n
        if self.tag in ("b", "mb0"):
            return {0: math.comb(2 * n, n)}
        if self.tag == "mb1":
            return {1: math.comb(2 * n, n - 1)}
        if self.tag == "mb1union":
            return {0: math.comb(2 * n, n), 1: math.comb(2 * n, n - 1)}
        return {n - k: math.comb(2 * n, k) for k in range(n + 1)}


def enumerate_basis(family: BasisFamily, cap: int | None = None) -> list[Diagram]:
    """The family's basis diagrams in canonical (serialized) order.

    Annular-type elements (and the crosscap-avoiding Mobius stratum) are
    returned as AnnularDiagram; strata with through arcs as MobiusDiagram.
    """
    limit = cap if cap is not None else DEFAULT_CAPS[family.tag]
    if family.n > limit:
        raise CapExceededError(
            f"family {family.tag!r} capped at n={limit}, requested n={family.n}")
    n = family.n
    out: list[Diagram] = []
    if family.tag in ("b", "mb0", "mb1union", "mbfull"):
        out.extend(AnnularDiagram(n, arcs) for arcs in _annular_arc_sets(n))
    if family.tag in ("mb1", "mb1union"):
        out.extend(_mobius_with_through(n, 1))
    if family.tag == "mbfull":
        for t in range(1, n + 1):
            out.extend(_mobius_with_through(n, t))
    out.sort(key=serialize)
    if len(set(map(serialize, out))) != len(out):
        raise AssertionError("duplicate diagrams in enumeration")
    return out


# ---------------------------------------------------------------------------
# Inversion (mirror image)
# ---------------------------------------------------------------------------

def invert(diag: Diagram) -> Diagram:
    """Mirror image under the label reflection i -> 2n+1-i.

    The reflection axis passes through the seam gap, so seam bits carry
    over unchanged; through arcs keep their through status.  Involution.
    """
    n = diag.n
    rho = lambda p: 2 * n + 1 - p
    plain = frozenset((rho(j), rho(i), s) for i, j, s in diag.plain_arcs)
    if isinstance(diag, AnnularDiagram):
        return AnnularDiagram(n, plain)
    through = antipodal_pairing([rho(p) for p in _through_endpoints(diag.through_arcs)])
    return MobiusDiagram(n, plain, through)


# ---------------------------------------------------------------------------
# Canonical text form
# ---------------------------------------------------------------------------

def serialize(diag: Diagram) -> str:
    """Canonical text, e.g. ``n=2;A(1,4);A(2,3,s)`` or ``n=1;T(1,2)``."""
    parts = [f"n={diag.n}"]
    for i, j, seam in sorted(diag.plain_arcs):
        parts.append(f"A({i},{j},s)" if seam else f"A({i},{j})")
    for i, j in sorted(diag.through_arcs):
        parts.append(f"T({i},{j})")
    return ";".join(parts)


_HEAD_RE = re.compile(r"n=(\d+)$")
_ITEM_RE = re.compile(r"(A|T)\((\d+),(\d+)(,s)?\)$")


def parse(text: str) -> Diagram:
    """Inverse of serialize.  Raises ParseError with the failing position."""
    pieces = text.split(";")
    pos = 0
    head = _HEAD_RE.match(pieces[0])
    if not head:
        raise ParseError(f"expected 'n=<int>', got {pieces[0]!r}", pos)
    n = int(head.group(1))
    if n < 1:
        raise ParseError("n must be positive", pos)
    plain: list[Arc] = []
    through: list[tuple[int, int]] = []
    for idx, piece in enumerate(pieces[1:], start=1):
        pos = sum(len(p) + 1 for p in pieces[:idx])
        m = _ITEM_RE.match(piece)
        if not m:
            raise ParseError(f"malformed arc {piece!r}", pos)
        kind, i, j, seam = m.group(1), int(m.group(2)), int(m.group(3)), bool(m.group(4))
        if not (1 <= i < j <= 2 * n):
            raise ParseError(f"arc endpoints ({i},{j}) invalid for n={n}", pos)
        if kind == "T":
            if seam:
                raise ParseError("through arcs carry no seam flag", pos)
            through.append((i, j))
        else:
            plain.append((i, j, seam))
    try:
        if through:
            return MobiusDiagram(n, frozenset(plain), tuple(through))
        return AnnularDiagram(n, frozenset(plain))
    except ValueError as exc:
        raise ParseError(str(exc), 0) from exc
