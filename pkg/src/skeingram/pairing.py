"""Gluing diagrams along the marked boundary and classifying the curves.

The pairing of two diagrams glues the first into the inner band and the
mirror image of the second into the outer band of a doubled surface: an
annulus when both diagrams avoid the crosscap reading, a Klein bottle (two
Mobius bands sharing their boundary) otherwise.  Crosscap one belongs to the
first argument, crosscap two to the second.

Curves are traced combinatorially.  The angular position is tracked as a
real lift (full turn = 2n points, seam lines at 0.5 + 2nZ), and crosscap
passes compose deck transformations of the glued surface's universal cover.
A deck element is (eps, u, tau): the radial part r -> eps*r + u composed of
reflections across the crosscap mirrors, and tau half-turns of angular
shift.  Closed-curve conjugacy classes then classify as

    identity            -> d (null homotopic)
    (1, 0, +-2)         -> z (parallel to the gluing circle)
    (-1, u=1 mod 6, +-1) -> x (through crosscap one)
    (-1, u=4 mod 6, +-1) -> y (through crosscap two)
    (1, +-3, 0)         -> w (through both crosscaps)

and anything else signals a non-embedded trace, i.e. a bug.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .diagrams import AnnularDiagram, Diagram, MobiusDiagram, _through_endpoints
from .polyring import Polynomial, pack_exponents

PASS_CC1 = "pass-crosscap-1"
PASS_CC2 = "pass-crosscap-2"
SEAM_POS = "cross-seam(+1)"
SEAM_NEG = "cross-seam(-1)"

IDENTITY = (1, 0, 0)

# Reflections across the crosscap mirrors, with the angular lift convention
# that a pass advances the local angle by one half-turn.
_PASS_ELEMENT = {1: (-1, 1, -1), 2: (-1, 4, -1)}


class MismatchedSizeError(ValueError):
    """The two diagrams have different numbers of boundary points."""


class InvalidWindingError(Exception):
    """An annular curve wound more than once; the trace is not embedded."""


class UnrecognizedClassError(Exception):
    """A traced curve matches none of the five Klein-bottle classes."""


def _compose(g: tuple[int, int, int], h: tuple[int, int, int]) -> tuple[int, int, int]:
    return (g[0] * h[0], g[0] * h[1] + g[1], g[2] + h[2])


@dataclass(frozen=True)
class GluedCurve:
    """One closed curve of a gluing: its traversal events and deck element."""

    events: tuple[str, ...]
    deck: tuple[int, int, int]

    def crosscap_passes(self) -> tuple[int, int]:
        return (self.events.count(PASS_CC1), self.events.count(PASS_CC2))

    def net_seam(self) -> int:
        return self.events.count(SEAM_POS) - self.events.count(SEAM_NEG)

    def to_json(self) -> dict:
        return {"events": list(self.events)}


class _Side:
    """Arc lookup for one side of a gluing."""

    __slots__ = ("plain_at", "through_index", "endpoints", "t", "crosscap")

    def __init__(self, diag: Diagram, crosscap: int):
        self.crosscap = crosscap
        self.plain_at: dict[int, tuple[int, int, bool]] = {}
        for arc in diag.plain_arcs:
            self.plain_at[arc[0]] = arc
            self.plain_at[arc[1]] = arc
        self.endpoints = _through_endpoints(diag.through_arcs)
        self.t = len(self.endpoints) // 2
        self.through_index = {p: q for q, p in enumerate(self.endpoints)}


def _seam_crossings(a: Fraction | int, b: Fraction | int, n: int) -> int:
    """Signed count of seam lines 0.5 + 2nZ crossed moving from a to b."""
    period = 2 * n
    half = Fraction(1, 2)
    return int((b - half) // period) - int((a - half) // period)


def _emit_seam(events: list[str], count: int) -> None:
    events.extend([SEAM_POS] * count if count > 0 else [SEAM_NEG] * (-count))


def _traverse(side: _Side, point: int, theta: int, n: int,
              events: list[str], gamma: tuple[int, int, int],
              ) -> tuple[int, int, tuple[int, int, int]]:
    """Follow the side's arc entered at point; return (exit point, theta, gamma)."""
    q = side.through_index.get(point)
    if q is None:
        i, j, seam = side.plain_at[point]
        width = (i + 2 * n - j) if seam else (j - i)
        delta = width if point == (j if seam else i) else -width
        _emit_seam(events, _seam_crossings(theta, theta + delta, n))
        return (j if point == i else i), theta + delta, gamma
    # Through arc: ride to the crosscap, pass, and ride back out.  The 2t
    # attachment angles are equally spaced, anchored at the smallest
    # endpoint; the pass advances the angle lift by one half-turn.
    partner_q = (q + side.t) % (2 * side.t)
    partner = side.endpoints[partner_q]
    base = theta - (point - side.endpoints[0])
    att_in = base + Fraction(q * n, side.t)
    theta_out = theta + (partner - point) % (2 * n)
    _emit_seam(events, _seam_crossings(theta, att_in, n))
    events.append(PASS_CC1 if side.crosscap == 1 else PASS_CC2)
    _emit_seam(events, _seam_crossings(att_in + n, theta_out, n))
    return partner, theta_out, _compose(gamma, _PASS_ELEMENT[side.crosscap])


def glue_and_trace(m_i: Diagram, m_j: Diagram) -> list[GluedCurve]:
    """Glue m_i to the mirror of m_j and trace the closed curves.

    Every boundary point is consumed exactly once; the returned curves are
    ordered by their smallest starting point.
    """
    if m_i.n != m_j.n:
        raise MismatchedSizeError(f"cannot glue n={m_i.n} with n={m_j.n}")
    n = m_i.n
    inner = _Side(m_i, crosscap=1)
    outer = _Side(m_j, crosscap=2)
    unvisited = set(range(1, 2 * n + 1))
    curves: list[GluedCurve] = []
    while unvisited:
        start = min(unvisited)
        events: list[str] = []
        gamma = IDENTITY
        theta = start
        point = start
        while True:
            unvisited.discard(point)
            point, theta, gamma = _traverse(inner, point, theta, n, events, gamma)
            unvisited.discard(point)
            point, theta, gamma = _traverse(outer, point, theta, n, events, gamma)
            if point == start:
                break
        turns, rem = divmod(theta - start, 2 * n)
        if rem:
            raise AssertionError("angle lift failed to close on a full turn")
        deck = _compose(gamma, (1, 0, 2 * turns))
        curves.append(GluedCurve(tuple(events), deck))
    return curves


# ---------------------------------------------------------------------------
# Curve classification
# ---------------------------------------------------------------------------

def classify_annulus(curve: GluedCurve) -> str:
    """'z' for a core-parallel curve, 'd' for a contractible one."""
    p1, p2 = curve.crosscap_passes()
    if p1 or p2:
        raise ValueError("annular classification on a curve with crosscap passes")
    eps, u, tau = curve.deck
    winding = tau // 2
    if abs(winding) > 1:
        raise InvalidWindingError(
            f"net winding {winding} on an annular curve; trace is not embedded")
    return "z" if winding else "d"


def classify_klein(curve: GluedCurve) -> str:
    """One of 'd', 'z', 'x', 'y', 'w'."""
    eps, u, tau = curve.deck
    if eps == 1 and u == 0 and tau == 0:
        label = "d"
    elif eps == 1 and u == 0 and tau in (2, -2):
        label = "z"
    elif eps == 1 and u in (3, -3) and tau == 0:
        label = "w"
    elif eps == -1 and tau in (1, -1) and u % 6 == 1:
        label = "x"
    elif eps == -1 and tau in (1, -1) and u % 6 == 4:
        label = "y"
    else:
        raise UnrecognizedClassError(f"deck element {curve.deck} is not one of "
                                     "the five embedded curve classes")
    p1, p2 = curve.crosscap_passes()
    expected = {(0, 0): "dz", (1, 0): "x", (0, 1): "y", (1, 1): "w"}[(p1 % 2, p2 % 2)]
    if label not in expected:
        raise UnrecognizedClassError(
            f"class {label} inconsistent with crosscap parities ({p1}, {p2})")
    return label


_VAR_INDEX = {"d": 0, "z": 1, "x": 2, "y": 3, "w": 4}


def _class_monomial(labels: Iterable[str]) -> Polynomial:
    exps = [0, 0, 0, 0, 0]
    for lab in labels:
        exps[_VAR_INDEX[lab]] += 1
    return Polynomial({pack_exponents(exps): 1})


def bilinear_B(b_i: AnnularDiagram, b_j: AnnularDiagram) -> Polynomial:
    """The annular pairing: the monomial z^k d^m counting curve classes."""
    return _class_monomial(classify_annulus(c) for c in glue_and_trace(b_i, b_j))


def bilinear_Mb(m_i: Diagram, m_j: Diagram) -> Polynomial:
    """The Mobius-band pairing: the monomial d^m x^n y^k z^l w^h."""
    return _class_monomial(classify_klein(c) for c in glue_and_trace(m_i, m_j))
