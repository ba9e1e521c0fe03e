"""Exact Kolmogorov, total-variation, and Wasserstein-1 distances.

All three have closed forms for step CDFs, so they are computed exactly
from the atom representation; no sampling noise enters ball-membership
checks or bound sandwiches.  Atom positions are compared exactly: canonical
measures produced by the same arithmetic share bit-identical coordinates.
"""

from __future__ import annotations

import enum
import math

from .measures import FiniteMeasure

# Additive slack for ball membership: adversarial constructions sit exactly
# on the boundary (e.g. total variation exactly eps), so a few ulp of float
# noise must not eject them.
BALL_SLACK = 1e-12


class MismatchedInterval(ValueError):
    pass


class DistanceKind(enum.Enum):
    KOLMOGOROV = "kolmogorov"
    TOTAL_VARIATION = "total_variation"
    WASSERSTEIN = "wasserstein"

    @classmethod
    def from_text(cls, text: str) -> "DistanceKind":
        key = text.strip().lower().replace("-", "_")
        aliases = {
            "kolmogorov": cls.KOLMOGOROV,
            "k": cls.KOLMOGOROV,
            "total_variation": cls.TOTAL_VARIATION,
            "tv": cls.TOTAL_VARIATION,
            "wasserstein": cls.WASSERSTEIN,
            "w": cls.WASSERSTEIN,
        }
        if key not in aliases:
            raise ValueError(f"unknown distance kind {text!r}")
        return aliases[key]

    def short(self) -> str:
        return {"kolmogorov": "kolmogorov", "total_variation": "tv", "wasserstein": "wasserstein"}[
            self.value
        ]


def _check_same_interval(a: FiniteMeasure, b: FiniteMeasure) -> None:
    if a.upper != b.upper:
        raise MismatchedInterval(f"measures live on [0,{a.upper}] vs [0,{b.upper}]")


def _merged_breakpoints(a: FiniteMeasure, b: FiniteMeasure) -> list[float]:
    return sorted(set(a.support) | set(b.support))


def kolmogorov(a: FiniteMeasure, b: FiniteMeasure) -> float:
    """sup_t |F_a(t) - F_b(t)|, evaluated at the merged atom positions.

    For step CDFs the supremum is attained at an atom (right limit), so the
    merged breakpoints suffice.
    """
    _check_same_interval(a, b)
    best = 0.0
    fa = fb = 0.0
    ia = ib = 0
    for t in _merged_breakpoints(a, b):
        while ia < len(a.support) and a.support[ia] <= t:
            fa += a.weights[ia]
            ia += 1
        while ib < len(b.support) and b.support[ib] <= t:
            fb += b.weights[ib]
            ib += 1
        best = max(best, abs(fa - fb))
    return best


def total_variation(a: FiniteMeasure, b: FiniteMeasure) -> float:
    """sup_A |a(A) - b(A)| = half the L1 distance between the atom weights.

    For finite-support measures the power-set sigma-algebra is the only
    sensible convention, and the supremum is attained by the set of atoms
    where a outweighs b.
    """
    _check_same_interval(a, b)
    wa = dict(zip(a.support, a.weights))
    wb = dict(zip(b.support, b.weights))
    pts = set(wa) | set(wb)
    return 0.5 * math.fsum(abs(wa.get(p, 0.0) - wb.get(p, 0.0)) for p in pts)


def wasserstein1(a: FiniteMeasure, b: FiniteMeasure) -> float:
    """Exact integral of |F_a - F_b| over [0, upper].

    Both CDFs are constant between merged breakpoints, so the integral is a
    finite sum of rectangle areas; beyond the largest atom both CDFs are 1.
    """
    _check_same_interval(a, b)
    pts = _merged_breakpoints(a, b)
    fa = fb = 0.0
    ia = ib = 0
    pieces = []
    for j, t in enumerate(pts):
        while ia < len(a.support) and a.support[ia] <= t:
            fa += a.weights[ia]
            ia += 1
        while ib < len(b.support) and b.support[ib] <= t:
            fb += b.weights[ib]
            ib += 1
        nxt = pts[j + 1] if j + 1 < len(pts) else a.upper
        pieces.append(abs(fa - fb) * (nxt - t))
    return math.fsum(pieces)


def distance(kind: DistanceKind, a: FiniteMeasure, b: FiniteMeasure) -> float:
    if kind is DistanceKind.KOLMOGOROV:
        return kolmogorov(a, b)
    if kind is DistanceKind.TOTAL_VARIATION:
        return total_variation(a, b)
    if kind is DistanceKind.WASSERSTEIN:
        return wasserstein1(a, b)
    raise ValueError(f"unknown distance kind {kind!r}")


def in_ball(center: FiniteMeasure, m: FiniteMeasure, kind: DistanceKind, eps: float) -> bool:
    """d(center, m) <= eps + BALL_SLACK."""
    if eps < 0.0:
        raise ValueError(f"ball radius must be >= 0, got {eps}")
    return distance(kind, center, m) <= eps + BALL_SLACK
