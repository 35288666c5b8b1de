"""Numerical Fatou/Julia classification of points of the complex plane."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

from .poly import MonicPoly, escape_radius, eval_derivative

DEFAULT_MAX_ITER = 2000
DEFAULT_EPS = 1e-9
MAX_PERIOD = 32
MULTIPLIER_THRESHOLD = 0.95
# cycle checks run on this stride (and at the final step), never per step
CHECK_STRIDE = 8


class Verdict(str, enum.Enum):
    BASIN_INFINITY = "BasinInfinity"
    ATTRACTING = "AttractingBasin"
    BOUNDED = "BoundedNonAttracting"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class ScalarClass:
    verdict: Verdict
    iterations_used: int
    escape_iter: int | None = None
    period: int | None = None
    multiplier: complex | None = None

    @property
    def bounded(self) -> bool:
        return self.verdict in (Verdict.ATTRACTING, Verdict.BOUNDED)

    def to_json(self) -> dict:
        out = {"verdict": self.verdict.value, "iterations_used": self.iterations_used}
        if self.escape_iter is not None:
            out["escape_iter"] = self.escape_iter
        if self.period is not None:
            out["period"] = self.period
            out["multiplier"] = [self.multiplier.real, self.multiplier.imag]
        return out


def detect_cycle(orbit, p: MonicPoly, eps: float = DEFAULT_EPS):
    """Look for an attracting cycle at the tail of ``orbit``.

    Returns ``(period, multiplier)`` for the smallest q <= 32 with
    |z_last - z_{last-q}| < eps whose multiplier has modulus < 0.95,
    otherwise None.
    """
    if not orbit:
        raise ValueError("orbit must be nonempty")
    last = len(orbit) - 1
    z_end = orbit[last]
    for q in range(1, min(MAX_PERIOD, last) + 1):
        start = last - q
        if abs(z_end - orbit[start]) < eps:
            mult = 1 + 0j
            for j in range(q):
                mult *= eval_derivative(p, orbit[start + j], 1)
            if abs(mult) < MULTIPLIER_THRESHOLD:
                return q, mult
            return None
    return None


def classify_point(
    p: MonicPoly,
    z: complex,
    max_iter: int = DEFAULT_MAX_ITER,
    eps: float = DEFAULT_EPS,
) -> ScalarClass:
    """Escape / attraction / bounded verdict for the orbit of z.

    Never returns Undecided; see :func:`classify_neighborhood` for that.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    R = escape_radius(p)
    coeffs = p.coeffs[::-1]
    z = complex(z)
    if abs(z) > R:
        return ScalarClass(Verdict.BASIN_INFINITY, 0, escape_iter=0)
    # window is long enough to hold the last MAX_PERIOD iterates plus current
    orbit = [z]
    for k in range(1, max_iter + 1):
        acc = 1 + 0j
        for a in coeffs:
            acc = acc * z + a
        z = acc
        if abs(z) > R:
            return ScalarClass(Verdict.BASIN_INFINITY, k, escape_iter=k)
        orbit.append(z)
        if len(orbit) > 4 * MAX_PERIOD:
            del orbit[: len(orbit) - MAX_PERIOD - 1]
        if k % CHECK_STRIDE == 0 or k == max_iter:
            hit = detect_cycle(orbit, p, eps)
            if hit is not None:
                return ScalarClass(Verdict.ATTRACTING, k, period=hit[0], multiplier=hit[1])
    return ScalarClass(Verdict.BOUNDED, max_iter)


def _ring(z: complex, delta: float) -> list[complex]:
    return [z + delta * cmath.exp(2j * math.pi * k / 8) for k in range(8)]


@dataclass(frozen=True)
class NeighborhoodClass:
    """Verdict of a point together with its 8 perturbations at radius delta."""

    center: ScalarClass
    proximate: bool
    undecided: bool

    @property
    def decisive(self) -> bool:
        return not (self.proximate or self.undecided)

    @property
    def verdict(self) -> Verdict:
        return Verdict.UNDECIDED if self.undecided else self.center.verdict


def classify_neighborhood(
    p: MonicPoly,
    z: complex,
    delta: float,
    max_iter: int = DEFAULT_MAX_ITER,
    eps: float = DEFAULT_EPS,
) -> NeighborhoodClass:
    """Classify z and the ring z + delta e^{2 pi i k/8}, k = 0..7.

    ``proximate`` is set when the nine samples split between escape and
    bounded. ``undecided`` is set when there is no such split but the
    bounded samples disagree on attracting vs non-attracting: a component
    boundary was crossed without an escaping witness.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    center = classify_point(p, z, max_iter, eps)
    kinds = {center.verdict}
    for w in _ring(z, delta):
        kinds.add(classify_point(p, w, max_iter, eps).verdict)
        if Verdict.BASIN_INFINITY in kinds and len(kinds) > 1:
            return NeighborhoodClass(center, True, False)
    undecided = Verdict.ATTRACTING in kinds and Verdict.BOUNDED in kinds
    return NeighborhoodClass(center, False, undecided)


def julia_proximate(
    p: MonicPoly,
    z: complex,
    delta: float,
    max_iter: int = DEFAULT_MAX_ITER,
    eps: float = DEFAULT_EPS,
) -> bool:
    """True iff z lies within delta of the boundary of the filled Julia set.

    Decided by sampling: among z and its 8 ring perturbations, at least one
    escapes and at least one stays bounded.
    """
    return classify_neighborhood(p, z, delta, max_iter, eps).proximate
