"""Matrix functions by the Cauchy integral, discretized on circles.

For q holomorphic on a neighbourhood of the spectrum of X and a contour
enclosing it once,

    q(X) = 1/(2 pi i) * integral of q(zeta) (zeta I - X)^{-1} d zeta.

On a circle the trapezoid rule is spectrally accurate for this integrand,
so a fixed node count suffices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .cmatrix import Spectrum, as_cmatrix, eigenvalues, identity, lu_solve
from .errors import ContourTooClose
from .poly import MonicPoly, eval_scalar

CLEARANCE = 1e-9
DEFAULT_NODES = 128

ScalarFunction = Union[MonicPoly, Callable[[complex], complex]]


@dataclass(frozen=True)
class Contour:
    """Union of positively oriented circles ``(center, radius)``."""

    circles: tuple[tuple[complex, float], ...]
    nodes_per_circle: int = DEFAULT_NODES
    joint: bool = False

    def __post_init__(self):
        circles = tuple((complex(c), float(r)) for c, r in self.circles)
        if not circles:
            raise ValueError("contour needs at least one circle")
        if self.nodes_per_circle < 16:
            raise ValueError("nodes_per_circle must be >= 16")
        for c, r in circles:
            if not r > 0:
                raise ValueError("circle radius must be positive")
        if not self.joint:
            for i in range(len(circles)):
                for j in range(i + 1, len(circles)):
                    (c1, r1), (c2, r2) = circles[i], circles[j]
                    if abs(c1 - c2) <= r1 + r2:
                        raise ValueError(
                            f"circles {i} and {j} intersect; pass joint=True to allow"
                        )
        object.__setattr__(self, "circles", circles)

    @classmethod
    def circle(cls, center: complex, radius: float, nodes: int = DEFAULT_NODES) -> "Contour":
        return cls(((center, radius),), nodes)

    @property
    def length(self) -> float:
        return sum(2 * math.pi * r for _, r in self.circles)

    def nodes(self):
        """Yield (zeta, weight) with weight = (zeta - center)/N, fixed order."""
        N = self.nodes_per_circle
        for c, r in self.circles:
            for k in range(N):
                w = r * complex(math.cos(2 * math.pi * k / N), math.sin(2 * math.pi * k / N))
                yield c + w, w / N


def _check_clearance(spectrum: Spectrum, circles) -> None:
    for c, r in circles:
        for lam in spectrum:
            gap = abs(abs(lam - c) - r)
            if gap <= CLEARANCE:
                raise ContourTooClose(
                    f"eigenvalue {lam} is {gap:.3g} from circle ({c}, {r})"
                )


def resolvent(X, zeta: complex, spectrum: Spectrum | None = None) -> np.ndarray:
    """(zeta I - X)^{-1}.

    Raises ContourTooClose when zeta is within 1e-9 of an eigenvalue and
    SingularMatrix if the LU pivots collapse anyway.
    """
    X = as_cmatrix(X)
    if spectrum is None:
        spectrum = eigenvalues(X)
    for lam in spectrum:
        if abs(zeta - lam) <= CLEARANCE:
            raise ContourTooClose(f"{zeta} is within {CLEARANCE} of eigenvalue {lam}")
    n = X.shape[0]
    return lu_solve(zeta * identity(n) - X, identity(n))


def _scalar_callable(q: ScalarFunction, m: int) -> Callable[[complex], complex]:
    if isinstance(q, MonicPoly):
        def f(z, p=q):
            for _ in range(m):
                z = eval_scalar(p, z)
            return z
        return f
    if m != 1:
        raise ValueError("composition count applies only to polynomial maps")
    return q


def _quadrature(X, contour: Contour, f) -> np.ndarray:
    n = X.shape[0]
    I = identity(n)
    acc = np.zeros((n, n), dtype=np.complex128)
    for zeta, w in contour.nodes():
        fz = f(zeta)
        if fz == 0:
            continue
        acc += (fz * w) * lu_solve(zeta * I - X, I)
    return acc


def contour_eval(
    q: ScalarFunction,
    X,
    contour: Contour,
    m: int = 1,
) -> np.ndarray:
    """q^m(X) by trapezoidal quadrature of the matrix Cauchy integral.

    ``q`` is a MonicPoly (composed ``m`` times; m = 0 gives the identity) or
    any scalar callable. Every eigenvalue must lie inside exactly one circle.
    """
    X = as_cmatrix(X)
    if m < 0:
        raise ValueError("m must be >= 0")
    spec = eigenvalues(X)
    _check_clearance(spec, contour.circles)
    for lam in spec:
        inside = sum(abs(lam - c) < r for c, r in contour.circles)
        if inside != 1:
            raise ValueError(
                f"eigenvalue {lam} is enclosed by {inside} circles; need exactly one"
            )
    return _quadrature(X, contour, _scalar_callable(q, m))


def spectral_projector(
    X,
    circle: tuple[complex, float],
    nodes: int = DEFAULT_NODES,
    spectrum: Spectrum | None = None,
) -> np.ndarray:
    """Riesz projector onto the generalized eigenspace inside ``circle``."""
    X = as_cmatrix(X)
    if spectrum is None:
        spectrum = eigenvalues(X)
    contour = Contour((circle,), nodes)
    _check_clearance(spectrum, contour.circles)
    return _quadrature(X, contour, lambda z: 1.0)

