"""Dynamics of monic polynomial maps on square complex matrices.

A matrix is Fatou for p exactly when every eigenvalue is Fatou for p on the
plane, and Julia when some eigenvalue lies on the scalar Julia set. The
classifier here applies that criterion eigenvalue by eigenvalue; the orbit
routines iterate the matrix directly so the two can be compared.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .cmatrix import (
    Spectrum,
    as_cmatrix,
    eigenvalues,
    frobenius_norm,
    identity,
    lu_factor,
)
from .errors import ClusterOverlap, DegenerateSpectrum, JetOverflow
from .funcalc import spectral_projector
from .poly import MonicPoly, Orbit
from .scalar_dyn import (
    DEFAULT_EPS,
    DEFAULT_MAX_ITER,
    NeighborhoodClass,
    Verdict,
    classify_neighborhood,
)

MATRIX_OVERFLOW = 1e100
DEFAULT_BOUND = 1e8
DEFAULT_DELTA = 1e-3
JET_OVERFLOW = 1e100
# running max may grow at most this much (relative) over the last quarter
STABILITY_SLACK = 0.05


def eval_matrix(p: MonicPoly, X: np.ndarray) -> np.ndarray:
    """p(X) by Horner's rule: d - 1 matrix products."""
    n = X.shape[0]
    acc = X.copy()
    acc[np.diag_indices(n)] += p.coeffs[-1]
    for a in p.coeffs[-2::-1]:
        acc = acc @ X
        if a != 0:
            acc[np.diag_indices(n)] += a
    return acc


def iterate_matrix(p: MonicPoly, X, m: int) -> Orbit:
    """X, p(X), ..., p^m(X); truncated (``escaped``) once a norm passes 1e100."""
    if m < 0:
        raise ValueError("m must be >= 0")
    X = as_cmatrix(X)
    orbit = Orbit([X])
    for _ in range(m):
        if frobenius_norm(X) > MATRIX_OVERFLOW:
            orbit.escaped = True
            break
        X = eval_matrix(p, X)
        orbit.append(X)
    return orbit


class OrbitKind(str, enum.Enum):
    BOUNDED = "Bounded"
    ESCAPED = "Escaped"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class OrbitStatus:
    kind: OrbitKind
    iterations: int
    max_norm: float

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "iterations": self.iterations, "max_norm": self.max_norm}


def bounded_orbit(
    p: MonicPoly,
    X,
    max_iter: int = 1000,
    bound: float = DEFAULT_BOUND,
) -> OrbitStatus:
    """Direct test of whether the matrix orbit of X stays bounded.

    Escaped as soon as a Frobenius norm exceeds ``bound``. Bounded requires
    all ``max_iter`` iterates within ``bound`` and a running maximum that grew
    by no more than 5% over the last quarter of the run.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if bound <= 0:
        raise ValueError("bound must be positive")
    X = as_cmatrix(X)
    norm = frobenius_norm(X)
    if norm > bound:
        return OrbitStatus(OrbitKind.ESCAPED, 0, norm)
    running = norm
    checkpoint = (3 * max_iter) // 4
    max_at_checkpoint = norm if checkpoint == 0 else None
    for k in range(1, max_iter + 1):
        X = eval_matrix(p, X)
        norm = frobenius_norm(X)
        if not norm <= bound:
            return OrbitStatus(OrbitKind.ESCAPED, k, norm)
        running = max(running, norm)
        if k == checkpoint:
            max_at_checkpoint = running
    if running <= max_at_checkpoint * (1 + STABILITY_SLACK):
        return OrbitStatus(OrbitKind.BOUNDED, max_iter, running)
    return OrbitStatus(OrbitKind.INCONCLUSIVE, max_iter, running)


# --- spectral classification ------------------------------------------------

class MatrixVerdict(str, enum.Enum):
    FATOU = "Fatou"
    JULIA = "Julia"
    UNDECIDED = "Undecided"


class FatouReason(str, enum.Enum):
    ALL_EIGENVALUES_FATOU = "AllEigenvaluesFatou"
    UNIFORM_ESCAPE = "UniformEscape"


@dataclass(frozen=True)
class ClassifyParams:
    delta: float = DEFAULT_DELTA
    max_iter: int = DEFAULT_MAX_ITER
    eps: float = DEFAULT_EPS


@dataclass(frozen=True)
class MatrixClass:
    verdict: MatrixVerdict
    spectrum: Spectrum
    eigen_classes: tuple[NeighborhoodClass, ...]
    reason: FatouReason | None = None
    witness: complex | None = None
    proximate_eigenvalues: tuple[complex, ...] = ()

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "spectrum": [[z.real, z.imag] for z in self.spectrum],
            "eigenvalue_verdicts": [
                {
                    **c.center.to_json(),
                    "julia_proximate": c.proximate,
                    "undecided": c.undecided,
                }
                for c in self.eigen_classes
            ],
        }
        if self.reason is not None:
            out["reason"] = self.reason.value
        if self.witness is not None:
            out["witness"] = [self.witness.real, self.witness.imag]
        if self.proximate_eigenvalues:
            out["proximate_eigenvalues"] = [[z.real, z.imag] for z in self.proximate_eigenvalues]
        return out


def classify_eigenvalues(
    p: MonicPoly,
    spectrum: Spectrum,
    params: ClassifyParams = ClassifyParams(),
) -> MatrixClass:
    """Apply the spectral criterion to an already computed spectrum."""
    cache: dict[complex, NeighborhoodClass] = {}
    classes = []
    for lam in spectrum:
        if lam not in cache:
            cache[lam] = classify_neighborhood(p, lam, params.delta, params.max_iter, params.eps)
        classes.append(cache[lam])
    classes = tuple(classes)
    for lam, c in zip(spectrum, classes):
        if c.proximate:
            return MatrixClass(MatrixVerdict.JULIA, spectrum, classes, witness=lam)
    undecided = tuple(lam for lam, c in zip(spectrum, classes) if c.undecided)
    if undecided:
        return MatrixClass(
            MatrixVerdict.UNDECIDED, spectrum, classes, proximate_eigenvalues=undecided
        )
    reason = FatouReason.ALL_EIGENVALUES_FATOU
    if any(c.center.verdict is Verdict.BASIN_INFINITY for c in classes):
        reason = FatouReason.UNIFORM_ESCAPE
    return MatrixClass(MatrixVerdict.FATOU, spectrum, classes, reason=reason)


def classify_matrix_spectral(
    p: MonicPoly,
    X,
    params: ClassifyParams = ClassifyParams(),
) -> MatrixClass:
    """Fatou iff every eigenvalue is decisively Fatou for p on the plane.

    Julia with a witness eigenvalue when one lies within ``params.delta`` of
    the scalar Julia set; Undecided when an eigenvalue's neighbourhood is
    inconsistent without an escape/bounded split. UniformEscape marks Fatou
    matrices with an eigenvalue in the basin of infinity.
    """
    return classify_eigenvalues(p, eigenvalues(X), params)


def power_map_classify(M: int, X, params: ClassifyParams = ClassifyParams()) -> MatrixClass:
    """Spectral classification for x -> x^M on invertible matrices.

    Raises SingularMatrix when X is not invertible.
    """
    if M < 2:
        raise ValueError("power map exponent must be >= 2")
    X = as_cmatrix(X)
    lu_factor(X)
    return classify_matrix_spectral(MonicPoly.power(M), X, params)


# --- closed forms ------------------------------------------------------------

def _jet_mul(a: list[complex], b: list[complex]) -> list[complex]:
    s = len(a)
    return [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(s)]


def _jet_apply(p: MonicPoly, jet: list[complex]) -> list[complex]:
    acc = [1 + 0j] + [0j] * (len(jet) - 1)
    for a in reversed(p.coeffs):
        acc = _jet_mul(acc, jet)
        acc[0] += a
    return acc


def jordan_iterate_closed_form(p: MonicPoly, alpha: complex, size: int, m: int) -> np.ndarray:
    """p^m applied to the Jordan block J(alpha, size), via Taylor jets.

    Entry (i, i+k) is (p^m)^{(k)}(alpha) / k!. The truncated Taylor jet of
    order size - 1 at alpha is pushed through m Horner evaluations.
    Raises JetOverflow if a jet coefficient passes 1e100.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    if m < 0:
        raise ValueError("m must be >= 0")
    jet = [complex(alpha)] + ([1 + 0j] if size > 1 else []) + [0j] * max(size - 2, 0)
    for step in range(m):
        jet = _jet_apply(p, jet)
        if any(not abs(c) <= JET_OVERFLOW for c in jet):
            raise JetOverflow(f"jet coefficient exceeded {JET_OVERFLOW:g} at step {step + 1}")
    out = np.zeros((size, size), dtype=np.complex128)
    for k, c in enumerate(jet):
        out[np.arange(size - k), np.arange(k, size)] = c
    return out


def power_map_differential_eigenvalues(M: int, m: int, eigs) -> np.ndarray:
    """Eigenvalues mu_ij of d(x -> x^{M^m}) at diag(eigs), on the units E_ij.

    mu_ij = (a_i^N - a_j^N) / (a_i - a_j) for i != j, and N a_i^{N-1} on the
    diagonal, with N = M^m. Raises DegenerateSpectrum when two eigenvalues
    are closer than 1e-12.
    """
    if M < 2 or m < 0:
        raise ValueError("need M >= 2 and m >= 0")
    a = [complex(z) for z in eigs]
    n = len(a)
    N = M ** m
    mu = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            if i == j:
                mu[i, i] = N * a[i] ** (N - 1)
            else:
                d = a[i] - a[j]
                if abs(d) < 1e-12:
                    raise DegenerateSpectrum(f"eigenvalues {i} and {j} coincide")
                mu[i, j] = (a[i] ** N - a[j] ** N) / d
    return mu


# --- Jordan-Chevalley ----------------------------------------------------------

@dataclass(frozen=True)
class JCDecomposition:
    semisimple: np.ndarray
    nilpotent: np.ndarray
    residuals: dict = field(default_factory=dict)
    centers: tuple[complex, ...] = ()


def jordan_chevalley(X, tol: float | None = None, nodes: int = 128) -> JCDecomposition:
    """Split X into commuting semisimple and nilpotent parts.

    Eigenvalues are grouped by single linkage at ``tol`` (default
    1e-3 (1 + ||X||_F)); each group gets a Riesz projector from a contour
    around its centroid, and the semisimple part is sum centroid_i P_i.
    Raises ClusterOverlap unless every inter-cluster gap exceeds ten times
    the largest cluster diameter.
    """
    X = as_cmatrix(X)
    n = X.shape[0]
    xnorm = frobenius_norm(X)
    if tol is None:
        tol = 1e-3 * (1.0 + xnorm)
    spec = eigenvalues(X, cluster_tol=tol)
    clusters = spec.clusters()
    centers = [sum(c) / len(c) for c in clusters]
    diam = max(
        (max(abs(a - b) for a in c for b in c) for c in clusters), default=0.0
    )
    if len(clusters) > 1:
        gap = min(
            min(abs(a - b) for a in ci for b in cj)
            for i, ci in enumerate(clusters)
            for cj in clusters[i + 1:]
        )
        if gap <= 10 * diam:
            raise ClusterOverlap(f"cluster gap {gap:.3g} <= 10 x diameter {diam:.3g}")
    else:
        # lone cluster: no neighbour bounds the radius, use the matrix scale
        gap = 1.0 + xnorm

    S = np.zeros((n, n), dtype=np.complex128)
    proj_sum = np.zeros((n, n), dtype=np.complex128)
    for center, cluster in zip(centers, clusters):
        cdiam = max(abs(a - b) for a in cluster for b in cluster)
        radius = max(2 * cdiam, 0.1 * gap, 1e-6)
        P = spectral_projector(X, (center, radius), nodes, spectrum=spec)
        S += center * P
        proj_sum += P
    N = X - S
    Npow = np.linalg.matrix_power(N, n)
    comm = S @ N - N @ S
    residuals = {
        "reconstruction": frobenius_norm(S + N - X) / max(xnorm, 1e-300),
        "nilpotency": frobenius_norm(Npow) / (1.0 + xnorm) ** n,
        "commutator": frobenius_norm(comm) / max(xnorm ** 2, 1e-300),
        "projector_sum": frobenius_norm(proj_sum - identity(n)),
    }
    return JCDecomposition(S, N, residuals, tuple(centers))
