"""Dense complex linear algebra on small square matrices.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The eigenvalue
kernel and the LU solver work on Python lists internally: for the n <= 10
matrices this package iterates, interpreter overhead of per-element numpy
calls dominates, and plain complex arithmetic is faster.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import NoConvergence, SingularMatrix

PIVOT_FLOOR = 1e-300
DEFLATION_TOL = 1e-12


def as_cmatrix(A) -> np.ndarray:
    """Validate and convert to a square finite complex128 array."""
    arr = np.array(A, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def mat_mul(A, B) -> np.ndarray:
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if A.shape != B.shape or A.ndim != 2:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B


def frobenius_norm(A) -> float:
    A = np.asarray(A)
    return float(math.sqrt(np.sum(A.real ** 2 + A.imag ** 2)))


def jordan_block(alpha: complex, m: int) -> np.ndarray:
    if m < 1:
        raise ValueError("Jordan block size must be >= 1")
    J = np.diag(np.full(m, alpha, dtype=np.complex128))
    J += np.diag(np.ones(m - 1, dtype=np.complex128), 1)
    return J


def block_diag(*blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=np.complex128)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


# --- LU -------------------------------------------------------------------

def lu_factor(A):
    """LU with partial pivoting. Returns (LU rows as lists, permutation).

    Raises SingularMatrix when a pivot modulus drops below 1e-300.
    """
    A = np.asarray(A, dtype=np.complex128)
    n = A.shape[0]
    a = A.tolist()
    perm = list(range(n))
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i][k]))
        if abs(a[p][k]) < PIVOT_FLOOR:
            raise SingularMatrix(f"pivot {k} has modulus {abs(a[p][k]):.3g}")
        if p != k:
            a[k], a[p] = a[p], a[k]
            perm[k], perm[p] = perm[p], perm[k]
        rk = a[k]
        piv = rk[k]
        for i in range(k + 1, n):
            ri = a[i]
            f = ri[k] / piv
            if f != 0:
                ri[k] = f
                for j in range(k + 1, n):
                    ri[j] -= f * rk[j]
            else:
                ri[k] = 0j
    return a, perm


def lu_solve(A, B) -> np.ndarray:
    """Solve A X = B for square A and a matrix (or vector) right-hand side."""
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    vector = B.ndim == 1
    if vector:
        B = B[:, None]
    if B.shape[0] != A.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    lu, perm = lu_factor(A)
    n = A.shape[0]
    X = B[perm].tolist()
    ncol = B.shape[1]
    for i in range(n):
        ri = lu[i]
        xi = X[i]
        for k in range(i):
            f = ri[k]
            if f != 0:
                xk = X[k]
                for c in range(ncol):
                    xi[c] -= f * xk[c]
    for i in range(n - 1, -1, -1):
        ri = lu[i]
        xi = X[i]
        for k in range(i + 1, n):
            f = ri[k]
            if f != 0:
                xk = X[k]
                for c in range(ncol):
                    xi[c] -= f * xk[c]
        piv = ri[i]
        for c in range(ncol):
            xi[c] /= piv
    out = np.array(X, dtype=np.complex128)
    return out[:, 0] if vector else out


def inverse(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.complex128)
    return lu_solve(A, identity(A.shape[0]))


def conjugate(A, Q) -> np.ndarray:
    """Q A Q^{-1}."""
    A = np.asarray(A, dtype=np.complex128)
    Q = np.asarray(Q, dtype=np.complex128)
    if A.shape != Q.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {Q.shape}")
    # (Q A) Q^{-1} = X  <=>  Q^T X^T = (Q A)^T
    QA = Q @ A
    return lu_solve(Q.T, QA.T).T


# --- eigenvalues ----------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with multiplicity plus the tolerance used to group them."""

    eigenvalues: tuple[complex, ...]
    cluster_tol: float = 1e-6

    def __len__(self):
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(self.eigenvalues)

    @property
    def radius(self) -> float:
        return max(abs(z) for z in self.eigenvalues)

    def clusters(self) -> list[list[complex]]:
        """Single-linkage groups: eigenvalues joined when within cluster_tol."""
        ev = list(self.eigenvalues)
        parent = list(range(len(ev)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(len(ev)):
            for j in range(i + 1, len(ev)):
                if abs(ev[i] - ev[j]) <= self.cluster_tol:
                    parent[find(i)] = find(j)
        groups: dict[int, list[complex]] = {}
        for i, z in enumerate(ev):
            groups.setdefault(find(i), []).append(z)
        return list(groups.values())


def _balance(a: list[list[complex]]) -> None:
    """In-place diagonal similarity scaling by powers of two (exact)."""
    n = len(a)
    radix2 = 4.0
    done = False
    while not done:
        done = True
        for i in range(n):
            c = sum(abs(a[j][i]) for j in range(n) if j != i)
            r = sum(abs(a[i][j]) for j in range(n) if j != i)
            if c == 0 or r == 0:
                continue
            s = c + r
            f = 1.0
            g = r / 2.0
            while c < g:
                f *= 2.0
                c *= radix2
            g = r * 2.0
            while c >= g:
                f /= 2.0
                c /= radix2
            if (c + r) / f < 0.95 * s:
                done = False
                for j in range(n):
                    a[j][i] *= f
                    a[i][j] /= f


def _hessenberg(a: list[list[complex]]) -> None:
    """In-place Householder reduction to upper Hessenberg form."""
    n = len(a)
    for k in range(n - 2):
        x = [a[i][k] for i in range(k + 1, n)]
        xnorm = math.sqrt(sum(abs(v) ** 2 for v in x))
        if xnorm == 0.0 or all(v == 0 for v in x[1:]):
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1 + 0j
        alpha = -phase * xnorm
        v = x[:]
        v[0] -= alpha
        vnorm = math.sqrt(sum(abs(t) ** 2 for t in v))
        v = [t / vnorm for t in v]
        m = len(v)
        # left: rows k+1.., columns k..
        for j in range(k, n):
            s = sum(v[i].conjugate() * a[k + 1 + i][j] for i in range(m))
            if s != 0:
                s *= 2
                for i in range(m):
                    a[k + 1 + i][j] -= v[i] * s
        # right: all rows, columns k+1..
        for i in range(n):
            row = a[i]
            s = sum(row[k + 1 + j] * v[j] for j in range(m))
            if s != 0:
                s *= 2
                for j in range(m):
                    row[k + 1 + j] -= s * v[j].conjugate()
        a[k + 1][k] = alpha
        for i in range(k + 2, n):
            a[i][k] = 0j


def _wilkinson_shift(a, b, c, d) -> complex:
    """Eigenvalue of [[a, b], [c, d]] closer to d."""
    p = 0.5 * (a - d)
    bc = b * c
    disc = cmath.sqrt(p * p + bc)
    den1 = p + disc
    den2 = p - disc
    den = den1 if abs(den1) >= abs(den2) else den2
    if den == 0:
        return d
    return d - bc / den


def _hqr(h: list[list[complex]], tol: float) -> list[complex]:
    """Implicit single-shift complex QR on an upper Hessenberg matrix."""
    n = len(h)
    eig: list[complex] = [0j] * n
    found = [False] * n
    hnorm = math.sqrt(sum(abs(v) ** 2 for row in h for v in row))
    tiny = tol * hnorm if hnorm > 0 else 0.0
    hi = n - 1
    its = 0
    max_its = 40 * n
    while hi >= 0:
        if hi == 0:
            eig[0] = h[0][0]
            found[0] = True
            break
        lo = hi
        while lo > 0:
            sub = abs(h[lo][lo - 1])
            scale = abs(h[lo - 1][lo - 1]) + abs(h[lo][lo])
            if sub <= (tol * scale if scale > 0 else tiny):
                h[lo][lo - 1] = 0j
                break
            lo -= 1
        if lo == hi:
            eig[hi] = h[hi][hi]
            found[hi] = True
            hi -= 1
            its = 0
            continue
        its += 1
        if its > max_its:
            partial = [eig[i] for i in range(n) if found[i]]
            raise NoConvergence(
                f"eigenvalue {hi} not converged after {max_its} QR sweeps", partial
            )
        if its % 10 == 0:
            mu = h[hi][hi] + 0.75 * abs(h[hi][hi - 1])
        else:
            mu = _wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        x = h[lo][lo] - mu
        y = h[lo + 1][lo]
        for k in range(lo, hi):
            ax = abs(x)
            r = math.hypot(ax, abs(y))
            if r == 0:
                cs, sn = 1.0, 0j
            elif ax == 0:
                cs, sn = 0.0, 1 + 0j
            else:
                cs = ax / r
                sn = (x / ax) * y.conjugate() / r
            snc = sn.conjugate()
            rk, rk1 = h[k], h[k + 1]
            for j in range(max(lo, k - 1), hi + 1):
                u, v = rk[j], rk1[j]
                rk[j] = cs * u + sn * v
                rk1[j] = cs * v - snc * u
            if k > lo:
                rk1[k - 1] = 0j
            for i in range(lo, min(k + 2, hi) + 1):
                row = h[i]
                u, v = row[k], row[k + 1]
                row[k] = u * cs + v * snc
                row[k + 1] = v * cs - u * sn
            if k < hi - 1:
                x = h[k + 1][k]
                y = h[k + 2][k]
    return eig


def eigenvalues(A, tol: float = DEFLATION_TOL, cluster_tol: float | None = None) -> Spectrum:
    """Eigenvalues by balancing, Hessenberg reduction and shifted complex QR.

    Raises NoConvergence (with partial results attached) if an eigenvalue
    needs more than 40 n QR sweeps.
    """
    A = as_cmatrix(A)
    a = A.tolist()
    n = len(a)
    if n > 1:
        _balance(a)
        _hessenberg(a)
        ev = _hqr(a, tol)
    else:
        ev = [a[0][0]]
    if cluster_tol is None:
        cluster_tol = 1e-6 * (1.0 + frobenius_norm(A))
    return Spectrum(tuple(complex(z) for z in ev), cluster_tol)


def spectral_radius(A) -> float:
    return eigenvalues(A).radius


def same_multiset(a: Iterable[complex], b: Iterable[complex], tol: float) -> bool:
    """Greedy matching of two multisets of complex numbers within tol."""
    rest = list(b)
    a = list(a)
    if len(a) != len(rest):
        return False
    for z in sorted(a, key=lambda w: (w.real, w.imag)):
        j = min(range(len(rest)), key=lambda k: abs(rest[k] - z))
        if abs(rest[j] - z) > tol:
            return False
        rest.pop(j)
    return True


# --- JSON -----------------------------------------------------------------

def matrix_to_json(A) -> dict:
    A = np.asarray(A, dtype=np.complex128)
    return {
        "n": int(A.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in A],
    }


def matrix_from_json(obj) -> np.ndarray:
    """Parse ``{"n": 2, "entries": [[[re, im], ...], ...]}``.

    Bare real entries are accepted in place of [re, im] pairs.
    """
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "entries" not in obj:
        raise ValueError("matrix JSON must be an object with an 'entries' field")
    rows = obj["entries"]
    if not isinstance(rows, list) or not rows:
        raise ValueError("'entries' must be a non-empty list of rows")
    n = obj.get("n", len(rows))
    if n != len(rows):
        raise ValueError(f"'n' is {n} but there are {len(rows)} rows")
    out = np.zeros((n, n), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ValueError(f"row {i} must have {n} entries")
        for j, e in enumerate(row):
            if isinstance(e, (int, float)) and not isinstance(e, bool):
                out[i, j] = e
            elif isinstance(e, list) and len(e) == 2 and all(
                isinstance(t, (int, float)) and not isinstance(t, bool) for t in e
            ):
                out[i, j] = complex(e[0], e[1])
            else:
                raise ValueError(f"entry ({i},{j}) must be [re, im]")
    return as_cmatrix(out)
