"""Randomized cross-check of the spectral criterion against matrix orbits.

Each trial builds X = Q J Q^{-1} with J a Jordan matrix whose eigenvalues
lie in decisively classified scalar regions, then compares the spectral
verdict with what iterating X actually does: eigenvalues all bounded should
give a bounded orbit, any eigenvalue in the basin of infinity an escaping
one. Trials draw from independent child seeds, so results do not depend on
how trials are distributed over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cmatrix import block_diag, conjugate, jordan_block, matrix_to_json
from .matrix_dyn import (
    DEFAULT_BOUND,
    ClassifyParams,
    FatouReason,
    MatrixVerdict,
    OrbitKind,
    bounded_orbit,
    classify_matrix_spectral,
)
from .poly import MonicPoly, escape_radius, format_poly
from .scalar_dyn import classify_neighborhood

MAX_REJECTIONS = 10_000


@dataclass(frozen=True)
class HarnessConfig:
    margin: float = 0.05
    cond_max: float = 100.0
    delta: float = 1e-3
    orbit_iter: int = 400
    bound: float = DEFAULT_BOUND
    max_iter: int = 2000


def random_conditioned(rng: np.random.Generator, n: int, cond_max: float) -> np.ndarray:
    """Random complex matrix with 2-norm condition number <= cond_max."""
    def unitary():
        Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        Qm, R = np.linalg.qr(Z)
        return Qm * (np.diag(R) / np.abs(np.diag(R)))

    s = cond_max ** rng.uniform(0.0, 1.0, size=n)
    s[0] = 1.0
    return (unitary() * s) @ unitary().conj().T


def random_partition(rng: np.random.Generator, n: int) -> list[int]:
    sizes = []
    left = n
    while left:
        k = int(rng.integers(1, left + 1))
        sizes.append(k)
        left -= k
    return sizes


def sample_decisive(
    rng: np.random.Generator,
    p: MonicPoly,
    cfg: HarnessConfig,
    want_bounded: bool,
) -> complex:
    """Rejection-sample an eigenvalue whose margin-neighbourhood is decisive."""
    radius = 0.75 * escape_radius(p)
    for _ in range(MAX_REJECTIONS):
        r = radius * math.sqrt(rng.uniform())
        z = complex(r * math.cos(t := rng.uniform(0, 2 * math.pi)), r * math.sin(t))
        nb = classify_neighborhood(p, z, cfg.margin, cfg.max_iter)
        if not nb.decisive:
            continue
        if want_bounded and not nb.center.bounded:
            continue
        return z
    raise RuntimeError("no decisive eigenvalue found; margin too large for this map")


def run_trial(
    p: MonicPoly,
    n: int,
    seed_seq: np.random.SeedSequence,
    cfg: HarnessConfig,
    eigs=None,
    blocks=None,
) -> dict:
    rng = np.random.default_rng(seed_seq)
    sizes = list(blocks) if blocks else random_partition(rng, n)
    if sum(sizes) != n:
        raise ValueError(f"block sizes {sizes} do not sum to n = {n}")
    if eigs is not None:
        lams = [complex(z) for z in eigs]
        if len(lams) != len(sizes):
            raise ValueError("need one forced eigenvalue per Jordan block")
    else:
        want_bounded = bool(rng.uniform() < 0.5)
        lams = [sample_decisive(rng, p, cfg, want_bounded) for _ in sizes]
    J = block_diag(*(jordan_block(lam, k) for lam, k in zip(lams, sizes)))
    Q = random_conditioned(rng, n, cfg.cond_max)
    X = conjugate(J, Q)

    mc = classify_matrix_spectral(p, X, ClassifyParams(cfg.delta, cfg.max_iter))
    escapes = [c.center.escape_iter for c in mc.eigen_classes if c.center.escape_iter is not None]
    # escaping orbits need escape time plus slack to clear the matrix bound
    iters = max(cfg.orbit_iter, (max(escapes) + 64) if escapes else 0)
    orbit = bounded_orbit(p, X, iters, cfg.bound)

    if mc.verdict is MatrixVerdict.FATOU:
        expected = OrbitKind.ESCAPED if mc.reason is FatouReason.UNIFORM_ESCAPE else OrbitKind.BOUNDED
        agree = orbit.kind is expected
    else:
        expected = None
        agree = False
    return {
        "agree": agree,
        "blocks": sizes,
        "eigenvalues": [[z.real, z.imag] for z in lams],
        "matrix": matrix_to_json(X),
        "spectral": mc.verdict.value,
        "reason": mc.reason.value if mc.reason else None,
        "expected_orbit": expected.value if expected else None,
        "orbit": orbit.to_json(),
    }


def _run_chunk(args):
    p, n, seqs, cfg, eigs, blocks = args
    return [run_trial(p, n, s, cfg, eigs, blocks) for s in seqs]


def verify_theorem(
    p: MonicPoly,
    n: int,
    trials: int,
    seed: int,
    cfg: HarnessConfig = HarnessConfig(),
    eigs=None,
    blocks=None,
    workers: int = 1,
) -> dict:
    """Run ``trials`` seeded trials; report agreement and every disagreement."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    seqs = np.random.SeedSequence(seed).spawn(trials)
    if workers > 1:
        chunks = [seqs[i::workers] for i in range(workers)]
        jobs = [(p, n, c, cfg, eigs, blocks) for c in chunks if c]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
        results = [None] * trials
        for w, part in enumerate(parts):
            for k, res in enumerate(part):
                results[w + k * workers] = res
    else:
        results = _run_chunk((p, n, seqs, cfg, eigs, blocks))
    agree = sum(r["agree"] for r in results)
    return {
        "poly": format_poly(p),
        "n": n,
        "trials": trials,
        "seed": seed,
        "agreement": agree,
        "config": {
            "margin": cfg.margin,
            "cond_max": cfg.cond_max,
            "delta": cfg.delta,
            "orbit_iter": cfg.orbit_iter,
            "bound": cfg.bound,
        },
        "outcomes": {
            "fatou_bounded": sum(r["expected_orbit"] == "Bounded" and r["agree"] for r in results),
            "fatou_escaped": sum(r["expected_orbit"] == "Escaped" and r["agree"] for r in results),
        },
        "disagreements": [dict(r, trial=i) for i, r in enumerate(results) if not r["agree"]],
        "first_trial": results[0] if trials == 1 else None,
    }
