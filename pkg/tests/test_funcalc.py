import numpy as np
import pytest

from matfatou.cmatrix import conjugate, identity, jordan_block
from matfatou.errors import ContourTooClose
from matfatou.funcalc import Contour, contour_eval, resolvent, spectral_projector
from matfatou.harness import random_conditioned
from matfatou.matrix_dyn import iterate_matrix
from matfatou.poly import MonicPoly

Z2 = MonicPoly.power(2)


def test_resolvent_examples():
    assert np.allclose(resolvent(jordan_block(0, 2), 1), [[1, 1], [0, 1]])
    assert np.allclose(resolvent(np.diag([1, 2]), 3), np.diag([0.5, 1.0]))
    with pytest.raises(ContourTooClose):
        resolvent(np.diag([1, 2]), 1 + 1e-12)


def test_contour_validation():
    with pytest.raises(ValueError):
        Contour.circle(0, 1, nodes=8)
    with pytest.raises(ValueError):
        Contour.circle(0, -1)
    with pytest.raises(ValueError):
        Contour(((0, 1), (0.5, 1)))
    Contour(((0, 1), (0.5, 1)), joint=True)


def test_contour_eval_examples():
    X = np.diag([1, 2])
    c = Contour.circle(1.5, 2, nodes=64)
    assert np.allclose(contour_eval(Z2, X, c), np.diag([1, 4]), atol=1e-10)
    # zero compositions is the identity function, so the result is X itself
    assert np.allclose(contour_eval(Z2, X, c, m=0), X, atol=1e-10)
    J = jordan_block(1, 2)
    got = contour_eval(Z2, J, Contour.circle(1, 0.5, nodes=128))
    assert np.allclose(got, [[1, 2], [0, 1]], atol=1e-10)
    with pytest.raises(ContourTooClose):
        contour_eval(Z2, X, Contour.circle(0, 1))


def test_contour_must_enclose_each_eigenvalue_once():
    with pytest.raises(ValueError):
        contour_eval(Z2, np.diag([1, 5]), Contour.circle(1, 1))


def test_contour_eval_callable():
    X = np.diag([0.5, -0.5])
    got = contour_eval(np.exp, X, Contour.circle(0, 1))
    assert np.allclose(got, np.diag(np.exp([0.5, -0.5])), atol=1e-12)


def test_projectors_examples():
    X = np.diag([1, 2])
    P = spectral_projector(X, (1, 0.5))
    assert np.allclose(P, np.diag([1, 0]), atol=1e-10)
    J = jordan_block(3, 2)
    assert np.allclose(spectral_projector(J, (3, 1)), identity(2), atol=1e-10)


def test_projector_algebra(rng):
    for _ in range(20):
        lams = np.array([0, 2, 4]) + rng.uniform(-0.3, 0.3, 3)
        X = conjugate(np.diag(lams), random_conditioned(rng, 3, 20))
        Ps = [spectral_projector(X, (lam, 0.9)) for lam in lams]
        assert np.allclose(sum(Ps), identity(3), atol=1e-8)
        for i, P in enumerate(Ps):
            assert np.allclose(P @ P, P, atol=1e-8)
            for j, Q in enumerate(Ps):
                if i != j:
                    assert np.allclose(P @ Q, 0, atol=1e-8)


def test_error_drop_with_nodes(rng):
    for _ in range(10):
        # eigenvalues at modulus 0.8 inside the unit circle: the trapezoid
        # error decays like 0.8^N, visible at 64 nodes, negligible at 128
        lams = 0.8 * np.exp(2j * np.pi * (np.arange(3) / 3 + rng.uniform(0, 0.3)))
        X = conjugate(np.diag(lams), random_conditioned(rng, 3, 10))
        direct = iterate_matrix(Z2, X, 2)[-1]
        errs = []
        for nodes in (64, 128):
            got = contour_eval(Z2, X, Contour.circle(0, 1.0, nodes), m=2)
            errs.append(np.linalg.norm(got - direct) / np.linalg.norm(direct))
        assert errs[1] <= 1e-8
        assert errs[0] >= 1e3 * errs[1]


def test_matches_iteration(rng):
    polys = [Z2, MonicPoly((-1, 0)), MonicPoly((0, 0.1, 0))]
    for _ in range(20):
        p = polys[int(rng.integers(3))]
        m = int(rng.integers(0, 5))
        lams = 0.6 * np.exp(2j * np.pi * rng.uniform(size=2)) * rng.uniform(0.2, 1, 2)
        X = conjugate(np.diag(lams), random_conditioned(rng, 2, 10))
        direct = iterate_matrix(p, X, m)[-1]
        got = contour_eval(p, X, Contour.circle(0, 1.0), m=m)
        assert np.linalg.norm(got - direct) <= 1e-8 * max(1, np.linalg.norm(direct))
