import cmath

import numpy as np
import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from matfatou.poly import (
    MonicPoly,
    escape_radius,
    eval_derivative,
    eval_scalar,
    iterate_scalar,
    parse_poly,
)

Z2 = MonicPoly.power(2)
Z2_MINUS_1 = MonicPoly((-1, 0))
CUBIC = MonicPoly((1, 2, 0))  # z^3 + 2z + 1


def test_eval_examples():
    assert eval_scalar(Z2, 1 + 1j) == 2j
    assert eval_scalar(Z2_MINUS_1, 0) == -1
    # naive power sum as the oracle
    assert eval_scalar(CUBIC, 2) == 2 ** 3 + 2 * 2 + 1 == 13


def test_derivative_examples():
    assert eval_derivative(Z2, 3, 1) == 6
    assert eval_derivative(Z2, 1.7 - 2j, 3) == 0
    z = sympy.symbols("z")
    oracle = sympy.diff(z**3 + 2 * z + 1, z, 2).subs(z, 1)
    assert eval_derivative(CUBIC, 1, 2) == complex(oracle) == 6
    assert eval_derivative(CUBIC, 1.5, 0) == eval_scalar(CUBIC, 1.5)


def test_derivative_rejects_negative_order():
    with pytest.raises(ValueError):
        eval_derivative(Z2, 0, -1)


def test_derivative_matches_sympy_random(rng):
    z = sympy.symbols("z")
    for _ in range(20):
        d = int(rng.integers(2, 7))
        coeffs = [complex(*rng.uniform(-1, 1, 2)) for _ in range(d)]
        expr = z**d + sum(complex(c) * z**i for i, c in enumerate(coeffs))
        p = MonicPoly(tuple(coeffs))
        w = complex(*rng.uniform(-1.5, 1.5, 2))
        for k in range(d + 2):
            want = complex(sympy.diff(expr, z, k).subs(z, w).evalf())
            assert abs(eval_derivative(p, w, k) - want) <= 1e-9 * (1 + abs(want))


def test_iterate_examples():
    assert iterate_scalar(Z2, 2, 3) == [2, 4, 16, 256]
    assert iterate_scalar(Z2, 0, 5) == [0] * 6
    assert iterate_scalar(Z2_MINUS_1, 0, 4) == [0, -1, 0, -1, 0]


def test_iterate_overflow_guard_truncates():
    orbit = iterate_scalar(Z2, 10, 50)
    assert orbit.escaped
    assert len(orbit) < 51
    assert all(cmath.isfinite(z) for z in orbit)
    assert not iterate_scalar(Z2, 0.5, 50).escaped


def test_escape_radius_examples():
    assert escape_radius(Z2) == 2
    assert escape_radius(Z2_MINUS_1) == 3
    assert escape_radius(CUBIC) == 5


def test_horner_vs_naive(rng):
    for _ in range(200):
        d = int(rng.integers(2, 9))
        r = rng.uniform(0, 1, d)
        coeffs = r * np.exp(2j * np.pi * rng.uniform(size=d))
        p = MonicPoly(tuple(coeffs))
        z = complex(*rng.normal(size=2))
        naive = z**d + sum(c * z**i for i, c in enumerate(coeffs))
        assert abs(eval_scalar(p, z) - naive) <= 1e-12 * max(1.0, abs(naive))


def test_escape_radius_doubles(rng):
    for _ in range(10):
        d = int(rng.integers(2, 6))
        coeffs = tuple(rng.normal(size=d) + 1j * rng.normal(size=d))
        p = MonicPoly(coeffs)
        R = escape_radius(p)
        mods = R * (1 + rng.exponential(size=100))
        args = rng.uniform(0, 2 * np.pi, 100)
        for z in mods * np.exp(1j * args):
            assert abs(eval_scalar(p, complex(z))) >= 2 * abs(z)


@settings(max_examples=60, deadline=None)
@given(
    st.complex_numbers(max_magnitude=1.2, allow_nan=False, allow_infinity=False),
    st.integers(0, 12),
    st.integers(0, 12),
)
def test_iteration_semigroup(z, a, b):
    p = Z2_MINUS_1
    ab = iterate_scalar(p, z, a + b)
    assume(not ab.escaped)
    head = iterate_scalar(p, z, a)
    tail = iterate_scalar(p, head[-1], b)
    assert ab[a:] == tail


@pytest.mark.parametrize(
    "text, coeffs",
    [
        ("z^3 + (2)z + (1+0i)", (1, 2, 0)),
        ("z^2 - 1", (-1, 0)),
        ("z^2+z", (0, 1)),
        ("z^3 + 0.1z", (0, 0.1, 0)),
        ("z^2 + (0.5-0.25i)", (0.5 - 0.25j, 0)),
        ("1 + z^2", (1, 0)),
        ("z^2 + iz", (0, 1j)),
    ],
)
def test_parse_poly(text, coeffs):
    assert parse_poly(text) == MonicPoly(coeffs)


def test_parse_power_shorthand():
    assert parse_poly("power:5") == MonicPoly.power(5)
    assert parse_poly("power:2").is_power_map


@pytest.mark.parametrize(
    "text", ["2z^2 + 1", "z", "z + 1", "power:1", "power:x", "", "z^2 +", "z^2 + + 1", "z^2 + (1", "y^2"]
)
def test_parse_poly_rejects(text):
    with pytest.raises(ValueError):
        parse_poly(text)


def test_degree_one_rejected():
    with pytest.raises(ValueError):
        MonicPoly((1,))


def test_format_roundtrip(rng):
    for _ in range(20):
        coeffs = tuple(complex(*rng.normal(size=2)) for _ in range(int(rng.integers(2, 5))))
        p = MonicPoly(coeffs)
        assert parse_poly(str(p)) == p
