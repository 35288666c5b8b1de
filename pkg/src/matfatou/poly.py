"""Monic polynomials over the complex numbers."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

OVERFLOW_GUARD = 1e150


class Orbit(list):
    """A list of iterates that remembers whether iteration stopped early.

    ``escaped`` is set when the orbit was truncated by the overflow guard.
    """

    def __init__(self, items=(), escaped: bool = False):
        super().__init__(items)
        self.escaped = escaped


@dataclass(frozen=True)
class MonicPoly:
    """p(z) = z^d + a_{d-1} z^{d-1} + ... + a_0.

    ``coeffs`` holds a_0..a_{d-1}; the leading 1 is implicit.
    """

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        coeffs = tuple(complex(a) for a in self.coeffs)
        if len(coeffs) < 2:
            raise ValueError("monic polynomial must have degree >= 2")
        if not all(math.isfinite(a.real) and math.isfinite(a.imag) for a in coeffs):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def power(cls, M: int) -> "MonicPoly":
        return cls((0j,) * M)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[complex]) -> "MonicPoly":
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def is_power_map(self) -> bool:
        return all(a == 0 for a in self.coeffs)

    def __call__(self, z: complex) -> complex:
        return eval_scalar(self, z)

    def full_coeffs(self) -> list[complex]:
        """Coefficients a_0..a_d including the leading 1."""
        return list(self.coeffs) + [1 + 0j]

    def __str__(self) -> str:
        return format_poly(self)


def eval_scalar(p: MonicPoly, z: complex) -> complex:
    acc = 1 + 0j
    for a in reversed(p.coeffs):
        acc = acc * z + a
    return acc


def _derivative_coeffs(coeffs: list[complex], k: int) -> list[complex]:
    # coeffs[i] multiplies z^i; k-fold derivative has falling-factorial weights
    return [coeffs[i] * math.perm(i, k) for i in range(k, len(coeffs))]


def eval_derivative(p: MonicPoly, z: complex, k: int = 1) -> complex:
    """k-th derivative of p at z, exact in the coefficients."""
    if k < 0:
        raise ValueError("derivative order must be >= 0")
    if k > p.degree:
        return 0j
    dc = _derivative_coeffs(p.full_coeffs(), k)
    acc = 0j
    for a in reversed(dc):
        acc = acc * z + a
    return acc


def iterate_scalar(p: MonicPoly, z: complex, m: int) -> Orbit:
    """Orbit z, p(z), ..., p^m(z); truncated once |z| passes the overflow guard."""
    if m < 0:
        raise ValueError("m must be >= 0")
    z = complex(z)
    orbit = Orbit([z])
    for _ in range(m):
        if abs(z) > OVERFLOW_GUARD:
            orbit.escaped = True
            break
        z = eval_scalar(p, z)
        orbit.append(z)
    return orbit


def escape_radius(p: MonicPoly) -> float:
    """R with |z| >= R  =>  |p(z)| >= 2|z|."""
    return 2.0 + sum(abs(a) for a in p.coeffs)


# --- text format ---------------------------------------------------------

_TERM = re.compile(
    r"""^(?P<coef>\([^()]*\)|[0-9.]+(?:[eE][+-]?\d+)?[ij]?|[ij])?
        \*?
        (?P<var>z(?:\^(?P<exp>\d+))?)?$""",
    re.VERBOSE,
)


def _parse_complex(text: str) -> complex:
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    s = s.replace(" ", "").replace("i", "j")
    if s in ("j", "+j", "-j"):
        s = s.replace("j", "1j")
    try:
        return complex(s)
    except ValueError:
        raise ValueError(f"cannot parse complex number {text!r}") from None


def _split_terms(text: str) -> list[tuple[int, str]]:
    terms = []
    depth = 0
    sign = 1
    cur = ""
    prev = ""
    for pos, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError("unbalanced parentheses")
        if depth == 0 and ch in "+-" and not (prev in "eE" and cur[:1].isdigit()):
            if cur:
                terms.append((sign, cur))
            elif pos > 0:
                raise ValueError("consecutive operators")
            sign = -1 if ch == "-" else 1
            cur = ""
        else:
            cur += ch
        prev = ch
    if depth != 0:
        raise ValueError("unbalanced parentheses")
    if not cur:
        raise ValueError("dangling operator")
    terms.append((sign, cur))
    return terms


def parse_poly(text: str) -> MonicPoly:
    """Parse ``z^3 + (2)z + (1+0i)`` or the shorthand ``power:M``.

    Raises ValueError unless the result is monic of degree >= 2.
    """
    s = text.strip()
    if s.startswith("power:"):
        try:
            M = int(s[len("power:"):])
        except ValueError:
            raise ValueError(f"bad power map {text!r}") from None
        if M < 2:
            raise ValueError("power map exponent must be >= 2")
        return MonicPoly.power(M)

    s = s.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    by_degree: dict[int, complex] = {}
    for sign, term in _split_terms(s):
        m = _TERM.match(term)
        if not m or (m.group("coef") is None and m.group("var") is None):
            raise ValueError(f"cannot parse term {term!r}")
        coef = 1 + 0j if m.group("coef") is None else _parse_complex(m.group("coef"))
        if m.group("var") is None:
            deg = 0
        else:
            deg = int(m.group("exp")) if m.group("exp") else 1
        by_degree[deg] = by_degree.get(deg, 0j) + sign * coef
    d = max(by_degree)
    while d > 0 and by_degree.get(d, 0) == 0:
        d -= 1
    if d < 2:
        raise ValueError("polynomial must have degree >= 2")
    if by_degree[d] != 1:
        raise ValueError(f"leading coefficient must be 1, got {by_degree[d]}")
    return MonicPoly(tuple(by_degree.get(i, 0j) for i in range(d)))


def _fmt_c(a: complex) -> str:
    return f"({a.real!r}{a.imag:+}i)"


def format_poly(p: MonicPoly) -> str:
    if p.is_power_map:
        return f"power:{p.degree}"
    parts = [f"z^{p.degree}"]
    for i in range(p.degree - 1, -1, -1):
        a = p.coeffs[i]
        if a == 0:
            continue
        var = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
        parts.append(_fmt_c(a) + var)
    return " + ".join(parts)
