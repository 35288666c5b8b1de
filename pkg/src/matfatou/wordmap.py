"""Word maps on matrix groups and polynomial maps on matrix algebras.

A system of r words (or r noncommutative polynomials) in x1..xr maps an
r-tuple of matrices to a new r-tuple by substituting the tuple into every
component simultaneously. Arithmetic is exact: entries are Python ints or
Fractions, since the entries grow doubly exponentially under iteration.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import NotInvertible

Scalar = Union[int, Fraction]


class ExactMatrix:
    """Square matrix with exact rational entries, stored as a tuple of rows."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(_exact(x) for x in row) for row in rows)
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows):
            raise ValueError("ExactMatrix must be square and nonempty")
        self.rows = rows

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int) -> "ExactMatrix":
        return cls([[0] * n for _ in range(n)])

    def __eq__(self, other):
        if isinstance(other, ExactMatrix):
            return self.rows == other.rows
        try:
            return self.rows == ExactMatrix(other).rows
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"ExactMatrix({[list(r) for r in self.rows]})"

    def _check(self, other: "ExactMatrix"):
        if not isinstance(other, ExactMatrix):
            raise TypeError("expected ExactMatrix")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        return ExactMatrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)]
        )

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        cols = list(zip(*other.rows))
        return ExactMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.rows]
        )

    __mul__ = __matmul__

    def scale(self, c: Scalar) -> "ExactMatrix":
        return ExactMatrix([[c * a for a in row] for row in self.rows])

    def det(self) -> Fraction:
        a = [[Fraction(x) for x in row] for row in self.rows]
        n = self.n
        det = Fraction(1)
        for k in range(n):
            p = next((i for i in range(k, n) if a[i][k] != 0), None)
            if p is None:
                return Fraction(0)
            if p != k:
                a[k], a[p] = a[p], a[k]
                det = -det
            det *= a[k][k]
            for i in range(k + 1, n):
                f = a[i][k] / a[k][k]
                if f:
                    for j in range(k, n):
                        a[i][j] -= f * a[k][j]
        return det

    def inverse(self) -> "ExactMatrix":
        """Exact inverse by Gauss-Jordan; raises NotInvertible if singular."""
        n = self.n
        a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
             for i, row in enumerate(self.rows)]
        for k in range(n):
            p = next((i for i in range(k, n) if a[i][k] != 0), None)
            if p is None:
                raise NotInvertible("matrix is singular")
            a[k], a[p] = a[p], a[k]
            piv = a[k][k]
            a[k] = [x / piv for x in a[k]]
            for i in range(n):
                if i != k and a[i][k] != 0:
                    f = a[i][k]
                    a[i] = [x - f * y for x, y in zip(a[i], a[k])]
        return ExactMatrix([row[n:] for row in a])

    def __pow__(self, e: int) -> "ExactMatrix":
        """Binary exponentiation; negative powers go through the exact inverse."""
        if e < 0:
            return self.inverse() ** (-e)
        result = ExactMatrix.identity(self.n)
        base = self
        while e:
            if e & 1:
                result = result @ base
            e >>= 1
            if e:
                base = base @ base
        return result

    def to_json(self) -> list:
        return [[_exact_str(x) for x in row] for row in self.rows]

    @classmethod
    def from_json(cls, rows) -> "ExactMatrix":
        if not isinstance(rows, list) or not rows:
            raise ValueError("matrix must be a non-empty list of rows")
        return cls([[_parse_exact(x) for x in row] for row in rows])


def _exact(x) -> Scalar:
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    raise TypeError(f"exact entries must be int or Fraction, got {type(x).__name__}")


def _exact_str(x: Scalar) -> str:
    return str(x)


def _parse_exact(x) -> Scalar:
    if isinstance(x, bool):
        raise ValueError("booleans are not matrix entries")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return _exact(Fraction(x.strip()))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not an exact rational: {x!r}") from None
    raise ValueError(f"entries must be integers or rational strings, got {x!r}")


# --- words ---------------------------------------------------------------

@dataclass(frozen=True)
class GroupWord:
    """Freely reduced word: letters (generator index >= 1, nonzero exponent)."""

    letters: tuple[tuple[int, int], ...]

    def __post_init__(self):
        reduced: list[list[int]] = []
        for g, e in self.letters:
            if g < 1:
                raise ValueError("generator indices start at 1")
            if e == 0:
                continue
            if reduced and reduced[-1][0] == g:
                reduced[-1][1] += e
                if reduced[-1][1] == 0:
                    reduced.pop()
            else:
                reduced.append([g, e])
        object.__setattr__(self, "letters", tuple((g, e) for g, e in reduced))

    @property
    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=0)

    def __str__(self):
        if not self.letters:
            return "1"
        return "*".join(f"x{g}" if e == 1 else f"x{g}^{e}" for g, e in self.letters)


@dataclass(frozen=True)
class NCPolynomial:
    """Sum of coefficient * monomial; a monomial is a tuple of generator indices."""

    terms: tuple[tuple[Scalar, tuple[int, ...]], ...]

    def __post_init__(self):
        merged: dict[tuple[int, ...], Scalar] = {}
        order: list[tuple[int, ...]] = []
        for c, mono in self.terms:
            mono = tuple(mono)
            if any(g < 1 for g in mono):
                raise ValueError("generator indices start at 1")
            if mono not in merged:
                order.append(mono)
                merged[mono] = 0
            merged[mono] += _exact(c)
        terms = tuple((_exact(merged[m]), m) for m in order if merged[m] != 0)
        object.__setattr__(self, "terms", terms)

    @property
    def max_generator(self) -> int:
        return max((g for _, m in self.terms for g in m), default=0)

    def __str__(self):
        parts = []
        for c, mono in self.terms:
            word = "*".join(f"x{g}" for g in mono) or "1"
            parts.append(word if c == 1 else f"{c}*{word}")
        return " + ".join(parts) or "0"


@dataclass(frozen=True)
class WordSystem:
    """r components, all GroupWord or all NCPolynomial."""

    components: tuple[Union[GroupWord, NCPolynomial], ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("a word system needs at least one component")
        kinds = {type(c) for c in comps}
        if len(kinds) != 1 or not kinds <= {GroupWord, NCPolynomial}:
            raise ValueError("components must be all group words or all algebra words")
        r = len(comps)
        for c in comps:
            if c.max_generator > r:
                raise ValueError(f"generator x{c.max_generator} exceeds arity {r}")
        object.__setattr__(self, "components", comps)

    @property
    def arity(self) -> int:
        return len(self.components)

    @property
    def kind(self) -> str:
        return "group" if isinstance(self.components[0], GroupWord) else "algebra"


def eval_group_word(w: GroupWord, tup: Sequence[ExactMatrix]) -> ExactMatrix:
    if w.max_generator > len(tup):
        raise ValueError(f"word uses x{w.max_generator} but tuple has {len(tup)} entries")
    result = ExactMatrix.identity(tup[0].n)
    for g, e in w.letters:
        result = result @ (tup[g - 1] ** e)
    return result


def eval_nc_polynomial(f: NCPolynomial, tup: Sequence[ExactMatrix]) -> ExactMatrix:
    if f.max_generator > len(tup):
        raise ValueError(f"polynomial uses x{f.max_generator} but tuple has {len(tup)} entries")
    n = tup[0].n
    total = ExactMatrix.zeros(n)
    for c, mono in f.terms:
        prod = ExactMatrix.identity(n)
        # collapse runs so x1^2 is one squaring, not two products
        i = 0
        while i < len(mono):
            j = i
            while j < len(mono) and mono[j] == mono[i]:
                j += 1
            prod = prod @ (tup[mono[i] - 1] ** (j - i))
            i = j
        total = total + (prod if c == 1 else prod.scale(c))
    return total


def apply_system(S: WordSystem, tup: Sequence[ExactMatrix]) -> tuple[ExactMatrix, ...]:
    if len(tup) != S.arity:
        raise ValueError(f"system has arity {S.arity} but tuple has {len(tup)} entries")
    ev = eval_group_word if S.kind == "group" else eval_nc_polynomial
    return tuple(ev(c, tup) for c in S.components)


def iterate_system(S: WordSystem, tup: Sequence[ExactMatrix], m: int) -> list[tuple[ExactMatrix, ...]]:
    """Exact trajectory of m + 1 tuples under simultaneous substitution."""
    if m < 0:
        raise ValueError("m must be >= 0")
    tup = tuple(tup)
    if S.kind == "group":
        for A in tup:
            if A.det() == 0:
                raise NotInvertible("group-word systems need invertible matrices")
    traj = [tup]
    for _ in range(m):
        tup = apply_system(S, tup)
        traj.append(tup)
    return traj


# --- parsing -------------------------------------------------------------

_GROUP_LETTER = re.compile(r"x(\d+)(?:\^\(?(-?\d+)\)?)?$")
_ALG_FACTOR = re.compile(r"x(\d+)(?:\^(\d+))?$")


def parse_group_word(text: str) -> GroupWord:
    """``x1^2*x2``, ``x1*x1^-1``; ``1`` or ``e`` for the empty word."""
    s = re.sub(r"\s+", "", text)
    if s in ("1", "e"):
        return GroupWord(())
    if not s:
        raise ValueError("empty word")
    letters = []
    for tok in s.split("*"):
        m = _GROUP_LETTER.match(tok)
        if not m:
            raise ValueError(f"cannot parse letter {tok!r}")
        e = int(m.group(2)) if m.group(2) is not None else 1
        letters.append((int(m.group(1)), e))
    return GroupWord(tuple(letters))


def _split_signed(s: str) -> list[tuple[int, str]]:
    out = []
    sign = 1
    cur = ""
    for pos, ch in enumerate(s):
        if ch in "+-" and not cur.endswith("^"):
            if cur:
                out.append((sign, cur))
            elif pos > 0:
                raise ValueError("consecutive operators")
            sign = -1 if ch == "-" else 1
            cur = ""
        else:
            cur += ch
    if not cur:
        raise ValueError("dangling operator")
    out.append((sign, cur))
    return out


def parse_nc_polynomial(text: str) -> NCPolynomial:
    """``x1^2 + x1 + x2``, ``3*x1*x2 - 1/2*x2^3``, ``1`` for the unit."""
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ValueError("empty polynomial")
    terms = []
    for sign, term in _split_signed(s):
        coef: Scalar = 1
        mono: list[int] = []
        for tok in term.split("*"):
            m = _ALG_FACTOR.match(tok)
            if m:
                mono.extend([int(m.group(1))] * (int(m.group(2)) if m.group(2) else 1))
                continue
            try:
                coef = coef * _exact(Fraction(tok))
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"cannot parse factor {tok!r}") from None
        terms.append((sign * coef, tuple(mono)))
    return NCPolynomial(tuple(terms))


def parse_system(text: str, kind: str) -> WordSystem:
    """Components separated by ';', e.g. ``"x2 ; x1^2*x2"``."""
    parts = [t for t in text.split(";")]
    if any(not t.strip() for t in parts):
        raise ValueError("empty component in word list")
    if kind == "group":
        return WordSystem(tuple(parse_group_word(t) for t in parts))
    if kind == "algebra":
        return WordSystem(tuple(parse_nc_polynomial(t) for t in parts))
    raise ValueError(f"kind must be 'group' or 'algebra', got {kind!r}")


def tuple_from_json(obj) -> tuple[ExactMatrix, ...]:
    """``{"matrices": [[[1, 1], [0, 1]], ...]}``; entries int or "p/q" strings."""
    if not isinstance(obj, dict) or "matrices" not in obj:
        raise ValueError("tuple JSON must be an object with a 'matrices' field")
    mats = obj["matrices"]
    if not isinstance(mats, list) or not mats:
        raise ValueError("'matrices' must be a non-empty list")
    tup = tuple(ExactMatrix.from_json(m) for m in mats)
    if len({A.n for A in tup}) != 1:
        raise ValueError("all matrices in a tuple must share a dimension")
    if "r" in obj and obj["r"] != len(tup):
        raise ValueError(f"'r' is {obj['r']} but {len(tup)} matrices were given")
    return tup


def tuple_to_json(tup: Sequence[ExactMatrix]) -> dict:
    return {"r": len(tup), "n": tup[0].n, "matrices": [A.to_json() for A in tup]}
