import time
from fractions import Fraction

import pytest

from matfatou.errors import NotInvertible
from matfatou.wordmap import (
    ExactMatrix,
    GroupWord,
    NCPolynomial,
    WordSystem,
    apply_system,
    eval_group_word,
    eval_nc_polynomial,
    iterate_system,
    parse_group_word,
    parse_nc_polynomial,
    parse_system,
    tuple_from_json,
    tuple_to_json,
)

U = ExactMatrix([[1, 1], [0, 1]])
L = ExactMatrix([[1, 0], [1, 1]])
EX1 = (U, L)
EX2 = (L, U)
SYS1 = parse_system("x2 ; x1^2*x2", "group")
SYS2 = parse_system("x2 ; x1^2 + x1 + x2", "algebra")


def test_exact_matrix_basics():
    assert U @ U == [[1, 2], [0, 1]]
    assert U**-1 == [[1, -1], [0, 1]]
    assert U**0 == ExactMatrix.identity(2)
    assert ExactMatrix([[2, 0], [0, 4]]).inverse() == [[Fraction(1, 2), 0], [0, Fraction(1, 4)]]
    assert ExactMatrix([[1, 2], [3, 4]]).det() == -2
    with pytest.raises(NotInvertible):
        ExactMatrix([[1, 2], [2, 4]]) ** -1


def test_eval_group_word_examples():
    assert eval_group_word(parse_group_word("x1"), EX1) == U
    assert eval_group_word(parse_group_word("x1^2*x2"), EX1) == [[3, 2], [1, 1]]
    assert eval_group_word(parse_group_word("x1*x1^-1"), EX1) == ExactMatrix.identity(2)


def test_eval_nc_polynomial_examples():
    assert eval_nc_polynomial(parse_nc_polynomial("x1^2 + x1 + x2"), EX2) == [[3, 1], [3, 3]]
    assert eval_nc_polynomial(parse_nc_polynomial("1"), EX2) == ExactMatrix.identity(2)
    assert eval_nc_polynomial(parse_nc_polynomial("x2"), EX2) == U
    f = parse_nc_polynomial("3*x1*x2 - 1/2*x2")
    assert eval_nc_polynomial(f, EX1) == (U @ L).scale(3) + L.scale(Fraction(-1, 2))


def test_example_one_cube():
    traj = iterate_system(SYS1, EX1, 3)
    assert traj[3] == (ExactMatrix([[3, 2], [7, 5]]), ExactMatrix([[89, 62], [33, 23]]))
    assert traj[0] == EX1


def test_example_one_sixth_power():
    traj = iterate_system(SYS1, EX1, 6)
    first, second = traj[6]
    assert first.rows[0][0] == 69210849
    assert second.rows[0][0] == 1557268252466751
    # exactness: one more application from step 5 reproduces step 6
    assert apply_system(SYS1, traj[5]) == traj[6]
    assert all(isinstance(x, int) for row in second.rows for x in row)


def test_example_two():
    traj = iterate_system(SYS2, EX2, 5)
    assert traj[3] == (ExactMatrix([[5, 4], [3, 5]]), ExactMatrix([[20, 11], [24, 20]]))
    assert traj[5] == (ExactMatrix([[62, 55], [57, 62]]), ExactMatrix([[746, 506], [1041, 746]]))


def test_examples_fast():
    t0 = time.perf_counter()
    iterate_system(SYS1, EX1, 6)
    iterate_system(SYS2, EX2, 5)
    assert time.perf_counter() - t0 < 1.0


def test_swap_is_an_involution(rng):
    swap = parse_system("x2 ; x1", "group")
    for _ in range(10):
        # diagonally dominant, hence invertible
        tup = tuple(
            ExactMatrix(rng.integers(-5, 6, (3, 3)).tolist()) + ExactMatrix.identity(3).scale(20)
            for _ in range(2)
        )
        traj = iterate_system(swap, tup, 2)
        assert traj[1] == (tup[1], tup[0])
        assert traj[2] == tup


def test_free_reduction_insertions(rng):
    tup = (U, L, ExactMatrix([[2, 1], [1, 1]]))
    for _ in range(50):
        k = int(rng.integers(1, 6))
        letters = [(int(rng.integers(1, 4)), int(rng.choice([-2, -1, 1, 2]))) for _ in range(k)]
        base = eval_group_word(GroupWord(tuple(letters)), tup)
        noisy = list(letters)
        for _ in range(3):
            pos = int(rng.integers(0, len(noisy) + 1))
            g = int(rng.integers(1, 4))
            e = int(rng.choice([-1, 1, 3]))
            noisy[pos:pos] = [(g, e), (g, -e)]
        w = GroupWord(tuple(noisy))
        assert eval_group_word(w, tup) == base
        assert w == GroupWord(tuple(letters))


def test_group_word_reduced_form():
    w = GroupWord(((1, 2), (1, -2), (2, 1), (2, 1), (1, 0)))
    assert w.letters == ((2, 2),)
    assert str(parse_group_word("x1 * x1^-1")) == "1"
    assert str(parse_group_word("x1^2*x2")) == "x1^2*x2"


def test_nc_polynomial_normal_form():
    f = parse_nc_polynomial("x1*x2 + 2*x1*x2 - x2*x1 + x2*x1")
    assert f.terms == ((3, (1, 2)),)
    assert str(f) == "3*x1*x2"


def test_parser_rejects():
    for bad in ["", "x0", "y1", "x1^", "x1**x2"]:
        with pytest.raises(ValueError):
            parse_group_word(bad)
    for bad in ["", "x1 + + x2", "x1 +", "x1^-1", "x1*abc"]:
        with pytest.raises(ValueError):
            parse_nc_polynomial(bad)
    with pytest.raises(ValueError):
        parse_system("x1 ; ", "group")
    with pytest.raises(ValueError):
        parse_system("x1 ; x3", "group")
    with pytest.raises(ValueError):
        parse_system("x1", "monoid")


def test_mixed_systems_rejected():
    with pytest.raises(ValueError):
        WordSystem((GroupWord(((1, 1),)), NCPolynomial(((1, (1,)),))))


def test_group_system_needs_invertible():
    with pytest.raises(NotInvertible):
        iterate_system(SYS1, (U, ExactMatrix([[1, 1], [1, 1]])), 1)
    # algebra systems accept singular inputs
    iterate_system(SYS2, (U, ExactMatrix([[1, 1], [1, 1]])), 2)


def test_arity_mismatch():
    with pytest.raises(ValueError):
        apply_system(SYS1, (U,))


def test_tuple_json_round_trip():
    tup = (U, ExactMatrix([[Fraction(1, 3), 0], [0, 1]]))
    d = tuple_to_json(tup)
    assert d["matrices"][1][0][0] == "1/3"
    assert tuple_from_json(d) == tup
    assert tuple_from_json({"matrices": [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]}) == EX1
    for bad in [[], {"matrices": []}, {"matrices": [[[1]], [[1, 0], [0, 1]]]}, {"r": 3, "matrices": [[[1]]]}]:
        with pytest.raises(ValueError):
            tuple_from_json(bad)
