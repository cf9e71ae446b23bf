from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from surgerykit.exact_linear import (
    GF, Matrix, Ring, complete_basis, hstack, is_primitive, kernel_basis, lll_gram, lll_reduce,
    rational_inverse, rational_rank, reduce_modulo, saturate, smith_normal_form, solve,
)

small = st.integers(-6, 6)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


def square(max_n=4):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n))


def test_ring_validation():
    assert GF(5).is_field and not Ring("Zmod", 4).is_field
    with pytest.raises(ValueError):
        GF(4)
    assert Ring.from_json({"kind": "Fp", "p": 3}) == GF(3)
    assert Ring.from_json(Ring("Zmod", 6).to_json()) == Ring("Zmod", 6)


def test_snf_known_value():
    snf = smith_normal_form(Matrix([[2, 4], [6, 8]]))
    assert snf.diagonal == [2, 4]


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_snf_against_sympy(rows):
    A = Matrix(rows)
    snf = smith_normal_form(A)
    assert snf.U @ snf.D @ snf.W == A
    assert abs(snf.U.det()) == 1 and abs(snf.W.det()) == 1
    oracle = sympy_snf(sympy.Matrix(rows), domain=sympy.ZZ)
    expected = [abs(int(oracle[i, i])) for i in range(min(oracle.shape))]
    assert [abs(d) for d in snf.diagonal] == expected
    diag = [d for d in snf.diagonal if d]
    assert all(b % a == 0 for a, b in zip(diag, diag[1:]))


@settings(max_examples=100, deadline=None)
@given(square())
def test_det_and_rank_against_sympy(rows):
    A = Matrix(rows)
    assert A.det() == int(sympy.Matrix(rows).det())
    assert rational_rank(A) == sympy.Matrix(rows).rank()


@settings(max_examples=80, deadline=None)
@given(square(), st.sampled_from([2, 3, 5, 7]))
def test_det_over_prime_field(rows, p):
    assert Matrix(rows, GF(p)).det() == int(sympy.Matrix(rows).det()) % p


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_kernel_basis(rows):
    A = Matrix(rows)
    K = kernel_basis(A)
    assert (A @ K).is_zero() if K.ncols else True
    assert K.ncols == A.ncols - rational_rank(A)
    if K.ncols:
        assert is_primitive(K)


@settings(max_examples=80, deadline=None)
@given(square())
def test_rational_inverse(rows):
    A = Matrix(rows)
    if A.det() == 0:
        return
    inv = rational_inverse(A)
    n = A.nrows
    for i in range(n):
        for j in range(n):
            assert sum(Fraction(A[i, k]) * inv[k][j] for k in range(n)) == int(i == j)


@settings(max_examples=80, deadline=None)
@given(matrices(), st.lists(small, min_size=4, max_size=4))
def test_solve_round_trip(rows, x):
    A = Matrix(rows)
    b = A @ Matrix.column(x[:A.ncols])
    sol = solve(A, b)
    assert sol is not None and A @ sol == b


def test_solve_reports_no_integer_solution():
    assert solve(Matrix([[2]]), Matrix([[1]])) is None


@settings(max_examples=60, deadline=None)
@given(matrices(4, 3))
def test_complete_and_saturate(rows):
    A = Matrix(rows)
    if rational_rank(A) != A.ncols:
        return
    S = saturate(A)
    assert is_primitive(S) and rational_rank(S) == A.ncols
    assert abs(hstack(S, complete_basis(S)).det()) == 1
    assert solve(S, A) is not None


@settings(max_examples=60, deadline=None)
@given(square(3))
def test_lll_keeps_lattice(rows):
    A = Matrix(rows)
    if A.det() == 0:
        return
    B = lll_reduce(A)
    assert abs(B.det()) == abs(A.det())
    assert solve(A, B) is not None and solve(B, A) is not None


def test_lll_gram_is_unimodular_and_shrinks():
    gram = [[Fraction(x) for x in r] for r in [[101, 99], [99, 98]]]
    U = lll_gram(gram)
    assert abs(U.det()) == 1
    g = Matrix([[101, 99], [99, 98]])
    reduced = U.T @ g @ U
    assert max(reduced[i, i] for i in range(2)) < 101


def test_reduce_modulo_stays_in_coset():
    B = Matrix([[1, 0], [0, 7]])
    v = Matrix.column([25, 30])
    r = reduce_modulo(v, B)
    assert solve(B, v - r) is not None
    assert abs(r[0, 0]) <= 1 and abs(r[1, 0]) <= 4
