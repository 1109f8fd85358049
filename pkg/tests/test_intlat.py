from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy.matrices.normalforms import invariant_factors

from prymweyl import intlat
from prymweyl.errors import LatticeError


def _mat(rows):
    return intlat.intmat(rows)


def _sympy_divisors(A):
    M = sympy.Matrix(A.tolist())
    if M.rows == 0 or M.cols == 0:
        return []
    return [abs(int(x)) for x in invariant_factors(M, domain=sympy.ZZ) if x != 0]


small_matrices = st.integers(1, 7).flatmap(
    lambda m: st.integers(1, 7).flatmap(
        lambda n: st.lists(st.lists(st.integers(-30, 30), min_size=n, max_size=n),
                           min_size=m, max_size=m)))


def test_snf_of_diag_2_3():
    assert intlat.snf(_mat([[2, 0], [0, 3]])).divisors == [1, 6]


def test_snf_of_zero_matrix():
    dec = intlat.snf(intlat.zeros(3, 2))
    assert dec.rank == 0 and dec.divisors == []
    assert not dec.D.any()


def test_snf_handles_empty_shapes():
    assert intlat.snf(intlat.zeros(0, 4)).rank == 0
    assert intlat.snf(intlat.zeros(4, 0)).rank == 0


def test_snf_round_trip_1000_random_matrices_up_to_40x40():
    rng = np.random.default_rng(20240601)
    for _ in range(1000):
        m, n = (int(x) for x in rng.integers(1, 41, size=2))
        A = intlat.intmat(rng.integers(-50, 51, size=(m, n)))
        dec = intlat.snf(A)
        D = intlat.matmul(intlat.matmul(dec.U, A), dec.V)
        assert (D == dec.D).all()
        assert (intlat.matmul(dec.U, dec.Uinv) == intlat.identity(m)).all()
        assert (intlat.matmul(dec.V, dec.Vinv) == intlat.identity(n)).all()
        divs = dec.divisors
        assert all(b % a == 0 for a, b in zip(divs, divs[1:]))


@settings(max_examples=200, deadline=None)
@given(small_matrices)
def test_divisors_agree_with_sympy(rows):
    A = _mat(rows)
    assert intlat.elementary_divisors(A) == _sympy_divisors(A)


def test_divisors_agree_with_sympy_on_rank_deficient_matrices():
    rng = np.random.default_rng(5)
    for _ in range(50):
        B = rng.integers(-9, 10, size=(6, 3))
        C = rng.integers(-9, 10, size=(3, 7))
        A = intlat.matmul(_mat(B), _mat(C))
        assert intlat.elementary_divisors(A) == _sympy_divisors(A)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n),
                       min_size=n, max_size=n)))
def test_det_matches_sympy_and_cokernel_order(rows):
    A = _mat(rows)
    d = intlat.det(A)
    assert d == sympy.Matrix(rows).det()
    if d:
        grp, free = intlat.cokernel_structure(A)
        assert free == 0 and grp.order == abs(d)


def test_saturate_examples():
    assert (intlat.saturate(_mat([[2, 0]])) == _mat([[1, 0]])).all()
    S = intlat.saturate(_mat([[1, 1], [1, -1]]))
    assert intlat.lattice_equal(S, intlat.identity(2))


@settings(max_examples=100, deadline=None)
@given(small_matrices)
def test_saturate_is_idempotent_and_rank_preserving(rows):
    B = _mat(rows)
    S = intlat.saturate(B)
    assert S.shape[0] == intlat.rank(B)
    assert intlat.is_saturated(S)
    assert intlat.lattice_equal(intlat.saturate(S), S)


def test_cokernel_examples():
    grp, free = intlat.cokernel_structure(_mat([[1, 0], [0, 4]]))
    assert grp.invariants == (4,) and free == 0
    grp, free = intlat.cokernel_structure(intlat.zeros(0, 5), ncols=5)
    assert grp.is_trivial and free == 5


def test_hnf_rows_span_the_same_lattice():
    rng = np.random.default_rng(1)
    for _ in range(30):
        B = _mat(rng.integers(-10, 11, size=(5, 4)))
        H = intlat.hnf(B)
        assert intlat.lattice_equal(H, B)
        # echelon: pivots strictly move right
        piv = [int(np.flatnonzero(row)[0]) for row in H]
        assert piv == sorted(set(piv))


def test_kernel_is_annihilated_and_saturated():
    rng = np.random.default_rng(2)
    for _ in range(30):
        A = _mat(rng.integers(-5, 6, size=(3, 6)))
        K = intlat.kernel(A)
        assert K.shape[0] == 6 - intlat.rank(A)
        assert not intlat.matmul(A, K.T).any()
        assert intlat.is_saturated(K)


def test_left_kernel():
    A = _mat([[1, 2], [2, 4], [0, 1]])
    L = intlat.left_kernel(A)
    assert L.shape[0] == 1
    assert not intlat.matmul(L, A).any()


def test_inverse_and_solve_rows():
    rng = np.random.default_rng(3)
    for _ in range(30):
        A = _mat(rng.integers(-6, 7, size=(5, 5)))
        if intlat.det(A) == 0:
            continue
        inv = intlat.inverse(A)
        assert (intlat.matmul(inv, A) == intlat.identity(5)).all()
        X = _mat(rng.integers(-6, 7, size=(3, 5)))
        N, den = intlat.solve_rows_scaled(A, X)
        assert (intlat.matmul(N, A) == X * den).all()


def test_unimodular_inverse_rejects_non_unimodular():
    with pytest.raises(LatticeError):
        intlat.unimodular_inverse(_mat([[2, 0], [0, 1]]))


def test_solve_rows_int_rejects_rational_solution():
    with pytest.raises(LatticeError):
        intlat.solve_rows_int(_mat([[2, 0], [0, 2]]), _mat([[1, 0]]))


def test_quotient_group_and_overlattice():
    grp, free = intlat.quotient_group(intlat.identity(2), _mat([[2, 0], [0, 2]]))
    assert grp.invariants == (2, 2) and free == 0
    half = np.array([[Fraction(1, 2), Fraction(0)]], dtype=object)
    assert intlat.overlattice_quotient(half, 2).invariants == (2,)


def test_finite_abelian_group_normalizes_orders():
    g = intlat.FiniteAbelianGroup.from_orders([2, 3, 4])
    assert g.invariants == (2, 12) and g.order == 24 and g.exponent == 12
    assert str(g) == "Z/2 + Z/12"
    assert str(intlat.FiniteAbelianGroup.cyclic_power(5, 4)) == "(Z/5)^4"
    assert intlat.FiniteAbelianGroup.cyclic_power(1, 4).is_trivial
    with pytest.raises(LatticeError):
        intlat.FiniteAbelianGroup((4, 2))


def test_matmul_handles_big_integers():
    big = 10**30
    A = _mat([[big, 1], [0, 1]])
    assert intlat.matmul(A, A)[0, 0] == big * big
