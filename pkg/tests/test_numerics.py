from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moff.numerics import (DenseMatrix, GaussianRational, HermitianProjector, ModeError,
                           ProjectorError, ShapeError, exact_rank, frac_str, haar_random,
                           hs_inner, kron, verify_projector)


def coord(m, J):
    return DenseMatrix.diag([1 if i + 1 in J else 0 for i in range(m)])


def E(i, j, m=2):
    rows = [[0] * m for _ in range(m)]
    rows[i - 1][j - 1] = 1
    return DenseMatrix.from_entries(rows)


# hs_inner ------------------------------------------------------------------

def test_hs_inner_identity():
    assert hs_inner(DenseMatrix.identity(2), DenseMatrix.identity(2)) == 2


def test_hs_inner_rank2_projector():
    P = coord(4, {2, 3})
    assert hs_inner(P, P) == 2


def test_hs_inner_coordinate_overlap():
    assert hs_inner(coord(4, {1, 2}), coord(4, {1, 3})) == 1


def test_hs_inner_hermitian_is_real():
    A = DenseMatrix.from_entries([[1, GaussianRational(2, 3)], [GaussianRational(2, -3), -5]])
    B = DenseMatrix.from_entries([[0, GaussianRational(Fraction(1, 2), 1)],
                                  [GaussianRational(Fraction(1, 2), -1), 7]])
    v = hs_inner(A, B)
    assert v.im == 0


def test_hs_inner_errors():
    with pytest.raises(ShapeError):
        hs_inner(DenseMatrix.identity(2), DenseMatrix.identity(3))
    with pytest.raises(ModeError):
        hs_inner(DenseMatrix.identity(2), DenseMatrix.identity(2, "float"))


# kron ----------------------------------------------------------------------

def test_kron_identity():
    assert kron(DenseMatrix.identity(2), DenseMatrix.identity(2)) == DenseMatrix.identity(4)


def test_kron_elementary():
    K = kron(E(1, 1), E(2, 2))
    nz = [(i, j) for i in range(4) for j in range(4) if K[i, j] != 0]
    # row/col pair (1,2) in 1-based tensor order -> flat index 1
    assert nz == [(1, 1)]


@pytest.mark.parametrize("J", [{1}, {1, 3}, {1, 2, 4}])
def test_kron_trace_multiplicative(J):
    P = coord(4, J)
    assert kron(P, P).trace() == len(J) ** 2


def test_kron_mode_mismatch():
    with pytest.raises(ModeError):
        kron(DenseMatrix.identity(2), DenseMatrix.identity(2, "float"))


# verify_projector ----------------------------------------------------------

def test_verify_identity():
    assert verify_projector(DenseMatrix.identity(4)) == 4


def test_verify_diag():
    assert verify_projector(DenseMatrix.diag([1, 1, 0, 0])) == 2


def test_verify_half_diag_fails():
    with pytest.raises(ProjectorError, match="idempotent"):
        verify_projector(DenseMatrix.diag([Fraction(1, 2), Fraction(1, 2), 0, 0]))


def test_verify_non_hermitian_fails():
    with pytest.raises(ProjectorError, match="Hermitian"):
        verify_projector(DenseMatrix.from_entries([[1, 1], [0, 0]]))


def test_verify_irrational_line_float():
    v = np.array([1, 1j]) / np.sqrt(2)
    P = DenseMatrix(data=np.outer(v, v.conj()))
    assert HermitianProjector(P).rank == 1
    with pytest.raises(ProjectorError):
        HermitianProjector(P, field="real")


def test_exact_normalization():
    A = DenseMatrix(np.array([[2, 4], [6, 8]]), den=4)
    assert A.den == 2 and A == DenseMatrix.from_entries([[Fraction(1, 2), 1], [Fraction(3, 2), 2]])
    assert frac_str(Fraction(3)) == "3/1"


def test_exact_rank_fallback():
    # rank-deficient case goes through the exact fallback
    rows = [[1, 2, 3], [2, 4, 6], [Fraction(1, 3), 0, 1]]
    assert exact_rank(rows) == 2
    assert exact_rank([[1, 0], [0, 1]]) == 2


# property tests ------------------------------------------------------------

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gauss = st.builds(GaussianRational, small, small)


def mats(n=2):
    return st.lists(st.lists(gauss, min_size=n, max_size=n), min_size=n, max_size=n).map(
        DenseMatrix.from_entries)


@settings(max_examples=60, deadline=None)
@given(gauss, gauss, gauss)
def test_scalar_field_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    if a.abs2() != 0:
        assert (b / a) * a == b


@settings(max_examples=40, deadline=None)
@given(mats(), mats(), mats())
def test_matrix_laws(A, B, C):
    assert (A @ B) @ C == A @ (B @ C)
    assert A + B == B + A
    assert A @ (B + C) == A @ B + A @ C
    assert (A @ B).H == B.H @ A.H


@settings(max_examples=40, deadline=None)
@given(mats(3))
def test_hs_norm_is_frobenius(A):
    H = A + A.H
    v = hs_inner(H, H)
    assert v.im == 0 and v.re >= 0
    fro = sum(H[i, j].abs2() for i in range(3) for j in range(3))
    assert v == fro


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from([0.0, 1.0, 0.5, 1e-3, 0.999]), min_size=4, max_size=4),
       st.integers(0, 2**32 - 1), st.sampled_from(["real", "complex"]))
def test_projector_acceptance_by_spectrum(eigs, seed, field):
    U = haar_random(4, field, np.random.default_rng(seed))
    M = DenseMatrix(data=U @ np.diag(eigs) @ U.conj().T)
    ok = all(e in (0.0, 1.0) for e in eigs)
    if ok:
        assert verify_projector(M, 1e-10) == int(sum(eigs))
    else:
        with pytest.raises(ProjectorError):
            verify_projector(M, 1e-10)


def test_haar_is_unitary():
    U = haar_random(5, "complex", np.random.default_rng(0), size=10)
    assert np.allclose(U @ np.conj(np.swapaxes(U, 1, 2)), np.eye(5))
    Q = haar_random(5, "real", np.random.default_rng(0))
    assert np.isrealobj(Q) and np.allclose(Q @ Q.T, np.eye(5))
