from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from moff.coherence import (block_sidelnikov_test, build_D, build_K2, d_norm_sq, diag_norm_sq,
                            gdesign_bibd_equivalence, haar_k2_estimate, k2_constants,
                            k2_norm_sq, sidelnikov_test, symmetrization_holds,
                            tensor_design_check)
from moff.designs import BlockFamily, is_t_design
from moff.fusion import assemble
from moff.mub import OrthonormalBasisSet
from moff.numerics import DenseMatrix, haar_random, hs_inner
from conftest import blocks, moff, mubs


def test_k2_constants():
    assert k2_constants(2, "complex") == (Fraction(1, 3), Fraction(1, 6), 0)
    assert k2_constants(2, "real") == (Fraction(3, 8), Fraction(1, 8), Fraction(1, 8))


@pytest.mark.parametrize("m", [2, 3, 4])
def test_k2_full_rank_is_identity(m):
    for field in ("real", "complex"):
        assert build_K2(m, m, field).matrix == DenseMatrix.identity(m * m)


@pytest.mark.parametrize("field", ["real", "complex"])
@pytest.mark.parametrize("m", range(2, 17))
def test_k2_norm_matches_closed_form(field, m):
    for l in range(1, m + 1):
        K = build_K2(l, m, field)
        assert hs_inner(K.matrix, K.matrix) == k2_norm_sq(l, m, field)
        assert K.trace() == l * l
        assert K.matrix == K.matrix.H


def test_k2_norm_examples():
    assert k2_norm_sq(2, 4, "complex") == Fraction(16, 15)
    assert k2_norm_sq(1, 2, "complex") == Fraction(1, 3)
    assert k2_norm_sq(3, 3, "real") == 9


@pytest.mark.parametrize("field", ["real", "complex"])
@pytest.mark.parametrize("m", [2, 3, 4])
def test_symmetrization(field, m):
    assert symmetrization_holds(m, field)


@pytest.mark.parametrize("field", ["real", "complex"])
def test_k2_psd_and_invariant(field):
    K = build_K2(2, 4, field).matrix.to_float()
    assert np.linalg.eigvalsh(K).min() > -1e-12
    rng = np.random.default_rng(11)
    for _ in range(5):
        U = haar_random(4, field, rng)
        W = np.kron(U, U)
        assert np.max(np.abs(W @ K @ W.conj().T - K)) <= 1e-9


def test_sidelnikov_examples(moff_c4):
    s = sidelnikov_test(moff_c4)
    assert s.lhs == Fraction(16, 15) == s.rhs and s.equal
    s = sidelnikov_test(moff("complex", 2))
    assert s.lhs == Fraction(1, 3) and s.equal
    S = mubs("complex", 4)
    single = assemble(OrthonormalBasisSet("complex", 4, S.bases[:1]), blocks(2))
    s = sidelnikov_test(single)
    assert s.lhs == Fraction(4, 3) and s.lhs > s.rhs and not s.equal and s.holds


def test_sidelnikov_t3_unsupported(moff_c4):
    with pytest.raises(NotImplementedError):
        sidelnikov_test(moff_c4, 3)


def test_build_D_examples():
    D = build_D(1, 2, 4)
    assert D.matrix == DenseMatrix.identity(4).scale(Fraction(1, 2))
    D2 = build_D(2, 2, 4)
    diag = D2.diagonal()
    assert sorted(diag).count(Fraction(1, 2)) == 4 and diag.count(Fraction(1, 6)) == 12
    assert build_D(2, 2, 4, method="enumerate").matrix == D2.matrix
    assert D2.trace() == 4


@pytest.mark.parametrize("t,l,m", [(1, 3, 5), (2, 3, 6), (3, 3, 5), (3, 2, 4)])
def test_build_D_enumeration_agrees(t, l, m):
    D = build_D(t, l, m, method="enumerate")
    assert hs_inner(D.matrix, D.matrix) == diag_norm_sq(t, l, m)
    if t <= 2:
        assert build_D(t, l, m, method="closed").matrix == D.matrix


def test_d_norm_sq():
    assert d_norm_sq(2, 4) == Fraction(4, 3)
    assert d_norm_sq(4, 8) == Fraction(32, 7)
    for m in range(2, 8):
        assert d_norm_sq(1, m) == Fraction(1, m)


def test_block_sidelnikov():
    b = block_sidelnikov_test(blocks(2), 2)
    assert b.lhs == Fraction(4, 3) == b.rhs and b.equal and b.design_lambda == 1
    b = block_sidelnikov_test(blocks(3), 2)
    assert b.lhs == b.rhs == Fraction(32, 7)
    b = block_sidelnikov_test(blocks(2).without(0), 2)
    assert b.lhs > b.rhs and not b.equal


def test_tensor_design_check():
    v = tensor_design_check(blocks(2), 2)
    assert v.equal and v.lam == 1
    v = tensor_design_check(blocks(2), 1)
    assert v.equal and v.lam == 3
    J = BlockFamily(4, list(combinations(range(1, 5), 2)))
    assert tensor_design_check(J, 2)


def test_three_paths_agree_on_corpus():
    corpus = [blocks(r) for r in (1, 2, 3)] + [blocks(2).without(j) for j in range(6)]
    corpus += [BlockFamily(5, list(combinations(range(1, 6), 2))),
               BlockFamily(7, [(1, 2, 4), (2, 3, 5), (3, 4, 6), (4, 5, 7), (5, 6, 1),
                               (6, 7, 2), (7, 1, 3)]),
               BlockFamily(4, [(1, 2), (3, 4), (1, 2), (3, 4), (1, 3), (2, 4)])]
    for F in corpus:
        for t in range(1, min(F.l, 3) + 1):
            lam = is_t_design(F, t)
            b = block_sidelnikov_test(F, t)
            v = tensor_design_check(F, t)
            assert (lam is not None) == b.equal == v.equal
            assert b.lhs >= b.rhs
            if lam is not None:
                assert v.lam == lam


def test_equivalence_theorem():
    for field in ("complex", "real"):
        rep = gdesign_bibd_equivalence(mubs(field, 4), blocks(2))
        assert rep.hypotheses_ok and rep.frame_is_2design and rep.blocks_are_bibd
        assert rep.consistent


def test_equivalence_non_design_family():
    F = BlockFamily(4, [(1, 2), (3, 4), (1, 2), (3, 4), (1, 3), (2, 4)])
    rep = gdesign_bibd_equivalence(mubs("complex", 4), F)
    assert rep.hypotheses_ok and rep.frame_is_2design is False and rep.blocks_are_bibd is False
    assert rep.consistent


def test_equivalence_hypotheses_flag():
    rep = gdesign_bibd_equivalence(mubs("complex", 4), blocks(2).without(0))
    assert not rep.hypotheses_ok and rep.reason.startswith("theorem hypotheses not satisfied")
    assert rep.consistent is None


def test_haar_k2_estimate_m2():
    est = haar_k2_estimate(1, 2, "complex", 100000, seed=7).to_float()
    K = build_K2(1, 2, "complex").matrix.to_float()
    assert np.max(np.abs(est - K)) <= 5e-3
    assert abs(np.trace(est @ est).real - 1 / 3) <= 1e-2


def test_haar_k2_estimate_m4():
    est = haar_k2_estimate(2, 4, "complex", 100000, seed=3).to_float()
    assert abs(np.trace(est @ est).real - 16 / 15) <= 1e-2


def test_haar_k2_real_and_deterministic():
    a = haar_k2_estimate(1, 3, "real", 20000, seed=5).to_float()
    b = haar_k2_estimate(1, 3, "real", 20000, seed=5).to_float()
    assert np.array_equal(a, b)
    assert np.max(np.abs(a - build_K2(1, 3, "real").matrix.to_float())) <= 1e-2


def test_haar_full_rank():
    assert haar_k2_estimate(2, 2, "complex", 1, seed=0).to_float() == pytest.approx(np.eye(4))


def test_dense_cap():
    with pytest.raises(ValueError):
        build_K2(1, 17, "complex")
    assert k2_norm_sq(8, 32, "complex") == Fraction(4) + Fraction(64 * 576, 1023 * 1024)
