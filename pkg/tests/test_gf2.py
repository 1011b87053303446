import pytest
from hypothesis import given, settings, strategies as st

from moff.gf2 import IRREDUCIBLE, GF2r, is_irreducible, trace_form


@pytest.mark.parametrize("r", sorted(IRREDUCIBLE))
def test_pinned_polynomials_irreducible(r):
    mod = IRREDUCIBLE[r]
    assert mod.bit_length() - 1 == r and is_irreducible(mod)


@pytest.mark.parametrize("r", range(1, 9))
def test_inverse_exhaustive(r):
    F = GF2r(r)
    for x in range(1, 1 << r):
        assert F.mul(x, F.inverse(x)) == 1


@pytest.mark.parametrize("r", range(1, 9))
def test_frobenius_and_trace_exhaustive(r):
    F = GF2r(r)
    ys = range(0, 1 << r, max(1, (1 << r) // 16))
    for x in range(1 << r):
        assert F.trace(x) in (0, 1)
        for y in ys:
            assert F.mul(x ^ y, x ^ y) == F.mul(x, x) ^ F.mul(y, y)
            assert F.trace(x ^ y) == F.trace(x) ^ F.trace(y)


@pytest.mark.parametrize("r", range(1, 9))
def test_multiplicative_group_order(r):
    F = GF2r(r)
    for x in (1, 2, (1 << r) - 1):
        assert F.power(x, (1 << r) - 1) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 8).flatmap(lambda r: st.tuples(
    st.just(r), *[st.integers(0, (1 << r) - 1)] * 3)))
def test_field_axioms(args):
    r, a, b, c = args
    F = GF2r(r)
    x, y, z = F(a), F(b), F(c)
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z
    assert x + x == F.zero and x * F.one == x
    if y:
        assert (x / y) * y == x


@pytest.mark.parametrize("r", range(1, 6))
def test_trace_form_difference_nonsingular(r):
    # every nonzero M_a is an invertible binary matrix
    Ms = trace_form(r)
    for a in range(1, 1 << r):
        M = [list(row) for row in Ms[a]]
        n, rank = r, 0
        for c in range(n):
            piv = next((i for i in range(rank, n) if M[i][c] % 2), None)
            if piv is None:
                continue
            M[rank], M[piv] = M[piv], M[rank]
            for i in range(n):
                if i != rank and M[i][c] % 2:
                    M[i] = [(u + v) % 2 for u, v in zip(M[i], M[rank])]
            rank += 1
        assert rank == r
