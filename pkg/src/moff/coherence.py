"""Coherence tensors and Sidelnikov-type design tests.

Tensor index convention: E_{i,j} (x) E_{k,l} sits at row i*m + k, column
j*m + l (numpy ``kron`` order).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from .designs import BlockFamily, intersections, is_t_design
from .mub import OrthonormalBasisSet, ambient_design_dim, max_mub_count
from .numerics import DEFAULT_TOL, DenseMatrix, haar_random

DENSE_K_MAX_DIM = 16
ENUMERATION_BUDGET = 10**5
TENSOR_DIAG_BUDGET = 2**16


@dataclass(frozen=True)
class CoherenceTensor:
    m: int
    order: int
    l: int
    kind: str  # "haar" (K) or "diagonal" (D)
    matrix: DenseMatrix
    field: str | None = None

    def trace(self):
        return self.matrix.trace().re

    def diagonal(self) -> list:
        return [self.matrix[i, i].re for i in range(self.matrix.rows)]


# --------------------------------------------------------------------------
# Haar coherence tensor K_{2,l,m}


def k2_constants(m: int, field: str) -> tuple:
    """(a, b, c) of the closed form for K_{2,1,m}."""
    d = ambient_design_dim(field, m)
    a = Fraction(d + (m - 1) ** 2, m * m * d)
    if field == "real":
        return a, a / 3, a / 3
    return a, a / 2, Fraction(0)


def _check_lm(l: int, m: int):
    if m < 2:
        raise ValueError("dimension must be >= 2")
    if not 1 <= l <= m:
        raise ValueError(f"rank l={l} must satisfy 1 <= l <= m={m}")


def build_K2(l: int, m: int, field: str) -> CoherenceTensor:
    """K_{2,l,m} from the closed form, exact; dense only for m <= 8."""
    _check_lm(l, m)
    if m > DENSE_K_MAX_DIM:
        raise ValueError(f"dense K_{{2,l,m}} is capped at m <= {DENSE_K_MAX_DIM}")
    a, b, c = k2_constants(m, field)
    alpha = Fraction(l) - Fraction(l * (l - 1), m - 1)
    beta = Fraction(l * (l - 1), m * (m - 1))
    coef = [alpha * a, alpha * b, alpha * c, beta]
    den = math.lcm(*(x.denominator for x in coef))
    A, B, C, Id = (int(x * den) for x in coef)
    g = np.zeros((m * m, m * m), dtype=np.int64)
    for j in range(m):
        g[j * m + j, j * m + j] += A
        for jp in range(m):
            if jp == j:
                continue
            g[j * m + jp, jp * m + j] += B   # E_{j,j'} (x) E_{j',j}
            g[j * m + jp, j * m + jp] += B   # E_{j,j} (x) E_{j',j'}
            g[j * m + j, jp * m + jp] += C   # E_{j,j'} (x) E_{j,j'}
    g += Id * np.eye(m * m, dtype=np.int64)
    return CoherenceTensor(m, 2, l, "haar", DenseMatrix(g, None, den), field)


def k2_norm_sq(l: int, m: int, field: str) -> Fraction:
    """tr(K_{2,l,m}^2) = l^4/m^2 + l^2 (m-l)^2 / (d_F(m) m^2)."""
    _check_lm(l, m)
    d = ambient_design_dim(field, m)
    return Fraction(l ** 4, m * m) + Fraction(l * l * (m - l) ** 2, d * m * m)


def mixed_term(m: int, field: str) -> DenseMatrix:
    """Haar average of U E11 U* (x) U E22 U*, recovered as (K_{2,2,m} - 2 K_{2,1,m}) / 2."""
    k1 = build_K2(1, m, field).matrix
    k2 = build_K2(2, m, field).matrix
    return (k2 - k1.scale(2)).scale(Fraction(1, 2))


def symmetrization_holds(m: int, field: str) -> bool:
    """m K_{2,1,m} + m(m-1) * mixed = I (x) I."""
    lhs = build_K2(1, m, field).matrix.scale(m) + mixed_term(m, field).scale(m * (m - 1))
    return lhs == DenseMatrix.identity(m * m)


@dataclass
class SidelnikovResult:
    lhs: object
    rhs: object
    equal: bool
    holds: bool

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.equal))


def sidelnikov_test(ff, t: int = 2, gramian=None) -> SidelnikovResult:
    """(1/n^2) sum tr(P_i P_j)^2 against tr(K_{2,l,m}^2)."""
    from .fusion import cross_gramian

    if t != 2:
        raise NotImplementedError("only t = 2 is implemented for fusion frames")
    G = gramian if gramian is not None else cross_gramian(ff)
    n = ff.n
    rhs = k2_norm_sq(ff.l, ff.m, ff.field)
    if G.exact:
        lhs = G.power_sum(2) / (n * n)
        return SidelnikovResult(lhs, rhs, lhs == rhs, lhs >= rhs)
    lhs = G.power_sum(2) / (n * n)
    tol = ff.tol * max(1.0, float(rhs))
    return SidelnikovResult(lhs, rhs, abs(lhs - float(rhs)) <= tol, lhs >= float(rhs) - tol)


# --------------------------------------------------------------------------
# diagonal coherence tensor D_{t,l,m}


def _index_tuples(m: int, t: int):
    return product(range(m), repeat=t)


def _diag_matrix(numers: list, den: int) -> DenseMatrix:
    n = len(numers)
    g = np.zeros((n, n), dtype=np.int64)
    g[np.arange(n), np.arange(n)] = numers
    return DenseMatrix(g, None, den)


def build_D(t: int, l: int, m: int, method: str = "auto") -> CoherenceTensor:
    """D_{t,l,m}: average of D_J^{(x)t} over all l-subsets J.

    ``method`` is "closed" (t <= 2), "enumerate", or "auto" (closed when
    available).
    """
    if not 1 <= l <= m:
        raise ValueError(f"rank l={l} must satisfy 1 <= l <= m={m}")
    if t < 1:
        raise ValueError("order t must be >= 1")
    if method == "auto":
        method = "closed" if t <= 2 else "enumerate"
    if method == "closed":
        if t == 1:
            return CoherenceTensor(m, 1, l, "diagonal", _diag_matrix([l] * m, m))
        if t != 2:
            raise ValueError("closed form only for t in {1, 2}")
        den = m * (m - 1) if m > 1 else 1
        same = l * (m - 1) if m > 1 else l
        mixed = l * (l - 1)
        vals = [same if i == j else mixed for i, j in _index_tuples(m, 2)]
        return CoherenceTensor(m, 2, l, "diagonal", _diag_matrix(vals, den))
    if method != "enumerate":
        raise ValueError(f"unknown method {method!r}")
    total = math.comb(m, l)
    if total > ENUMERATION_BUDGET:
        raise ValueError(f"C({m},{l}) = {total} exceeds the enumeration budget")
    if m ** t > TENSOR_DIAG_BUDGET:
        raise ValueError(f"m^t = {m ** t} exceeds the tensor budget")
    counts = np.zeros(m ** t, dtype=np.int64)
    for J in combinations(range(m), l):
        v = np.zeros(m, dtype=np.int64)
        v[list(J)] = 1
        w = v
        for _ in range(t - 1):
            w = np.kron(w, v)
        counts += w
    return CoherenceTensor(m, t, l, "diagonal", _diag_matrix(counts.tolist(), total))


def d_norm_sq(l: int, m: int) -> Fraction:
    """tr(D_{2,l,m}^2) = l^2 (l^2 - 2l + m) / (m (m - 1))."""
    if m < 2 or not 1 <= l <= m:
        raise ValueError("need m >= 2 and 1 <= l <= m")
    return Fraction(l * l * (l * l - 2 * l + m), m * (m - 1))


def _stirling2(t: int, u: int) -> int:
    return sum((-1) ** (u - i) * math.comb(u, i) * i ** t for i in range(u + 1)) // math.factorial(u)


def diag_norm_sq(t: int, l: int, m: int) -> Fraction:
    """tr(D_{t,l,m}^2) for any t, counting index tuples by their number of distinct values.

    A diagonal entry with u distinct indices equals C(m-u, l-u)/C(m, l).
    """
    total = math.comb(m, l)
    s = Fraction(0)
    for u in range(1, min(t, m) + 1):
        if u > l:
            break
        tuples = _stirling2(t, u) * math.perm(m, u)
        s += tuples * Fraction(math.comb(m - u, l - u), total) ** 2
    return s


@dataclass
class BlockSidelnikovResult:
    lhs: Fraction
    rhs: Fraction
    equal: bool
    design_lambda: int | None

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.equal))


def block_sidelnikov_test(F: BlockFamily, t: int) -> BlockSidelnikovResult:
    """(1/|S|^2) sum |J & J'|^t against tr(D_{t,l,m}^2)."""
    n = len(F)
    X = intersections(F)
    lhs = Fraction(sum(int(x) ** t for x in X.flat), n * n)
    rhs = d_norm_sq(F.l, F.m) if t == 2 else diag_norm_sq(t, F.l, F.m)
    lam = is_t_design(F, t) if t <= F.l else None
    return BlockSidelnikovResult(lhs, rhs, lhs == rhs, lam)


@dataclass
class TensorDesignVerdict:
    equal: bool
    lam: Fraction | None

    def __bool__(self):
        return self.equal


def tensor_design_check(F: BlockFamily, t: int) -> TensorDesignVerdict:
    """Compare (1/|S|) sum D_J^{(x)t} with D_{t,l,m} entrywise (both diagonal)."""
    m, l, n = F.m, F.l, len(F)
    if m ** t > TENSOR_DIAG_BUDGET:
        raise ValueError(f"m^t = {m ** t} exceeds the tensor budget")
    D = build_D(t, l, m)
    dden = D.matrix.den
    ddiag = np.diagonal(D.matrix.re)
    acc = np.zeros(m ** t, dtype=np.int64)
    for blk in F.blocks:
        v = np.zeros(m, dtype=np.int64)
        v[[a - 1 for a in blk]] = 1
        w = v
        for _ in range(t - 1):
            w = np.kron(w, v)
        acc += w
    # acc / n == ddiag / dden
    equal = bool(np.array_equal(acc * dden, ddiag * n))
    lam = None
    if equal and m >= t:
        idx = sum(s * m ** (t - 1 - s) for s in range(t))  # e_1 (x) e_2 (x) ... (x) e_t
        lam = n * Fraction(int(ddiag[idx]), dden)
    return TensorDesignVerdict(equal, lam)


# --------------------------------------------------------------------------
# Grassmannian 2-design <=> BIBD


@dataclass
class EquivalenceReport:
    hypotheses_ok: bool
    reason: str
    frame_is_2design: bool | None = None
    blocks_are_bibd: bool | None = None
    sidelnikov: SidelnikovResult | None = None
    design_lambda: object = None

    @property
    def consistent(self) -> bool | None:
        if not self.hypotheses_ok:
            return None
        return self.frame_is_2design == self.blocks_are_bibd


def gdesign_bibd_equivalence(S: OrthonormalBasisSet, F: BlockFamily) -> EquivalenceReport:
    """Evaluate both sides of: frame is a 2-design iff blocks are a 2-(m, m/2, m/2-1) design."""
    from .fusion import assemble

    m = S.dim
    problems = []
    if F.m != m:
        problems.append(f"design ground set {F.m} != dimension {m}")
    else:
        if len(S) != max_mub_count(S.field, m):
            problems.append(f"{len(S)} bases, maximal set needs {max_mub_count(S.field, m)}")
        if 2 * F.l != m:
            problems.append(f"block size {F.l} != m/2")
        if len(S) * len(F) != 2 * ambient_design_dim(S.field, m):
            problems.append(f"frame size {len(S) * len(F)} != 2 d_F(m)")
    if problems:
        return EquivalenceReport(False, "theorem hypotheses not satisfied: " + "; ".join(problems))
    side = sidelnikov_test(assemble(S, F), 2)
    want = Fraction(m, 2) - 1
    if F.l >= 2:
        lam = is_t_design(F, 2)
    else:
        # t exceeds the block size; the tensor characterisation still applies
        v = tensor_design_check(F, 2)
        lam = v.lam if v.equal else None
    bibd = lam is not None and lam == want
    return EquivalenceReport(True, "hypotheses satisfied", side.equal, bibd, side, lam)


# --------------------------------------------------------------------------
# Monte-Carlo oracle


def haar_k2_estimate(l: int, m: int, field: str, samples: int, seed: int,
                     chunk: int = 20000) -> DenseMatrix:
    """Average of (U P U*)^{(x)2} over Haar-random U; P = diag(1..1, 0..0).

    The sample budget is split into chunks with seeds spawned from ``seed``.
    """
    _check_lm(l, m)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if l == m:
        return DenseMatrix(data=np.eye(m * m))
    nchunks = -(-samples // chunk)
    children = np.random.SeedSequence(seed).spawn(nchunks)
    acc = np.zeros((m, m, m, m), dtype=np.complex128)
    left = samples
    for ss in children:
        size = min(chunk, left)
        left -= size
        U = haar_random(m, field, np.random.default_rng(ss), size=size)
        Q = U[:, :, :l]
        P = Q @ np.conj(np.swapaxes(Q, 1, 2))
        acc += np.einsum("sij,skl->ikjl", P, P)
    return DenseMatrix(data=(acc / samples).reshape(m * m, m * m))
