"""Maximal sets of mutually unbiased bases: construction and verification."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .gf2 import IRREDUCIBLE, trace_form
from .numerics import (
    DEFAULT_TOL,
    EXACT,
    FLOAT,
    DenseMatrix,
    ShapeError,
    iadd,
    imatmul,
    int_array,
    integer_rank,
    iscale,
)

SCALE_NONE = "none"
SCALE_INV_SQRT_DIM = "inv-sqrt-dim"
FIELDS = ("real", "complex")


class UnsupportedConstruction(ValueError):
    """No built-in construction for this (field, dimension) pair."""


def _check_field(field: str):
    if field not in FIELDS:
        raise ValueError(f"field must be 'real' or 'complex', got {field!r}")


def max_mub_count(field: str, m: int) -> int:
    """k_F(m): m/2 + 1 (real) or m + 1 (complex)."""
    _check_field(field)
    if m < 2:
        raise ValueError("dimension must be >= 2")
    if field == "real":
        if m % 2:
            raise ValueError("real maximal MUB count requires even dimension")
        return m // 2 + 1
    return m + 1


def ambient_design_dim(field: str, m: int) -> int:
    """d_F(m), the dimension of traceless symmetric/Hermitian m x m matrices."""
    _check_field(field)
    if m < 2:
        raise ValueError("dimension must be >= 2")
    if field == "real":
        return (m + 2) * (m - 1) // 2
    return m * m - 1


@dataclass(frozen=True)
class Basis:
    """One orthonormal basis; columns are the basis vectors.

    Exact bases hold a Gaussian-integer grid; the true entries are
    grid / den, further divided by sqrt(m) when ``scale`` is
    ``"inv-sqrt-dim"``.  Float bases hold ``data`` directly.
    """

    re: np.ndarray | None = None
    im: np.ndarray | None = None
    den: int = 1
    scale: str = SCALE_NONE
    data: np.ndarray | None = None

    @property
    def exact(self) -> bool:
        return self.data is None

    @property
    def dim(self) -> int:
        return (self.re if self.exact else self.data).shape[0]

    def norm_sq(self) -> Fraction:
        """Square of the factor turning integer grid entries into true entries."""
        f = Fraction(1, self.den * self.den)
        if self.scale == SCALE_INV_SQRT_DIM:
            f /= self.dim
        return f

    def to_float(self) -> np.ndarray:
        if not self.exact:
            return self.data
        s = float(np.sqrt(float(self.norm_sq())))
        return (self.re.astype(np.float64) + 1j * self.im.astype(np.float64)) * s

    def is_real(self, tol: float = DEFAULT_TOL) -> bool:
        if self.exact:
            return not np.any(self.im)
        return bool(np.max(np.abs(self.data.imag), initial=0.0) <= tol)

    def projection(self, block: Sequence[int]) -> DenseMatrix:
        """Sum of b_j b_j^* over 0-based column indices ``block``."""
        idx = list(block)
        m = self.dim
        if any(j < 0 or j >= m for j in idx):
            raise IndexError(f"block index out of range for dimension {m}")
        if not self.exact:
            u = self.data[:, idx]
            return DenseMatrix(data=u @ u.conj().T)
        ur, ui = self.re[:, idx], self.im[:, idx]
        # (ur + i ui)(ur - i ui)^T
        re = iadd(imatmul(ur, ur.T), imatmul(ui, ui.T))
        im = iadd(imatmul(ui, ur.T), iscale(imatmul(ur, ui.T), -1))
        s = self.norm_sq()
        return DenseMatrix(iscale(re, s.numerator), iscale(im, s.numerator), s.denominator)


def exact_basis(re, im=None, scale: str = SCALE_NONE, den: int = 1) -> Basis:
    re = int_array(re)
    im = np.zeros_like(re) if im is None else int_array(im)
    if re.ndim != 2 or re.shape[0] != re.shape[1] or re.shape != im.shape:
        raise ShapeError("basis grid must be square")
    if scale not in (SCALE_NONE, SCALE_INV_SQRT_DIM):
        raise ValueError(f"unknown scale {scale!r}")
    return Basis(re=re, im=im, den=int(den), scale=scale)


def float_basis(data) -> Basis:
    a = np.asarray(data, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError("basis matrix must be square")
    return Basis(data=a)


@dataclass(frozen=True)
class OrthonormalBasisSet:
    field: str
    dim: int
    bases: tuple
    meta: dict = dc_field(default_factory=dict, compare=False)

    def __post_init__(self):
        _check_field(self.field)
        for b in self.bases:
            if b.dim != self.dim:
                raise ShapeError(f"basis of dimension {b.dim} in a set of dimension {self.dim}")
            if self.field == "real" and not b.is_real():
                raise ValueError("real basis set contains a complex entry")

    @property
    def mode(self) -> str:
        return EXACT if all(b.exact for b in self.bases) else FLOAT

    def __len__(self):
        return len(self.bases)


# --------------------------------------------------------------------------
# construction

_I4 = {0: (1, 0), 1: (0, 1), 2: (-1, 0), 3: (0, -1)}


def _galois_basis(r: int, a: int) -> Basis:
    """Basis indexed by a in GF(2^r): entries i^{q_a(x)} (-1)^{b.x} / sqrt(m).

    q_a is the Z4-valued lift of the binary quadratic form with matrix M_a.
    Rows are indexed by x in GF(2)^r, columns by b.
    """
    m = 1 << r
    M = trace_form(r)[a]
    q = np.zeros(m, dtype=np.int64)
    for x in range(m):
        bits = [(x >> s) & 1 for s in range(r)]
        v = sum(M[s][s] * bits[s] for s in range(r))
        v += 2 * sum(M[s][t] * bits[s] * bits[t] for s in range(r) for t in range(s + 1, r))
        q[x] = v % 4
    xs = np.arange(m)
    parity = np.array([[bin(x & b).count("1") & 1 for b in range(m)] for x in xs])
    sign = 1 - 2 * parity
    phase_re = np.array([_I4[int(v)][0] for v in q])
    phase_im = np.array([_I4[int(v)][1] for v in q])
    return exact_basis(phase_re[:, None] * sign, phase_im[:, None] * sign, SCALE_INV_SQRT_DIM)


_H4 = np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]])
_H4_PRIME = np.array([[1, 1, 1, -1], [1, 1, -1, 1], [1, -1, 1, 1], [-1, 1, 1, 1]])


def construct_mubs(field: str, m: int) -> OrthonormalBasisSet:
    """Maximal MUB set: complex m = 2^r (r <= 8) or real m = 4.

    Complex bases are the standard basis followed by the m bases indexed by
    GF(2^r) elements in integer order.
    """
    _check_field(field)
    if field == "real":
        if m != 4:
            raise UnsupportedConstruction(
                f"no built-in real MUB construction for m={m}; import the bases instead")
        bases = (exact_basis(np.eye(4, dtype=np.int64)),
                 exact_basis(_H4, scale=SCALE_INV_SQRT_DIM),
                 exact_basis(_H4_PRIME, scale=SCALE_INV_SQRT_DIM))
        return OrthonormalBasisSet("real", 4, bases, {"construction": "hadamard-4"})
    r = m.bit_length() - 1
    if m < 2 or m != 1 << r:
        raise UnsupportedConstruction(
            f"complex construction needs a power of two, got m={m}; import the bases instead")
    if r not in IRREDUCIBLE:
        raise UnsupportedConstruction(f"no pinned irreducible polynomial for m=2^{r}")
    bases = [exact_basis(np.eye(m, dtype=np.int64))]
    bases += [_galois_basis(r, a) for a in range(m)]
    meta = {"construction": "z4-quadratic-forms", "irreducible": IRREDUCIBLE[r]}
    return OrthonormalBasisSet("complex", m, tuple(bases), meta)


# --------------------------------------------------------------------------
# verification


def cross_inner_sq(b1: Basis, b2: Basis):
    """Matrix of |<b1_j, b2_j'>|^2.

    Exact bases give (integer grid, Fraction factor); float bases give a
    float array and factor 1.
    """
    if b1.exact and b2.exact:
        # U1^* U2 with U = re + i im
        gr = iadd(imatmul(b1.re.T, b2.re), imatmul(b1.im.T, b2.im))
        gi = iadd(imatmul(b1.re.T, b2.im), iscale(imatmul(b1.im.T, b2.re), -1))
        sq = iadd(gr.astype(object) * gr, gi.astype(object) * gi)
        return sq, b1.norm_sq() * b2.norm_sq()
    g = b1.to_float().conj().T @ b2.to_float()
    return np.abs(g) ** 2, 1


def gram(b: Basis):
    """Gram matrix B^* B as an exact DenseMatrix or a float array."""
    if b.exact:
        gr = iadd(imatmul(b.re.T, b.re), imatmul(b.im.T, b.im))
        gi = iadd(imatmul(b.re.T, b.im), iscale(imatmul(b.im.T, b.re), -1))
        s = b.norm_sq()
        return DenseMatrix(iscale(gr, s.numerator), iscale(gi, s.numerator), s.denominator)
    u = b.data
    return DenseMatrix(data=u.conj().T @ u)


@dataclass
class UnbiasedReport:
    ok: bool
    mode: str
    tol: float
    gram_deviation: list
    pair_deviation: dict
    worst: object

    def __bool__(self):
        return self.ok


def _gram_dev(b: Basis):
    g = gram(b)
    eye = DenseMatrix.identity(b.dim, g.mode)
    d = g - eye
    if d.mode == EXACT:
        top = max(np.abs(d.re).max(initial=0), np.abs(d.im).max(initial=0))
        return Fraction(int(top), d.den)
    return float(np.max(np.abs(d.data), initial=0.0))


def verify_unbiased(S: OrthonormalBasisSet, tol: float = DEFAULT_TOL) -> UnbiasedReport:
    """Worst deviations of each Gram from I and of every cross |<b,b'>|^2 from 1/m."""
    m = S.dim
    for b in S.bases:
        if b.dim != m:
            raise ShapeError("dimension mismatch among bases")
    target = Fraction(1, m)
    gdev = [_gram_dev(b) for b in S.bases]
    pdev = {}
    for k in range(len(S.bases)):
        for k2 in range(k + 1, len(S.bases)):
            sq, f = cross_inner_sq(S.bases[k], S.bases[k2])
            if isinstance(f, Fraction):
                vals = {int(v) for v in sq.flat}
                pdev[(k, k2)] = max(abs(v * f - target) for v in vals)
            else:
                pdev[(k, k2)] = float(np.max(np.abs(sq - 1.0 / m)))
    devs = gdev + list(pdev.values())
    worst = max(devs) if devs else 0
    limit = 0 if S.mode == EXACT else tol
    return UnbiasedReport(ok=worst <= limit, mode=S.mode, tol=limit,
                          gram_deviation=gdev, pair_deviation=pdev, worst=worst)


def _hermitian_coords(u: np.ndarray, v: np.ndarray, real: bool) -> list:
    """Real coordinates of the Hermitian matrix w w^*, w = u + i v (integers)."""
    m = len(u)
    coords = []
    for i in range(m):
        coords.append(int(u[i]) ** 2 + int(v[i]) ** 2)
    for i in range(m):
        for j in range(i + 1, m):
            # w_i conj(w_j)
            coords.append(int(u[i]) * int(u[j]) + int(v[i]) * int(v[j]))
            if not real:
                coords.append(int(v[i]) * int(u[j]) - int(u[i]) * int(v[j]))
    return coords


def dgs_span_check(S: OrthonormalBasisSet, tol: float = DEFAULT_TOL) -> int:
    """Real dimension of span{b b^*} over all basis vectors.

    Computed as the rank of the matrix of real coordinates of the rank-one
    projectors (equal to the rank of their Gram matrix).
    """
    real = S.field == "real"
    if S.mode == EXACT:
        rows = []
        for b in S.bases:
            for j in range(S.dim):
                rows.append(_hermitian_coords(b.re[:, j], b.im[:, j], real))
        return integer_rank(np.array(rows, dtype=object))
    rows = []
    iu = np.triu_indices(S.dim, 1)
    for b in S.bases:
        u = b.to_float()
        for j in range(S.dim):
            p = np.outer(u[:, j], u[:, j].conj())
            parts = [np.diag(p).real, np.sqrt(2) * p[iu].real]
            if not real:
                parts.append(np.sqrt(2) * p[iu].imag)
            rows.append(np.concatenate(parts))
    return int(np.linalg.matrix_rank(np.array(rows), tol=tol * 1e2))


@dataclass
class LinesDesignReport:
    average: Fraction
    closed_form: Fraction
    sidelnikov_rhs: Fraction
    maximal: bool
    equal: bool
    strictly_greater: bool

    def __bool__(self):
        return self.equal


def mub_lines_2design_check(S: OrthonormalBasisSet, tol: float = DEFAULT_TOL) -> LinesDesignReport:
    """Average of (tr P P')^2 over all pairs of rank-one projectors in S.

    Compared with (k_F + m - 1)/(m^2 k_F) and with tr(K_{2,1,m}^2); the
    average never falls below the latter.
    """
    from .coherence import k2_norm_sq

    m, k = S.dim, len(S.bases)
    kf = max_mub_count(S.field, m)
    total = Fraction(0)
    ftotal = 0.0
    for a in range(k):
        for b in range(k):
            sq, f = cross_inner_sq(S.bases[a], S.bases[b])
            if isinstance(f, Fraction):
                total += sum(int(v) ** 2 for v in sq.flat) * f * f
            else:
                ftotal += float(np.sum(sq ** 2))
    n2 = (m * k) ** 2
    closed = Fraction(kf + m - 1, m * m * kf)
    rhs = k2_norm_sq(1, m, S.field)
    if S.mode == EXACT:
        avg = total / n2
        equal = avg == rhs
        greater = avg > rhs
    else:
        avg = ftotal / n2
        equal = abs(avg - float(rhs)) <= tol
        greater = avg - float(rhs) > tol
    return LinesDesignReport(average=avg, closed_form=closed, sidelnikov_rhs=rhs,
                             maximal=(k == kf), equal=equal, strictly_greater=greater)
