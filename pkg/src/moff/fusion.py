"""Fusion frames of equal-rank projections: assembly, geometry, certification.

Exact frames are stored as one stacked Gaussian-integer array over a common
denominator so that all pairwise traces come from a single integer product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .designs import BlockFamily, is_t_design
from .mub import OrthonormalBasisSet, ambient_design_dim
from .numerics import (
    DEFAULT_TOL,
    EXACT,
    FLOAT,
    DenseMatrix,
    HermitianProjector,
    ProjectorError,
    ShapeError,
    grid_to_float,
    iadd,
    imatmul,
    int_array,
    integer_rank,
    iscale,
    isum,
)


class FrameError(ValueError):
    pass


def _close(a, b, tol: float) -> bool:
    return abs(float(a) - float(b)) <= tol * max(1.0, abs(float(b)))


class FusionFrame:
    """n rank-l orthogonal projections on F^m, with optional provenance.

    ``provenance[j]`` is ``(k, block)``: basis index (0-based) and the
    1-based block that produced projection j.
    """

    def __init__(self, field: str, m: int, l: int, *, re=None, im=None, den=None,
                 data=None, provenance=None, tol: float = DEFAULT_TOL, validate: bool = True):
        if field not in ("real", "complex"):
            raise FrameError(f"unknown field {field!r}")
        self.field, self.m, self.l, self.tol = field, int(m), int(l), tol
        if data is not None:
            self.data = np.asarray(data, dtype=np.complex128)
            self.re = self.im = self.den = None
            shape = self.data.shape
        else:
            self.data = None
            self.re, self.im, self.den = int_array(re), int_array(im), int(den)
            shape = self.re.shape
        if len(shape) != 3 or shape[1:] != (self.m, self.m) or shape[0] < 1:
            raise FrameError(f"projection stack has shape {shape}, expected (n, {m}, {m})")
        self.provenance = None if provenance is None else [
            (int(k), tuple(int(a) for a in blk)) for k, blk in provenance]
        if self.provenance is not None and len(self.provenance) != shape[0]:
            raise FrameError("provenance length does not match projection count")
        if validate:
            self._validate()

    # construction ------------------------------------------------------

    @classmethod
    def from_projections(cls, projections: Sequence, field: str = "complex",
                         provenance=None, tol: float = DEFAULT_TOL) -> "FusionFrame":
        mats = [p.matrix if isinstance(p, HermitianProjector) else p for p in projections]
        if not mats:
            raise FrameError("a fusion frame needs at least one projection")
        m = mats[0].rows
        if any(M.shape != (m, m) for M in mats):
            raise FrameError("projections have different shapes")
        ranks = {HermitianProjector(M, field, tol).rank for M in mats}
        if len(ranks) != 1:
            raise FrameError(f"projections have different ranks {sorted(ranks)}")
        l = ranks.pop()
        if all(M.mode == EXACT for M in mats):
            den = math.lcm(*(M.den for M in mats))
            re = np.stack([iscale(M.re, den // M.den).astype(object) for M in mats])
            im = np.stack([iscale(M.im, den // M.den).astype(object) for M in mats])
            return cls(field, m, l, re=re, im=im, den=den, provenance=provenance, tol=tol)
        data = np.stack([M.to_float() for M in mats])
        return cls(field, m, l, data=data, provenance=provenance, tol=tol)

    def _validate(self):
        m, l = self.m, self.l
        if self.data is None:
            if np.any(self.re != np.swapaxes(self.re, 1, 2)) or np.any(
                    self.im != -np.swapaxes(self.im, 1, 2)):
                raise ProjectorError("a projection is not Hermitian")
            rr = imatmul(self.re, self.re)
            ii = imatmul(self.im, self.im)
            ri = imatmul(self.re, self.im)
            ir = imatmul(self.im, self.re)
            if np.any(iadd(rr, iscale(ii, -1)) != iscale(self.re, self.den)) or np.any(
                    iadd(ri, ir) != iscale(self.im, self.den)):
                raise ProjectorError("a projection is not idempotent")
            tr = isum(np.diagonal(self.re, axis1=1, axis2=2), axis=1)
            if np.any(tr != l * self.den):
                raise ProjectorError(f"a projection does not have rank {l}")
            if self.field == "real" and np.any(self.im):
                raise ProjectorError("real frame has complex entries")
        else:
            a = self.data
            tol = self.tol
            if np.max(np.abs(a - np.conj(np.swapaxes(a, 1, 2)))) > tol:
                raise ProjectorError("a projection is not Hermitian")
            if np.max(np.abs(a @ a - a)) > tol:
                raise ProjectorError("a projection is not idempotent")
            if np.max(np.abs(np.trace(a, axis1=1, axis2=2) - l)) > tol * max(1, m):
                raise ProjectorError(f"a projection does not have rank {l}")
            if self.field == "real" and np.max(np.abs(a.imag)) > tol:
                raise ProjectorError("real frame has complex entries")

    # access ------------------------------------------------------------

    @property
    def mode(self) -> str:
        return FLOAT if self.data is not None else EXACT

    @property
    def n(self) -> int:
        return (self.data if self.data is not None else self.re).shape[0]

    def __len__(self):
        return self.n

    def matrix(self, j: int) -> DenseMatrix:
        if self.data is not None:
            return DenseMatrix(data=self.data[j])
        return DenseMatrix(self.re[j], self.im[j], self.den)

    @property
    def projections(self) -> list:
        out = []
        for j in range(self.n):
            p = object.__new__(HermitianProjector)
            p.matrix, p.rank, p.field = self.matrix(j), self.l, self.field
            out.append(p)
        return out

    def to_float(self) -> np.ndarray:
        if self.data is not None:
            return self.data
        return grid_to_float(self.re, self.den) + 1j * grid_to_float(self.im, self.den)

    def subframe(self, indices: Sequence[int]) -> "FusionFrame":
        idx = list(indices)
        prov = None if self.provenance is None else [self.provenance[j] for j in idx]
        if self.data is not None:
            return FusionFrame(self.field, self.m, self.l, data=self.data[idx],
                               provenance=prov, tol=self.tol, validate=False)
        return FusionFrame(self.field, self.m, self.l, re=self.re[idx], im=self.im[idx],
                           den=self.den, provenance=prov, tol=self.tol, validate=False)

    def without(self, j: int) -> "FusionFrame":
        return self.subframe([i for i in range(self.n) if i != j])

    def basis_indices(self) -> list:
        if self.provenance is None:
            return []
        return sorted({k for k, _ in self.provenance})

    def by_basis(self, k: int) -> "FusionFrame":
        if self.provenance is None:
            raise FrameError("frame carries no provenance")
        return self.subframe([j for j, (kk, _) in enumerate(self.provenance) if kk == k])

    def _flat(self):
        if self.data is not None:
            return self.data.reshape(self.n, -1)
        return self.re.reshape(self.n, -1), self.im.reshape(self.n, -1)

    def __repr__(self):
        return (f"FusionFrame(field={self.field}, n={self.n}, l={self.l}, m={self.m}, "
                f"mode={self.mode})")


def coordinate_projection(B, J: Sequence[int]) -> HermitianProjector:
    """Projection onto span{b_j : j in J} (J 1-based) for a basis or basis matrix."""
    from .mub import Basis, exact_basis, float_basis

    if isinstance(B, DenseMatrix):
        if B.mode == EXACT:
            if B.den != 1:
                raise FrameError("exact basis matrices must be Gaussian-integer")
            B = exact_basis(B.re, B.im)
        else:
            B = float_basis(B.data)
    elif not isinstance(B, Basis):
        B = float_basis(B)
    if any(not 1 <= j <= B.dim for j in J):
        raise IndexError(f"block {tuple(J)} out of range for dimension {B.dim}")
    P = B.projection([j - 1 for j in J])
    field = "real" if B.is_real() else "complex"
    return HermitianProjector(P, field)


def assemble(S: OrthonormalBasisSet, F: BlockFamily, tol: float = DEFAULT_TOL) -> FusionFrame:
    """One coordinate projection per (basis, block) pair, basis-major order."""
    if S.dim != F.m:
        raise ShapeError(f"basis dimension {S.dim} does not match design ground set {F.m}")
    prov, mats = [], []
    for k, b in enumerate(S.bases):
        for blk in F.blocks:
            mats.append(b.projection([a - 1 for a in blk]))
            prov.append((k, blk))
    if S.mode == EXACT:
        den = math.lcm(*(M.den for M in mats))
        re = np.stack([iscale(M.re, den // M.den) for M in mats])
        im = np.stack([iscale(M.im, den // M.den) for M in mats])
        return FusionFrame(S.field, S.dim, F.l, re=re, im=im, den=den, provenance=prov, tol=tol)
    data = np.stack([M.to_float() for M in mats])
    return FusionFrame(S.field, S.dim, F.l, data=data, provenance=prov, tol=tol)


# --------------------------------------------------------------------------
# frame bounds and cross Gramian


@dataclass
class FrameBounds:
    A: object
    B: object
    tight: bool

    def __iter__(self):
        return iter((self.A, self.B))


def frame_operator(ff: FusionFrame) -> DenseMatrix:
    if ff.mode == FLOAT:
        return DenseMatrix(data=ff.data.sum(axis=0))
    return DenseMatrix(isum(ff.re, axis=0), isum(ff.im, axis=0), ff.den)


def frame_bounds(ff: FusionFrame) -> FrameBounds:
    """Extreme eigenvalues of sum_j P_j; exact tightness test when possible."""
    T = frame_operator(ff)
    target = Fraction(ff.n * ff.l, ff.m)
    if ff.mode == EXACT:
        if T == DenseMatrix.identity(ff.m).scale(target):
            return FrameBounds(target, target, True)
        ev = np.linalg.eigvalsh(T.to_float())
        return FrameBounds(float(ev[0]), float(ev[-1]), False)
    ev = np.linalg.eigvalsh(T.data)
    tight = (ev[-1] - ev[0]) <= ff.tol * max(1.0, abs(ev[-1]))
    return FrameBounds(float(ev[0]), float(ev[-1]), bool(tight))


class CrossGramian:
    """Table of tr(P_i P_j); exact tables store integer numerators over ``den``."""

    def __init__(self, l: int, numer=None, den=None, values=None, tol=DEFAULT_TOL):
        self.l, self.numer, self.den, self.values, self.tol = l, numer, den, values, tol

    @property
    def exact(self) -> bool:
        return self.values is None

    @property
    def n(self) -> int:
        return (self.numer if self.exact else self.values).shape[0]

    def __getitem__(self, idx):
        i, j = idx
        if self.exact:
            return Fraction(int(self.numer[i, j]), self.den)
        return float(self.values[i, j])

    def chordal_sq(self, i: int, j: int):
        return self.l - self[i, j]

    def chordal(self, i: int, j: int) -> float:
        return math.sqrt(max(float(self.chordal_sq(i, j)), 0.0))

    def offdiag(self) -> np.ndarray:
        a = self.numer if self.exact else self.values
        mask = ~np.eye(self.n, dtype=bool)
        return a[mask]

    def distinct_offdiag(self) -> list:
        """Sorted distinct off-diagonal traces (float values clustered by tol)."""
        if self.n < 2:
            return []
        vals = self.offdiag()
        if self.exact:
            return [Fraction(int(v), self.den) for v in sorted({int(v) for v in vals})]
        out = []
        for v in np.sort(vals):
            if not out or v - out[-1] > self.tol:
                out.append(float(v))
        return out

    def max_offdiag(self):
        if self.exact:
            return Fraction(int(max(int(v) for v in self.offdiag())), self.den)
        return float(np.max(self.offdiag()))

    def min_offdiag(self):
        if self.exact:
            return Fraction(int(min(int(v) for v in self.offdiag())), self.den)
        return float(np.min(self.offdiag()))

    def power_sum(self, t: int):
        """sum over all i, j of tr(P_i P_j)^t."""
        if self.exact:
            s = sum(int(v) ** t for v in self.numer.flat)
            return Fraction(s, self.den ** t)
        return float(np.sum(self.values ** t))

    def to_csv(self) -> str:
        lines = []
        for i in range(self.n):
            if self.exact:
                lines.append(",".join(str(self[i, j]) for j in range(self.n)))
            else:
                lines.append(",".join(repr(float(self.values[i, j])) for j in range(self.n)))
        return "\n".join(lines) + "\n"


def _traces(a: FusionFrame, b: FusionFrame):
    """(numerators, den) or float table of tr(A_i B_j) for Hermitian stacks."""
    if a.mode == EXACT and b.mode == EXACT:
        ar, ai = a._flat()
        br, bi = b._flat()
        num = iadd(imatmul(ar, br.T), imatmul(ai, bi.T))
        return num, a.den * b.den
    fa = a.to_float().reshape(a.n, -1)
    fb = b.to_float().reshape(b.n, -1)
    return (fa @ fb.conj().T).real, None


def cross_gramian(ff: FusionFrame) -> CrossGramian:
    num, den = _traces(ff, ff)
    if den is None:
        return CrossGramian(ff.l, values=num, tol=ff.tol)
    return CrossGramian(ff.l, numer=num, den=den)


# --------------------------------------------------------------------------
# certification


@dataclass
class Certificate:
    n: int
    l: int
    m: int
    field: str
    mode: str
    tol: float
    frame_bounds: tuple
    is_tight: bool
    max_cross_trace: object
    min_cross_trace: object
    distinct_cross_traces: list
    simplex_bound: Fraction
    orthoplex_bound: Fraction
    regime: str
    is_equiangular: bool
    meets_simplex_bound: bool
    is_orthoplex_achieving: bool
    is_maximal_orthoplectic: bool
    m_equals_2l: bool
    partner_trace: Fraction
    antipodal_partner_map: list | None
    sidelnikov: dict = dc_field(default_factory=dict)
    design_params: dict | None = None

    @property
    def is_2design(self) -> bool:
        return bool(self.sidelnikov.get("equal"))


def _partner_map(G: CrossGramian, partner: Fraction, other: Fraction) -> list | None:
    """partner[j] = unique k with tr = partner and all other traces = other."""
    if partner == other:
        return None
    n = G.n
    off = ~np.eye(n, dtype=bool)
    if G.exact:
        a = G.numer
        pn, on = partner * G.den, other * G.den
        is_p = (a == int(pn)) if pn.denominator == 1 else np.zeros_like(off)
        is_o = (a == int(on)) if on.denominator == 1 else np.zeros_like(off)
    else:
        a = G.values
        is_p = np.abs(a - float(partner)) <= G.tol
        is_o = np.abs(a - float(other)) <= G.tol
    if np.any(off & ~is_p & ~is_o) or np.any((is_p & off).sum(axis=1) != 1):
        return None
    out = [int(np.nonzero(is_p[j] & off[j])[0][0]) for j in range(n)]
    if any(out[out[j]] != j for j in range(n)):
        return None
    return out


def block_family_of(ff: FusionFrame) -> BlockFamily | None:
    """The common block sequence when every basis carries the same blocks."""
    if ff.provenance is None:
        return None
    seqs = {}
    for k, blk in ff.provenance:
        seqs.setdefault(k, []).append(blk)
    fams = list(seqs.values())
    if any(f != fams[0] for f in fams):
        return None
    try:
        return BlockFamily(ff.m, fams[0])
    except ValueError:
        return None


def rankin_certify(ff: FusionFrame) -> Certificate:
    """Certify frame bounds, Rankin-type bounds, orthoplex structure and 2-design property."""
    from .coherence import sidelnikov_test

    n, l, m = ff.n, ff.l, ff.m
    if n < 2:
        raise FrameError("certification needs at least two projections")
    d = ambient_design_dim(ff.field, m)
    G = cross_gramian(ff)
    fb = frame_bounds(ff)
    mx, mn = G.max_offdiag(), G.min_offdiag()
    distinct = G.distinct_offdiag()
    simplex = Fraction(n * l * l - m * l, m * (n - 1))
    orthoplex = Fraction(l * l, m)
    regime = "orthoplex" if n > d + 1 else "simplex"
    eq = (lambda a, b: a == b) if G.exact else (lambda a, b: _close(a, b, ff.tol))
    equiangular = len(distinct) == 1
    achieving = regime == "orthoplex" and eq(mx, orthoplex)
    partner_trace = Fraction(l * (2 * l - m), m)
    pmap = None
    maximal = False
    if achieving and n == 2 * d:
        pmap = _partner_map(G, partner_trace, orthoplex)
        maximal = pmap is not None and m == 2 * l
    side = sidelnikov_test(ff, 2, gramian=G)
    design = None
    F = block_family_of(ff)
    if F is not None:
        for t in (2, 1):
            if t <= F.l and len(F):
                lam = is_t_design(F, t)
                if lam is not None:
                    design = {"t": t, "m": F.m, "l": F.l, "lambda": lam}
                    break
    return Certificate(
        n=n, l=l, m=m, field=ff.field, mode=ff.mode, tol=0.0 if G.exact else ff.tol,
        frame_bounds=(fb.A, fb.B), is_tight=fb.tight, max_cross_trace=mx,
        min_cross_trace=mn, distinct_cross_traces=distinct, simplex_bound=simplex,
        orthoplex_bound=orthoplex, regime=regime, is_equiangular=equiangular,
        meets_simplex_bound=eq(mx, simplex), is_orthoplex_achieving=achieving,
        is_maximal_orthoplectic=maximal, m_equals_2l=(m == 2 * l),
        partner_trace=partner_trace, antipodal_partner_map=pmap,
        sidelnikov={"t": 2, "lhs": side.lhs, "rhs": side.rhs, "equal": side.equal},
        design_params=design)


# --------------------------------------------------------------------------
# embedding


@dataclass
class EmbeddedVectors:
    """V_j = sqrt(m / (l (m - l))) (P_j - (l/m) I), scale kept symbolic.

    ``shifted`` holds P_j - (l/m) I exactly; ``gram`` is the table of
    <V_j, V_k> computed directly from them.
    """

    scale_sq: Fraction
    shifted: FusionFrame | np.ndarray
    gram: CrossGramian
    traceless: bool
    unit_norm: bool
    trace_relation: bool
    sum_zero: bool | None
    min_inner: object
    antipodal_bound: Fraction

    def vectors(self) -> np.ndarray:
        """Float realisation of the embedded vectors, shape (n, m, m)."""
        base = self.shifted if isinstance(self.shifted, np.ndarray) else self.shifted.to_float()
        return base * math.sqrt(self.scale_sq)

    def inner(self, j: int, k: int):
        return self.gram[j, k]


def embed(ff: FusionFrame) -> EmbeddedVectors:
    n, l, m = ff.n, ff.l, ff.m
    if l >= m:
        raise FrameError("embedding undefined for l = m")
    scale_sq = Fraction(m, l * (m - l))
    traces = cross_gramian(ff)
    tight = frame_bounds(ff).tight
    bound = Fraction(-l, m - l)
    if ff.mode == EXACT:
        # m * den * (P - l/m I) = m * N - l * den * I
        eye = np.eye(m, dtype=np.int64)
        sr = iadd(iscale(ff.re, m), iscale(np.broadcast_to(eye, ff.re.shape).copy(), -l * ff.den))
        si = iscale(ff.im, m)
        sden = m * ff.den
        shifted = FusionFrame(ff.field, m, l, re=sr, im=si, den=sden, validate=False)
        hs_num = iadd(imatmul(sr.reshape(n, -1), sr.reshape(n, -1).T),
                      imatmul(si.reshape(n, -1), si.reshape(n, -1).T))
        f = scale_sq / (sden * sden)
        gnum = iscale(hs_num, f.numerator)
        G = CrossGramian(l, numer=gnum, den=f.denominator)
        traceless = not np.any(isum(np.diagonal(sr, axis1=1, axis2=2), axis=1))
        unit = bool(np.all(np.diagonal(G.numer) == G.den))
        # tr(P_j P_k) = l^2/m + (l(m-l)/m) <V_j, V_k>, cleared of denominators
        lhs = iscale(traces.numer, m * G.den)
        rhs = iscale(iadd(np.full((n, n), l * l * G.den, dtype=np.int64),
                          iscale(G.numer, l * (m - l))), traces.den)
        rel = bool(np.array_equal(lhs, rhs))
        sum_zero = None
        if tight:
            sum_zero = not np.any(isum(sr, axis=0)) and not np.any(isum(si, axis=0))
        mn = G.min_offdiag() if n > 1 else None
        return EmbeddedVectors(scale_sq, shifted, G, traceless, unit, rel, sum_zero, mn, bound)
    a = ff.data - (l / m) * np.eye(m)
    v = a * math.sqrt(scale_sq)
    flat = v.reshape(n, -1)
    gv = (flat @ flat.conj().T).real
    G = CrossGramian(l, values=gv, tol=ff.tol)
    tol = ff.tol * max(1, m)
    traceless = bool(np.max(np.abs(np.trace(v, axis1=1, axis2=2))) <= tol)
    unit = bool(np.max(np.abs(np.diag(gv) - 1)) <= tol)
    rel = bool(np.max(np.abs(traces.values - (l * l / m + l * (m - l) / m * gv))) <= tol)
    sum_zero = bool(np.max(np.abs(v.sum(axis=0))) <= tol * n) if tight else None
    mn = G.min_offdiag() if n > 1 else None
    return EmbeddedVectors(scale_sq, a, G, traceless, unit, rel, sum_zero, mn, bound)


def coordinate_embedding_rank(ff: FusionFrame) -> int:
    """Dimension of span{V_j} for a frame drawn from a single basis."""
    if ff.provenance is not None and len(ff.basis_indices()) > 1:
        raise FrameError("projections come from more than one basis")
    l, m, n = ff.l, ff.m, ff.n
    if ff.mode == EXACT:
        eye = np.broadcast_to(np.eye(m, dtype=np.int64), ff.re.shape).copy()
        sr = iadd(iscale(ff.re, m), iscale(eye, -l * ff.den))
        si = iscale(ff.im, m)
        grid = np.concatenate([sr.reshape(n, -1).astype(object),
                               si.reshape(n, -1).astype(object)], axis=1)
        return integer_rank(grid)
    v = (ff.data - (l / m) * np.eye(m)).reshape(n, -1)
    return int(np.linalg.matrix_rank(np.concatenate([v.real, v.imag], axis=1),
                                     tol=ff.tol * 1e2))


def mutual_unbiasedness_check(ff1: FusionFrame, ff2: FusionFrame) -> bool:
    """True iff every cross trace tr(P_j P'_k) equals l^2/m."""
    if (ff1.l, ff1.m, ff1.field) != (ff2.l, ff2.m, ff2.field):
        raise ShapeError("frames differ in rank, dimension or field")
    num, den = _traces(ff1, ff2)
    target = Fraction(ff1.l ** 2, ff1.m)
    if den is None:
        tol = max(ff1.tol, ff2.tol)
        return bool(np.max(np.abs(num - float(target))) <= tol * max(1, ff1.m))
    return all(Fraction(int(v), den) == target for v in {int(x) for x in num.flat})
