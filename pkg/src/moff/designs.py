"""Recursive incidence matrices S_r and block-design verification.

Blocks are 1-based in files and reports, 0-based bitmasks internally.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

SWAP = np.array([[0, 1], [1, 0]], dtype=np.int64)


class DesignError(ValueError):
    pass


@dataclass(frozen=True)
class IncidenceMatrix:
    """0/1 matrix with one column per block (rows = ground set)."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2:
            raise DesignError("incidence matrix must be two-dimensional")
        if not np.isin(a, (0, 1)).all():
            raise DesignError("incidence matrix entries must be 0 or 1")
        object.__setattr__(self, "entries", a.astype(np.int64))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape

    def __eq__(self, other):
        return isinstance(other, IncidenceMatrix) and np.array_equal(self.entries, other.entries)

    __hash__ = None

    def to_csv(self) -> str:
        return "".join(",".join(str(int(x)) for x in row) + "\n" for row in self.entries)


def _mask(block: Iterable[int]) -> int:
    out = 0
    for a in block:
        out |= 1 << (a - 1)
    return out


def _members(mask: int) -> tuple:
    out, a = [], 1
    while mask:
        if mask & 1:
            out.append(a)
        mask >>= 1
        a += 1
    return tuple(out)


class BlockFamily:
    """Ordered list of l-subsets of {1..m}; duplicates allowed."""

    __slots__ = ("m", "l", "masks")

    def __init__(self, m: int, blocks: Sequence[Iterable[int]], l: int | None = None):
        if m < 1:
            raise DesignError("ground set must be non-empty")
        masks = []
        for blk in blocks:
            blk = list(blk)
            if any(not 1 <= a <= m for a in blk):
                raise DesignError(f"block {blk} has elements outside 1..{m}")
            if len(set(blk)) != len(blk):
                raise DesignError(f"block {blk} repeats an element")
            masks.append(_mask(blk))
        sizes = {bin(x).count("1") for x in masks}
        if l is None:
            if len(sizes) > 1:
                raise DesignError(f"blocks have different sizes {sorted(sizes)}")
            l = sizes.pop() if sizes else 0
        elif sizes and sizes != {l}:
            raise DesignError(f"every block must have size {l}")
        self.m, self.l, self.masks = m, l, tuple(masks)

    @classmethod
    def from_masks(cls, m: int, l: int, masks: Iterable[int]) -> "BlockFamily":
        f = cls.__new__(cls)
        f.m, f.l, f.masks = m, l, tuple(masks)
        return f

    @property
    def blocks(self) -> list:
        return [_members(x) for x in self.masks]

    def __len__(self):
        return len(self.masks)

    def __eq__(self, other):
        return isinstance(other, BlockFamily) and (self.m, self.l, self.masks) == (
            other.m, other.l, other.masks)

    def __hash__(self):
        return hash((self.m, self.l, self.masks))

    def without(self, index: int) -> "BlockFamily":
        masks = self.masks[:index] + self.masks[index + 1:]
        return BlockFamily.from_masks(self.m, self.l, masks)

    def __repr__(self):
        return f"BlockFamily(m={self.m}, l={self.l}, n={len(self)})"


# --------------------------------------------------------------------------
# construction of S_r


def swap_matrix(r: int) -> np.ndarray:
    """F_r = I_{2^r - 1} (x) [[0,1],[1,0]]."""
    return np.kron(np.eye((1 << r) - 1, dtype=np.int64), SWAP)


def build_S(r: int) -> IncidenceMatrix:
    """The 2^r x (2^{r+1} - 2) incidence matrix S_r."""
    if r < 1:
        raise ValueError("r must be >= 1")
    s = np.eye(2, dtype=np.int64)
    for k in range(2, r + 1):
        h = 1 << (k - 1)
        one, zero = np.ones((h, 1), dtype=np.int64), np.zeros((h, 1), dtype=np.int64)
        b1 = np.block([[one, zero], [zero, one]])
        b2 = np.vstack([s, s])
        b3 = np.vstack([s, s @ swap_matrix(k - 1)])
        s = np.hstack([b1, b2, b3])
    return IncidenceMatrix(s)


def to_blocks(S: IncidenceMatrix) -> BlockFamily:
    a = S.entries
    return BlockFamily(S.rows, [tuple(int(i) + 1 for i in np.nonzero(a[:, b])[0])
                                for b in range(S.cols)])


def from_blocks(F: BlockFamily) -> IncidenceMatrix:
    a = np.zeros((F.m, len(F)), dtype=np.int64)
    for b, blk in enumerate(F.blocks):
        for i in blk:
            a[i - 1, b] = 1
    return IncidenceMatrix(a)


# --------------------------------------------------------------------------
# matrix identities


@dataclass
class CheckReport:
    ok: bool
    name: str
    detail: str = ""
    index: tuple | None = None

    def __bool__(self):
        return self.ok


def _first_mismatch(a: np.ndarray, b: np.ndarray):
    bad = np.argwhere(a != b)
    return tuple(int(x) for x in bad[0]) if len(bad) else None


def _expect_shape(S: IncidenceMatrix, r: int, name: str):
    want = (1 << r, (1 << (r + 1)) - 2)
    if S.shape != want:
        return CheckReport(False, name, f"shape {S.shape}, expected {want}")
    return None


def check_sums(S: IncidenceMatrix, r: int) -> CheckReport:
    """Column sums 2^{r-1} and row sums 2^r - 1."""
    bad = _expect_shape(S, r, "sums")
    if bad:
        return bad
    cs, rs = S.entries.sum(axis=0), S.entries.sum(axis=1)
    col = np.nonzero(cs != 1 << (r - 1))[0]
    if col.size:
        j = int(col[0])
        return CheckReport(False, "sums", f"column {j + 1} sums to {cs[j]}", (j,))
    row = np.nonzero(rs != (1 << r) - 1)[0]
    if row.size:
        i = int(row[0])
        return CheckReport(False, "sums", f"row {i + 1} sums to {rs[i]}", (i,))
    return CheckReport(True, "sums", f"columns {1 << (r - 1)}, rows {(1 << r) - 1}")


def gram_closed_form(r: int) -> np.ndarray:
    """2^{r-2} [J + I_{c/2} (x) [[1,-1],[-1,1]]] as an integer matrix."""
    c = (1 << (r + 1)) - 2
    pair = np.array([[1, -1], [-1, 1]], dtype=np.int64)
    core = np.ones((c, c), dtype=np.int64) + np.kron(np.eye(c // 2, dtype=np.int64), pair)
    # 2^{r-2} * core; core entries are 0 or 2 on paired blocks, 1 elsewhere
    if r >= 2:
        return core * (1 << (r - 2))
    assert np.all(core % 2 == 0)
    return core // 2


def gram_check(S: IncidenceMatrix, r: int) -> CheckReport:
    bad = _expect_shape(S, r, "gram")
    if bad:
        return bad
    g = S.entries.T @ S.entries
    idx = _first_mismatch(g, gram_closed_form(r))
    if idx:
        return CheckReport(False, "gram", f"S^T S differs at {tuple(i + 1 for i in idx)}", idx)
    return CheckReport(True, "gram", "S^T S = 2^{r-2}[J + I (x) [[1,-1],[-1,1]]]")


def outer_identities_check(S: IncidenceMatrix, r: int) -> CheckReport:
    """S S^T = 2^{r-1} I + (2^{r-1} - 1) J and S F_r S^T = 2^{r-1}(J - I)."""
    bad = _expect_shape(S, r, "outer")
    if bad:
        return bad
    m, h = 1 << r, 1 << (r - 1)
    eye, ones = np.eye(m, dtype=np.int64), np.ones((m, m), dtype=np.int64)
    a = S.entries
    idx = _first_mismatch(a @ a.T, h * eye + (h - 1) * ones)
    if idx:
        return CheckReport(False, "outer", f"S S^T differs at {tuple(i + 1 for i in idx)}", idx)
    idx = _first_mismatch(a @ swap_matrix(r) @ a.T, h * (ones - eye))
    if idx:
        return CheckReport(False, "outer", f"S F S^T differs at {tuple(i + 1 for i in idx)}", idx)
    return CheckReport(True, "outer", f"S S^T = {h}I + {h - 1}J; S F S^T = {h}(J - I)")


# --------------------------------------------------------------------------
# combinatorial properties


def intersections(F: BlockFamily) -> np.ndarray:
    """Matrix of |J_a & J_b| for all list positions."""
    n = len(F)
    out = np.zeros((n, n), dtype=np.int64)
    for a, x in enumerate(F.masks):
        for b in range(a, n):
            out[a, b] = out[b, a] = bin(x & F.masks[b]).count("1")
    return out


def cohesiveness(F: BlockFamily) -> int:
    """Largest intersection over distinct list positions."""
    if len(F) < 2:
        raise DesignError("cohesiveness needs at least two blocks")
    ms = F.masks
    return max(bin(ms[a] & ms[b]).count("1")
               for a in range(len(ms)) for b in range(a + 1, len(ms)))


def is_t_design(F: BlockFamily, t: int) -> int | None:
    """Return lambda if every t-subset lies in exactly lambda blocks, else None."""
    if t < 0 or t > F.l:
        raise DesignError(f"t={t} must satisfy 0 <= t <= l={F.l}")
    lam = None
    for sub in combinations(range(F.m), t):
        mask = sum(1 << i for i in sub)
        c = sum(1 for x in F.masks if x & mask == mask)
        if lam is None:
            lam = c
        elif c != lam:
            return None
    return lam


def johnson_bound(m: int, l: int, n: int) -> Fraction:
    """l^2/m, the lower bound on the largest intersection when n > m."""
    if n <= m:
        raise DesignError(f"bound needs n > m (n={n}, m={m})")
    return Fraction(l * l, m)


@dataclass
class OrthoplecticVerdict:
    maximal: bool
    cohesiveness: int
    threshold: Fraction
    size_ok: bool
    pairs: list | None

    def __bool__(self):
        return self.maximal


def complementary_pairs(F: BlockFamily) -> list | None:
    """Perfect matching of list positions into disjoint pairs, or None."""
    n = len(F)
    if n % 2:
        return None
    used = [False] * n
    pairs = []
    for a in range(n):
        if used[a]:
            continue
        partners = [b for b in range(n) if b != a and not used[b]
                    and F.masks[a] & F.masks[b] == 0]
        if len(partners) != 1:
            return None
        b = partners[0]
        used[a] = used[b] = True
        pairs.append((a + 1, b + 1))
    return pairs


def is_maximally_orthoplectic(F: BlockFamily) -> OrthoplecticVerdict:
    """l^2/m-cohesive with exactly 2(m - 1) blocks."""
    thr = Fraction(F.l * F.l, F.m)
    coh = cohesiveness(F)
    size_ok = len(F) == 2 * (F.m - 1)
    maximal = size_ok and coh <= thr
    pairs = complementary_pairs(F) if maximal else None
    return OrthoplecticVerdict(maximal, coh, thr, size_ok, pairs)
