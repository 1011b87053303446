"""Brute-force oracles for small instances, independent of the constructions."""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .designs import BlockFamily
from .fusion import FusionFrame
from .numerics import haar_random


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 10**7
    max_seconds: float = 300.0

    def __post_init__(self):
        if self.max_nodes <= 0 or self.max_seconds <= 0:
            raise ValueError("search budget must be positive")


@dataclass
class CliqueResult:
    size: int
    witness: list
    nodes: int
    complete: bool
    seconds: float = 0.0


class _BudgetExceeded(Exception):
    pass


def max_clique(adj: list, budget: SearchBudget | None = None) -> CliqueResult:
    """Maximum clique of a graph given as neighbour bitsets.

    Branch and bound with greedy colouring bounds; vertices are relabelled
    by non-increasing degree.  Results past the budget are flagged
    incomplete and carry the best clique found.
    """
    budget = budget or SearchBudget()
    n = len(adj)
    order = sorted(range(n), key=lambda v: -bin(adj[v]).count("1"))
    pos = {v: i for i, v in enumerate(order)}
    radj = [0] * n
    for v in range(n):
        bits = 0
        x = adj[v]
        while x:
            low = x & -x
            bits |= 1 << pos[low.bit_length() - 1]
            x ^= low
        radj[pos[v]] = bits

    best: list = []
    nodes = 0
    t0 = time.monotonic()

    def colour(P: int):
        out = []
        U, k = P, 0
        while U:
            k += 1
            Q = U
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                Q &= ~radj[v] & ~low
                U &= ~low
                out.append((v, k))
        return out

    def expand(R: list, P: int):
        nonlocal best, nodes
        nodes += 1
        if nodes > budget.max_nodes or (nodes & 1023) == 0 and \
                time.monotonic() - t0 > budget.max_seconds:
            raise _BudgetExceeded
        for v, k in reversed(colour(P)):
            if len(R) + k <= len(best):
                return
            R.append(v)
            NP = P & radj[v]
            if NP:
                expand(R, NP)
            elif len(R) > len(best):
                best = list(R)
            R.pop()
            P &= ~(1 << v)

    complete = True
    try:
        if n:
            expand([], (1 << n) - 1)
    except _BudgetExceeded:
        complete = False
    return CliqueResult(len(best), sorted(order[v] for v in best), nodes, complete,
                        time.monotonic() - t0)


def _subsets(m: int, l: int) -> list:
    return [sum(1 << i for i in c) for c in combinations(range(m), l)]


def max_cohesive_family(m: int, l: int, c: int,
                        budget: SearchBudget | None = None) -> tuple:
    """Largest family of distinct l-subsets of [m] with pairwise intersections <= c.

    Returns (size, witness BlockFamily, CliqueResult).
    """
    if not 0 <= l <= m:
        raise ValueError("need 0 <= l <= m")
    if c < 0:
        raise ValueError("c must be >= 0")
    verts = _subsets(m, l)
    adj = []
    for a, x in enumerate(verts):
        bits = 0
        for b, y in enumerate(verts):
            if a != b and bin(x & y).count("1") <= c:
                bits |= 1 << b
        adj.append(bits)
    res = max_clique(adj, budget)
    fam = BlockFamily.from_masks(m, l, [verts[v] for v in res.witness])
    return res.size, fam, res


@dataclass
class Extendability:
    extendable: bool
    witness: tuple | None
    candidates: int

    def __bool__(self):
        return self.extendable


def extendability_check(F: BlockFamily, c) -> Extendability:
    """Can some l-subset outside F join it while keeping intersections <= c?"""
    present = set(F.masks)
    checked = 0
    for cand in _subsets(F.m, F.l):
        if cand in present:
            continue
        checked += 1
        if all(bin(cand & x).count("1") <= c for x in F.masks):
            blk = tuple(i + 1 for i in range(F.m) if cand >> i & 1)
            return Extendability(True, blk, checked)
    return Extendability(False, None, checked)


def direct_design_count(F: BlockFamily, t: int) -> Counter:
    """Histogram {containment count: number of t-subsets} over all t-subsets of [m]."""
    if t > F.l:
        raise ValueError(f"t={t} exceeds block size {F.l}")
    blocks = [frozenset(b) for b in F.blocks]
    hist = Counter()
    for sub in combinations(range(1, F.m + 1), t):
        s = frozenset(sub)
        hist[sum(1 for b in blocks if s <= b)] += 1
    return hist


def random_frame(m: int, l: int, n: int, seed: int, field: str = "complex") -> FusionFrame:
    """n independent Haar-random rank-l projections (float mode)."""
    if not 1 <= l <= m:
        raise ValueError("need 1 <= l <= m")
    rng = np.random.default_rng(seed)
    if l == m:
        data = np.broadcast_to(np.eye(m, dtype=np.complex128), (n, m, m)).copy()
    else:
        U = haar_random(m, field, rng, size=n)
        Q = U[:, :, :l]
        data = Q @ np.conj(np.swapaxes(Q, 1, 2))
        if field == "real":
            data = data.real.astype(np.complex128)
    return FusionFrame(field, m, l, data=data)
