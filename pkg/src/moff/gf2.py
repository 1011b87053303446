"""Arithmetic in GF(2^r) over a fixed polynomial basis.

Elements are r-bit integers; bit s is the coefficient of x^s.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

# Primitive polynomials, bit s = coefficient of x^s.  Pinned so that
# constructions are bit-reproducible.
IRREDUCIBLE = {
    1: 0b11,            # x + 1
    2: 0b111,           # x^2 + x + 1
    3: 0b1011,          # x^3 + x + 1
    4: 0b10011,         # x^4 + x + 1
    5: 0b100101,        # x^5 + x^2 + 1
    6: 0b1011011,       # x^6 + x^4 + x^3 + x + 1
    7: 0b10000011,      # x^7 + x + 1
    8: 0b100011101,     # x^8 + x^4 + x^3 + x^2 + 1
}


def poly_str(bits: int) -> str:
    terms = []
    for s in range(bits.bit_length() - 1, -1, -1):
        if bits >> s & 1:
            terms.append("1" if s == 0 else "x" if s == 1 else f"x^{s}")
    return " + ".join(terms) or "0"


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] polynomials."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def polymod(a: int, mod: int) -> int:
    dm = mod.bit_length() - 1
    while a and a.bit_length() - 1 >= dm:
        a ^= mod << (a.bit_length() - 1 - dm)
    return a


class GF2r:
    """The field GF(2^r) = GF(2)[x] / (modulus)."""

    def __init__(self, r: int, modulus: int | None = None):
        if r < 1:
            raise ValueError("degree must be >= 1")
        if modulus is None:
            if r not in IRREDUCIBLE:
                raise ValueError(f"no pinned irreducible polynomial for r={r}")
            modulus = IRREDUCIBLE[r]
        if modulus.bit_length() - 1 != r:
            raise ValueError("modulus degree does not match r")
        self.r = r
        self.modulus = modulus
        self.order = 1 << r

    def __eq__(self, other):
        return isinstance(other, GF2r) and (self.r, self.modulus) == (other.r, other.modulus)

    def __hash__(self):
        return hash((self.r, self.modulus))

    def __repr__(self):
        return f"GF2r({self.r}, {poly_str(self.modulus)})"

    def __call__(self, bits: int) -> "GF2Element":
        if not 0 <= bits < self.order:
            raise ValueError(f"{bits} is not an element of GF(2^{self.r})")
        return GF2Element(bits, self)

    def elements(self):
        return [GF2Element(v, self) for v in range(self.order)]

    @property
    def zero(self) -> "GF2Element":
        return GF2Element(0, self)

    @property
    def one(self) -> "GF2Element":
        return GF2Element(1, self)

    def mul(self, a: int, b: int) -> int:
        return polymod(clmul(a, b), self.modulus)

    def power(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inverse(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self.power(a, self.order - 2)

    def trace(self, a: int) -> int:
        """Absolute trace a + a^2 + ... + a^(2^(r-1)), an element of GF(2)."""
        t, x = 0, a
        for _ in range(self.r):
            t ^= x
            x = self.mul(x, x)
        assert t in (0, 1)
        return t


@dataclass(frozen=True)
class GF2Element:
    bits: int
    field: GF2r

    def _check(self, other: "GF2Element"):
        if not isinstance(other, GF2Element) or other.field != self.field:
            raise TypeError("operands from different fields")

    def __add__(self, other: "GF2Element") -> "GF2Element":
        self._check(other)
        return GF2Element(self.bits ^ other.bits, self.field)

    __sub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other: "GF2Element") -> "GF2Element":
        self._check(other)
        return GF2Element(self.field.mul(self.bits, other.bits), self.field)

    def __truediv__(self, other: "GF2Element") -> "GF2Element":
        return self * other.inverse()

    def __pow__(self, e: int) -> "GF2Element":
        if e < 0:
            return self.inverse() ** (-e)
        return GF2Element(self.field.power(self.bits, e), self.field)

    def inverse(self) -> "GF2Element":
        return GF2Element(self.field.inverse(self.bits), self.field)

    def frobenius(self) -> "GF2Element":
        return self * self

    def trace(self) -> int:
        return self.field.trace(self.bits)

    def __bool__(self):
        return self.bits != 0

    def __repr__(self):
        return f"GF2Element({poly_str(self.bits)})"


def is_irreducible(mod: int) -> bool:
    """Brute-force irreducibility test by trial division."""
    d = mod.bit_length() - 1
    if d < 1:
        return False
    for q in range(2, 1 << (d // 2 + 1)):
        if 0 < q.bit_length() - 1 <= d // 2 and polymod(mod, q) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def trace_form(r: int) -> tuple:
    """Binary symmetric matrices M_a[s][t] = tr(a x^s x^t) for every a.

    Returns a tuple indexed by the integer encoding of a.  The map a -> M_a
    is GF(2)-linear and M_a is nonsingular for a != 0.
    """
    f = GF2r(r)
    mats = []
    for a in range(f.order):
        mats.append(tuple(tuple(f.trace(f.mul(a, f.mul(1 << s, 1 << t))) for t in range(r))
                          for s in range(r)))
    return tuple(mats)
