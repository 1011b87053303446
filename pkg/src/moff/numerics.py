"""Exact and floating scalar/matrix arithmetic shared by every module.

Exact matrices are Gaussian-rational: two integer grids (real and
imaginary parts) over one positive common denominator kept in lowest
terms, so equality is structural.  Integer grids are int64 while the
bounds allow and fall back to Python-int object arrays otherwise.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

EXACT = "exact"
FLOAT = "float"
DEFAULT_TOL = 1e-10

_LIMIT = 2**62
_RANK_PRIME = 2147483647  # 2^31 - 1


class ShapeError(ValueError):
    pass


class ModeError(ValueError):
    pass


class ProjectorError(ValueError):
    """Matrix is not an orthogonal projection."""


# --------------------------------------------------------------------------
# scalars


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def frac_str(x) -> str:
    """Canonical ``"p/q"`` rendering (``q`` always present)."""
    x = as_fraction(x)
    return f"{x.numerator}/{x.denominator}"


class GaussianRational:
    """Exact complex number re + i*im with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = as_fraction(re)
        self.im = as_fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (complex, np.complexfloating)):
            raise TypeError("floating complex values are not exact")
        return cls(x)

    @property
    def real(self) -> Fraction:
        return self.re

    @property
    def imag(self) -> Fraction:
        return self.im

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        n = o.abs2()
        if n == 0:
            raise ZeroDivisionError("division by zero")
        q = self * o.conjugate()
        return GaussianRational(q.re / n, q.im / n)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"GaussianRational({self.re})"
        return f"GaussianRational({self.re}, {self.im})"


# --------------------------------------------------------------------------
# integer grid helpers


def _amax(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a.flat)
    return int(np.abs(a).max())


def _shrink(a: np.ndarray) -> np.ndarray:
    """Return ``a`` as int64 when every entry fits, else as an object array."""
    if a.dtype == np.int64:
        return a
    if a.dtype != object:
        return a.astype(np.int64)
    if _amax(a) < _LIMIT:
        return a.astype(np.int64)
    return a


def int_array(x) -> np.ndarray:
    a = np.asarray(x)
    if a.dtype == object:
        a = np.vectorize(int, otypes=[object])(a) if a.size else a.astype(np.int64)
        return _shrink(a)
    if not np.issubdtype(a.dtype, np.integer):
        raise TypeError("integer grid expected")
    return a.astype(np.int64)


def grid_to_float(a: np.ndarray, den: int) -> np.ndarray:
    if a.dtype == np.int64 and den < 2**53:
        return a.astype(np.float64) / den
    return np.vectorize(lambda x: float(Fraction(int(x), den)), otypes=[np.float64])(a)


def _obj(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def imatmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact integer matrix product (broadcasting over leading axes)."""
    k = a.shape[-1]
    if a.dtype == np.int64 and b.dtype == np.int64 and _amax(a) * _amax(b) * max(k, 1) < _LIMIT:
        return a @ b
    return _shrink(_obj(a) @ _obj(b))


def iscale(a: np.ndarray, c: int) -> np.ndarray:
    c = int(c)
    if a.dtype == np.int64 and _amax(a) * abs(c) < _LIMIT:
        return a * c
    return _shrink(_obj(a) * c)


def iadd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype == np.int64 and b.dtype == np.int64 and _amax(a) + _amax(b) < _LIMIT:
        return a + b
    return _shrink(_obj(a) + _obj(b))


def isum(a: np.ndarray, axis=None):
    """Exact sum; returns a Python int when ``axis`` is None."""
    if axis is None:
        if a.dtype == np.int64 and _amax(a) * max(a.size, 1) < _LIMIT:
            return int(a.sum())
        return int(sum(int(x) for x in a.flat))
    if a.dtype == np.int64 and _amax(a) * max(a.shape[axis], 1) < _LIMIT:
        return a.sum(axis=axis)
    return _shrink(_obj(a).sum(axis=axis))


def _grid_gcd(*arrays: np.ndarray) -> int:
    g = 0
    for a in arrays:
        if a.size == 0:
            continue
        if a.dtype == np.int64:
            g = math.gcd(g, int(np.gcd.reduce(np.abs(a).ravel())))
        else:
            g = math.gcd(g, *(int(x) for x in a.flat))
        if g == 1:
            return 1
    return g


# --------------------------------------------------------------------------
# matrices


class DenseMatrix:
    """Dense complex matrix in exact or float mode; immutable by convention."""

    __slots__ = ("re", "im", "den", "data")

    def __init__(self, re=None, im=None, den=1, data=None):
        if data is not None:
            self.data = np.asarray(data, dtype=np.complex128)
            if self.data.ndim != 2:
                raise ShapeError("matrix must be two-dimensional")
            self.re = self.im = None
            self.den = None
            return
        re = int_array(re)
        im = np.zeros_like(re) if im is None else int_array(im)
        if re.ndim != 2 or re.shape != im.shape:
            raise ShapeError("real and imaginary grids must be equal 2-D shapes")
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            re, im, den = iscale(re, -1), iscale(im, -1), -den
        g = math.gcd(den, _grid_gcd(re, im))
        if g > 1:
            re, im = _shrink(re // g), _shrink(im // g)
            den //= g
        self.re, self.im, self.den = re, im, den
        self.data = None

    # constructors ------------------------------------------------------

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence]) -> "DenseMatrix":
        """Exact matrix from nested rationals / GaussianRationals / strings."""
        vals = [[GaussianRational.coerce(x) if not isinstance(x, str) else GaussianRational(x)
                 for x in row] for row in rows]
        if not vals or any(len(r) != len(vals[0]) for r in vals):
            raise ShapeError("ragged or empty entry grid")
        den = 1
        for row in vals:
            for z in row:
                den = math.lcm(den, z.re.denominator, z.im.denominator)
        re = np.array([[int(z.re * den) for z in row] for row in vals], dtype=object)
        im = np.array([[int(z.im * den) for z in row] for row in vals], dtype=object)
        return cls(re, im, den)

    @classmethod
    def from_float(cls, array) -> "DenseMatrix":
        return cls(data=array)

    @classmethod
    def identity(cls, n: int, mode: str = EXACT) -> "DenseMatrix":
        if mode == FLOAT:
            return cls(data=np.eye(n))
        return cls(np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, rows: int, cols: int, mode: str = EXACT) -> "DenseMatrix":
        if mode == FLOAT:
            return cls(data=np.zeros((rows, cols)))
        return cls(np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def diag(cls, values: Iterable) -> "DenseMatrix":
        vals = list(values)
        if any(isinstance(v, (float, complex, np.floating, np.complexfloating)) for v in vals):
            return cls(data=np.diag(np.asarray(vals, dtype=np.complex128)))
        n = len(vals)
        rows = [[vals[i] if i == j else 0 for j in range(n)] for i in range(n)]
        return cls.from_entries(rows)

    # basic properties --------------------------------------------------

    @property
    def mode(self) -> str:
        return FLOAT if self.data is not None else EXACT

    @property
    def shape(self) -> tuple[int, int]:
        return (self.data if self.data is not None else self.re).shape

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    def __getitem__(self, idx):
        i, j = idx
        if self.data is not None:
            return complex(self.data[i, j])
        return GaussianRational(Fraction(int(self.re[i, j]), self.den),
                                Fraction(int(self.im[i, j]), self.den))

    def is_real(self) -> bool:
        if self.data is not None:
            return bool(np.all(self.data.imag == 0))
        return not np.any(self.im != 0)

    def to_float(self) -> np.ndarray:
        if self.data is not None:
            return self.data.copy()
        return grid_to_float(self.re, self.den) + 1j * grid_to_float(self.im, self.den)

    def entries(self) -> list[list]:
        return [[self[i, j] for j in range(self.cols)] for i in range(self.rows)]

    # arithmetic --------------------------------------------------------

    def _check_mode(self, other: "DenseMatrix"):
        if self.mode != other.mode:
            raise ModeError(f"mode mismatch: {self.mode} vs {other.mode}")

    def _check_shape(self, other: "DenseMatrix"):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "DenseMatrix") -> "DenseMatrix":
        self._check_mode(other)
        self._check_shape(other)
        if self.data is not None:
            return DenseMatrix(data=self.data + other.data)
        return DenseMatrix(iadd(iscale(self.re, other.den), iscale(other.re, self.den)),
                           iadd(iscale(self.im, other.den), iscale(other.im, self.den)),
                           self.den * other.den)

    def __neg__(self) -> "DenseMatrix":
        if self.data is not None:
            return DenseMatrix(data=-self.data)
        return DenseMatrix(iscale(self.re, -1), iscale(self.im, -1), self.den)

    def __sub__(self, other: "DenseMatrix") -> "DenseMatrix":
        return self + (-other)

    def scale(self, c) -> "DenseMatrix":
        """Multiply by a scalar (rational/GaussianRational in exact mode)."""
        if self.data is not None:
            return DenseMatrix(data=self.data * complex(c))
        z = GaussianRational.coerce(c)
        den = math.lcm(z.re.denominator, z.im.denominator)
        a, b = int(z.re * den), int(z.im * den)
        re = iadd(iscale(self.re, a), iscale(self.im, -b))
        im = iadd(iscale(self.im, a), iscale(self.re, b))
        return DenseMatrix(re, im, self.den * den)

    def __matmul__(self, other: "DenseMatrix") -> "DenseMatrix":
        self._check_mode(other)
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        if self.data is not None:
            return DenseMatrix(data=self.data @ other.data)
        rr = imatmul(self.re, other.re)
        ii = imatmul(self.im, other.im)
        ri = imatmul(self.re, other.im)
        ir = imatmul(self.im, other.re)
        return DenseMatrix(iadd(rr, iscale(ii, -1)), iadd(ri, ir), self.den * other.den)

    @property
    def H(self) -> "DenseMatrix":
        """Conjugate transpose."""
        if self.data is not None:
            return DenseMatrix(data=self.data.conj().T)
        return DenseMatrix(self.re.T.copy(), iscale(self.im.T.copy(), -1), self.den)

    def trace(self):
        if self.rows != self.cols:
            raise ShapeError("trace of a non-square matrix")
        if self.data is not None:
            return complex(np.trace(self.data))
        return GaussianRational(Fraction(isum(np.diagonal(self.re).copy()), self.den),
                                Fraction(isum(np.diagonal(self.im).copy()), self.den))

    def __eq__(self, other):
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        if self.mode != other.mode or self.shape != other.shape:
            return False
        if self.data is not None:
            return bool(np.array_equal(self.data, other.data))
        return (self.den == other.den and np.array_equal(self.re, other.re)
                and np.array_equal(self.im, other.im))

    __hash__ = None

    def allclose(self, other: "DenseMatrix", tol: float = DEFAULT_TOL) -> bool:
        self._check_shape(other)
        return bool(np.max(np.abs(self.to_float() - other.to_float()), initial=0.0) <= tol)

    def __repr__(self):
        return f"DenseMatrix({self.rows}x{self.cols}, mode={self.mode})"


def hs_inner(a: DenseMatrix, b: DenseMatrix):
    """Hilbert-Schmidt inner product tr(A* B)."""
    if a.mode != b.mode:
        raise ModeError(f"mode mismatch: {a.mode} vs {b.mode}")
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.mode == FLOAT:
        return complex(np.vdot(a.data, b.data))
    # sum conj(a_ij) b_ij
    re = isum(_elementwise(a.re, b.re)) + isum(_elementwise(a.im, b.im))
    im = isum(_elementwise(a.re, b.im)) - isum(_elementwise(a.im, b.re))
    d = a.den * b.den
    return GaussianRational(Fraction(re, d), Fraction(im, d))


def _elementwise(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype == np.int64 and b.dtype == np.int64 and _amax(a) * _amax(b) < _LIMIT:
        return a * b
    return _obj(a) * _obj(b)


def kron(a: DenseMatrix, b: DenseMatrix) -> DenseMatrix:
    if a.mode != b.mode:
        raise ModeError(f"mode mismatch: {a.mode} vs {b.mode}")
    if a.mode == FLOAT:
        return DenseMatrix(data=np.kron(a.data, b.data))

    def k(x, y):
        if x.dtype == np.int64 and y.dtype == np.int64 and _amax(x) * _amax(y) < _LIMIT:
            return np.kron(x, y)
        return _shrink(np.kron(_obj(x), _obj(y)))

    re = iadd(k(a.re, b.re), iscale(k(a.im, b.im), -1))
    im = iadd(k(a.re, b.im), k(a.im, b.re))
    return DenseMatrix(re, im, a.den * b.den)


class HermitianProjector:
    """Orthogonal projection of rank ``rank``; validated on construction."""

    __slots__ = ("matrix", "rank", "field")

    def __init__(self, matrix: DenseMatrix, field: str = "complex", tol: float = DEFAULT_TOL):
        self.rank = verify_projector(matrix, tol)
        if field == "real" and not _is_real(matrix, tol):
            raise ProjectorError("real-field projector has non-zero imaginary part")
        self.matrix = matrix
        self.field = field

    @property
    def m(self) -> int:
        return self.matrix.rows

    def __repr__(self):
        return f"HermitianProjector(m={self.m}, rank={self.rank}, field={self.field})"


def _is_real(matrix: DenseMatrix, tol: float) -> bool:
    if matrix.mode == EXACT:
        return matrix.is_real()
    return bool(np.max(np.abs(matrix.data.imag), initial=0.0) <= tol)


def verify_projector(M: DenseMatrix, tol: float = DEFAULT_TOL) -> int:
    """Check that ``M`` is Hermitian and idempotent; return its rank.

    The rank is round(tr M).  Exact matrices must satisfy the identities
    exactly; float matrices entrywise within ``tol``.
    """
    if M.rows != M.cols:
        raise ShapeError("projector must be square")
    if M.mode == EXACT:
        if M != M.H:
            raise ProjectorError("not Hermitian")
        if M @ M != M:
            raise ProjectorError("not idempotent")
        t = M.trace()
        if t.im != 0 or t.re.denominator != 1:
            raise ProjectorError(f"non-integral trace {t!r}")
        return int(t.re)
    a = M.data
    if np.max(np.abs(a - a.conj().T), initial=0.0) > tol:
        raise ProjectorError("not Hermitian")
    if np.max(np.abs(a @ a - a), initial=0.0) > tol:
        raise ProjectorError("not idempotent")
    t = np.trace(a).real
    r = round(t)
    if abs(t - r) > tol * max(1, M.rows):
        raise ProjectorError(f"non-integral trace {t}")
    return int(r)


# --------------------------------------------------------------------------
# exact rank


def _rank_mod_p(a: np.ndarray, p: int = _RANK_PRIME) -> int:
    a = np.array([[int(x) % p for x in row] for row in a], dtype=np.int64) if a.dtype == object \
        else np.mod(a, p).astype(np.int64)
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.nonzero(a[rank:, c])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, c]), p - 2, p)
        a[rank] = (a[rank] * inv) % p
        below = a[rank + 1:, c].copy()
        if np.any(below):
            # entries < 2^31, products < 2^62
            a[rank + 1:] = (a[rank + 1:] - (below[:, None] * a[rank][None, :]) % p) % p
        rank += 1
    return rank


def exact_rank(rows) -> int:
    """Rank over the rationals of a rational matrix.

    A rank computed modulo a large prime never exceeds the rational rank,
    so a full-rank modular result is already exact; otherwise sympy's
    exact elimination decides.
    """
    vals = [[as_fraction(x) for x in row] for row in rows]
    if not vals or not vals[0]:
        return 0
    den = 1
    for row in vals:
        for x in row:
            den = math.lcm(den, x.denominator)
    grid = _shrink(np.array([[int(x * den) for x in row] for row in vals], dtype=object))
    return integer_rank(grid)


def integer_rank(grid: np.ndarray) -> int:
    grid = int_array(grid)
    full = min(grid.shape)
    if _rank_mod_p(grid) == full:
        return full
    from sympy import ZZ
    from sympy.polys.matrices import DomainMatrix

    dm = DomainMatrix([[ZZ(int(x)) for x in row] for row in grid], grid.shape, ZZ)
    return int(dm.rank())


# --------------------------------------------------------------------------
# Haar sampling


def haar_random(m: int, field: str, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-distributed orthogonal/unitary matrices via QR of Gaussians.

    Columns are rescaled by the phases of diag(R) so the distribution is
    exactly invariant.  Returns shape (m, m) or (size, m, m).
    """
    shape = (m, m) if size is None else (size, m, m)
    if field == "real":
        z = rng.standard_normal(shape)
    elif field == "complex":
        z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    else:
        raise ValueError(f"unknown field {field!r}")
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return q * ph[..., None, :]
