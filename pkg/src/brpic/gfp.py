"""Exact arithmetic over prime fields: vectors, matrices, kernels, GL_n(F_p)."""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import DimensionMismatch, NotPrime, Singular, SizeGuardExceeded

MAX_P = 13
MAX_N = 6
MAX_GL_ORDER = 20_000_000


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int
    allow_large: bool = False

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise NotPrime(f"p must be prime, got {self.p}")
        if self.p > MAX_P and not self.allow_large:
            raise SizeGuardExceeded(f"p={self.p} exceeds the desk-scale guard p <= {MAX_P}")

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(self.p)

    def __repr__(self):
        return f"F{self.p}"

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, -1, self.p)

    def elements(self):
        return range(self.p)


def as_field(field) -> PrimeField:
    return field if isinstance(field, PrimeField) else PrimeField(int(field))


@dataclass(frozen=True)
class FpVector:
    field: PrimeField
    coords: tuple

    def __post_init__(self):
        p = self.field.p
        object.__setattr__(self, "coords", tuple(int(c) % p for c in self.coords))

    @property
    def n(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __add__(self, other):
        _same_shape(self, other)
        return FpVector(self.field, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        _same_shape(self, other)
        return FpVector(self.field, [a - b for a, b in zip(self.coords, other.coords)])

    def scale(self, c):
        return FpVector(self.field, [c * a for a in self.coords])

    def is_zero(self):
        return not any(self.coords)

    @classmethod
    def basis(cls, field, n, i):
        return cls(as_field(field), [int(j == i) for j in range(n)])

    @classmethod
    def zero(cls, field, n):
        return cls(as_field(field), [0] * n)


def _same_shape(a, b):
    if a.field != b.field or a.n != b.n:
        raise DimensionMismatch(f"{a.field}^{a.n} vs {b.field}^{b.n}")


def all_vectors(field, n):
    """Every vector of F_p^n, first coordinate most significant."""
    field = as_field(field)
    p = field.p
    for code in range(p ** n):
        coords = []
        for _ in range(n):
            coords.append(code % p)
            code //= p
        yield FpVector(field, coords[::-1])


@dataclass(frozen=True)
class PrimeFieldMatrix:
    field: PrimeField
    entries: tuple

    def __post_init__(self):
        p = self.field.p
        rows = tuple(tuple(int(x) % p for x in row) for row in self.entries)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionMismatch("matrix must be square")
        object.__setattr__(self, "entries", rows)

    @property
    def n(self):
        return len(self.entries)

    @classmethod
    def identity(cls, field, n):
        return cls(as_field(field), [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, field, values):
        n = len(values)
        return cls(as_field(field), [[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_array(cls, field, arr):
        return cls(as_field(field), np.asarray(arr).tolist())

    def to_array(self):
        return np.array(self.entries, dtype=np.int64).reshape(self.n, self.n)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other):
        if isinstance(other, FpVector):
            return mat_vec(self, other)
        return mat_mul(self, other)

    def column(self, j):
        return FpVector(self.field, [row[j] for row in self.entries])

    def transpose(self):
        return PrimeFieldMatrix(self.field, list(zip(*self.entries)))

    def det(self) -> int:
        return determinant(self.entries, self.field.p)

    def is_invertible(self) -> bool:
        return self.det() != 0

    def inverse(self):
        return mat_inverse(self)

    def key(self) -> int:
        return pack_entries(self.entries, self.field.p)


def mat_mul(a: PrimeFieldMatrix, b: PrimeFieldMatrix) -> PrimeFieldMatrix:
    if a.field != b.field or a.n != b.n:
        raise DimensionMismatch(f"cannot multiply {a.n}x{a.n} over {a.field} by {b.n}x{b.n} over {b.field}")
    p, n = a.field.p, a.n
    bt = list(zip(*b.entries))
    return PrimeFieldMatrix(a.field, [[sum(x * y for x, y in zip(row, col)) % p for col in bt] for row in a.entries])


def mat_vec(a: PrimeFieldMatrix, v: FpVector) -> FpVector:
    if a.field != v.field or a.n != v.n:
        raise DimensionMismatch("matrix/vector shape mismatch")
    return FpVector(a.field, [sum(x * y for x, y in zip(row, v.coords)) for row in a.entries])


def rref(rows, p):
    """Reduced row echelon form mod p.  Returns (rows, pivot columns)."""
    m = [[int(x) % p for x in row] for row in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows, p) -> int:
    return len(rref(rows, p)[1])


def determinant(rows, p) -> int:
    m = [[int(x) % p for x in row] for row in rows]
    n = len(m)
    det = 1
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c]), None)
        if pivot is None:
            return 0
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det = det * m[c][c] % p
        inv = pow(m[c][c], -1, p)
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv % p
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[c])]
    return det % p


def mat_inverse(a: PrimeFieldMatrix) -> PrimeFieldMatrix:
    p, n = a.field.p, a.n
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(a.entries)]
    red, pivots = rref(aug, p)
    if pivots[:n] != list(range(n)):
        raise Singular("matrix is not invertible")
    return PrimeFieldMatrix(a.field, [row[n:] for row in red])


def kernel_basis(a, field=None) -> list:
    """Basis of {v : a v = 0}.

    ``a`` is a PrimeFieldMatrix or a rectangular list of rows (then ``field`` is required).
    """
    if isinstance(a, PrimeFieldMatrix):
        field, rows = a.field, a.entries
        ncols = a.n
    else:
        field = as_field(field)
        rows = [list(r) for r in a]
        ncols = len(rows[0]) if rows else 0
    p = field.p
    if not rows:
        return [FpVector.basis(field, ncols, i) for i in range(ncols)]
    red, pivots = rref(rows, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][f] % p
        basis.append(FpVector(field, v))
    return basis


def gl_order(field, n: int) -> int:
    p = as_field(field).p
    return prod(p ** n - p ** i for i in range(n))


def check_gl_guard(field, n, max_order=None):
    """Raise SizeGuardExceeded unless a GL_n(F_p) sweep fits the guard."""
    field = as_field(field)
    limit = MAX_GL_ORDER if max_order is None else max_order
    order = gl_order(field, n)
    if n > MAX_N and max_order is None:
        raise SizeGuardExceeded(f"n={n} exceeds the guard n <= {MAX_N}")
    if order > limit:
        raise SizeGuardExceeded(
            f"|GL_{n}(F_{field.p})| = {order:,} exceeds the sweep guard {limit:,}; "
            "raise the limit explicitly or use generator closure")
    return order


def entry_bits(p: int) -> int:
    return max(1, (p - 1).bit_length())


def packs_in_word(p: int, n: int) -> bool:
    return n * n * entry_bits(p) <= 63


def pack_entries(entries, p) -> int:
    """Pack an n x n matrix into an integer, ceil(log2 p) bits per entry, row-major from bit 0."""
    bits = entry_bits(p)
    key = 0
    shift = 0
    for row in entries:
        for x in row:
            key |= (int(x) % p) << shift
            shift += bits
    return key


def unpack_entries(key, p, n):
    bits = entry_bits(p)
    mask = (1 << bits) - 1
    return [[(key >> (bits * (i * n + j))) & mask for j in range(n)] for i in range(n)]


def gl_enumerate(field, n, partition=None, max_order=None, backend=None):
    """Stream GL_n(F_p) in row-major radix-p order, skipping singular matrices.

    Matrices are ordered lexicographically by their entry tuple read row by
    row.  ``partition=(k, w)`` restricts to worker k of w: the stream of
    independent leading row pairs is dealt round-robin, so the w sub-streams
    are disjoint and their union is the whole group.
    """
    from . import kernels

    field = as_field(field)
    check_gl_guard(field, n, max_order)
    for chunk in kernels.enumerate_chunks(field.p, n, partition=partition):
        for g in chunk:
            yield PrimeFieldMatrix(field, g)
