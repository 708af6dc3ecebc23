"""Alternating and symmetric forms on V_n = F_p^n, the GL action on them,
interior derivation and the radical.

Conventions
-----------
x_0, ..., x_{n-1} is the basis of V* dual to e_0, ..., e_{n-1}.

WedgeForm
    sum of c * x_i ^ x_j (^ x_k) over strictly increasing index tuples.  As a
    function, x_i ^ x_j ^ x_k evaluates to the 3x3 minor on rows i, j, k.
SymForm, degree 2
    a symmetric bilinear form S written as sum_{i<=j} c_ij z_i z_j, where the
    off-diagonal z_i z_j stands for z_i (x) z_j + z_j (x) z_i and z_i^2 for
    z_i (x) z_i; so S[i][j] = S[j][i] = c_ij.
SymForm, degree 3
    a cubic polynomial in x_0, ..., x_{n-1} (only used over F_2).

``gl_act_*(g, phi)`` is the pullback phi o (g x ... x g); it satisfies
gl_act(g h, phi) = gl_act(h, gl_act(g, phi)).  ``act_left`` turns it into a
left action by pulling back along g^-1.  Stabilizer sets are the same under
either convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations, combinations_with_replacement, permutations
from math import comb

import numpy as np

from .errors import DimensionMismatch, WrongCharacteristic
from .gfp import FpVector, PrimeField, PrimeFieldMatrix, as_field, determinant, kernel_basis, mat_inverse

SUBSCRIPT = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def _perm_sign(seq):
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _check_index(key, n):
    if any(not 0 <= i < n for i in key):
        raise DimensionMismatch(f"index {key} out of range for n={n}")


class _Form:
    """Shared plumbing for coefficient-map forms."""

    field: PrimeField
    n: int
    k: int
    coeffs: dict

    def _items(self):
        return tuple(sorted(self.coeffs.items()))

    def __hash__(self):
        return hash((type(self).__name__, self.field.p, self.n, self.k, self._items()))

    def __eq__(self, other):
        return (type(other) is type(self) and other.field == self.field and other.n == self.n
                and other.k == self.k and other.coeffs == self.coeffs)

    def __getitem__(self, key):
        return self.coeffs.get(tuple(key), 0)

    def _combine(self, other, sign):
        if type(other) is not type(self) or other.field != self.field or other.n != self.n or other.k != self.k:
            raise DimensionMismatch("forms live in different spaces")
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out.get(key, 0) + sign * c
        return type(self)(self.field, self.n, self.k, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        return type(self)(self.field, self.n, self.k, {key: c * v for key, v in self.coeffs.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def vector(self):
        """Coefficient vector in the order of ``basis_keys``."""
        return [self.coeffs.get(key, 0) for key in self.basis_keys(self.n, self.k)]

    @classmethod
    def from_vector(cls, field, n, k, vec):
        return cls(as_field(field), n, k, dict(zip(cls.basis_keys(n, k), vec)))

    @classmethod
    def zero(cls, field, n, k):
        return cls(as_field(field), n, k, {})


@dataclass(frozen=True, eq=False)
class WedgeForm(_Form):
    field: PrimeField
    n: int
    k: int
    coeffs: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        p = self.field.p
        clean = {}
        for key, c in self.coeffs.items():
            key = tuple(int(i) for i in key)
            _check_index(key, self.n)
            if len(key) != self.k:
                raise DimensionMismatch(f"degree-{self.k} form got index {key}")
            if len(set(key)) < len(key):
                continue
            sign = _perm_sign(key)
            skey = tuple(sorted(key))
            clean[skey] = (clean.get(skey, 0) + sign * int(c)) % p
        object.__setattr__(self, "coeffs", {key: c for key, c in sorted(clean.items()) if c})

    @staticmethod
    def basis_keys(n, k):
        return list(combinations(range(n), k))

    @classmethod
    def basis(cls, field, n, key, c=1):
        return cls(as_field(field), n, len(key), {tuple(key): c})

    def evaluate(self, *vectors):
        """Value of the alternating multilinear form on k vectors."""
        if len(vectors) != self.k:
            raise DimensionMismatch(f"need {self.k} vectors")
        p = self.field.p
        cols = [list(v) for v in vectors]
        total = 0
        for key, c in self.coeffs.items():
            minor = [[cols[b][i] for b in range(self.k)] for i in key]
            total += c * determinant(minor, p)
        return total % p

    def dense(self):
        """Fully antisymmetric coefficient tensor T with T[key] = c on increasing keys."""
        t = np.zeros((self.n,) * self.k, dtype=np.int64)
        for key, c in self.coeffs.items():
            for perm in permutations(range(self.k)):
                t[tuple(key[i] for i in perm)] = _perm_sign(perm) * c % self.field.p
        return t

    def rank2(self):
        """Rank of a 2-form, i.e. of its antisymmetric Gram matrix."""
        from .gfp import rank
        if self.k != 2:
            raise DimensionMismatch("rank2 needs a 2-form")
        return rank(self.dense().tolist(), self.field.p)

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for key, c in self.coeffs.items():
            mono = "∧".join(f"x{i}".translate(SUBSCRIPT) for i in key)
            terms.append(mono if c == 1 else f"{c}·{mono}")
        return " + ".join(terms)


@dataclass(frozen=True, eq=False)
class SymForm(_Form):
    field: PrimeField
    n: int
    k: int
    coeffs: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        p = self.field.p
        clean = {}
        for key, c in self.coeffs.items():
            key = tuple(sorted(int(i) for i in key))
            _check_index(key, self.n)
            if len(key) != self.k:
                raise DimensionMismatch(f"degree-{self.k} form got index {key}")
            clean[key] = (clean.get(key, 0) + int(c)) % p
        object.__setattr__(self, "coeffs", {key: c for key, c in sorted(clean.items()) if c})

    @staticmethod
    def basis_keys(n, k):
        return list(combinations_with_replacement(range(n), k))

    @classmethod
    def basis(cls, field, n, key, c=1):
        return cls(as_field(field), n, len(key), {tuple(key): c})

    def matrix(self):
        """Symmetric Gram matrix of a degree-2 form."""
        if self.k != 2:
            raise DimensionMismatch("matrix() needs a degree-2 form")
        s = np.zeros((self.n, self.n), dtype=np.int64)
        for (i, j), c in self.coeffs.items():
            s[i, j] = s[j, i] = c
        return s

    @classmethod
    def from_matrix(cls, field, s):
        s = np.asarray(s, dtype=np.int64)
        n = s.shape[0]
        field = as_field(field)
        if not np.array_equal(s % field.p, s.T % field.p):
            raise DimensionMismatch("matrix is not symmetric")
        return cls(field, n, 2, {(i, j): int(s[i, j]) for i in range(n) for j in range(i, n)})

    def evaluate(self, *vectors):
        """Degree 2: the bilinear value S(u, v).  Degree 3: the polynomial at one vector."""
        p = self.field.p
        if self.k == 2:
            u, v = (np.array(list(w), dtype=np.int64) for w in vectors)
            return int(u @ self.matrix() @ v) % p
        (v,) = vectors
        v = list(v)
        return sum(c * v[a] * v[b] * v[d] for (a, b, d), c in self.coeffs.items()) % p

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for key, c in self.coeffs.items():
            letter = "z" if self.k == 2 else "x"
            powers = {}
            for i in key:
                powers[i] = powers.get(i, 0) + 1
            mono = "".join(f"{letter}{i}".translate(SUBSCRIPT) + ("" if e == 1 else "²³"[e - 2])
                           for i, e in powers.items())
            terms.append(mono if c == 1 else f"{c}·{mono}")
        return " + ".join(terms)


# ---------------------------------------------------------------------------
# GL action
# ---------------------------------------------------------------------------

def _check_action(g: PrimeFieldMatrix, form):
    if g.field != form.field or g.n != form.n:
        raise DimensionMismatch(f"{g.n}x{g.n} matrix over {g.field} cannot act on a form on {form.field}^{form.n}")


def gl_act_wedge(g: PrimeFieldMatrix, phi: WedgeForm) -> WedgeForm:
    """Pullback phi o (g x ... x g).  New coefficient on ``tgt`` is sum phi[src] * minor(g; src, tgt)."""
    _check_action(g, phi)
    p = phi.field.p
    ge = g.entries
    out = {}
    for tgt in WedgeForm.basis_keys(phi.n, phi.k):
        acc = 0
        for src, c in phi.coeffs.items():
            acc += c * determinant([[ge[i][j] for j in tgt] for i in src], p)
        if acc % p:
            out[tgt] = acc
    return WedgeForm(phi.field, phi.n, phi.k, out)


def _substitute_cubic(g: PrimeFieldMatrix, s: SymForm) -> SymForm:
    n = s.n
    ge = g.entries
    out = {}
    for (a, b, c), coef in s.coeffs.items():
        for j1 in range(n):
            if not ge[a][j1]:
                continue
            for j2 in range(n):
                if not ge[b][j2]:
                    continue
                for j3 in range(n):
                    if not ge[c][j3]:
                        continue
                    key = tuple(sorted((j1, j2, j3)))
                    out[key] = out.get(key, 0) + coef * ge[a][j1] * ge[b][j2] * ge[c][j3]
    return SymForm(s.field, n, 3, out)


def gl_act_sym(g: PrimeFieldMatrix, s: SymForm) -> SymForm:
    """Pullback: g^T S g in degree 2, substitution x_i -> sum_j g_ij x_j in degree 3."""
    _check_action(g, s)
    if s.k == 2:
        ga = g.to_array()
        return SymForm.from_matrix(s.field, ga.T @ s.matrix() @ ga)
    if s.k == 3:
        return _substitute_cubic(g, s)
    raise DimensionMismatch(f"unsupported degree {s.k}")


def act_left(g: PrimeFieldMatrix, form):
    """Left action (g . phi)(v, ...) = phi(g^-1 v, ...)."""
    ginv = mat_inverse(g)
    if isinstance(form, WedgeForm):
        return gl_act_wedge(ginv, form)
    if isinstance(form, SymForm):
        return gl_act_sym(ginv, form)
    if isinstance(form, Sym3Coset):
        return gl_act_coset(ginv, form)
    raise TypeError(f"cannot act on {type(form).__name__}")


# ---------------------------------------------------------------------------
# interior derivation, radical
# ---------------------------------------------------------------------------

def interior_derivation(v: FpVector, phi: WedgeForm) -> WedgeForm:
    """iota_v(x_i ^ x_j ^ x_k) = v_k x_i^x_j - v_j x_i^x_k + v_i x_j^x_k, extended linearly."""
    if phi.k != 3:
        raise DimensionMismatch("interior derivation is defined on 3-forms")
    if v.field != phi.field or v.n != phi.n:
        raise DimensionMismatch("vector and form dimensions differ")
    out = {}
    for (i, j, k), c in phi.coeffs.items():
        for key, coef in (((i, j), v[k]), ((i, k), -v[j]), ((j, k), v[i])):
            out[key] = out.get(key, 0) + c * coef
    return WedgeForm(phi.field, phi.n, 2, out)


def contraction_matrix(phi: WedgeForm):
    """Rows indexed by pairs (i<j), columns by basis vectors: the linear map v -> iota_v(phi)."""
    cols = [interior_derivation(FpVector.basis(phi.field, phi.n, t), phi).vector() for t in range(phi.n)]
    return [list(r) for r in zip(*cols)] if cols and cols[0] else []


def radical(phi: WedgeForm) -> list:
    """Basis of Rad(phi) = {u : iota_u(phi) = 0}."""
    if phi.k != 3:
        raise DimensionMismatch("radical is defined for 3-forms")
    rows = contraction_matrix(phi)
    if not rows:
        return [FpVector.basis(phi.field, phi.n, i) for i in range(phi.n)]
    return kernel_basis(rows, phi.field)


def is_nondegenerate(phi: WedgeForm) -> bool:
    return not radical(phi)


# ---------------------------------------------------------------------------
# Sym^3 / R over F_2
# ---------------------------------------------------------------------------

def _canonical_cubic_key(key):
    a, b, c = key
    if a < b == c:
        return (a, a, b)   # x_a x_b^2 ~ x_a^2 x_b
    return key


def sym3_reduce(s: SymForm) -> "Sym3Coset":
    """Canonical coset representative modulo R = span{x_i^2 x_j + x_i x_j^2}.

    Mixed-square monomials are written with the squared variable carrying the
    smaller index.
    """
    if s.field.p != 2:
        raise WrongCharacteristic("Sym^3/R is the p = 2 model")
    if s.k != 3:
        raise DimensionMismatch("sym3_reduce needs a cubic")
    out = {}
    for key, c in s.coeffs.items():
        ck = _canonical_cubic_key(key)
        out[ck] = out.get(ck, 0) + c
    return Sym3Coset(s.field, s.n, SymForm(s.field, s.n, 3, out))


def relation_basis(field, n):
    """x_i^2 x_j + x_i x_j^2 for i < j."""
    field = as_field(field)
    return [SymForm(field, n, 3, {(i, i, j): 1, (i, j, j): 1}) for i, j in combinations(range(n), 2)]


@dataclass(frozen=True)
class Sym3Coset:
    field: PrimeField
    n: int
    representative: SymForm

    def __post_init__(self):
        rep = self.representative
        if any(_canonical_cubic_key(key) != key for key in rep.coeffs):
            raise ValueError("representative is not canonical; build cosets with sym3_reduce")

    def __add__(self, other):
        return sym3_reduce(self.representative + other.representative)

    def is_zero(self):
        return self.representative.is_zero()

    def evaluate(self, v):
        """omega(v, v, v) for the cup-product representative: the cubic's value at v."""
        return self.representative.evaluate(v)

    def evaluation_set(self):
        """Codes (first coordinate most significant) of v with omega(v, v, v) = 1."""
        from .gfp import all_vectors
        return [code for code, v in enumerate(all_vectors(self.field, self.n)) if self.evaluate(v)]

    def __str__(self):
        return str(self.representative)


def gl_act_coset(g: PrimeFieldMatrix, c: Sym3Coset) -> Sym3Coset:
    return sym3_reduce(_substitute_cubic(g, c.representative))


def pi_alt(c: Sym3Coset) -> WedgeForm:
    """Squarefree part of the canonical representative, read as a 3-form."""
    if c.field.p != 2:
        raise WrongCharacteristic("pi_alt is the p = 2 projection")
    return WedgeForm(c.field, c.n, 3, {key: v for key, v in c.representative.coeffs.items() if len(set(key)) == 3})


def dims(n):
    """(dim wedge^3, dim Sym^2, dim Sym^3, dim R) by basis enumeration."""
    return (len(WedgeForm.basis_keys(n, 3)), len(SymForm.basis_keys(n, 2)),
            len(SymForm.basis_keys(n, 3)), len(list(combinations(range(n), 2))))


def binomial_dims(n):
    return comb(n, 3), comb(n + 1, 2), comb(n + 2, 3), comb(n, 2)
