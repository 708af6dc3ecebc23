"""The canonical model of H^3(V_n, k^x) and the maps around it.

Odd p:  H^3(V_n, k^x) = wedge^3(V*) (+) Sym^2(V*).  A class is a pair
(alt, sym); ``sym`` is a symmetric bilinear form (see :mod:`brpic.forms`).
It is the quotient of H^3(V_n, F_p) = wedge^3 (+) span{x_i u y_j} by the
image of the connecting map, realized by a -> a + a^T on the matrix of
x_i u y_j coefficients.

p = 2:  H^3(V_n, k^x) = Sym^3(V*) / span{x_i^2 x_j + x_i x_j^2}; a class is a
canonical coset, and omega_alt is its squarefree part.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .cochains import Cocycle3, TableCochain, cocycle2_defect, grid
from .errors import DimensionMismatch, NotACocycle, WrongCharacteristic, WrongShape
from .forms import (Sym3Coset, SymForm, WedgeForm, gl_act_coset, gl_act_sym, gl_act_wedge, pi_alt,
                    sym3_reduce)
from .gfp import FpVector, PrimeField, PrimeFieldMatrix, as_field


@dataclass(frozen=True)
class H3Class:
    field: PrimeField
    n: int
    alt: WedgeForm | None = None
    sym: SymForm | None = None
    coset: Sym3Coset | None = None

    def __post_init__(self):
        p = self.field.p
        if p == 2:
            if self.coset is None:
                object.__setattr__(self, "coset", Sym3Coset(self.field, self.n, SymForm.zero(self.field, self.n, 3)))
            if self.alt is not None or self.sym is not None:
                raise WrongCharacteristic("p = 2 classes are cosets in Sym^3/R")
            if self.coset.n != self.n:
                raise DimensionMismatch("coset dimension differs")
        else:
            if self.coset is not None:
                raise WrongCharacteristic("odd-p classes are (alt, sym) pairs")
            if self.alt is None:
                object.__setattr__(self, "alt", WedgeForm.zero(self.field, self.n, 3))
            if self.sym is None:
                object.__setattr__(self, "sym", SymForm.zero(self.field, self.n, 2))
            if self.alt.k != 3 or self.sym.k != 2:
                raise DimensionMismatch("alt must have degree 3 and sym degree 2")
            if self.alt.n != self.n or self.sym.n != self.n:
                raise DimensionMismatch("component dimensions differ")

    @classmethod
    def zero(cls, field, n):
        return cls(as_field(field), n)

    @classmethod
    def from_cubic(cls, cubic: SymForm):
        return cls(cubic.field, cubic.n, coset=sym3_reduce(cubic))

    @property
    def p(self):
        return self.field.p

    @property
    def omega_alt(self) -> WedgeForm:
        return pi_alt(self.coset) if self.p == 2 else self.alt

    def is_zero(self):
        if self.p == 2:
            return self.coset.is_zero()
        return self.alt.is_zero() and self.sym.is_zero()

    def __add__(self, other):
        if other.field != self.field or other.n != self.n:
            raise DimensionMismatch("classes live on different groups")
        if self.p == 2:
            return H3Class(self.field, self.n, coset=self.coset + other.coset)
        return H3Class(self.field, self.n, self.alt + other.alt, self.sym + other.sym)

    def __str__(self):
        if self.p == 2:
            return f"[{self.coset}]"
        return f"({self.alt}, {self.sym})"


def h3_basis(field, n):
    """Basis of H^3(V_n, k^x) in the canonical model."""
    field = as_field(field)
    if field.p == 2:
        keys = [k for k in SymForm.basis_keys(n, 3) if not (k[0] < k[1] == k[2])]
        return [H3Class.from_cubic(SymForm.basis(field, n, k)) for k in keys]
    out = [H3Class(field, n, alt=WedgeForm.basis(field, n, k)) for k in WedgeForm.basis_keys(n, 3)]
    out += [H3Class(field, n, sym=SymForm.basis(field, n, k)) for k in SymForm.basis_keys(n, 2)]
    return out


def h3_dim(field, n) -> int:
    p = as_field(field).p
    if p == 2:
        return comb(n + 2, 3) - comb(n, 2)
    return comb(n, 3) + comb(n + 1, 2)


@dataclass(frozen=True)
class H3FpClass:
    """A class in H^3(V_n, F_p), odd p: a 3-form plus sum a_ij x_i u y_j."""

    field: PrimeField
    n: int
    wedge3: WedgeForm
    mixed: tuple

    def __post_init__(self):
        p = self.field.p
        m = np.asarray(self.mixed, dtype=np.int64) % p
        if m.shape != (self.n, self.n):
            raise DimensionMismatch("mixed part must be n x n")
        object.__setattr__(self, "mixed", tuple(map(tuple, m.tolist())))

    @classmethod
    def zero(cls, field, n):
        field = as_field(field)
        return cls(field, n, WedgeForm.zero(field, n, 3), np.zeros((n, n), dtype=np.int64))

    def mixed_array(self):
        return np.array(self.mixed, dtype=np.int64)

    def __add__(self, other):
        return H3FpClass(self.field, self.n, self.wedge3 + other.wedge3, self.mixed_array() + other.mixed_array())

    def representative(self) -> Cocycle3:
        cup = dict(self.wedge3.coeffs)
        carry = {(i, j): c for i, row in enumerate(self.mixed) for j, c in enumerate(row) if c}
        return Cocycle3(self.field, self.n, cup, carry)


@dataclass(frozen=True)
class H2FpClass:
    """A class in H^2(V_n, F_p): sum c_ij x_i x_j (i < j) plus sum d_i y_i.

    Over F_2, y_i = x_i^2.
    """

    field: PrimeField
    n: int
    wedge: WedgeForm
    carry: tuple

    def __post_init__(self):
        if self.wedge.k != 2 or self.wedge.n != self.n:
            raise WrongShape("wedge part must be a 2-form on V_n")
        if len(self.carry) != self.n:
            raise WrongShape("carry part needs n coefficients")
        object.__setattr__(self, "carry", tuple(int(c) % self.field.p for c in self.carry))

    def describe(self, offset=0):
        """Human form; ``offset`` renumbers coordinates (extra-special classes start at x_1)."""
        from .forms import SUBSCRIPT
        terms = []
        for (i, j), c in self.wedge.coeffs.items():
            mono = f"x{i + offset}x{j + offset}".translate(SUBSCRIPT)
            terms.append(mono if c == 1 else f"{c}·{mono}")
        letter = "x" if self.field.p == 2 else "y"
        for i, c in enumerate(self.carry):
            if c:
                mono = f"{letter}{i + offset}".translate(SUBSCRIPT) + ("²" if self.field.p == 2 else "")
                terms.append(mono if c == 1 else f"{c}·{mono}")
        return " + ".join(terms) or "0"


def connecting_delta(mu: WedgeForm) -> H3FpClass:
    """delta(x_k ^ x_l) = x_k u y_l - x_l u y_k, extended linearly."""
    if mu.field.p == 2:
        raise WrongCharacteristic("connecting_delta models odd p")
    if mu.k != 2:
        raise DimensionMismatch("delta takes a 2-form")
    n = mu.n
    a = np.zeros((n, n), dtype=np.int64)
    for (k, l), c in mu.coeffs.items():
        a[k, l] += c
        a[l, k] -= c
    return H3FpClass(mu.field, n, WedgeForm.zero(mu.field, n, 3), a)


def project_to_kx(c: H3FpClass) -> H3Class:
    """H^3(V, F_p) -> H^3(V, k^x): keep the 3-form, symmetrize the mixed matrix."""
    if c.field.p == 2:
        raise WrongCharacteristic("project_to_kx models odd p")
    a = c.mixed_array()
    return H3Class(c.field, c.n, alt=c.wedge3, sym=SymForm.from_matrix(c.field, a + a.T))


def lift_to_fp(omega: H3Class) -> H3FpClass:
    """The section used for representatives: a_ij = S_ij (i < j), a_ii = S_ii / 2."""
    if omega.p == 2:
        raise WrongCharacteristic("lift_to_fp models odd p")
    p, n = omega.p, omega.n
    S = omega.sym.matrix()
    half = pow(2, -1, p)
    a = np.triu(S, 1) + np.diag(np.diag(S) * half)
    return H3FpClass(omega.field, n, omega.alt, a % p)


def explicit_representative(omega: H3Class) -> Cocycle3:
    """A Z_p-valued 3-cocycle c with xi^c representing omega.

    Odd p: x_i ^ x_j ^ x_k -> u_i v_j w_k and x_i u y_j -> u_i y_j(v, w).
    p = 2: each monomial x_a x_b x_c (a <= b <= c) of the canonical
    representative -> u_a v_b w_c.
    """
    if omega.p == 2:
        return Cocycle3(omega.field, omega.n, dict(omega.coset.representative.coeffs), {})
    return lift_to_fp(omega).representative()


class TwoCochain(TableCochain):
    pass


def beta_map(a: FpVector, c: Cocycle3) -> TwoCochain:
    """beta_a(x, y) = c(a, x, y) + c(x, y, a) - c(x, a, y)  (mod p)."""
    if a.field != c.field or a.n != c.n:
        raise DimensionMismatch("vector and cocycle live on different groups")
    av = np.array(a.coords, dtype=np.int64)

    def func(X, Y):
        A = np.broadcast_to(av, X.shape)
        return c.values(A, X, Y) + c.values(X, Y, A) - c.values(X, A, Y)

    return TwoCochain(c.field, c.n, 2, func)


# p^(3n) triples; above this the 2-cocycle identity is checked on random triples
COCYCLE_CHECK_EXHAUSTIVE_MAX = 600_000


def two_cocycle_class(b, check=True, samples=20_000) -> WedgeForm:
    """Class of a 2-cocycle in H^2(V, k^x) = wedge^2(V*), via (u, v) -> b(u, v) - b(v, u)."""
    p, n = b.field.p, b.n
    if check:
        exhaustive = p ** (3 * n) <= COCYCLE_CHECK_EXHAUSTIVE_MAX
        if cocycle2_defect(b, p, n, samples=None if exhaustive else samples):
            raise NotACocycle("input fails the 2-cocycle identity")
    eye = np.eye(n, dtype=np.int64)
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            val = b.values(eye[i:i + 1], eye[j:j + 1])[0] - b.values(eye[j:j + 1], eye[i:i + 1])[0]
            out[(i, j)] = int(val)
    return WedgeForm(b.field, n, 2, out)


def is_symmetric_cochain(b):
    p, n = b.field.p, b.n
    U, V = grid(p, n, 2)
    return bool(np.all(b.values(U, V) == b.values(V, U)))


def cup_x0(kappa: H2FpClass) -> H3Class:
    """Image of x_0 u kappa in H^3(V_{m+1}, k^x); kappa's coordinates shift up by one."""
    if not isinstance(kappa, H2FpClass):
        raise WrongShape("cup_x0 takes an H2FpClass")
    field, m = kappa.field, kappa.n
    n = m + 1
    if field.p == 2:
        terms = {}
        for (i, j), c in kappa.wedge.coeffs.items():
            terms[(0, i + 1, j + 1)] = c
        for i, c in enumerate(kappa.carry):
            if c:
                terms[(0, i + 1, i + 1)] = terms.get((0, i + 1, i + 1), 0) + c
        return H3Class.from_cubic(SymForm(field, n, 3, terms))
    wedge3 = WedgeForm(field, n, 3, {(0, i + 1, j + 1): c for (i, j), c in kappa.wedge.coeffs.items()})
    mixed = np.zeros((n, n), dtype=np.int64)
    for i, c in enumerate(kappa.carry):
        mixed[0, i + 1] = c
    return project_to_kx(H3FpClass(field, n, wedge3, mixed))


def gl_act_h3(g: PrimeFieldMatrix, omega: H3Class) -> H3Class:
    """Pullback omega o (g x g x g), componentwise."""
    if g.field != omega.field or g.n != omega.n:
        raise DimensionMismatch("matrix and class live on different groups")
    if omega.p == 2:
        return H3Class(omega.field, omega.n, coset=gl_act_coset(g, omega.coset))
    return H3Class(omega.field, omega.n, gl_act_wedge(g, omega.alt), gl_act_sym(g, omega.sym))


def gl_act_h3fp(g: PrimeFieldMatrix, c: H3FpClass) -> H3FpClass:
    """Pullback on H^3(V, F_p): the 3-form by minors, the mixed matrix by a -> g^T a g (y_j pulls back linearly)."""
    if g.field != c.field or g.n != c.n:
        raise DimensionMismatch("matrix and class live on different groups")
    ga = g.to_array()
    return H3FpClass(c.field, c.n, gl_act_wedge(g, c.wedge3), ga.T @ c.mixed_array() @ ga)
