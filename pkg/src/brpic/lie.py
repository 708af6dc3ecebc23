"""Metric Lie algebras over F_p (p > 3) and the class omega^g they define.

For an invariant symmetric form B, omega^g has alternating part
(a, b, c) -> ([a, b], c) and symmetric part B.  Both are read off directly
on basis elements: no 1/2 or 1/6 normalization is applied, which keeps the
construction valid in every characteristic p > 3.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations

import numpy as np

from .errors import (DimensionMismatch, FormNotInvariant, LieAlgebraError, NondegenerateRequired,
                     WrongCharacteristic)
from .forms import SymForm, WedgeForm, is_nondegenerate
from .gfp import PrimeField, PrimeFieldMatrix, as_field, rank
from .h3 import H3Class
from .stab import StabilizerReport, brute_force_stabilizer


@dataclass(frozen=True, eq=False)
class LieAlgebraFp:
    """Structure constants c with [e_i, e_j] = sum_k c[i, j, k] e_k."""

    field: PrimeField
    dim: int
    structure: np.ndarray
    names: tuple = ()

    def __post_init__(self):
        p = self.field.p
        if p <= 3:
            raise WrongCharacteristic(f"metric Lie algebras are handled for p > 3, got p = {p}")
        c = np.asarray(self.structure, dtype=np.int64) % p
        if c.shape != (self.dim,) * 3:
            raise DimensionMismatch(f"structure constants must have shape {(self.dim,) * 3}")
        if np.any((c + c.transpose(1, 0, 2)) % p):
            i, j, k = np.argwhere((c + c.transpose(1, 0, 2)) % p)[0]
            raise LieAlgebraError(f"bracket is not antisymmetric at [e{i}, e{j}] (component {k})")
        # [[a,b],c] + [[b,c],a] + [[c,a],b] as a (dim,)*4 tensor
        jac = (np.einsum("ijl,lkm->ijkm", c, c) + np.einsum("jkl,lim->ijkm", c, c)
               + np.einsum("kil,ljm->ijkm", c, c)) % p
        if np.any(jac):
            i, j, k, _ = np.argwhere(jac)[0]
            raise LieAlgebraError(f"Jacobi identity fails on basis triple ({i}, {j}, {k})")
        c.setflags(write=False)
        object.__setattr__(self, "structure", c)
        names = tuple(self.names) if self.names else tuple(f"e{i}" for i in range(self.dim))
        if len(names) != self.dim:
            raise DimensionMismatch("one name per basis vector")
        object.__setattr__(self, "names", names)

    @classmethod
    def from_brackets(cls, field, dim, brackets, names=()):
        """``brackets`` maps (i, j) with i < j to {k: c}; the rest follows by antisymmetry."""
        field = as_field(field)
        c = np.zeros((dim, dim, dim), dtype=np.int64)
        for (i, j), terms in brackets.items():
            if i == j:
                raise LieAlgebraError(f"[e{i}, e{i}] must be zero and is not listed")
            for k, val in terms.items():
                c[i, j, k] += val
                c[j, i, k] -= val
        return cls(field, dim, c, names)

    def bracket(self, x, y):
        x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
        return np.einsum("i,j,ijk->k", x, y, self.structure) % self.field.p

    def derived_dim(self):
        """dim [g, g]."""
        return rank(self.structure.reshape(-1, self.dim).tolist(), self.field.p)


@dataclass(frozen=True)
class MetricForm:
    field: PrimeField
    matrix: tuple = dc_field(default=())

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.int64) % self.field.p
        if m.ndim != 2 or m.shape[0] != m.shape[1] or not np.array_equal(m, m.T):
            raise DimensionMismatch("metric must be a symmetric square matrix")
        object.__setattr__(self, "matrix", tuple(map(tuple, m.tolist())))

    def array(self):
        return np.array(self.matrix, dtype=np.int64)

    def is_nondegenerate(self):
        return rank(self.matrix, self.field.p) == len(self.matrix)


def ad_matrix(g: LieAlgebraFp, i: int) -> PrimeFieldMatrix:
    """Matrix of x -> [e_i, x]: column j holds the coordinates of [e_i, e_j]."""
    if not 0 <= i < g.dim:
        raise IndexError(f"basis index {i} out of range 0..{g.dim - 1}")
    return PrimeFieldMatrix(g.field, g.structure[i].T)


def killing_form(g: LieAlgebraFp) -> MetricForm:
    c = g.structure
    # Tr(ad_i ad_j) = sum_{k,l} c[i,l,k] c[j,k,l]
    B = np.einsum("ilk,jkl->ij", c, c) % g.field.p
    form = MetricForm(g.field, B)
    check_invariant(g, form)
    return form


def check_invariant(g: LieAlgebraFp, B: MetricForm):
    """Raise FormNotInvariant at the first basis triple with ([a,b],c) != (a,[b,c])."""
    p = g.field.p
    M = B.array()
    if M.shape != (g.dim, g.dim):
        raise DimensionMismatch("form and algebra dimensions differ")
    c = g.structure
    lhs = np.einsum("abl,lc->abc", c, M) % p
    rhs = np.einsum("al,bcl->abc", M, c) % p
    bad = np.argwhere(lhs != rhs)
    if bad.size:
        raise FormNotInvariant(tuple(int(x) for x in bad[0]))


def omega_from_metric(g: LieAlgebraFp, B: MetricForm) -> H3Class:
    check_invariant(g, B)
    p = g.field.p
    T = np.einsum("ijl,lk->ijk", g.structure, B.array()) % p
    alt = WedgeForm(g.field, g.dim, 3, {key: int(T[key]) for key in combinations(range(g.dim), 3)})
    return H3Class(g.field, g.dim, alt=alt, sym=SymForm.from_matrix(g.field, B.array()))


@dataclass
class AutmReport:
    omega: H3Class
    stab: StabilizerReport
    brpic_order: int

    def to_dict(self):
        return {"omega": str(self.omega), "stab": self.stab.to_dict(), "brpic_order": self.brpic_order}


def autm_stab_report(g: LieAlgebraFp, B: MetricForm | None = None, **kwargs) -> AutmReport:
    """Stabilizer of omega^g by exhaustive search, plus the Brauer-Picard order.

    Extra keywords go to ``brute_force_stabilizer`` (workers, max_order, keep, backend).
    """
    from .brpic import brpic_order

    B = killing_form(g) if B is None else B
    omega = omega_from_metric(g, B)
    if not is_nondegenerate(omega.alt):
        raise NondegenerateRequired("omega_alt is degenerate (need g = [g, g] and a nondegenerate form)")
    kwargs.setdefault("expected_name", ("SO", g.dim) if g.dim % 2 else None)
    stab = brute_force_stabilizer(omega, **kwargs)
    return AutmReport(omega, stab, brpic_order(omega, stab=stab))


def sl2(field) -> LieAlgebraFp:
    """sl_2 on the basis (e, f, h): [e, f] = h, [h, e] = 2e, [h, f] = -2f."""
    return LieAlgebraFp.from_brackets(field, 3, {(0, 1): {2: 1}, (0, 2): {0: -2}, (1, 2): {1: 2}},
                                      names=("e", "f", "h"))
