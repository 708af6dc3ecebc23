"""Stabilizers of classes in H^3(V_n, k^x) inside GL_n(F_p).

Three ways in: a membership test for a single matrix, an exhaustive sweep
of GL_n(F_p) (parallel over disjoint partitions), and the closure of a
generating set.  Orders are compared against a small zoo of classical group
orders; a match means the orders agree and nothing more.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field as dc_field
from itertools import combinations
from math import factorial, prod

import numpy as np

from . import kernels
from ._accel import resolve_backend
from .errors import (DimensionMismatch, GeneratorNotInvertible, GeneratorNotStabilizing, UnknownGroup,
                     WrongShape)
from .forms import WedgeForm
from .gfp import MAX_GL_ORDER, PrimeField, PrimeFieldMatrix, as_field, check_gl_guard, gl_order
from .h3 import H3Class, gl_act_h3

DEFAULT_CLOSURE_BYTES = 200_000_000
SAMPLE_LIMIT = 10_000


def default_workers():
    env = os.environ.get("BRPIC_WORKERS", "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class StabilizerReport:
    p: int
    n: int
    order: int
    method: str                      # brute_force | closure | membership_only
    generators_checked: list = dc_field(default_factory=list)
    named_match: tuple | None = None  # (name, dim, order); order-consistent only
    candidates: list = dc_field(default_factory=list)
    element_sample: list | None = None
    backend: str | None = None
    workers: int = 1
    order_id: str = kernels.ORDER_ID

    def __post_init__(self):
        if self.method != "membership_only" and gl_order(self.p, self.n) % self.order:
            raise AssertionError(f"order {self.order} does not divide |GL_{self.n}(F_{self.p})|")

    def sample_matrices(self):
        if self.element_sample is None:
            return []
        F = PrimeField(self.p)
        return [PrimeFieldMatrix(F, m) for m in kernels.unpack_array(np.asarray(self.element_sample, np.uint64),
                                                                    self.p, self.n)]

    def to_dict(self):
        return {
            "p": self.p, "n": self.n, "order": self.order, "method": self.method,
            "generators_checked": [list(map(list, g)) for g in self.generators_checked],
            "named_match": None if self.named_match is None else
            {"name": self.named_match[0], "dim": self.named_match[1], "order": self.named_match[2]},
            "order_consistent_with": [f"{name}_{d}" for name, d, _ in self.candidates],
            "sample_size": 0 if self.element_sample is None else len(self.element_sample),
            "backend": self.backend, "workers": self.workers, "order_id": self.order_id,
        }


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

def stabilizes(g: PrimeFieldMatrix, omega: H3Class) -> bool:
    if g.field != omega.field or g.n != omega.n:
        raise DimensionMismatch("matrix and class live on different groups")
    return gl_act_h3(g, omega) == omega


def sweep_test(omega: H3Class) -> kernels.SweepTest:
    """Compile omega into the arrays the sweep kernels test against."""
    p, n = omega.p, omega.n
    if p == 2:
        rep = omega.coset.representative
        D = kernels.row_digits(2, n)
        ftab = np.zeros(2 ** n, dtype=np.uint8)
        for key, c in rep.coeffs.items():
            ftab ^= (c * D[:, key[0]] * D[:, key[1]] * D[:, key[2]] % 2).astype(np.uint8)
        return kernels.SweepTest(kernels.MODE_EVEN, 2, n, ftab=ftab, svec_codes=np.nonzero(ftab)[0])
    src = list(omega.alt.coeffs)
    tgt = WedgeForm.basis_keys(n, 3)
    return kernels.SweepTest(
        kernels.MODE_ODD, p, n,
        alt_src=src, alt_src_coef=[omega.alt.coeffs[k] for k in src],
        alt_tgt=tgt, alt_tgt_coef=[omega.alt[k] for k in tgt],
        sym=omega.sym.matrix() % p)


# ---------------------------------------------------------------------------
# exhaustive search
# ---------------------------------------------------------------------------

def brute_force_stabilizer(omega: H3Class, workers=None, max_order=None, keep=0, backend=None,
                           expected_name=None) -> StabilizerReport:
    """Exact |Stab(omega)| by testing every element of GL_n(F_p).

    ``keep`` retains up to that many stabilizer elements (packed keys, at most
    ``SAMPLE_LIMIT``) in enumeration order.  The count does not depend on
    ``workers``.
    """
    p, n = omega.p, omega.n
    check_gl_guard(omega.field, n, max_order if max_order is not None else MAX_GL_ORDER)
    backend = resolve_backend(backend)
    workers = default_workers() if workers is None else max(1, int(workers))
    keep = min(int(keep), SAMPLE_LIMIT)
    count, kept = kernels.sweep(sweep_test(omega), workers=workers, keep=keep, backend=backend)
    return StabilizerReport(p, n, count, "brute_force", named_match=identify(count, n, p, expected_name),
                            candidates=order_candidates(count, n, p),
                            element_sample=kept if keep else None, backend=backend, workers=workers)


# ---------------------------------------------------------------------------
# closure
# ---------------------------------------------------------------------------

def _as_matrices(gens, field, n):
    out = []
    for g in gens:
        if not isinstance(g, PrimeFieldMatrix):
            g = PrimeFieldMatrix(field, g)
        if g.field != field or g.n != n:
            raise DimensionMismatch("generators must share one field and size")
        out.append(g)
    return out


def closure(gens, omega: H3Class | None = None, field=None, n=None, max_bytes=DEFAULT_CLOSURE_BYTES,
            expected=None, keep=0, backend=None, expected_name=None) -> StabilizerReport:
    """|<gens>| by breadth-first closure over packed keys.

    With ``omega`` given, every generator must stabilize it.  ``expected`` is a
    capacity hint only; the result never depends on it.  Exceeding
    ``max_bytes`` raises MemoryGuardExceeded instead of thrashing.
    """
    if omega is not None:
        field, n = omega.field, omega.n
    if not gens:
        raise WrongShape("closure needs at least one generator")
    if field is None:
        field = gens[0].field
    field = as_field(field)
    if n is None:
        n = gens[0].n
    gens = _as_matrices(gens, field, n)
    for g in gens:
        if not g.is_invertible():
            raise GeneratorNotInvertible(f"generator {g.entries} is singular")
        if omega is not None and not stabilizes(g, omega):
            raise GeneratorNotStabilizing(f"generator {g.entries} does not fix the class")
    backend = resolve_backend(backend)
    p = field.p
    keys = kernels.closure_keys([g.to_array() for g in gens], p, n, max_bytes=max_bytes, expected=expected,
                                backend=backend)
    order = len(keys)
    sample = None
    if keep and kernels.packs_in_word(p, n):
        sample = [int(k) for k in np.asarray(keys[:min(keep, SAMPLE_LIMIT)], dtype=np.uint64)]
    return StabilizerReport(p, n, order, "closure", generators_checked=[g.entries for g in gens],
                            named_match=identify(order, n, p, expected_name),
                            candidates=order_candidates(order, n, p), element_sample=sample, backend=backend)


def membership_report(gens, omega: H3Class) -> StabilizerReport:
    """Check generators only; ``order`` is 0 (unknown)."""
    gens = _as_matrices(gens, omega.field, omega.n)
    for g in gens:
        if not stabilizes(g, omega):
            raise GeneratorNotStabilizing(f"generator {g.entries} does not fix the class")
    return StabilizerReport(omega.p, omega.n, 0, "membership_only", generators_checked=[g.entries for g in gens])


# ---------------------------------------------------------------------------
# named groups
# ---------------------------------------------------------------------------

def _sp(m, p):
    return p ** (m * m) * prod(p ** (2 * i) - 1 for i in range(1, m + 1))


def _o_even(m, p, eps):
    return 2 * p ** (m * (m - 1)) * (p ** m - eps) * prod(p ** (2 * i) - 1 for i in range(1, m))


def _linear_order(name, d, p):
    if name == "GL":
        return gl_order(PrimeField(p, allow_large=True), d)
    if name == "SL":
        return gl_order(PrimeField(p, allow_large=True), d) // (p - 1)
    if name == "Sp":
        if d % 2:
            raise UnknownGroup(f"Sp_{d} needs even dimension")
        return _sp(d // 2, p)
    if name == "GSp":
        if d % 2:
            raise UnknownGroup(f"GSp_{d} needs even dimension")
        return _sp(d // 2, p) * (p - 1)
    if name in ("O+", "O-"):
        if d % 2 or d == 0:
            raise UnknownGroup(f"{name}_{d} needs positive even dimension")
        return _o_even(d // 2, p, 1 if name == "O+" else -1)
    if name == "SO":
        if d % 2 == 0 or p == 2:
            raise UnknownGroup("SO is tabulated for odd dimension and odd p")
        return _sp((d - 1) // 2, p)
    raise UnknownGroup(f"no group named {name!r}")


ZOO_NAMES = ("GL", "SL", "Sp", "GSp", "O+", "O-", "SO", "S", "AffGL", "AffSL", "AffSp", "AffGSp",
             "AffO+", "AffO-", "AffSO")


def named_order(name: str, n: int, p: int) -> int:
    """Order of a named group.

    ``n`` is the dimension of the natural module (Sp_4 has n = 4), or the
    degree for the symmetric group "S".  "Aff" + X means F_p^n x| X_n, and
    GSp is Sp extended by the scalars F_p^x.
    """
    if n < 1:
        raise UnknownGroup("dimension must be positive")
    if name == "S":
        return factorial(n)
    if name.startswith("Aff"):
        return p ** n * _linear_order(name[3:], n, p)
    return _linear_order(name, n, p)


def order_candidates(order, ambient_n, p):
    """Zoo entries whose order equals ``order`` and that fit inside GL_{ambient_n}(F_p)."""
    out = []
    for name in ZOO_NAMES:
        if name == "S":
            dims = range(1, ambient_n + 2)
        elif name.startswith("Aff"):
            dims = range(1, ambient_n)
        else:
            dims = range(1, ambient_n + 1)
        for d in dims:
            try:
                val = named_order(name, d, p)
            except UnknownGroup:
                continue
            if val == order:
                out.append((name, d, val))
    return out


def identify(order, ambient_n, p, prefer=None):
    """The matching zoo entry: ``prefer`` = (name, dim) when its order agrees, else the unique match, else None."""
    if prefer is not None:
        name, d = prefer
        val = named_order(name, d, p)
        return (name, d, val) if val == order else None
    cands = order_candidates(order, ambient_n, p)
    return cands[0] if len(cands) == 1 else None


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def symplectic_gram(m):
    """Gram matrix of sum x_{2i} ^ x_{2i+1} on F^{2m} (0-based pairs)."""
    J = np.zeros((2 * m, 2 * m), dtype=np.int64)
    for i in range(m):
        J[2 * i, 2 * i + 1] = 1
        J[2 * i + 1, 2 * i] = -1
    return J


def symplectic_generators(field, m):
    """Transvections x -> x + J(x, v) v for v in {e_i} and {e_i + e_j}; they generate Sp_{2m}(F_p)."""
    field = as_field(field)
    p = field.p
    J = symplectic_gram(m)
    vs = [np.eye(2 * m, dtype=np.int64)[i] for i in range(2 * m)]
    vs += [np.eye(2 * m, dtype=np.int64)[i] + np.eye(2 * m, dtype=np.int64)[j]
           for i, j in combinations(range(2 * m), 2)]
    out = []
    for v in vs:
        T = (np.eye(2 * m, dtype=np.int64) + np.outer(v, v @ J.T)) % p
        out.append(PrimeFieldMatrix(field, T))
    return out


def is_symplectic(M: PrimeFieldMatrix) -> bool:
    J = symplectic_gram(M.n // 2)
    A = M.to_array()
    return bool(np.array_equal((A.T @ J @ A) % M.field.p, J % M.field.p))
