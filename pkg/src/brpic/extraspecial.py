"""Classes attached to the extra-special p-groups of order p^(2n+1).

Coordinates: x_0 is the central direction, x_1..x_{2n} the symplectic block.
kappa lives on V_{2n} (stored 0-based, so internal index i means x_{i+1});
omega = [x_0 u kappa] lives on V_{2n+1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPrime, UnidentifiedCase, WrongShape
from .forms import WedgeForm
from .gfp import PrimeField, PrimeFieldMatrix, is_prime
from .h3 import H2FpClass, H3Class, cup_x0
from .stab import named_order, symplectic_generators


@dataclass(frozen=True)
class ExtraSpecialSpec:
    p: int
    n: int
    kind: str  # "D" (exponent p, dihedral at p = 2) or "Q" (exponent p^2, quaternion at p = 2)

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrime(f"p must be prime, got {self.p}")
        if self.n < 1:
            raise WrongShape("n must be at least 1")
        if self.kind not in ("D", "Q"):
            raise WrongShape(f"kind must be D or Q, got {self.kind!r}")

    @property
    def field(self):
        return PrimeField(self.p)

    @property
    def dim(self):
        return 2 * self.n + 1


def kappa_class(spec: ExtraSpecialSpec) -> H2FpClass:
    F = spec.field
    m = 2 * spec.n
    wedge = WedgeForm(F, m, 2, {(2 * i, 2 * i + 1): 1 for i in range(spec.n)})
    carry = [0] * m
    if spec.kind == "Q":
        carry[0] = 1
        if spec.p == 2:
            carry[1] = 1
    return H2FpClass(F, m, wedge, carry)


def omega_class(spec: ExtraSpecialSpec) -> H3Class:
    return cup_x0(kappa_class(spec))


@dataclass(frozen=True)
class ExpectedResult:
    name: str      # zoo name
    dim: int
    order: int
    label: str     # human-readable group

    def to_dict(self):
        return {"name": self.name, "dim": self.dim, "order": self.order, "label": self.label}


def expected_result(spec: ExtraSpecialSpec) -> ExpectedResult:
    """The stabilizer a known classification names for this case.

    Raises UnidentifiedCase for odd p, n > 1, kind Q, where no named target
    is available.
    """
    p, n = spec.p, spec.n
    if p == 2:
        if n == 1:
            return ExpectedResult("S", 4, 24, "S4") if spec.kind == "D" else ExpectedResult("S", 3, 6, "S3")
        return ExpectedResult("Sp", 2 * n, named_order("Sp", 2 * n, 2), f"Sp{2 * n}(F2)")
    if n == 1:
        if spec.kind == "D":
            return ExpectedResult("SL", 3, named_order("SL", 3, p), f"SL3(F{p})")
        return ExpectedResult("AffO+", 2, named_order("AffO+", 2, p), f"AffO2+(F{p})")
    if spec.kind == "D":
        return ExpectedResult("AffGSp", 2 * n, named_order("AffGSp", 2 * n, p),
                              f"AffSp{2 * n}(F{p}) x| F{p}^x")
    raise UnidentifiedCase(f"no named stabilizer for kind Q with odd p and n = {n}")


# ---------------------------------------------------------------------------
# generating families for Stab(omega_D), odd p, n > 1
# ---------------------------------------------------------------------------

def translation_matrix(field, v, M=None):
    """[[1, 0], [v, M]]: e_0 -> e_0 + sum v_i e_i, block M on span(e_1..e_2n)."""
    m = len(v)
    A = np.eye(m + 1, dtype=np.int64)
    A[1:, 0] = v
    if M is not None:
        A[1:, 1:] = M.to_array() if isinstance(M, PrimeFieldMatrix) else M
    return PrimeFieldMatrix(field, A)


def scaling_matrix(field, n, lam):
    """diag(lam, lam^-1, 1, lam^-1, 1, ...)."""
    inv = pow(int(lam), -1, field.p)
    return PrimeFieldMatrix.diag(field, [lam] + [inv, 1] * n)


def stab_d_generators(spec: ExtraSpecialSpec, lam=None):
    """Translations by basis vectors, the symplectic block generators and one scaling matrix.

    ``lam`` defaults to the smallest generator of F_p^x.
    """
    F = spec.field
    p, n = spec.p, spec.n
    m = 2 * n
    gens = [translation_matrix(F, np.eye(m, dtype=np.int64)[i]) for i in range(m)]
    gens += [translation_matrix(F, np.zeros(m, dtype=np.int64), M) for M in symplectic_generators(F, n)]
    if p > 2:
        if lam is None:
            lam = primitive_root(p)
        gens.append(scaling_matrix(F, n, lam))
    return gens


def stab_d_family_samples(spec: ExtraSpecialSpec, count=50, seed=0):
    """Random members of both displayed families: random v with a random product of symplectic generators, and every lambda."""
    F = spec.field
    p, n = spec.p, spec.n
    rng = np.random.default_rng(seed)
    sp = symplectic_generators(F, n)
    out = []
    for _ in range(count):
        M = PrimeFieldMatrix.identity(F, 2 * n)
        for idx in rng.integers(0, len(sp), size=8):
            M = M @ sp[idx]
        out.append(translation_matrix(F, rng.integers(0, p, size=2 * n), M))
    out += [scaling_matrix(F, n, lam) for lam in range(1, p)]
    return out


def primitive_root(p):
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in _prime_factors(p - 1)):
            return g
    return 1


def _prime_factors(m):
    out, d = [], 2
    while d * d <= m:
        while m % d == 0:
            out.append(d)
            m //= d
        d += 1
    if m > 1:
        out.append(m)
    return sorted(set(out))
