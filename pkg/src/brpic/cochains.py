"""Cochains on V_n with values in Z_p (exponents of a fixed primitive p-th root xi).

These are the slow, literal objects used as oracles for the canonical model:
explicit 2- and 3-cochains evaluated on every point of V^k, the coboundary
map as a matrix, and a linear solver deciding whether a 3-cocycle is trivial
in H^3(V, F_p) or in H^3(V, k^x).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .gfp import PrimeField, as_field
from .kernels import encode_rows, row_digits


def points(p, n):
    """All of V_n as a (p^n, n) array; row index equals the vector's code."""
    return row_digits(p, n)


def grid(p, n, k):
    """k aligned (p^{kn}, n) arrays enumerating V^k."""
    P = points(p, n)
    N = P.shape[0]
    idx = np.indices((N,) * k).reshape(k, -1)
    return [P[i] for i in idx]


def carry(a, b, p):
    """The carry cocycle: 1 where a + b >= p (residues added as integers)."""
    return (np.asarray(a) + np.asarray(b) >= p).astype(np.int64)


@dataclass(frozen=True)
class Cocycle3:
    """c(u, v, w) = sum c_abc u_a v_b w_c + sum d_ij u_i y_j(v, w)  (mod p)."""

    field: PrimeField
    n: int
    cup_terms: dict = dc_field(default_factory=dict)
    carry_terms: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        p = self.field.p
        object.__setattr__(self, "cup_terms", {k: v % p for k, v in sorted(self.cup_terms.items()) if v % p})
        object.__setattr__(self, "carry_terms", {k: v % p for k, v in sorted(self.carry_terms.items()) if v % p})

    def __hash__(self):
        return hash((self.field.p, self.n, tuple(self.cup_terms.items()), tuple(self.carry_terms.items())))

    def values(self, U, V, W):
        p = self.field.p
        U, V, W = (np.asarray(x, dtype=np.int64).reshape(-1, self.n) % p for x in (U, V, W))
        out = np.zeros(U.shape[0], dtype=np.int64)
        for (a, b, c), coef in self.cup_terms.items():
            out += coef * U[:, a] * V[:, b] % p * W[:, c]
            out %= p
        for (i, j), coef in self.carry_terms.items():
            out += coef * U[:, i] * carry(V[:, j], W[:, j], p)
            out %= p
        return out

    def __call__(self, u, v, w):
        return int(self.values([list(u)], [list(v)], [list(w)])[0])

    def pullback(self, g):
        """The cochain (u, v, w) -> c(g u, g v, g w), as a table over V^3."""
        return TableCochain(self.field, self.n, 3, lambda U, V, W: self.values(_apply(g, U), _apply(g, V), _apply(g, W)))


def _apply(g, X):
    ga = g.to_array() if hasattr(g, "to_array") else np.asarray(g)
    return np.asarray(X) @ ga.T


@dataclass(frozen=True)
class TableCochain:
    """A cochain given by a vectorized function of k point arrays."""

    field: PrimeField
    n: int
    k: int
    func: object

    def values(self, *arrays):
        p = self.field.p
        arrays = [np.asarray(a, dtype=np.int64).reshape(-1, self.n) % p for a in arrays]
        return np.asarray(self.func(*arrays), dtype=np.int64) % p

    def __call__(self, *vectors):
        return int(self.values(*[[list(v)] for v in vectors])[0])


def table(cochain, p, n, k):
    """Values on every point of V^k, in ``grid`` order."""
    return cochain.values(*grid(p, n, k)) % p


# ---------------------------------------------------------------------------
# cocycle identities
# ---------------------------------------------------------------------------

def _sample_points(p, n, k, samples, seed):
    rng = np.random.default_rng(seed)
    return [rng.integers(0, p, size=(samples, n)) for _ in range(k)]


def cocycle3_defect(c, p, n, samples=None, seed=0):
    """Max over (u, v, w, x) of the additive 3-cocycle identity, 0 iff it holds on the points tried."""
    if samples is None:
        U, V, W, X = grid(p, n, 4)
    else:
        U, V, W, X = _sample_points(p, n, 4, samples, seed)
    val = (c.values(V, W, X) - c.values((U + V) % p, W, X) + c.values(U, (V + W) % p, X)
           - c.values(U, V, (W + X) % p) + c.values(U, V, W)) % p
    return int(val.max()) if val.size else 0


def cocycle2_defect(b, p, n, samples=None, seed=0):
    if samples is None:
        U, V, W = grid(p, n, 3)
    else:
        U, V, W = _sample_points(p, n, 3, samples, seed)
    val = (b.values(V, W) - b.values((U + V) % p, W) + b.values(U, (V + W) % p) - b.values(U, V)) % p
    return int(val.max()) if val.size else 0


# ---------------------------------------------------------------------------
# the connecting map, computed from integer lifts
# ---------------------------------------------------------------------------

def lifted_coboundary(A, p, n):
    """(d nu)/p on V^3 for nu = lambda^{(Au, v)}, lambda^p = xi, from integer lifts.

    Returns the table in ``grid(p, n, 3)`` order.
    """
    A = np.asarray(A, dtype=np.int64) % p
    U, V, W = grid(p, n, 3)

    def N(x, y):
        return np.einsum("mi,ij,mj->m", x, A, y)

    E = N((U + V) % p, W) + N(U, V) - N(U, (V + W) % p) - N(V, W)
    if np.any(E % p):
        raise AssertionError("d nu is not a p-th power; lift arithmetic is wrong")
    return (E // p) % p


def bracket_formula(k, l, p, n):
    """u_k {v_l, w_l} - w_l {u_k, v_k}: the closed form of (d nu)/p for A = E_kl."""
    U, V, W = grid(p, n, 3)
    return (U[:, k] * carry(V[:, l], W[:, l], p) - W[:, l] * carry(U[:, k], V[:, k], p)) % p


# ---------------------------------------------------------------------------
# linear algebra on cochains
# ---------------------------------------------------------------------------

def _solve_dense(A, b, p):
    M = np.concatenate([np.asarray(A, dtype=np.int64), np.asarray(b, dtype=np.int64)[:, None]], axis=1) % p
    rows, cols = A.shape
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        M[r] = M[r] * pow(int(M[r, c]), -1, p) % p
        f = M[:, c].copy()
        f[r] = 0
        hit = np.nonzero(f)[0]
        if hit.size:
            M[hit] = (M[hit] - f[hit, None] * M[r]) % p
        pivots.append(c)
        r += 1
    if np.any(M[r:, cols]):
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = M[i, cols]
    return x


def solve_mod_p(A, b, p, seed=0):
    """One solution of A x = b over F_p, or None.

    Tall systems are solved on a random row subset first; violated rows are
    added until the candidate satisfies every equation.  An inconsistent
    subset proves the full system inconsistent.
    """
    A = np.asarray(A, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    rows, cols = A.shape
    if rows <= 4 * cols + 16:
        return _solve_dense(A, b, p)
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(rows, size=3 * cols + 16, replace=False))
    while True:
        x = _solve_dense(A[idx], b[idx], p)
        if x is None:
            return None
        bad = np.nonzero((A @ x - b) % p)[0]
        if bad.size == 0:
            return x
        idx = np.union1d(idx, bad[: cols + 16])


def coboundary_matrix(p, n):
    """Matrix of d: C^2 -> C^3, (dh)(u,v,w) = h(v,w) - h(u+v,w) + h(u,v+w) - h(u,v)."""
    N = p ** n
    P = points(p, n)
    U, V, W = (np.indices((N, N, N)).reshape(3, -1))

    def add(x, y):
        return encode_rows((P[x] + P[y]) % p, p)

    rows = np.arange(N ** 3)
    D = np.zeros((N ** 3, N * N), dtype=np.int64)
    for sign, a, b in ((1, V, W), (-1, add(U, V), W), (1, U, add(V, W)), (-1, U, V)):
        np.add.at(D, (rows, a * N + b), sign)
    return D % p


def delta_image_tables(p, n):
    """(d nu)/p for A = E_kl, all k, l: cocycles spanning the image of H^2(V, k^x) in H^3(V, F_p)."""
    out = []
    for k in range(n):
        for l in range(n):
            A = np.zeros((n, n), dtype=np.int64)
            A[k, l] = 1
            out.append(lifted_coboundary(A, p, n))
    return out


class CohomologyOracle:
    """Decides triviality of Z_p-valued 3-cocycles on V_n in H^3(V, F_p) and in H^3(V, k^x).

    Meant for p^(2n) up to a few hundred; the coboundary matrix has p^(3n) rows.
    """

    def __init__(self, field, n):
        self.field = as_field(field)
        self.n = n
        p = self.field.p
        self.D = coboundary_matrix(p, n)
        self.E = np.stack(delta_image_tables(p, n), axis=1)

    def is_fp_coboundary(self, values):
        return solve_mod_p(self.D, values, self.field.p) is not None

    def is_trivial_in_kx(self, values):
        """xi^c is a coboundary of a k^x-valued 2-cochain."""
        return solve_mod_p(np.concatenate([self.D, self.E], axis=1), values, self.field.p) is not None

    def same_class_in_kx(self, c1, c2):
        return self.is_trivial_in_kx((np.asarray(c1) - np.asarray(c2)) % self.field.p)
