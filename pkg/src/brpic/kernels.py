"""Hot loops: GL_n(F_p) sweeps with an inlined stabilizer test, and hashed closure.

Every kernel has a numba implementation (scalar loops, ``nogil`` so worker
threads run in parallel) and a numpy implementation (vectorized over
batches).  Both visit the same matrices in the same order and must agree
exactly; tests/test_kernels.py checks this.

Encodings
---------
row code
    A row (r_0, ..., r_{n-1}) in F_p^n is the integer sum r_j p^(n-1-j), so
    code order is lexicographic order on rows.
packed key
    An n x n matrix is packed into one uint64, entry (i, j) occupying bits
    [b(i n + j), b(i n + j + 1)) with b = ceil(log2 p).  Requires n^2 b <= 63.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from math import prod

import numpy as np

from ._accel import optional_njit, resolve_backend
from .errors import MemoryGuardExceeded
from .gfp import entry_bits, packs_in_word

MODE_COUNT = 0
MODE_ODD = 1     # odd p: alternating 3-form and symmetric bilinear form
MODE_EVEN = 2    # p = 2: cubic evaluation set

ORDER_ID = "row-major-radix-p/lead-row-pairs-round-robin/v1"


@lru_cache(maxsize=None)
def row_digits(p, n):
    """(p^n, n) table of row digits indexed by row code."""
    codes = np.arange(p ** n, dtype=np.int64)
    out = np.empty((p ** n, n), dtype=np.int64)
    for j in range(n):
        out[:, j] = (codes // p ** (n - 1 - j)) % p
    out.setflags(write=False)
    return out


def encode_rows(digits, p):
    digits = np.asarray(digits, dtype=np.int64)
    n = digits.shape[-1]
    weights = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (digits % p) @ weights


@lru_cache(maxsize=None)
def _coeff_vectors(p, k):
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return row_digits(p, k)


def _extend(partials, p, n):
    """Append every row independent of the rows already present, in code order."""
    B, k = partials.shape
    N = p ** n
    D = row_digits(p, n)
    combos = _coeff_vectors(p, k)
    span = np.einsum("ck,bkn->bcn", combos, D[partials]) % p
    span_codes = encode_rows(span, p)
    mask = np.zeros((B, N), dtype=bool)
    mask[np.arange(B)[:, None], span_codes] = True
    bi, ci = np.nonzero(~mask)
    return np.concatenate([partials[bi], ci[:, None]], axis=1)


def prefix_depth(n):
    return min(n, 2)


@lru_cache(maxsize=None)
def gl_prefixes(p, n):
    """Independent leading row tuples (depth ``prefix_depth(n)``) in lexicographic order."""
    partials = np.zeros((1, 0), dtype=np.int64)
    for _ in range(prefix_depth(n)):
        partials = _extend(partials, p, n)
    partials.setflags(write=False)
    return partials


def partition_prefixes(p, n, partition=None):
    prefixes = gl_prefixes(p, n)
    if partition is None:
        return prefixes
    k, w = partition
    if not (w >= 1 and 0 <= k < w):
        raise ValueError(f"bad partition {partition}")
    return prefixes[k::w]


def leaves_per_prefix(p, n):
    return prod(p ** n - p ** i for i in range(prefix_depth(n), n))


def enumerate_row_codes(p, n, prefixes, chunk=1 << 18):
    """Yield (M, n) arrays of row codes for the matrices below ``prefixes``."""
    per = leaves_per_prefix(p, n)
    batch = max(1, chunk // per)
    for start in range(0, prefixes.shape[0], batch):
        partials = np.array(prefixes[start:start + batch])
        while partials.shape[1] < n:
            partials = _extend(partials, p, n)
        yield partials


def enumerate_chunks(p, n, partition=None, chunk=1 << 18):
    """Yield (M, n, n) entry arrays covering GL_n(F_p) (or one partition of it)."""
    D = row_digits(p, n)
    for codes in enumerate_row_codes(p, n, partition_prefixes(p, n, partition), chunk):
        yield D[codes]


def pack_array(mats, p):
    mats = np.asarray(mats, dtype=np.int64)
    n = mats.shape[-1]
    shifts = (entry_bits(p) * np.arange(n * n)).astype(np.uint64)
    flat = mats.reshape(-1, n * n).astype(np.uint64)
    return np.bitwise_or.reduce(flat << shifts, axis=1)


def unpack_array(keys, p, n):
    bits = entry_bits(p)
    shifts = (bits * np.arange(n * n)).astype(np.uint64)
    mask = np.uint64((1 << bits) - 1)
    keys = np.asarray(keys, dtype=np.uint64)
    return ((keys[:, None] >> shifts) & mask).astype(np.int64).reshape(-1, n, n)


# ---------------------------------------------------------------------------
# stabilizer test data
# ---------------------------------------------------------------------------

class SweepTest:
    """Arrays describing the leaf test; built by stab.py from an H3Class.

    The test accepts g iff the pulled-back form equals the original:
    odd p: sum over source triples of coef * minor(g; rows src, cols tgt)
    equals the target coefficient for every target triple, and
    g^T S g = S; p = 2: f(g v) = 1 for every v with f(v) = 1.
    """

    def __init__(self, mode, p, n, alt_src=None, alt_src_coef=None, alt_tgt=None,
                 alt_tgt_coef=None, sym=None, ftab=None, svec_codes=None):
        i64 = np.int64
        self.mode = mode
        self.p = p
        self.n = n
        self.alt_src = np.zeros((0, 3), i64) if alt_src is None else np.asarray(alt_src, i64).reshape(-1, 3)
        self.alt_src_coef = np.zeros(0, i64) if alt_src_coef is None else np.asarray(alt_src_coef, i64)
        self.alt_tgt = np.zeros((0, 3), i64) if alt_tgt is None else np.asarray(alt_tgt, i64).reshape(-1, 3)
        self.alt_tgt_coef = np.zeros(0, i64) if alt_tgt_coef is None else np.asarray(alt_tgt_coef, i64)
        self.sym = np.zeros((n, n), i64) if sym is None else np.asarray(sym, i64)
        self.ftab = np.zeros(1, np.uint8) if ftab is None else np.asarray(ftab, np.uint8)
        self.svec_codes = np.zeros(0, i64) if svec_codes is None else np.asarray(svec_codes, i64)

    @classmethod
    def count_all(cls, p, n):
        return cls(MODE_COUNT, p, n)


def _det3_np(m):
    return (m[:, 0, 0] * (m[:, 1, 1] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 1])
            - m[:, 0, 1] * (m[:, 1, 0] * m[:, 2, 2] - m[:, 1, 2] * m[:, 2, 0])
            + m[:, 0, 2] * (m[:, 1, 0] * m[:, 2, 1] - m[:, 1, 1] * m[:, 2, 0]))


def test_matrices_numpy(G, test):
    """Boolean mask over a (M, n, n) batch."""
    p = test.p
    M = G.shape[0]
    if test.mode == MODE_COUNT:
        return np.ones(M, dtype=bool)
    if test.mode == MODE_ODD:
        ok = (np.einsum("mki,kl,mlj->mij", G, test.sym, G) % p == test.sym).all(axis=(1, 2))
        for t in range(test.alt_tgt.shape[0]):
            cols = test.alt_tgt[t]
            acc = np.zeros(M, dtype=np.int64)
            for s in range(test.alt_src.shape[0]):
                sub = G[:, test.alt_src[s]][:, :, cols]
                acc += test.alt_src_coef[s] * _det3_np(sub)
            ok &= acc % p == test.alt_tgt_coef[t]
        return ok
    D = row_digits(2, test.n)
    ok = np.ones(M, dtype=bool)
    for code in test.svec_codes:
        img = (G @ D[code]) % 2
        ok &= test.ftab[encode_rows(img, 2)] == 1
    return ok


# ---------------------------------------------------------------------------
# numba sweep
# ---------------------------------------------------------------------------

@optional_njit
def _build_span(level, r, p, n, D, pw, span, ssize, inspan):
    nxt = level + 1
    for t in range(ssize[nxt]):
        inspan[nxt, span[nxt, t]] = 0
    m = 0
    size = ssize[level]
    for c in range(p):
        for t in range(size):
            s = span[level, t]
            code = 0
            for j in range(n):
                code += ((D[s, j] + c * D[r, j]) % p) * pw[j]
            span[nxt, m] = code
            inspan[nxt, code] = 1
            m += 1
    ssize[nxt] = m


@optional_njit
def _det3_minor(G, i, j, k, a, b, c):
    return (G[i, a] * (G[j, b] * G[k, c] - G[j, c] * G[k, b])
            - G[i, b] * (G[j, a] * G[k, c] - G[j, c] * G[k, a])
            + G[i, c] * (G[j, a] * G[k, b] - G[j, b] * G[k, a]))


@optional_njit
def _leaf_ok(G, p, n, D, pw, mode, alt_src, alt_src_coef, alt_tgt, alt_tgt_coef, S, ftab, svec_codes):
    if mode == 0:
        return True
    if mode == 1:
        for i in range(n):
            for j in range(n):
                acc = 0
                for k in range(n):
                    gki = G[k, i]
                    if gki == 0:
                        continue
                    for l in range(n):
                        acc += gki * S[k, l] * G[l, j]
                if acc % p != S[i, j]:
                    return False
        for t in range(alt_tgt.shape[0]):
            a = alt_tgt[t, 0]
            b = alt_tgt[t, 1]
            c = alt_tgt[t, 2]
            acc = 0
            for s in range(alt_src.shape[0]):
                acc += alt_src_coef[s] * _det3_minor(G, alt_src[s, 0], alt_src[s, 1], alt_src[s, 2], a, b, c)
            if acc % p != alt_tgt_coef[t]:
                return False
        return True
    for t in range(svec_codes.shape[0]):
        v = svec_codes[t]
        code = 0
        for i in range(n):
            acc = 0
            for j in range(n):
                acc += G[i, j] * D[v, j]
            code += (acc % 2) * pw[i]
        if ftab[code] == 0:
            return False
    return True


@optional_njit
def _sweep_numba(prefixes, p, n, D, mode, alt_src, alt_src_coef, alt_tgt, alt_tgt_coef, S, ftab,
                 svec_codes, kept, bits):
    N = D.shape[0]
    depth = prefixes.shape[1]
    pw = np.empty(n, np.int64)
    for j in range(n):
        pw[j] = p ** (n - 1 - j)
    rows = np.zeros(n, np.int64)
    inspan = np.zeros((n + 1, N), np.uint8)
    span = np.zeros((n + 1, N), np.int64)
    ssize = np.zeros(n + 1, np.int64)
    cand = np.zeros(n + 1, np.int64)
    G = np.zeros((n, n), np.int64)
    ssize[0] = 1
    inspan[0, 0] = 1
    count = 0
    nkept = 0
    for pi in range(prefixes.shape[0]):
        for lv in range(depth):
            rows[lv] = prefixes[pi, lv]
            if lv + 1 < n:
                _build_span(lv, rows[lv], p, n, D, pw, span, ssize, inspan)
        level = depth
        cand[level] = 0
        while level >= depth:
            if level == n:
                # only reached when depth == n: the prefix itself is a full matrix
                level -= 1
                for i in range(n):
                    for j in range(n):
                        G[i, j] = D[rows[i], j]
                if _leaf_ok(G, p, n, D, pw, mode, alt_src, alt_src_coef, alt_tgt, alt_tgt_coef, S, ftab,
                            svec_codes):
                    if nkept < kept.shape[0]:
                        key = np.uint64(0)
                        for i in range(n):
                            for j in range(n):
                                key |= np.uint64(G[i, j]) << np.uint64(bits * (i * n + j))
                        kept[nkept] = key
                        nkept += 1
                    count += 1
                break
            c = cand[level]
            while c < N and inspan[level, c] == 1:
                c += 1
            if c >= N:
                level -= 1
                continue
            cand[level] = c + 1
            rows[level] = c
            if level == n - 1:
                for i in range(n):
                    for j in range(n):
                        G[i, j] = D[rows[i], j]
                if _leaf_ok(G, p, n, D, pw, mode, alt_src, alt_src_coef, alt_tgt, alt_tgt_coef, S, ftab,
                            svec_codes):
                    if nkept < kept.shape[0]:
                        key = np.uint64(0)
                        for i in range(n):
                            for j in range(n):
                                key |= np.uint64(G[i, j]) << np.uint64(bits * (i * n + j))
                        kept[nkept] = key
                        nkept += 1
                    count += 1
                continue
            _build_span(level, c, p, n, D, pw, span, ssize, inspan)
            level += 1
            cand[level] = 0
    return count, nkept


def _sweep_numpy(prefixes, test, keep):
    p, n = test.p, test.n
    D = row_digits(p, n)
    count = 0
    kept = []
    for codes in enumerate_row_codes(p, n, prefixes):
        G = D[codes]
        ok = test_matrices_numpy(G, test)
        count += int(ok.sum())
        if len(kept) < keep and packs_in_word(p, n):
            kept.extend(pack_array(G[ok][:keep - len(kept)], p).tolist())
    return count, kept


def sweep_partition(test, partition=None, keep=0, backend=None):
    """Count matrices in one partition of GL_n(F_p) passing ``test``."""
    backend = resolve_backend(backend)
    p, n = test.p, test.n
    prefixes = np.ascontiguousarray(partition_prefixes(p, n, partition))
    if not packs_in_word(p, n):
        keep = 0
    if backend == "numpy":
        return _sweep_numpy(prefixes, test, keep)
    kept = np.zeros(keep, dtype=np.uint64)
    count, nkept = _sweep_numba(prefixes, p, n, row_digits(p, n), test.mode, test.alt_src, test.alt_src_coef,
                                test.alt_tgt, test.alt_tgt_coef, test.sym, test.ftab, test.svec_codes, kept,
                                entry_bits(p))
    return int(count), kept[:nkept].tolist()


def sweep(test, workers=1, keep=0, backend=None):
    """Count over all of GL_n(F_p) with ``workers`` disjoint partitions run on threads.

    Returns (count, kept keys).  Kept keys are concatenated in partition order.
    """
    backend = resolve_backend(backend)
    workers = max(1, int(workers))
    if workers == 1:
        return sweep_partition(test, None, keep, backend)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda k: sweep_partition(test, (k, workers), keep, backend), range(workers)))
    count = sum(r[0] for r in results)
    kept = [key for r in results for key in r[1]][:keep]
    return count, kept


# ---------------------------------------------------------------------------
# closure
# ---------------------------------------------------------------------------

_MIX = np.uint64(0x9E3779B97F4A7C15)


@optional_njit
def _table_insert(table, key):
    mask = np.uint64(table.shape[0] - 1)
    stored = key + np.uint64(1)
    h = ((key ^ (key >> np.uint64(31))) * _MIX) & mask
    while True:
        v = table[h]
        if v == 0:
            table[h] = stored
            return True
        if v == stored:
            return False
        h = (h + np.uint64(1)) & mask


@optional_njit
def _rehash(elems, count, table):
    for t in range(count):
        _table_insert(table, elems[t])


@optional_njit
def _closure_numba(gens, p, n, bits, elems, count, head, table, max_load):
    ngens = gens.shape[0]
    A = np.zeros((n, n), np.int64)
    emask = np.uint64((1 << bits) - 1)
    while head < count:
        key = elems[head]
        for i in range(n):
            for j in range(n):
                A[i, j] = np.int64((key >> np.uint64(bits * (i * n + j))) & emask)
        for g in range(ngens):
            if count >= elems.shape[0]:
                return 1, count, head
            if count >= max_load:
                return 2, count, head
            new = np.uint64(0)
            for i in range(n):
                for j in range(n):
                    acc = 0
                    for k in range(n):
                        acc += gens[g, i, k] * A[k, j]
                    new |= np.uint64(acc % p) << np.uint64(bits * (i * n + j))
            if _table_insert(table, new):
                elems[count] = new
                count += 1
        head += 1
    return 0, count, head


def _check_bytes(nbytes, max_bytes):
    if max_bytes is not None and nbytes > max_bytes:
        raise MemoryGuardExceeded(
            f"closure needs about {nbytes / 1e6:.0f} MB, above the guard of {max_bytes / 1e6:.0f} MB")


def _next_pow2(x):
    return 1 << max(4, int(x - 1).bit_length())


def closure_numba(gens, p, n, max_bytes=None, expected=None, load=0.7):
    gens = np.ascontiguousarray(np.asarray(gens, dtype=np.int64) % p)
    bits = entry_bits(p)
    cap_e = int(expected) + 1 if expected else 1 << 16
    cap_t = _next_pow2(cap_e / load)
    _check_bytes(8 * (cap_e + cap_t), max_bytes)
    elems = np.zeros(cap_e, dtype=np.uint64)
    table = np.zeros(cap_t, dtype=np.uint64)
    identity = pack_array(np.eye(n, dtype=np.int64)[None], p)[0]
    elems[0] = identity
    _table_insert(table, identity)
    count, head = 1, 0
    while True:
        status, count, head = _closure_numba(gens, p, n, bits, elems, count, head, table, int(load * cap_t))
        if status == 0:
            return elems[:count]
        if status == 1:
            cap_e = int(cap_e * 1.5) + 1
            _check_bytes(8 * (cap_e + cap_t), max_bytes)
            grown = np.zeros(cap_e, dtype=np.uint64)
            grown[:count] = elems[:count]
            elems = grown
        else:
            cap_t *= 2
            _check_bytes(8 * (cap_e + cap_t), max_bytes)
            table = np.zeros(cap_t, dtype=np.uint64)
            _rehash(elems, count, table)


def closure_numpy(gens, p, n, max_bytes=None, chunk=1 << 17):
    """Layered BFS over sorted uint64 key arrays (no hash table)."""
    gens = np.asarray(gens, dtype=np.int64) % p
    seen = pack_array(np.eye(n, dtype=np.int64)[None], p)
    frontier = seen.copy()
    order = [seen]
    while frontier.size:
        parts = []
        for start in range(0, frontier.size, chunk):
            A = unpack_array(frontier[start:start + chunk], p, n)
            for g in gens:
                parts.append(pack_array(np.einsum("ij,mjk->mik", g, A) % p, p))
        cand = np.unique(np.concatenate(parts))
        _check_bytes(8 * (2 * seen.size + 2 * cand.size), max_bytes)
        idx = np.searchsorted(seen, cand)
        present = np.zeros(cand.size, dtype=bool)
        inside = idx < seen.size
        present[inside] = seen[idx[inside]] == cand[inside]
        frontier = cand[~present]
        if frontier.size:
            seen = np.union1d(seen, frontier)
            order.append(frontier)
    return np.concatenate(order)


def closure_python(gens, p, n, max_elems=2_000_000):
    """Closure on Python integer keys, for matrices that do not pack into a word."""
    from .gfp import pack_entries, unpack_entries

    gens = [np.asarray(g, dtype=np.int64) % p for g in gens]
    ident = pack_entries(np.eye(n, dtype=np.int64).tolist(), p)
    seen = {ident}
    order = [ident]
    head = 0
    while head < len(order):
        A = np.array(unpack_entries(order[head], p, n), dtype=np.int64)
        for g in gens:
            key = pack_entries(((g @ A) % p).tolist(), p)
            if key not in seen:
                seen.add(key)
                order.append(key)
                if len(order) > max_elems:
                    raise MemoryGuardExceeded(f"closure exceeded {max_elems:,} elements")
        head += 1
    return order


def closure_keys(gens, p, n, max_bytes=None, expected=None, backend=None):
    """All elements of <gens> as packed keys (uint64 array, or Python ints when unpackable)."""
    if not packs_in_word(p, n):
        return closure_python(gens, p, n)
    backend = resolve_backend(backend)
    if backend == "numba":
        return closure_numba(gens, p, n, max_bytes=max_bytes, expected=expected)
    return closure_numpy(gens, p, n, max_bytes=max_bytes)
