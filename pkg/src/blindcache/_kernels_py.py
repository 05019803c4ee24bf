"""Pure-Python (numpy-vectorized) GF(2^b) linear-algebra kernels.

Reference implementation of the kernel API; `blindcache._ckernels` is the
compiled twin with identical signatures and semantics.  Every function takes a
`spec` tuple ``(bits, modulus, exp, log)`` where ``exp``/``log`` are the
antilog/log numpy tables for bits <= 16 and both None above that (the
carry-less multiply path is used instead).

Matrices are C-contiguous numpy uint32 arrays of field-element bit patterns.
Functions marked in-place mutate their first argument; callers pass copies.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def gf_mul_nt_vec(a: np.ndarray, b: np.ndarray, bits: int, modulus: int) -> np.ndarray:
    """Elementwise product via carry-less shift-and-reduce (no tables)."""
    a64 = a.astype(np.uint64)
    b64 = b.astype(np.uint64)
    acc = np.zeros(np.broadcast_shapes(a64.shape, b64.shape), dtype=np.uint64)
    for i in range(bits):
        acc ^= np.where((b64 >> np.uint64(i)) & np.uint64(1) != 0, a64 << np.uint64(i), np.uint64(0))
    for i in range(2 * bits - 2, bits - 1, -1):
        hit = (acc >> np.uint64(i)) & np.uint64(1) != 0
        acc ^= np.where(hit, np.uint64(modulus << (i - bits)), np.uint64(0))
    return acc.astype(np.uint32)


def _inv_nt_vec(x: np.ndarray, bits: int, modulus: int) -> np.ndarray:
    """Elementwise inverse by exponentiation to q-2 (no zero entries allowed)."""
    e = (1 << bits) - 2
    r = np.ones_like(x)
    base = x.copy()
    while e:
        if e & 1:
            r = gf_mul_nt_vec(r, base, bits, modulus)
        base = gf_mul_nt_vec(base, base, bits, modulus)
        e >>= 1
    return r


def gf_mul_vec(a: np.ndarray, b: np.ndarray, spec: tuple) -> np.ndarray:
    """Elementwise product of two arrays of field elements."""
    bits, modulus, exp, log = spec
    if exp is None:
        return gf_mul_nt_vec(a, b, bits, modulus)
    a, b = np.broadcast_arrays(a, b)
    out = np.zeros(a.shape, dtype=np.uint32)
    nz = (a != 0) & (b != 0)
    out[nz] = exp[log[a[nz]] + log[b[nz]]]
    return out


def _inv_scalar(x: int, spec: tuple) -> int:
    bits, modulus, exp, log = spec
    if exp is None:
        return int(_inv_nt_vec(np.array([x], dtype=np.uint32), bits, modulus)[0])
    return int(exp[(1 << bits) - 1 - log[x]])


def _submul_outer(block: np.ndarray, factors: np.ndarray, row: np.ndarray, spec: tuple) -> None:
    """block ^= outer(factors, row), all factors and row entries nonzero-safe."""
    bits, modulus, exp, log = spec
    if exp is None:
        block ^= gf_mul_nt_vec(factors[:, None], row[None, :], bits, modulus)
    else:
        block ^= exp[log[factors][:, None] + log[row][None, :]].astype(np.uint32)


def rref(a: np.ndarray, spec: tuple) -> tuple[int, np.ndarray]:
    """In-place reduced row echelon form.

    Pivots are normalized to 1 and eliminated above and below (first-nonzero
    pivoting; the arithmetic is exact so no conditioning is involved).
    Returns (rank, pivot column indices).
    """
    nrows, ncols = a.shape
    rank = 0
    pivots = []
    for col in range(ncols):
        if rank == nrows:
            break
        nz = np.nonzero(a[rank:, col])[0]
        if nz.size == 0:
            continue
        p = rank + int(nz[0])
        if p != rank:
            a[[rank, p]] = a[[p, rank]]
        piv = int(a[rank, col])
        if piv != 1:
            inv = np.uint32(_inv_scalar(piv, spec))
            prow_nz = np.nonzero(a[rank])[0]
            a[rank, prow_nz] = gf_mul_vec(a[rank, prow_nz], inv, spec)
        rows = np.nonzero(a[:, col])[0]
        rows = rows[rows != rank]
        if rows.size:
            factors = a[rows, col].copy()
            prow = a[rank]
            pnz = np.nonzero(prow)[0]
            block = a[np.ix_(rows, pnz)]
            _submul_outer(block, factors, prow[pnz], spec)
            a[np.ix_(rows, pnz)] = block
        pivots.append(col)
        rank += 1
    return rank, np.asarray(pivots, dtype=np.int64)


def reduce_rows(rows: np.ndarray, basis: np.ndarray, pivots: np.ndarray, spec: tuple) -> None:
    """In-place: cancel each row's components along the RREF basis rows.

    `basis` rows must be in RREF with unit pivots at `pivots`; afterwards every
    row of `rows` has zeros in all pivot columns (the residual modulo the
    basis row space).
    """
    for i in range(len(pivots)):
        p = int(pivots[i])
        f = rows[:, p]
        nz = np.nonzero(f)[0]
        if nz.size == 0:
            continue
        brow = basis[i]
        bnz = np.nonzero(brow)[0]
        block = rows[np.ix_(nz, bnz)]
        _submul_outer(block, f[nz].copy(), brow[bnz], spec)
        rows[np.ix_(nz, bnz)] = block


def _row_scale(a: np.ndarray, scal: np.ndarray, spec: tuple) -> np.ndarray:
    """a[i, j] * scal[i] elementwise; every scal entry must be nonzero."""
    bits, modulus, exp, log = spec
    if exp is None:
        return gf_mul_nt_vec(a, scal[:, None], bits, modulus)
    out = np.zeros_like(a)
    nz = a != 0
    sl = np.broadcast_to(log[scal][:, None], a.shape)
    out[nz] = exp[log[a[nz]] + sl[nz]]
    return out


def first_dependent(coords: np.ndarray, subsets: np.ndarray, spec: tuple) -> int:
    """Index of the first subset whose rows of `coords` are linearly dependent.

    coords: (n, d) matrix; subsets: (N, mu) array of row indices into coords.
    Returns -1 when every subset is independent.  All N subsets are eliminated
    batch-wise one pivot step at a time, fraction-free (rows are cross-scaled
    instead of normalized, which preserves rank and avoids inverses).
    """
    n, d = coords.shape
    N, mu = subsets.shape
    if N == 0 or mu == 0:
        return -1
    if mu > d:
        return 0
    B = coords[subsets]  # (N, mu, d) gather
    singular = np.zeros(N, dtype=bool)
    arange_n = np.arange(N)
    for s in range(mu):
        row = B[:, s, :]
        nzm = row != 0
        has = nzm.any(axis=1)
        singular |= ~has
        if not has.any():
            break
        j = np.argmax(nzm, axis=1)
        piv = row[arange_n, j]
        for t in range(s + 1, mu):
            rt = B[:, t, :]
            f = np.take_along_axis(rt, j[:, None], axis=1)[:, 0]
            em = has & (f != 0)
            if not em.any():
                continue
            rt[em] = _row_scale(rt[em], piv[em], spec) ^ _row_scale(row[em], f[em], spec)
    if singular.any():
        return int(np.argmax(singular))
    return -1


def matvec(m: np.ndarray, v: np.ndarray, spec: tuple) -> np.ndarray:
    """Matrix-vector product over the field."""
    out = np.zeros(m.shape[0], dtype=np.uint32)
    for jj in range(m.shape[1]):
        vj = int(v[jj])
        if vj == 0:
            continue
        out ^= gf_mul_vec(m[:, jj], np.uint32(vj), spec)
    return out
