# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: initializedcheck=False
# cython: cdivision=True
"""Compiled GF(2^b) linear-algebra kernels.

Same API and semantics as blindcache._kernels_py (the reference
implementation); see that module for the contract.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.uint32_t u32
ctypedef cnp.uint64_t u64
ctypedef cnp.int64_t i64

BACKEND = "cython"

_EMPTY_U32 = np.zeros(1, dtype=np.uint32)
_EMPTY_I64 = np.zeros(1, dtype=np.int64)


cdef inline u64 _mul_nt(u64 a, u64 b, u64 modulus, int bits) noexcept nogil:
    cdef u64 acc = 0
    cdef int i
    for i in range(bits):
        if (b >> i) & 1:
            acc ^= a << i
    for i in range(2 * bits - 2, bits - 1, -1):
        if (acc >> i) & 1:
            acc ^= modulus << (i - bits)
    return acc


cdef inline u64 _pow_nt(u64 x, u64 e, u64 modulus, int bits) noexcept nogil:
    cdef u64 r = 1
    while e:
        if e & 1:
            r = _mul_nt(r, x, modulus, bits)
        x = _mul_nt(x, x, modulus, bits)
        e >>= 1
    return r


cdef inline u32 _gmul(u32 x, u32 y, bint tab, u32[::1] exp, i64[::1] log,
                      u64 modulus, int bits) noexcept nogil:
    if x == 0 or y == 0:
        return 0
    if tab:
        return exp[log[x] + log[y]]
    return <u32>_mul_nt(x, y, modulus, bits)


cdef inline u32 _ginv(u32 x, bint tab, u32[::1] exp, i64[::1] log,
                      u64 modulus, int bits, i64 q1) noexcept nogil:
    if tab:
        return exp[q1 - log[x]]
    return <u32>_pow_nt(x, (<u64>1 << bits) - 2, modulus, bits)


def gf_mul_nt_vec(a, b, int bits, modulus):
    cdef cnp.ndarray[u32, ndim=1] av = np.ascontiguousarray(a, dtype=np.uint32).ravel()
    cdef cnp.ndarray[u32, ndim=1] bv = np.ascontiguousarray(b, dtype=np.uint32).ravel()
    cdef cnp.ndarray[u32, ndim=1] out = np.zeros(av.shape[0], dtype=np.uint32)
    cdef u64 m = modulus
    cdef Py_ssize_t i
    for i in range(av.shape[0]):
        out[i] = <u32>_mul_nt(av[i], bv[i], m, bits)
    return out.reshape(np.shape(a))


def gf_mul_vec(a, b, spec):
    bits, modulus, exp, log = spec
    a2, b2 = np.broadcast_arrays(np.asarray(a, dtype=np.uint32), np.asarray(b, dtype=np.uint32))
    cdef cnp.ndarray[u32, ndim=1] av = np.ascontiguousarray(a2).ravel()
    cdef cnp.ndarray[u32, ndim=1] bv = np.ascontiguousarray(b2).ravel()
    cdef cnp.ndarray[u32, ndim=1] out = np.zeros(av.shape[0], dtype=np.uint32)
    cdef bint tab = exp is not None
    cdef u32[::1] expv = exp if tab else _EMPTY_U32
    cdef i64[::1] logv = log if tab else _EMPTY_I64
    cdef u64 m = modulus
    cdef int nbits = bits
    cdef Py_ssize_t i
    with nogil:
        for i in range(av.shape[0]):
            out[i] = _gmul(av[i], bv[i], tab, expv, logv, m, nbits)
    return out.reshape(a2.shape)


def rref(u32[:, ::1] a, spec):
    bits, modulus, exp, log = spec
    cdef bint tab = exp is not None
    cdef u32[::1] expv = exp if tab else _EMPTY_U32
    cdef i64[::1] logv = log if tab else _EMPTY_I64
    cdef u64 m = modulus
    cdef int nbits = bits
    cdef i64 q1 = ((<i64>1) << nbits) - 1
    cdef Py_ssize_t nrows = a.shape[0], ncols = a.shape[1]
    cdef cnp.ndarray[i64, ndim=1] piv_arr = np.zeros(min(nrows, ncols) if nrows and ncols else 0,
                                                     dtype=np.int64)
    cdef i64[::1] pivots = piv_arr if piv_arr.shape[0] else _EMPTY_I64
    cdef Py_ssize_t rank = 0, col, row, p, j
    cdef u32 piv, inv, f
    with nogil:
        for col in range(ncols):
            if rank == nrows:
                break
            p = -1
            for row in range(rank, nrows):
                if a[row, col] != 0:
                    p = row
                    break
            if p < 0:
                continue
            if p != rank:
                for j in range(ncols):
                    a[rank, j], a[p, j] = a[p, j], a[rank, j]
            piv = a[rank, col]
            if piv != 1:
                inv = _ginv(piv, tab, expv, logv, m, nbits, q1)
                for j in range(ncols):
                    a[rank, j] = _gmul(a[rank, j], inv, tab, expv, logv, m, nbits)
            for row in range(nrows):
                if row == rank:
                    continue
                f = a[row, col]
                if f == 0:
                    continue
                for j in range(ncols):
                    if a[rank, j] != 0:
                        a[row, j] ^= _gmul(f, a[rank, j], tab, expv, logv, m, nbits)
            if piv_arr.shape[0]:
                pivots[rank] = col
            rank += 1
    return rank, piv_arr[:rank].copy()


def reduce_rows(u32[:, ::1] rows, const u32[:, ::1] basis, const i64[::1] pivots, spec):
    bits, modulus, exp, log = spec
    cdef bint tab = exp is not None
    cdef u32[::1] expv = exp if tab else _EMPTY_U32
    cdef i64[::1] logv = log if tab else _EMPTY_I64
    cdef u64 m = modulus
    cdef int nbits = bits
    cdef Py_ssize_t n = rows.shape[0], c = rows.shape[1], d = pivots.shape[0]
    cdef Py_ssize_t i, r, j
    cdef i64 p
    cdef u32 f
    with nogil:
        for i in range(d):
            p = pivots[i]
            for r in range(n):
                f = rows[r, p]
                if f == 0:
                    continue
                for j in range(c):
                    if basis[i, j] != 0:
                        rows[r, j] ^= _gmul(f, basis[i, j], tab, expv, logv, m, nbits)
    return None


def first_dependent(const u32[:, ::1] coords, const i64[:, ::1] subsets, spec):
    bits, modulus, exp, log = spec
    cdef bint tab = exp is not None
    cdef u32[::1] expv = exp if tab else _EMPTY_U32
    cdef i64[::1] logv = log if tab else _EMPTY_I64
    cdef u64 m = modulus
    cdef int nbits = bits
    cdef i64 q1 = ((<i64>1) << nbits) - 1
    cdef Py_ssize_t N = subsets.shape[0], mu = subsets.shape[1], d = coords.shape[1]
    if N == 0 or mu == 0:
        return -1
    if mu > d:
        return 0
    cdef cnp.ndarray[u32, ndim=2] scratch_arr = np.zeros((mu, d), dtype=np.uint32)
    cdef u32[:, ::1] scratch = scratch_arr
    cdef Py_ssize_t n, s, t, j, jstar
    cdef u32 piv, inv, f
    cdef bint singular
    cdef Py_ssize_t hit = -1
    with nogil:
        for n in range(N):
            for s in range(mu):
                for j in range(d):
                    scratch[s, j] = coords[subsets[n, s], j]
            singular = 0
            for s in range(mu):
                jstar = -1
                for j in range(d):
                    if scratch[s, j] != 0:
                        jstar = j
                        break
                if jstar < 0:
                    singular = 1
                    break
                piv = scratch[s, jstar]
                # Fraction-free: cross-scale the whole row instead of
                # normalizing, so no inverses are needed; scaling a row by
                # piv != 0 keeps rank.
                for t in range(s + 1, mu):
                    f = scratch[t, jstar]
                    if f == 0:
                        continue
                    for j in range(d):
                        scratch[t, j] = (
                            _gmul(piv, scratch[t, j], tab, expv, logv, m, nbits)
                            ^ _gmul(f, scratch[s, j], tab, expv, logv, m, nbits)
                        )
            if singular:
                hit = n
                break
    return hit


def matvec(const u32[:, ::1] mat, const u32[::1] v, spec):
    bits, modulus, exp, log = spec
    cdef bint tab = exp is not None
    cdef u32[::1] expv = exp if tab else _EMPTY_U32
    cdef i64[::1] logv = log if tab else _EMPTY_I64
    cdef u64 m = modulus
    cdef int nbits = bits
    cdef Py_ssize_t r = mat.shape[0], c = mat.shape[1]
    cdef cnp.ndarray[u32, ndim=1] out_arr = np.zeros(r, dtype=np.uint32)
    cdef u32[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef u32 vj
    with nogil:
        for j in range(c):
            vj = v[j]
            if vj == 0:
                continue
            for i in range(r):
                if mat[i, j] != 0:
                    out[i] ^= _gmul(mat[i, j], vj, tab, expv, logv, m, nbits)
    return out_arr
