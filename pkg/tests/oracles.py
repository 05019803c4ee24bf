"""Independent reference implementations used only as test oracles.

Deliberately naive: bitmask arithmetic over GF(2), literal quantifier
enumeration, and textbook carry-less multiplication.  Nothing here calls the
library's elimination kernels, so these act as a second route for every claim
the fast path makes.
"""

from __future__ import annotations

from itertools import combinations


def clmul_mod(x: int, y: int, modulus: int, b: int) -> int:
    """Schoolbook carry-less multiply reduced by the modulus bit pattern."""
    acc = 0
    for i in range(b):
        if (y >> i) & 1:
            acc ^= x << i
    for i in range(2 * b - 2, b - 1, -1):
        if (acc >> i) & 1:
            acc ^= modulus << (i - b)
    return acc


def gf2_irreducible(p: int) -> bool:
    """Trial division by every polynomial of degree 1..deg(p)//2."""
    d = p.bit_length() - 1
    if d <= 0:
        return False
    for f in range(2, 1 << (d // 2 + 1)):
        a = p
        dm = f.bit_length() - 1
        while a and a.bit_length() - 1 >= dm:
            a ^= f << (a.bit_length() - 1 - dm)
        if a == 0:
            return False
    return True


def column_bitmasks(matrix) -> list[int]:
    """GF(2) matrix columns as integer bitmasks (bit i = row i)."""
    vals = matrix.values()
    cols = []
    for j in range(matrix.cols):
        m = 0
        for i in range(matrix.rows):
            if vals[i, j]:
                m |= 1 << i
        cols.append(m)
    return cols


def brute_force_valid_gf2(matrix, placement, epsilon: int) -> bool:
    """The validity criterion by literal quantifier enumeration over GF(2).

    For every node k, every nonzero combination x of at most 2*epsilon
    columns cached at k, and every combination y of the uncached columns,
    checks H_X x + H_Y y != 0.  Coefficients over GF(2) are subset sums.
    """
    pos = {lab: j for j, lab in enumerate(matrix.col_labels)}
    cols = column_bitmasks(matrix)
    e2 = 2 * epsilon
    for k in placement.nodes:
        xcols = [cols[pos[f]] for f in sorted(placement.x[k])]
        ycols = [cols[pos[f]] for f in sorted(placement.y[k])]
        yvals = set()
        for bits in range(1 << len(ycols)):
            v = 0
            for i in range(len(ycols)):
                if (bits >> i) & 1:
                    v ^= ycols[i]
            yvals.add(v)
        for wt in range(1, min(e2, len(xcols)) + 1):
            for support in combinations(range(len(xcols)), wt):
                v = 0
                for i in support:
                    v ^= xcols[i]
                if v in yvals:
                    return False
    return True


def in_span_by_enumeration_gf2(matrix, target) -> bool:
    """Span membership by trying every GF(2) coefficient vector."""
    cols = column_bitmasks(matrix)
    t = 0
    for i, v in enumerate(target):
        if int(v):
            t |= 1 << i
    for bits in range(1 << len(cols)):
        v = 0
        for i in range(len(cols)):
            if (bits >> i) & 1:
                v ^= cols[i]
        if v == t:
            return True
    return False
