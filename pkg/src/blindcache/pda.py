"""Placement delivery arrays: construction, validation, serialization.

A PDA is an F x K grid whose cells are either the star symbol (the subfile is
cached at that node), a delivery integer in 0..S-1, or "?" when a constructed
placement omits the delivery integers.  Only the star pattern matters for the
update problem; the family constructors therefore emit placement-only grids
and the integer properties are checked only on imported arrays that carry
them.

Row labels are sorted tuples (subset families) or lexicographic coordinate
vectors (the grouping family), so derived matrices and files are byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from pathlib import Path
from typing import Mapping, Sequence

from .matrix import label_to_token, token_to_label

STAR = "*"
UNKNOWN = "?"


class PdaError(ValueError):
    """A grid violating the placement delivery array properties."""


@dataclass(frozen=True)
class Pda:
    """A validated F x K placement delivery array."""

    grid: tuple  # tuple of F rows, each a tuple of K entries
    row_labels: tuple
    col_labels: tuple
    K: int
    F: int
    Z: int
    S: int | None  # None when the grid is placement-only
    r: int | None  # None when rows are irregular
    row_regular: bool
    distinct_supports: bool

    def entry(self, f_idx: int, k_idx: int):
        return self.grid[f_idx][k_idx]

    def star_support(self, f_idx: int) -> frozenset:
        """Column labels of the nodes caching row f."""
        return frozenset(
            self.col_labels[k] for k in range(self.K) if self.grid[f_idx][k] == STAR
        )


@dataclass(frozen=True)
class Placement:
    """The placement sets derived from a PDA's star pattern.

    x maps each node to its cached subfile labels, y to the complement, and
    i_f maps each subfile to the nodes that do not cache it.
    """

    subfiles: tuple
    nodes: tuple
    x: Mapping
    y: Mapping
    i_f: Mapping
    F: int
    K: int
    Z: int
    r: int | None
    row_regular: bool
    distinct_supports: bool


def pda_validate(grid: Sequence[Sequence], row_labels: Sequence | None = None,
                 col_labels: Sequence | None = None) -> Pda:
    """Check the PDA properties on a raw grid and derive (K, F, Z, S, r).

    Star counts must agree across columns; when every non-star cell is an
    integer, each value in 0..S-1 must occur and equal integers must sit in
    distinct rows and columns with stars at the two crossing positions.
    Grids containing "?" skip the integer checks.  Row-irregular grids are
    accepted with row_regular=False since only the random construction needs
    regularity.
    """
    rows = [tuple(row) for row in grid]
    if not rows or not rows[0]:
        raise PdaError("empty grid")
    F = len(rows)
    K = len(rows[0])
    if any(len(row) != K for row in rows):
        raise PdaError("ragged grid")
    row_labels = tuple(row_labels) if row_labels is not None else tuple(range(F))
    col_labels = tuple(col_labels) if col_labels is not None else tuple(range(K))
    if len(row_labels) != F or len(set(row_labels)) != F:
        raise PdaError("row labels must be distinct and match the row count")
    if len(col_labels) != K or len(set(col_labels)) != K:
        raise PdaError("column labels must be distinct and match the column count")

    has_unknown = False
    ints = []
    for fi, row in enumerate(rows):
        for ki, cell in enumerate(row):
            if cell == STAR:
                continue
            if cell == UNKNOWN:
                has_unknown = True
            elif isinstance(cell, int) and not isinstance(cell, bool) and cell >= 0:
                ints.append((cell, fi, ki))
            else:
                raise PdaError(f"bad entry {cell!r} at row {fi}, column {ki}")

    col_stars = [sum(1 for row in rows if row[k] == STAR) for k in range(K)]
    if len(set(col_stars)) != 1:
        by_count: dict[int, list] = {}
        for ki, c in enumerate(col_stars):
            by_count.setdefault(c, []).append(col_labels[ki])
        mode = max(by_count, key=lambda c: len(by_count[c]))
        bad = [lab for c, labs in sorted(by_count.items()) if c != mode for lab in labs]
        raise PdaError(
            f"star count differs across columns: column(s) {bad} deviate from "
            f"the majority count {mode}"
        )
    Z = col_stars[0]

    row_stars = [sum(1 for cell in row if cell == STAR) for row in rows]
    row_regular = len(set(row_stars)) == 1
    r = row_stars[0] if row_regular else None

    S = None
    if ints and not has_unknown:
        values = sorted({v for v, _, _ in ints})
        S = values[-1] + 1
        missing = set(range(S)) - set(values)
        if missing:
            raise PdaError(f"delivery integers must cover 0..{S - 1}; missing {sorted(missing)}")
        by_value: dict[int, list[tuple[int, int]]] = {}
        for v, fi, ki in ints:
            by_value.setdefault(v, []).append((fi, ki))
        for v, cells in by_value.items():
            for (f1, k1), (f2, k2) in combinations(cells, 2):
                if f1 == f2 or k1 == k2:
                    raise PdaError(
                        f"integer {v} repeats in one {'row' if f1 == f2 else 'column'}"
                    )
                if rows[f1][k2] != STAR or rows[f2][k1] != STAR:
                    raise PdaError(
                        f"integer {v} at ({f1},{k1}) and ({f2},{k2}) lacks crossing stars"
                    )
    elif ints and has_unknown:
        raise PdaError("grid mixes delivery integers with '?' placeholders")

    supports = [frozenset(k for k in range(K) if row[k] == STAR) for row in rows]
    distinct = len(set(supports)) == F

    return Pda(
        grid=tuple(rows),
        row_labels=row_labels,
        col_labels=col_labels,
        K=K,
        F=F,
        Z=Z,
        S=S,
        r=r,
        row_regular=row_regular,
        distinct_supports=distinct,
    )


def _placement_only(star_sets, row_labels, col_labels) -> Pda:
    grid = [
        tuple(STAR if col in star_sets[fi] else UNKNOWN for col in col_labels)
        for fi in range(len(row_labels))
    ]
    return pda_validate(grid, row_labels, col_labels)


def pda_mn(K: int, t: int) -> Pda:
    """The subset-placement family: subfiles are t-subsets of the K nodes and
    node k caches subfile f exactly when k is a member of f.

    F = C(K, t), Z = C(K-1, t-1), r = t; delivery integers are omitted.
    """
    if not 1 <= t <= K:
        raise PdaError(f"need 1 <= t <= K, got t={t}, K={K}")
    col_labels = tuple(range(1, K + 1))
    row_labels = tuple(combinations(col_labels, t))
    star_sets = [frozenset(f) for f in row_labels]
    return _placement_only(star_sets, row_labels, col_labels)


def pda_hypergraph(n: int, a: int, b: int) -> Pda:
    """The intersecting-subsets family: subfiles are a-subsets and nodes are
    b-subsets of [n]; node k caches subfile f exactly when f and k intersect.

    F = C(n, a), K = C(n, b), Z = C(n, a) - C(n-b, a); placement-only.
    """
    if a < 1 or b < 1 or a + b > n:
        raise PdaError(f"need a, b >= 1 and a + b <= n, got n={n}, a={a}, b={b}")
    universe = tuple(range(1, n + 1))
    row_labels = tuple(combinations(universe, a))
    col_labels = tuple(combinations(universe, b))
    star_sets = [
        frozenset(k for k in col_labels if set(k) & set(f)) for f in row_labels
    ]
    return _placement_only(star_sets, row_labels, col_labels)


def pda_grouping(q: int, m: int) -> Pda:
    """The coordinate-placement family on Z_q^m.

    Subfiles are the q^m vectors; node (u, v) with u <= m caches the vectors
    whose u-th coordinate is v, and node (m+1, v) caches the vectors whose
    coordinate sum is v mod q.  K = q(m+1), F = q^m, Z = q^(m-1), r = m+1.
    """
    if q < 2 or m < 2:
        raise PdaError(f"need q >= 2 and m >= 2, got q={q}, m={m}")
    row_labels = tuple(product(range(q), repeat=m))
    col_labels = tuple((u, v) for u in range(1, m + 2) for v in range(q))
    star_sets = []
    for vec in row_labels:
        caching = {(u, vec[u - 1]) for u in range(1, m + 1)}
        caching.add((m + 1, sum(vec) % q))
        star_sets.append(frozenset(caching))
    return _placement_only(star_sets, row_labels, col_labels)


def placement_of(p: Pda) -> Placement:
    """Derive the cached/missing sets X_k, Y_k and the non-caching sets I_f."""
    allf = frozenset(p.row_labels)
    x = {}
    for ki, k in enumerate(p.col_labels):
        x[k] = frozenset(p.row_labels[fi] for fi in range(p.F) if p.grid[fi][ki] == STAR)
    y = {k: allf - x[k] for k in p.col_labels}
    i_f = {}
    for fi, f in enumerate(p.row_labels):
        i_f[f] = frozenset(
            p.col_labels[ki] for ki in range(p.K) if p.grid[fi][ki] != STAR
        )
    return Placement(
        subfiles=tuple(sorted(p.row_labels)),
        nodes=tuple(sorted(p.col_labels)),
        x=x,
        y=y,
        i_f=i_f,
        F=p.F,
        K=p.K,
        Z=p.Z,
        r=p.r,
        row_regular=p.row_regular,
        distinct_supports=p.distinct_supports,
    )


def _entry_to_token(cell) -> str:
    if cell == STAR:
        return STAR
    if cell == UNKNOWN:
        return UNKNOWN
    return str(cell)


def _token_to_entry(tok: str):
    if tok == STAR:
        return STAR
    if tok == UNKNOWN:
        return UNKNOWN
    try:
        v = int(tok)
    except ValueError:
        raise PdaError(f"bad grid token {tok!r}") from None
    if v < 0:
        raise PdaError(f"negative delivery integer {v}")
    return v


def pda_to_text(p: Pda) -> str:
    head = f"pda {p.F} {p.K}" + (f" {p.S}" if p.S is not None else "")
    lines = [
        head,
        "rows " + " ".join(label_to_token(l) for l in p.row_labels),
        "cols " + " ".join(label_to_token(l) for l in p.col_labels),
    ]
    for row in p.grid:
        lines.append(" ".join(_entry_to_token(c) for c in row))
    return "\n".join(lines) + "\n"


def pda_from_text(text: str) -> Pda:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 4:
        raise PdaError("truncated PDA file")
    head = lines[0].split()
    if head[0] != "pda" or len(head) not in (3, 4):
        raise PdaError(f"malformed PDA header {lines[0]!r}")
    F, K = int(head[1]), int(head[2])
    if not lines[1].startswith("rows ") or not lines[2].startswith("cols "):
        raise PdaError("expected 'rows' and 'cols' label lines")
    row_labels = tuple(token_to_label(t) for t in lines[1].split()[1:])
    col_labels = tuple(token_to_label(t) for t in lines[2].split()[1:])
    if len(lines) != 3 + F:
        raise PdaError(f"expected {F} grid lines, found {len(lines) - 3}")
    grid = []
    for ln in lines[3:]:
        toks = ln.split()
        if len(toks) != K:
            raise PdaError(f"grid line has {len(toks)} entries, expected {K}")
        grid.append([_token_to_entry(t) for t in toks])
    p = pda_validate(grid, row_labels, col_labels)
    if head[3:] and p.S != int(head[3]):
        raise PdaError(f"header claims S={head[3]} but the grid has S={p.S}")
    return p


def pda_to_file(p: Pda, path) -> None:
    Path(path).write_text(pda_to_text(p))


def pda_from_file(path) -> Pda:
    return pda_from_text(Path(path).read_text())
