"""Linear encoders for the blind cache-update problem, their validity
criterion, and encode/decode for both the update and the noisy-side-
information framings.

The server holds only the updated file w+e (the old w is lost) and knows the
update touched at most epsilon subfiles.  A codeword c = H(w+e) lets node k
recover (w+e) restricted to its cached set X_k from c and its stale cache
w_{X_k}.  H is valid exactly when, for every node, no nonzero combination of
up to 2*epsilon columns indexed by X_k falls inside the span of the columns
indexed by the complement Y_k; the validator checks the equivalent per-subset
rank identity rank([H_A | H_Y]) = |A| + rank(H_Y) over all subsets A of X_k
of size min(2*epsilon, Z), which subsumes the smaller subsets.

Vectors indexed by a node's cached set are always ordered by sorted subfile
label, matching the canonical column order of submatrices.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Mapping

import numpy as np

from . import kernels
from .galois import Field, poly_coeffs_from_roots
from .matrix import Matrix, _solve_values, as_vector
from .pda import Placement


class DecodingError(RuntimeError):
    """No update pattern of weight <= epsilon explains the received codeword."""


class AmbiguousDecodingError(DecodingError):
    """Two different cache updates explain the codeword (the encoder is not
    valid for this problem); never silently resolved."""


class RetryExhaustedError(RuntimeError):
    """Every random draw failed validation; the field is too small."""


@dataclass(frozen=True)
class UpdateProblem:
    """A placement together with the update sparsity and the working field."""

    placement: Placement
    epsilon: int
    field: Field

    def __post_init__(self):
        if self.epsilon < 1:
            raise ValueError("epsilon must be >= 1 (nothing to update otherwise)")
        pl = self.placement
        if any(len(pl.x[k]) != pl.Z for k in pl.nodes):
            raise ValueError("placement is inconsistent: |X_k| != Z for some node")


@dataclass(frozen=True)
class EncoderMatrix:
    """An l x F encoder with its construction tag."""

    H: Matrix
    method: str  # "naive" | "mds" | "vandermonde"
    epsilon: int
    seed: int | None = None
    retries: int = 0  # failed draws before the returned one (vandermonde)

    @property
    def codelength(self) -> int:
        return self.H.rows

    def cost_bits(self) -> int:
        return self.H.rows * self.H.field.b


@dataclass(frozen=True)
class VandermondeScalars:
    """The random scalars a[(k, m)], m in 1..2*epsilon, one set per node."""

    a: Mapping
    epsilon: int

    def root_values(self, i_f) -> list[int]:
        """The scalars of the nodes in i_f, node-sorted; the roots of one
        encoder column's polynomial."""
        return [
            self.a[(k, m)]
            for k in sorted(i_f)
            for m in range(1, 2 * self.epsilon + 1)
        ]


@dataclass(frozen=True)
class FileState:
    """An old file and an update of bounded weight, indexed like the sorted
    subfile labels."""

    w: np.ndarray
    e: np.ndarray
    epsilon: int

    def __post_init__(self):
        if int(np.count_nonzero(self.e)) > self.epsilon:
            raise ValueError("update vector heavier than epsilon")

    @property
    def updated(self) -> np.ndarray:
        return self.w ^ self.e


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    witness: tuple | None = None  # (node label, tuple of subfile labels)

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class RoundReport:
    method: str
    mode: str  # "update" | "bnsi"
    codelength: int
    cost_bits: int
    user_ok: Mapping
    all_ok: bool


def _matrix_of(h) -> Matrix:
    return h.H if isinstance(h, EncoderMatrix) else h


def _column_positions(H: Matrix, labels) -> np.ndarray:
    pos = {lab: j for j, lab in enumerate(H.col_labels)}
    return np.array([pos[lab] for lab in labels], dtype=np.intp)


def _check_labels(H: Matrix, problem: UpdateProblem) -> None:
    if H.field != problem.field:
        raise ValueError("encoder field differs from the problem field")
    if H.col_labels is None or set(H.col_labels) != set(problem.placement.subfiles):
        raise ValueError("encoder column labels do not match the subfile set")


# -- constructions -------------------------------------------------------------


def encoder_naive(problem: UpdateProblem) -> EncoderMatrix:
    """Broadcast the whole updated file: H is the F x F identity."""
    labels = problem.placement.subfiles
    H = Matrix.identity(problem.field, problem.placement.F, labels)
    return EncoderMatrix(H=H, method="naive", epsilon=problem.epsilon)


def mds_codelength(F: int, Z: int, epsilon: int) -> int:
    return F - max(Z - 2 * epsilon, 0)


def encoder_mds(problem: UpdateProblem) -> EncoderMatrix:
    """Parity-check of a maximum-distance-separable code of length F and
    dimension (Z - 2*epsilon)^+, so every l columns are independent.

    Realized as the l x F moment matrix H[i][j] = alpha_j^i over the first F
    field elements in value order; needs q >= F.
    """
    pl = problem.placement
    F, Z, eps = pl.F, pl.Z, problem.epsilon
    fld = problem.field
    if fld.q < F:
        raise ValueError(f"field too small for the parity-check scheme: q={fld.q} < F={F}")
    l = mds_codelength(F, Z, eps)
    data = np.zeros((l, F), dtype=np.uint32)
    for j in range(F):
        acc = 1
        for i in range(l):
            data[i, j] = acc
            acc = fld.mul(acc, j)
    H = Matrix(fld, data, pl.subfiles)
    return EncoderMatrix(H=H, method="mds", epsilon=eps)


def vandermonde_codelength(K: int, r: int, epsilon: int) -> int:
    return 2 * epsilon * (K - r) + 1


def encoder_vandermonde(
    problem: UpdateProblem,
    rng: random.Random,
    max_retries: int = 32,
    seed: int | None = None,
) -> tuple[EncoderMatrix, VandermondeScalars]:
    """Random subspace-intersection construction of codelength 2e(K-r)+1.

    Each node gets 2*epsilon uniform scalars; the column for subfile f is the
    coefficient vector (lowest degree first, hence monic with last entry 1) of
    the polynomial whose roots are all scalars of the nodes not caching f.  A
    draw is discarded early if any root multiset has a repeat and redrawn
    until the validator passes; persistent failure means the field is too
    small for the failure probability to be negligible.
    """
    pl = problem.placement
    if not pl.row_regular:
        raise ValueError("the random construction needs a row-regular placement")
    if not pl.distinct_supports:
        raise ValueError("the random construction needs pairwise distinct row supports")
    fld = problem.field
    eps = problem.epsilon
    l = vandermonde_codelength(pl.K, pl.r, eps)
    ms = range(1, 2 * eps + 1)
    last_witness = None
    for attempt in range(max_retries):
        a = {(k, m): fld.random_value(rng) for k in pl.nodes for m in ms}
        scalars = VandermondeScalars(a=a, epsilon=eps)
        roots = {f: scalars.root_values(pl.i_f[f]) for f in pl.subfiles}
        if any(len(set(rv)) != len(rv) for rv in roots.values()):
            continue
        data = np.zeros((l, pl.F), dtype=np.uint32)
        for j, f in enumerate(pl.subfiles):
            data[:, j] = poly_coeffs_from_roots(fld, roots[f])
        H = Matrix(fld, data, pl.subfiles)
        res = validate_encoder(H, problem)
        if res.ok:
            enc = EncoderMatrix(H=H, method="vandermonde", epsilon=eps,
                                seed=seed, retries=attempt)
            return enc, scalars
        last_witness = res.witness
    raise RetryExhaustedError(
        f"no valid draw in {max_retries} attempts over GF(2^{fld.b}) "
        f"(last witness {last_witness}); raise the field degree"
    )


# -- validity -------------------------------------------------------------------


def validate_encoder(h, problem: UpdateProblem) -> ValidationResult:
    """Decide validity via the per-subset rank identity.

    For every node k and every subset A of X_k with |A| = min(2*epsilon, Z),
    checks rank([H_A | H_{Y_k}]) = |A| + rank(H_{Y_k}); the first failing
    (k, A) is returned as a witness.  Columns of X_k are reduced against a
    row-reduced basis of the Y_k column space and compressed to coordinates,
    then every subset is eliminated in the kernel backend.
    """
    H = _matrix_of(h)
    _check_labels(H, problem)
    pl = problem.placement
    spec = problem.field.kernel_spec()
    mu = min(2 * problem.epsilon, pl.Z)
    if mu == 0:
        return ValidationResult(True)
    vals = H.values()
    subsets = np.array(list(combinations(range(pl.Z), mu)), dtype=np.int64)
    for k in pl.nodes:
        xlabs = sorted(pl.x[k])
        ylabs = sorted(pl.y[k])
        basis = np.ascontiguousarray(vals[:, _column_positions(H, ylabs)].T)
        ry, ypiv = kernels.rref(basis, spec)
        residuals = np.ascontiguousarray(vals[:, _column_positions(H, xlabs)].T)
        kernels.reduce_rows(residuals, np.ascontiguousarray(basis[:ry]), ypiv, spec)
        echelon = residuals.copy()
        d, xpiv = kernels.rref(echelon, spec)
        if d:
            coords = np.ascontiguousarray(residuals[:, xpiv])
        else:
            coords = np.zeros((pl.Z, 0), dtype=np.uint32)
        bad = kernels.first_dependent(coords, subsets, spec)
        if bad >= 0:
            return ValidationResult(False, (k, tuple(xlabs[i] for i in subsets[bad])))
    return ValidationResult(True)


# -- encoding and decoding -------------------------------------------------------


def encode(h, updated_file) -> np.ndarray:
    """The transmitted codeword c = H . (w + e)."""
    return _matrix_of(h).mul_vector(updated_file)


def decode_user(h, problem: UpdateProblem, c, k, cached,
                epsilon: int | None = None) -> np.ndarray:
    """Recover (w+e)_{X_k} from the codeword and the stale cache w_{X_k}.

    Forms the syndrome s = c + H_{X_k} w_{X_k} (characteristic 2, so the sign
    is immaterial) and scans candidate update supports T inside X_k by
    increasing size 0..epsilon; each candidate costs one consistent-solve of
    [H_T | H_{Y_k}] (x; y) = s, so the work is C(Z, <=epsilon) rank
    computations regardless of the field size.  For a valid encoder the
    recovered e_{X_k} agrees across every consistent support; disagreement, or
    a consistent fit whose update part is not pinned down, is reported as
    AmbiguousDecodingError.  No consistent support at all means the encoder is
    invalid or the true update was heavier than epsilon.

    `cached` and the result are ordered by sorted label of X_k.
    """
    H = _matrix_of(h)
    _check_labels(H, problem)
    if epsilon is None:
        epsilon = problem.epsilon
    pl = problem.placement
    fld = problem.field
    spec = fld.kernel_spec()
    xlabs = sorted(pl.x[k])
    ylabs = sorted(pl.y[k])
    Z = len(xlabs)
    hx = np.ascontiguousarray(H.values()[:, _column_positions(H, xlabs)])
    hy = np.ascontiguousarray(H.values()[:, _column_positions(H, ylabs)])
    cached_v = as_vector(fld, cached)
    if cached_v.shape[0] != Z:
        raise ValueError(f"cached vector must have length Z={Z}")
    c_v = as_vector(fld, c)
    if c_v.shape[0] != H.rows:
        raise ValueError("codeword length must equal the encoder row count")
    s = c_v ^ kernels.matvec(hx, cached_v, spec)

    ywork = hy.copy()
    ry, _ = kernels.rref(ywork, spec)

    recovered: np.ndarray | None = None
    for size in range(0, min(epsilon, Z) + 1):
        for T in combinations(range(Z), size):
            m = np.concatenate([hx[:, list(T)], hy], axis=1) if size else hy
            sol, _, rk = _solve_values(np.ascontiguousarray(m), s, fld)
            if sol is None:
                continue
            if rk < size + ry:
                raise AmbiguousDecodingError(
                    f"node {k!r}: update support {tuple(xlabs[i] for i in T)} admits "
                    "several update values; the encoder is not valid"
                )
            e_x = np.zeros(Z, dtype=np.uint32)
            if size:
                e_x[list(T)] = sol[:size]
            if recovered is None:
                recovered = e_x
            elif not np.array_equal(recovered, e_x):
                raise AmbiguousDecodingError(
                    f"node {k!r}: two different updates explain the codeword; "
                    "the encoder is not valid"
                )
    if recovered is None:
        raise DecodingError(
            f"node {k!r}: no update of weight <= {epsilon} explains the codeword"
        )
    return cached_v ^ recovered


def bnsi_decode(h, problem: UpdateProblem, c, k, noisy_side_info,
                epsilon: int | None = None) -> np.ndarray:
    """Recover the demanded subvector x_{X_k} from a noisy copy of itself.

    The noisy side information plays the role of the stale cache: the noise
    is an update supported inside X_k (negation is the identity in
    characteristic 2), so the update decoder returns side info + correction,
    which is exactly x_{X_k}.
    """
    return decode_user(h, problem, c, k, noisy_side_info, epsilon)


# -- simulation -------------------------------------------------------------------


def sample_file_state(problem: UpdateProblem, rng: random.Random,
                      exact_weight: bool = True) -> FileState:
    """Uniform old file plus an update with uniform support and uniform
    nonzero values; support size is exactly epsilon (the worst case) unless
    exact_weight is False, then uniform over 0..epsilon."""
    pl = problem.placement
    fld = problem.field
    w = np.array([fld.random_value(rng) for _ in range(pl.F)], dtype=np.uint32)
    size = min(problem.epsilon, pl.F)
    if not exact_weight:
        size = rng.randint(0, size)
    e = np.zeros(pl.F, dtype=np.uint32)
    for i in sorted(rng.sample(range(pl.F), size)):
        e[i] = 1 + rng.randrange(fld.q - 1)
    return FileState(w=w, e=e, epsilon=problem.epsilon)


def simulate_round(problem: UpdateProblem, encoder, rng: random.Random,
                   mode: str = "update", exact_weight: bool = True) -> RoundReport:
    """One end-to-end round: draw, encode, decode at all K nodes, compare.

    `encoder` is an EncoderMatrix or one of the method names "naive", "mds",
    "vandermonde" (the random method consumes the rng).  In "bnsi" mode each
    node gets its own independent noise on its side information instead of a
    shared file update.
    """
    if isinstance(encoder, str):
        if encoder == "naive":
            encoder = encoder_naive(problem)
        elif encoder == "mds":
            encoder = encoder_mds(problem)
        elif encoder == "vandermonde":
            encoder, _ = encoder_vandermonde(problem, rng)
        else:
            raise ValueError(f"unknown encoder method {encoder!r}")
    elif isinstance(encoder, Matrix):
        encoder = EncoderMatrix(H=encoder, method="external", epsilon=problem.epsilon)
    if mode not in ("update", "bnsi"):
        raise ValueError(f"unknown mode {mode!r}")
    pl = problem.placement
    fld = problem.field
    label_pos = {f: i for i, f in enumerate(pl.subfiles)}
    user_ok = {}

    if mode == "update":
        state = sample_file_state(problem, rng, exact_weight)
        c = encode(encoder, state.updated)
        for k in pl.nodes:
            idx = [label_pos[f] for f in sorted(pl.x[k])]
            want = state.updated[idx]
            try:
                got = decode_user(encoder, problem, c, k, state.w[idx])
                user_ok[k] = bool(np.array_equal(got, want))
            except DecodingError:
                user_ok[k] = False
    else:
        x = np.array([fld.random_value(rng) for _ in range(pl.F)], dtype=np.uint32)
        c = encode(encoder, x)
        size_cap = min(problem.epsilon, pl.Z)
        for k in pl.nodes:
            idx = [label_pos[f] for f in sorted(pl.x[k])]
            want = x[idx]
            size = size_cap if exact_weight else rng.randint(0, size_cap)
            noise = np.zeros(pl.Z, dtype=np.uint32)
            for i in sorted(rng.sample(range(pl.Z), size)):
                noise[i] = 1 + rng.randrange(fld.q - 1)
            try:
                got = bnsi_decode(encoder, problem, c, k, want ^ noise)
                user_ok[k] = bool(np.array_equal(got, want))
            except DecodingError:
                user_ok[k] = False

    return RoundReport(
        method=encoder.method,
        mode=mode,
        codelength=encoder.codelength,
        cost_bits=encoder.cost_bits(),
        user_ok=user_ok,
        all_ok=all(user_ok.values()),
    )


# -- witness to counterexample -----------------------------------------------------


def counterexample_from_witness(h, problem: UpdateProblem, witness: tuple):
    """Turn a validator witness (k, A) into two indistinguishable worlds.

    Returns (k, (w1, e1), (w2, e2)) with w1_{X_k} = w2_{X_k}, both updates of
    weight <= epsilon, identical codewords, but different updated caches at
    node k; any decoder must fail on at least one of the two.  Vectors are
    indexed like the sorted subfile labels.
    """
    H = _matrix_of(h)
    _check_labels(H, problem)
    pl = problem.placement
    fld = problem.field
    spec = fld.kernel_spec()
    k, alabs = witness
    alabs = sorted(alabs)
    apos = _column_positions(H, alabs)
    ylabs = sorted(pl.y[k])
    ypos = _column_positions(H, ylabs)
    vals = H.values()

    # Nonzero x with H_A x inside the span of H_Y: reduce the A columns
    # against a basis of the Y column space and read a null combination of
    # the residuals.
    basis = np.ascontiguousarray(vals[:, ypos].T)
    ry, ypiv = kernels.rref(basis, spec)
    residuals = np.ascontiguousarray(vals[:, apos].T)
    kernels.reduce_rows(residuals, np.ascontiguousarray(basis[:ry]), ypiv, spec)
    x = _nullspace_vector(np.ascontiguousarray(residuals.T), fld)
    if x is None:
        raise ValueError("witness does not violate the rank identity")

    v = kernels.matvec(np.ascontiguousarray(vals[:, apos]), x, spec)
    y, _, _ = _solve_values(np.ascontiguousarray(vals[:, ypos]), v, fld)
    assert y is not None  # guaranteed: the residual combination vanished

    label_pos = {f: i for i, f in enumerate(pl.subfiles)}
    eps = problem.epsilon
    support = [i for i in range(len(alabs)) if x[i]]
    first = support[:eps]
    F = pl.F
    e1 = np.zeros(F, dtype=np.uint32)
    for i in first:
        e1[label_pos[alabs[i]]] = x[i]
    x_full = np.zeros(F, dtype=np.uint32)
    for i in support:
        x_full[label_pos[alabs[i]]] = x[i]
    e2 = e1 ^ x_full
    w1 = np.zeros(F, dtype=np.uint32)
    w2 = np.zeros(F, dtype=np.uint32)
    for j, f in enumerate(ylabs):
        w2[label_pos[f]] = y[j]
    return k, (w1, e1), (w2, e2)


def _nullspace_vector(a: np.ndarray, fld: Field) -> np.ndarray | None:
    """Some nonzero x with a.x = 0, or None when the columns are independent."""
    rows, cols = a.shape
    work = a.copy()
    rk, pivots = kernels.rref(work, fld.kernel_spec())
    if rk == cols:
        return None
    free = next(j for j in range(cols) if j not in set(int(p) for p in pivots))
    x = np.zeros(cols, dtype=np.uint32)
    x[free] = 1
    for i, p in enumerate(pivots):
        x[p] = work[i, free]  # char 2: moving to the other side keeps the value
    return x


# -- serialization -------------------------------------------------------------------


def encoder_to_text(enc: EncoderMatrix) -> str:
    seed = enc.seed if enc.seed is not None else "-"
    meta = f"method={enc.method} epsilon={enc.epsilon} seed={seed}\n"
    return enc.H.to_text() + meta


def encoder_from_text(text: str) -> EncoderMatrix:
    lines = text.splitlines()
    meta = None
    body = []
    for ln in lines:
        if ln.startswith("method="):
            meta = ln
        else:
            body.append(ln)
    if meta is None:
        raise ValueError("missing encoder metadata line")
    fields = dict(tok.split("=", 1) for tok in meta.split())
    H = Matrix.from_text("\n".join(body))
    seed = None if fields.get("seed") in (None, "-") else int(fields["seed"])
    return EncoderMatrix(H=H, method=fields["method"],
                         epsilon=int(fields["epsilon"]), seed=seed)


def encoder_to_file(enc: EncoderMatrix, path) -> None:
    Path(path).write_text(encoder_to_text(enc))


def encoder_from_file(path) -> EncoderMatrix:
    return encoder_from_text(Path(path).read_text())


def vector_to_hex(fld: Field, vec) -> str:
    """Codeword serialization: space-separated fixed-width hex elements."""
    v = as_vector(fld, vec)
    return " ".join(fld.format_value(int(t)) for t in v)


def vector_from_hex(fld: Field, text: str) -> np.ndarray:
    return np.array([fld.parse_value(t) for t in text.split()], dtype=np.uint32)
