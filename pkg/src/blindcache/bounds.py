"""Lower bounds, exact cases, and upper bounds on the optimal linear
codelength of a cache-update problem, plus a tiny-instance exhaustive oracle.

Every bound here is a pure integer computation on the placement parameters;
the asymptotic ratio statements are reported as labeled diagnostics, never
asserted on finite instances.  `report` aggregates everything applicable,
cross-checks that no lower bound exceeds any upper bound (a violation is an
implementation bug, so it aborts), and flags exactness when the two meet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Mapping, Sequence

from .galois import field_new
from .matrix import Matrix
from .pda import Placement
from .update_code import (
    UpdateProblem,
    mds_codelength,
    validate_encoder,
    vandermonde_codelength,
)


class BoundConsistencyError(RuntimeError):
    """A lower bound exceeded an upper bound; indicates a bug, never a state."""


class BudgetExceededError(RuntimeError):
    """The exhaustive oracle would enumerate more matrices than allowed."""


@dataclass(frozen=True)
class BoundEntry:
    name: str
    value: int
    provenance: str


@dataclass(frozen=True)
class BoundReport:
    lower_bounds: tuple[BoundEntry, ...]
    upper_bounds: tuple[BoundEntry, ...]
    exact: BoundEntry | None
    gap_ratio: Fraction
    diagnostics: Mapping

    @property
    def best_lower(self) -> int:
        return max(e.value for e in self.lower_bounds)

    @property
    def best_upper(self) -> int:
        return min(e.value for e in self.upper_bounds)

    def format_table(self) -> str:
        rows = [("side", "name", "value", "provenance")]
        for e in sorted(self.lower_bounds, key=lambda e: -e.value):
            rows.append(("lower", e.name, str(e.value), e.provenance))
        for e in sorted(self.upper_bounds, key=lambda e: e.value):
            rows.append(("upper", e.name, str(e.value), e.provenance))
        widths = [max(len(r[i]) for r in rows) for i in range(3)]
        lines = [
            "  ".join(cell.ljust(widths[i]) if i < 3 else cell for i, cell in enumerate(r))
            for r in rows
        ]
        if self.exact is not None:
            lines.append(f"exact optimum: {self.exact.value} ({self.exact.provenance})")
        else:
            lines.append(f"gap ratio (best upper / best lower): {self.gap_ratio}")
        return "\n".join(lines)


# -- general bounds ---------------------------------------------------------------


def upper_bound_joint(K: int, F: int, Z: int, r: int, epsilon: int,
                      eq1_holds: bool) -> int:
    """min of the random-construction and parity-check codelengths.

    The 2e(K-r)+1 term applies only when every row's star support is distinct
    (eq1_holds); the F-(Z-2e)^+ term always applies.
    """
    if r * F != K * Z:
        raise ValueError(f"inconsistent parameters: r*F={r * F} but K*Z={K * Z}")
    terms = [mds_codelength(F, Z, epsilon)]
    if eq1_holds:
        terms.append(vandermonde_codelength(K, r, epsilon))
    return min(terms)


def exact_cases(F: int, Z: int, epsilon: int) -> BoundEntry | None:
    """The near-extreme placements where the optimum is pinned down exactly."""
    e2 = 2 * epsilon
    if Z <= e2:
        return BoundEntry("near-extreme", F,
                          "caches of at most 2e subfiles force a full broadcast")
    if Z == F:
        return BoundEntry("near-extreme", e2, "full caching meets the weight floor 2e")
    if Z == F - 1:
        return BoundEntry("near-extreme", e2 + 1, "one uncached subfile raises the floor by 1")
    if Z == F - 2:
        return BoundEntry("near-extreme", e2 + 2, "two uncached subfiles raise the floor by 2")
    return None


def bound_xs(placement: Placement, epsilon: int) -> int:
    """Union of the small caches plus the weight floor.

    With uniform cache size Z the small-cache set is either empty or every
    node, giving 2e when Z > 2e and F otherwise.
    """
    e2 = 2 * epsilon
    small = [k for k in placement.nodes if len(placement.x[k]) <= e2]
    xs = set()
    for k in small:
        xs |= placement.x[k]
    return len(xs) + min(e2, placement.F - len(xs))


def bound_generic(placement: Placement, epsilon: int, seq: Sequence) -> int:
    """Chain bound: sum of capped new-subfile counts along a node sequence."""
    if len(set(seq)) != len(seq):
        raise ValueError("sequence nodes must be distinct")
    covered: set = set()
    total = 0
    for k in seq:
        if k not in placement.x:
            raise ValueError(f"unknown node {k!r}")
        fresh = placement.x[k] - covered
        total += min(2 * epsilon, len(fresh))
        covered |= placement.x[k]
    return total


def bound_generic_greedy(placement: Placement, epsilon: int) -> tuple[int, tuple]:
    """Chain bound along a greedily chosen sequence.

    Repeatedly appends the node contributing the most not-yet-covered
    subfiles (ties broken by smallest label) and stops when nothing new is
    left.  Always a valid chain-bound instantiation, never above the best
    sequence's value.
    """
    covered: set = set()
    seq: list = []
    remaining = set(placement.nodes)
    total = 0
    while remaining:
        best = None
        best_gain = -1
        for k in sorted(remaining):
            gain = len(placement.x[k] - covered)
            if gain > best_gain:
                best, best_gain = k, gain
        if best_gain == 0:
            break
        total += min(2 * epsilon, best_gain)
        covered |= placement.x[best]
        seq.append(best)
        remaining.discard(best)
    return total, tuple(seq)


def bound_generic_exhaustive(placement: Placement, epsilon: int) -> tuple[int, tuple]:
    """Best chain bound over every node permutation; K must stay tiny."""
    if placement.K > 8:
        raise ValueError("exhaustive sequence search is limited to K <= 8")
    best_val = -1
    best_seq: tuple = ()
    for perm in permutations(placement.nodes):
        v = bound_generic(placement, epsilon, perm)
        if v > best_val:
            best_val = v
            best_seq = perm
    return best_val, best_seq


# -- family-specific bounds --------------------------------------------------------


@dataclass(frozen=True)
class ShangguanBound:
    lower: int            # the window-chain sum
    closed_form: int | None
    a0: int | None
    exact_value: int | None  # set for the a = 1 subfamily


def _smallest_binom_at_least(k: int, target: int) -> int | None:
    """Smallest j with C(j, k) >= target, or None when it never happens."""
    if k == 0:
        return None if target > 1 else 0
    j = k
    while math.comb(j, k) < target:
        j += 1
    return j


def bound_shangguan(n: int, a: int, b: int, epsilon: int) -> ShangguanBound:
    """Chain lower bound for the intersecting-subsets family.

    Evaluates the window-chain sum 2e + sum_{j<n-b} min(2e, C(j, a-1)) exactly
    and, when the threshold index a0 (smallest with C(a0, a-1) >= 2e) fits,
    also the closed form 2e(n-b-a0+1) + C(a0, a); the two must agree.  For
    a = 1 the sum collapses to 2e + n - b, which the parity-check scheme
    meets, so the optimum is exact there.
    """
    if a < 1 or b < 1 or a + b > n:
        raise ValueError(f"need a, b >= 1 and a + b <= n, got n={n}, a={a}, b={b}")
    F = math.comb(n, a)
    Z = F - math.comb(n - b, a)
    e2 = 2 * epsilon
    if Z <= e2:
        raise ValueError("Z <= 2*epsilon: the optimum is F (see exact_cases)")
    sum_bound = e2 + sum(min(e2, math.comb(j, a - 1)) for j in range(n - b))
    a0 = _smallest_binom_at_least(a - 1, e2)
    closed = None
    if a0 is not None and a0 <= n - b:
        closed = e2 * (n - b - a0 + 1) + math.comb(a0, a)
        if closed != sum_bound:
            raise AssertionError(
                f"window-chain closed form {closed} != sum {sum_bound} "
                f"for (n={n}, a={a}, b={b}, e={epsilon})"
            )
    exact_value = None
    if a == 1:
        exact_value = e2 + n - b
        assert exact_value == sum_bound
    return ShangguanBound(lower=sum_bound, closed_form=closed, a0=a0,
                          exact_value=exact_value)


@dataclass(frozen=True)
class MnBound:
    lower: int
    a0: int | None
    exact: bool
    exact_value: int | None
    coarse_lower: int
    diagnostics: Mapping


def bound_mn(K: int, t: int, epsilon: int) -> MnBound:
    """Bounds for the subset-placement family (F = C(K,t), Z = C(K-1,t-1)).

    Small caches (Z <= 2e) pin the optimum at F.  Otherwise the window-chain
    bound applies with b = 1; when 2e <= t the threshold lands at a0 = t and
    the bound meets the random construction's 2e(K-t)+1, so the optimum is
    exact.  A coarser integer-root relaxation 2e(K-1-a') is also evaluated
    and checked to never beat the main bound.  Asymptotic ratio formulas for
    the sparse and dense regimes are attached as diagnostics only.
    """
    if not 1 <= t <= K:
        raise ValueError(f"need 1 <= t <= K, got t={t}, K={K}")
    F = math.comb(K, t)
    Z = math.comb(K - 1, t - 1)
    e2 = 2 * epsilon
    alpha = Fraction(epsilon, F)
    beta = Fraction(t, K)
    diagnostics = {"dense_ratio": _dense_ratio(beta, alpha)}
    if Z <= e2:
        return MnBound(lower=F, a0=None, exact=True, exact_value=F,
                       coarse_lower=0, diagnostics=diagnostics)
    sh = bound_shangguan(K, t, 1, epsilon)
    a0 = sh.a0
    assert a0 is not None and a0 <= K - 1
    exact = e2 <= t
    exact_value = None
    if exact:
        assert a0 == t
        exact_value = e2 * (K - t) + 1
        assert exact_value == sh.lower
    # Integer-root relaxation: smallest a' with (a'/(t-1))^(t-1) >= 2e,
    # evaluated without float powers.
    ap = 1
    while ap ** (t - 1) < (t - 1) ** (t - 1) * e2:
        ap += 1
    coarse = max(0, e2 * (K - 1 - ap))
    if coarse > sh.lower:
        raise AssertionError(f"coarse bound {coarse} beats the main bound {sh.lower}")
    diagnostics["sparse_ratio_bound"] = _mn_sparse_ratio(K, t, epsilon)
    return MnBound(lower=sh.lower, a0=a0, exact=exact, exact_value=exact_value,
                   coarse_lower=coarse, diagnostics=diagnostics)


def _dense_ratio(beta: Fraction, alpha: Fraction) -> float:
    # (1 - beta + 2*alpha) / (2*alpha): parity-check cost over the weight floor.
    return float((1 - beta + 2 * alpha) / (2 * alpha))


def _mn_sparse_ratio(K: int, t: int, epsilon: int) -> float:
    """Finite-K sparse-regime ratio bound on (2e(K-t)+1) / optimum.

    Infinite when the bracketed denominator clips at zero; meaningful only as
    a large-K trend, which is why it is reported and never asserted.
    """
    num = 1 - t / K + 1 / (2 * epsilon * K)
    den = 1 - 2 / K - 2 ** (1 / (t - 1)) * ((t - 1) / K) * epsilon ** (1 / (t - 1))
    if den <= 0:
        return math.inf
    return num / den


@dataclass(frozen=True)
class UvProfile:
    x: Mapping        # (u, v) -> new-subfile count
    order: tuple      # the fixed evaluation order of the (u, v) nodes
    u0: int | None
    v0: int | None


@dataclass(frozen=True)
class UvBound:
    lower: int               # full chain sum over the (u, v) order
    closed_form: int | None  # 2e(v0(m-1) + u0 + q - 2)
    exact_value: int | None  # set in the small-cache branch
    profile: UvProfile | None
    diagnostics: Mapping


def bound_uv(q: int, m: int, epsilon: int) -> UvBound:
    """Bounds for the coordinate-placement family on Z_q^m.

    Computes every new-subfile count x[(u,v)] = (q-v-1)^(u-1) (q-v)^(m-u)
    (with 0^0 = 1), checks the counts are nonincreasing along the fixed order
    and telescope to q^m, locates the first deficit position (u0, v0) with
    x < 2e, and returns both the full capped sum and its closed-form
    relaxation, which can never exceed the sum.  Sparse and dense regime
    ratios are attached as diagnostics.
    """
    if q < 2 or m < 2:
        raise ValueError(f"need q >= 2 and m >= 2, got q={q}, m={m}")
    F = q ** m
    Z = q ** (m - 1)
    e2 = 2 * epsilon
    alpha = Fraction(epsilon, F)
    diagnostics: dict = {
        "dense_ratio": float((1 - Fraction(1, q) + 2 * alpha) / (2 * alpha * q)),
    }
    gamma = epsilon ** (1 / m)
    if gamma < q - 1:
        diagnostics["sparse_ratio_limit"] = (q - 1) / (q - 1 - gamma)
    if q == 2 and gamma < 2:
        diagnostics["sparse_ratio_limit_q2"] = 1 / (1 - math.log2(gamma)) if gamma > 0 else 1.0
    if Z <= e2:
        return UvBound(lower=F, closed_form=None, exact_value=F, profile=None,
                       diagnostics=diagnostics)

    order = tuple((u, v) for v in range(q) for u in range(1, m + 1))
    x = {(u, v): (q - v - 1) ** (u - 1) * (q - v) ** (m - u) for (u, v) in order}
    seq = [x[uv] for uv in order]
    for i in range(1, len(seq)):
        if seq[i] > seq[i - 1]:
            raise AssertionError("new-subfile counts must be nonincreasing")
    for v in range(q):
        per_v = sum(x[(u, v)] for u in range(1, m + 1))
        if per_v != (q - v) ** m - (q - v - 1) ** m:
            raise AssertionError(f"per-v telescoping identity fails at v={v}")
    if sum(seq) != F:
        raise AssertionError("total new-subfile mass must be q^m")

    first = next(i for i, val in enumerate(seq) if val < e2)
    u0, v0 = order[first]
    if u0 <= 1:
        raise AssertionError("the first deficit position cannot sit at u0 = 1")
    if (q - v0) ** (m - 1) < e2 or (q - v0 - 1) ** (m - 1) >= e2:
        raise AssertionError("v0 falls outside its sandwich")

    full = sum(min(e2, val) for val in seq)
    closed = e2 * (v0 * (m - 1) + u0 + q - 2)
    if closed > full:
        raise AssertionError(f"closed form {closed} exceeds the full sum {full}")
    profile = UvProfile(x=x, order=order, u0=u0, v0=v0)
    return UvBound(lower=full, closed_form=closed, exact_value=None,
                   profile=profile, diagnostics=diagnostics)


# -- exhaustive oracle ---------------------------------------------------------------


def oracle_exhaustive_lopt(placement: Placement, epsilon: int, l_max: int,
                           budget: int = 1 << 26) -> tuple[int, Matrix] | None:
    """Minimal valid codelength over GF(2) by enumerating every matrix.

    Ground truth for tiny instances only: enumeration grows as 2^(l*F), so F
    is capped at 8 and l_max at 6, and a level is refused outright when it
    would exceed the enumeration budget.  Returns (l, witness) for the
    smallest l admitting a valid encoder, or None when none exists up to
    l_max.  The GF(2)-restricted optimum can exceed the all-fields optimum.
    """
    F = placement.F
    if F > 8 or l_max > 6 or l_max * F > 48:
        raise ValueError("oracle limited to F <= 8, l_max <= 6, l_max*F <= 48")
    fld = field_new(1)
    problem = UpdateProblem(placement=placement, epsilon=epsilon, field=fld)
    labels = placement.subfiles
    spent = 0
    for l in range(1, l_max + 1):
        count = 1 << (l * F)
        if spent + count > budget:
            raise BudgetExceededError(
                f"level l={l} needs {count} matrices, budget {budget - spent} left"
            )
        spent += count
        for code in range(count):
            grid = [[(code >> (i * F + j)) & 1 for j in range(F)] for i in range(l)]
            H = Matrix(fld, grid, labels)
            if validate_encoder(H, problem).ok:
                return l, H
    return None


# -- aggregation ------------------------------------------------------------------------


def report(problem: UpdateProblem, family: tuple | None = None) -> BoundReport:
    """Every applicable bound for one problem, cross-checked for consistency.

    `family` names the construction the placement came from, since distinct
    families can share star patterns at small sizes: ("mn", K, t),
    ("hypergraph", n, a, b) or ("grouping", q, m).  Exactness is declared when
    the best lower bound meets the best upper bound.
    """
    pl = problem.placement
    eps = problem.epsilon
    e2 = 2 * eps
    F, K, Z = pl.F, pl.K, pl.Z

    uppers = [BoundEntry("naive", F, "identity encoder")]
    uppers.append(BoundEntry("mds-parity", mds_codelength(F, Z, eps),
                             "parity-check of an MDS code"))
    if pl.row_regular and pl.distinct_supports:
        uppers.append(BoundEntry("subspace-random",
                                 vandermonde_codelength(K, pl.r, eps),
                                 "random subspace-intersection construction"))

    lowers = []
    ex = exact_cases(F, Z, eps)
    if ex is not None:
        lowers.append(ex)
    lowers.append(BoundEntry("small-cache-union", bound_xs(pl, eps),
                             "small caches union plus the weight floor"))
    greedy_val, greedy_seq = bound_generic_greedy(pl, eps)
    lowers.append(BoundEntry("node-chain-greedy", greedy_val,
                             f"chain bound, greedy sequence {greedy_seq}"))
    diagnostics: dict = {}
    if K <= 5:
        best_val, best_seq = bound_generic_exhaustive(pl, eps)
        lowers.append(BoundEntry("node-chain-best", best_val,
                                 f"chain bound, best of all {K}! sequences"))

    if family is not None:
        kind = family[0]
        if kind == "mn":
            _, mk, mt = family
            _require(pl, math.comb(mk, mt), mk, math.comb(mk - 1, mt - 1), family)
            mb = bound_mn(mk, mt, eps)
            lowers.append(BoundEntry("subset-chain", mb.lower,
                                     "window chain specialized to subset placement"))
            if mb.coarse_lower > 0:
                lowers.append(BoundEntry("subset-chain-coarse", mb.coarse_lower,
                                         "integer-root relaxation of the window chain"))
            diagnostics.update(mb.diagnostics)
        elif kind == "hypergraph":
            _, hn, ha, hb = family
            _require(pl, math.comb(hn, ha), math.comb(hn, hb),
                     math.comb(hn, ha) - math.comb(hn - hb, ha), family)
            if Z > e2:
                sh = bound_shangguan(hn, ha, hb, eps)
                lowers.append(BoundEntry("window-chain", sh.lower,
                                         "chain bound over consecutive index windows"))
        elif kind == "grouping":
            _, gq, gm = family
            _require(pl, gq ** gm, gq * (gm + 1), gq ** (gm - 1), family)
            uv = bound_uv(gq, gm, eps)
            if uv.profile is not None:
                lowers.append(BoundEntry("coordinate-chain", uv.lower,
                                         "chain bound over the coordinate node order"))
                lowers.append(BoundEntry(
                    "coordinate-chain-closed", uv.closed_form,
                    f"first-deficit closed form at (u0, v0) = "
                    f"({uv.profile.u0}, {uv.profile.v0})"))
            diagnostics.update(uv.diagnostics)
        else:
            raise ValueError(f"unknown family hint {family!r}")

    best_lower = max(e.value for e in lowers)
    best_upper = min(e.value for e in uppers)
    if best_lower > best_upper:
        raise BoundConsistencyError(
            f"lower bound {best_lower} exceeds upper bound {best_upper} on "
            f"(F={F}, K={K}, Z={Z}, e={eps}, family={family}); this is a bug"
        )
    exact = None
    if best_lower == best_upper:
        lo = next(e for e in lowers if e.value == best_lower)
        up = next(e for e in uppers if e.value == best_upper)
        exact = BoundEntry("exact", best_lower, f"{lo.name} meets {up.name}")
    return BoundReport(
        lower_bounds=tuple(lowers),
        upper_bounds=tuple(uppers),
        exact=exact,
        gap_ratio=Fraction(best_upper, best_lower),
        diagnostics=diagnostics,
    )


def _require(pl: Placement, F: int, K: int, Z: int, family: tuple) -> None:
    if (pl.F, pl.K, pl.Z) != (F, K, Z):
        raise ValueError(
            f"family hint {family!r} expects (F, K, Z) = {(F, K, Z)}, "
            f"placement has {(pl.F, pl.K, pl.Z)}"
        )
