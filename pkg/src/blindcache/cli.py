"""Command-line surface: construct PDAs, build and validate encoders, run
end-to-end update rounds, print bound reports, and sweep parameters to CSV.

Exit codes: 0 success, 2 validation failure, 3 parameter error, 4 budget or
retry exhaustion.  All output is deterministic under --seed; repeated runs
with the same flags produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
from fractions import Fraction

from . import bounds as bounds_mod
from .bounds import BudgetExceededError, report as bounds_report
from .galois import field_new
from .pda import (
    Pda,
    PdaError,
    pda_from_file,
    pda_grouping,
    pda_hypergraph,
    pda_mn,
    pda_to_file,
    pda_to_text,
    placement_of,
)
from .update_code import (
    RetryExhaustedError,
    UpdateProblem,
    encoder_mds,
    encoder_naive,
    encoder_to_file,
    encoder_vandermonde,
    mds_codelength,
    simulate_round,
    validate_encoder,
    vandermonde_codelength,
)

DEFAULT_SEED = 1729
DEFAULT_FIELD_BITS = 16

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_PARAM = 3
EXIT_BUDGET = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the exit-code contract wants 3.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(EXIT_PARAM, message)


def _add_family_args(p: argparse.ArgumentParser, with_file: bool = True) -> None:
    fams = ["mn", "hypergraph", "grouping"] + (["file"] if with_file else [])
    p.add_argument("--family", required=True, choices=fams)
    p.add_argument("--K", type=int, help="node count (mn)")
    p.add_argument("--t", type=int, help="subset size (mn)")
    p.add_argument("--n", type=int, help="universe size (hypergraph)")
    p.add_argument("--a", type=int, help="subfile subset size (hypergraph)")
    p.add_argument("--b", type=int, help="node subset size (hypergraph)")
    p.add_argument("--q", type=int, help="alphabet size (grouping)")
    p.add_argument("--m", type=int, help="vector length (grouping)")
    if with_file:
        p.add_argument("--in", dest="infile", help="PDA file (family=file)")


def _need(args, names: list[str]) -> list[int]:
    vals = []
    for n in names:
        v = getattr(args, n)
        if v is None:
            raise CliError(EXIT_PARAM, f"--family {args.family} requires --{n}")
        vals.append(v)
    return vals


def _build_pda(args) -> tuple[Pda, tuple | None]:
    """(pda, family hint); file-loaded arrays carry no hint."""
    fam = args.family
    try:
        if fam == "mn":
            K, t = _need(args, ["K", "t"])
            return pda_mn(K, t), ("mn", K, t)
        if fam == "hypergraph":
            n, a, b = _need(args, ["n", "a", "b"])
            return pda_hypergraph(n, a, b), ("hypergraph", n, a, b)
        if fam == "grouping":
            q, m = _need(args, ["q", "m"])
            return pda_grouping(q, m), ("grouping", q, m)
    except PdaError as e:
        raise CliError(EXIT_PARAM, str(e)) from e
    if args.infile is None:
        raise CliError(EXIT_PARAM, "--family file requires --in")
    try:
        return pda_from_file(args.infile), None
    except FileNotFoundError as e:
        raise CliError(EXIT_PARAM, str(e)) from e
    except PdaError as e:
        raise CliError(EXIT_INVALID, f"invalid PDA: {e}") from e


def _build_problem(args) -> tuple[UpdateProblem, tuple | None]:
    p, hint = _build_pda(args)
    if not 1 <= args.field_bits <= 32:
        raise CliError(EXIT_PARAM, "--field-bits must be in 1..32")
    if args.epsilon < 1:
        raise CliError(EXIT_PARAM, "--epsilon must be >= 1")
    problem = UpdateProblem(
        placement=placement_of(p), epsilon=args.epsilon, field=field_new(args.field_bits)
    )
    return problem, hint


def _build_encoder(problem: UpdateProblem, args):
    if args.method == "naive":
        return encoder_naive(problem)
    if args.method == "mds":
        try:
            return encoder_mds(problem)
        except ValueError as e:
            raise CliError(EXIT_PARAM, str(e)) from e
    rng = random.Random(args.seed)
    try:
        enc, _ = encoder_vandermonde(problem, rng, max_retries=args.max_retries,
                                     seed=args.seed)
    except ValueError as e:
        raise CliError(EXIT_PARAM, str(e)) from e
    return enc


# -- subcommands -----------------------------------------------------------------


def cmd_pda(args) -> int:
    p, _ = _build_pda(args)
    sys.stdout.write(pda_to_text(p))
    s = p.S if p.S is not None else "-"
    r = p.r if p.r is not None else "-"
    print(f"K={p.K} F={p.F} Z={p.Z} S={s} r={r} "
          f"row_regular={p.row_regular} distinct_supports={p.distinct_supports} valid=True")
    if args.out:
        pda_to_file(p, args.out)
    return EXIT_OK


def cmd_code(args) -> int:
    problem, _ = _build_problem(args)
    enc = _build_encoder(problem, args)
    res = validate_encoder(enc, problem)
    if not res.ok:
        print(f"encoder failed validation, witness {res.witness}", file=sys.stderr)
        return EXIT_INVALID
    print(f"method={enc.method} l={enc.codelength} cost_bits={enc.cost_bits()} "
          f"field={problem.field.descriptor()} retries={enc.retries} valid=True")
    if args.out:
        encoder_to_file(enc, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    problem, _ = _build_problem(args)
    pl = problem.placement
    if args.method != "naive" and pl.Z <= 2 * args.epsilon:
        raise CliError(
            EXIT_PARAM,
            f"Z={pl.Z} <= 2*epsilon={2 * args.epsilon}: no scheme can beat the "
            "full broadcast, use --method naive",
        )
    enc = _build_encoder(problem, args)
    res = validate_encoder(enc, problem)
    if not res.ok:
        print(f"encoder failed validation, witness {res.witness}", file=sys.stderr)
        return EXIT_INVALID
    ok_rounds = 0
    total_bits = 0
    for trial in range(args.trials):
        rng = random.Random(args.seed + trial)
        rep = simulate_round(problem, enc, rng, mode=args.mode)
        ok_rounds += int(rep.all_ok)
        total_bits += rep.cost_bits
    mean_cost = total_bits / args.trials if args.trials else 0.0
    print(f"method={enc.method} mode={args.mode} rounds={args.trials} "
          f"success={ok_rounds}/{args.trials} mean_cost_bits={mean_cost:.1f}")
    if ok_rounds != args.trials:
        print("decode failures on a validated encoder indicate a bug", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def cmd_bounds(args) -> int:
    problem, hint = _build_problem(args)
    rep = bounds_report(problem, hint)
    print(rep.format_table())
    for key in sorted(rep.diagnostics):
        print(f"diagnostic {key} = {rep.diagnostics[key]}")
    return EXIT_OK


def _parse_range(text: str) -> list[int]:
    parts = text.split(":")
    if len(parts) not in (2, 3) or not all(p.lstrip("-").isdigit() for p in parts):
        raise CliError(EXIT_PARAM, f"bad range {text!r}, expected A:B or A:B:STEP")
    lo, hi = int(parts[0]), int(parts[1])
    step = int(parts[2]) if len(parts) == 3 else 1
    if step < 1 or hi < lo:
        raise CliError(EXIT_PARAM, f"bad range {text!r}")
    return list(range(lo, hi + 1, step))


SWEEP_COLUMNS = [
    "family", "params", "epsilon", "K", "F", "Z", "r",
    "lower_best", "upper_best", "l_naive", "l_mds", "l_vandermonde",
    "exact", "ratio",
]


def _sweep_row(family: tuple, epsilon: int, field_bits: int) -> dict:
    kind = family[0]
    if kind == "mn":
        p = pda_mn(family[1], family[2])
    elif kind == "hypergraph":
        p = pda_hypergraph(family[1], family[2], family[3])
    else:
        p = pda_grouping(family[1], family[2])
    pl = placement_of(p)
    problem = UpdateProblem(placement=pl, epsilon=epsilon, field=field_new(field_bits))
    rep = bounds_report(problem, family)
    l_vand = ""
    if pl.row_regular and pl.distinct_supports:
        l_vand = vandermonde_codelength(pl.K, pl.r, epsilon)
    return {
        "family": kind,
        "params": "/".join(str(x) for x in family[1:]),
        "epsilon": epsilon,
        "K": pl.K,
        "F": pl.F,
        "Z": pl.Z,
        "r": pl.r,
        "lower_best": rep.best_lower,
        "upper_best": rep.best_upper,
        "l_naive": pl.F,
        "l_mds": mds_codelength(pl.F, pl.Z, epsilon),
        "l_vandermonde": l_vand,
        "exact": rep.exact.value if rep.exact is not None else "",
        "ratio": float(rep.gap_ratio),
    }


def cmd_sweep(args) -> int:
    if args.family == "file":
        raise CliError(EXIT_PARAM, "sweep works on constructed families only")
    rows = []
    if args.epsilons:
        _, hint = _build_pda(args)
        for eps in _parse_range(args.epsilons):
            if eps < 1:
                raise CliError(EXIT_PARAM, "epsilon range must stay >= 1")
            rows.append(_sweep_row(hint, eps, args.field_bits))
    elif args.Ks:
        if args.family != "mn":
            raise CliError(EXIT_PARAM, "--Ks sweeps the mn family; use --epsilons")
        if args.beta is not None:
            try:
                beta = Fraction(args.beta)
            except (ValueError, ZeroDivisionError):
                raise CliError(EXIT_PARAM, f"bad --beta {args.beta!r}") from None
            for K in _parse_range(args.Ks):
                t = beta * K
                if t.denominator != 1:
                    raise CliError(EXIT_PARAM, f"beta*K is not an integer at K={K}")
                rows.append(_sweep_row(("mn", K, int(t)), args.epsilon, args.field_bits))
        elif args.t is not None:
            for K in _parse_range(args.Ks):
                rows.append(_sweep_row(("mn", K, args.t), args.epsilon, args.field_bits))
        else:
            raise CliError(EXIT_PARAM, "--Ks needs --beta or --t")
    elif args.ms:
        if args.family != "grouping":
            raise CliError(EXIT_PARAM, "--ms sweeps the grouping family")
        (q,) = _need(args, ["q"])
        for m in _parse_range(args.ms):
            rows.append(_sweep_row(("grouping", q, m), args.epsilon, args.field_bits))
    else:
        raise CliError(EXIT_PARAM, "sweep needs one of --epsilons, --Ks, --ms")

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow(row)
    finally:
        if args.out:
            out.close()
    return EXIT_OK


# -- wiring ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="blindcache",
                  description="PDA-based blind cache-update codes over GF(2^b)")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pda", help="construct or validate a placement delivery array")
    _add_family_args(p)
    p.add_argument("--out", help="write the PDA to this file")
    p.set_defaults(func=cmd_pda)

    p = sub.add_parser("code", help="build and validate an encoder matrix")
    _add_family_args(p)
    p.add_argument("--epsilon", type=int, required=True)
    p.add_argument("--method", choices=["naive", "mds", "vandermonde"], default="vandermonde")
    p.add_argument("--field-bits", type=int, default=DEFAULT_FIELD_BITS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--max-retries", type=int, default=32)
    p.add_argument("--out", help="write the encoder to this file")
    p.set_defaults(func=cmd_code)

    p = sub.add_parser("simulate", help="run end-to-end update or bnsi rounds")
    _add_family_args(p)
    p.add_argument("--epsilon", type=int, required=True)
    p.add_argument("--method", choices=["naive", "mds", "vandermonde"], default="vandermonde")
    p.add_argument("--field-bits", type=int, default=DEFAULT_FIELD_BITS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--max-retries", type=int, default=32)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--mode", choices=["update", "bnsi"], default="update")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="print the bound report for one problem")
    _add_family_args(p)
    p.add_argument("--epsilon", type=int, required=True)
    p.add_argument("--field-bits", type=int, default=DEFAULT_FIELD_BITS)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="CSV of bounds and scheme costs over a range")
    _add_family_args(p, with_file=False)
    p.add_argument("--epsilon", type=int, default=1)
    p.add_argument("--epsilons", help="epsilon range A:B[:STEP]")
    p.add_argument("--Ks", help="mn node-count range A:B[:STEP]")
    p.add_argument("--ms", help="grouping vector-length range A:B[:STEP]")
    p.add_argument("--beta", help="caching ratio t/K for --Ks sweeps, e.g. 1/2")
    p.add_argument("--field-bits", type=int, default=DEFAULT_FIELD_BITS)
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_sweep)

    return top


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (RetryExhaustedError, BudgetExceededError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (PdaError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARAM
    except bounds_mod.BoundConsistencyError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
