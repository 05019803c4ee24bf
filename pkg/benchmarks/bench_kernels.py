"""Benchmark the compiled kernel backend against the numpy fallback.

Times the three hot kernels in isolation and a full encoder validation, on
both backends when both are importable:

    python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import random
import time
from itertools import combinations

import numpy as np

import blindcache as bc
from blindcache import kernels


def _timed(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_backend(name: str, impl, repeat: int) -> dict[str, float]:
    rng = np.random.default_rng(12345)
    out: dict[str, float] = {}

    f16 = bc.field_new(16)
    spec16 = f16.kernel_spec()
    m = rng.integers(0, f16.q, size=(96, 96)).astype(np.uint32)
    out["rref 96x96 gf2^16"] = _timed(
        lambda: impl.rref(np.ascontiguousarray(m.copy()), spec16), repeat)

    coords = rng.integers(0, f16.q, size=(35, 4)).astype(np.uint32)
    subsets = np.array(list(combinations(range(35), 4)), dtype=np.int64)
    out["first_dependent C(35,4) gf2^16"] = _timed(
        lambda: impl.first_dependent(np.ascontiguousarray(coords), subsets, spec16),
        repeat)

    f32 = bc.field_new(32)
    spec32 = f32.kernel_spec()
    coords32 = rng.integers(0, 1 << 32, size=(35, 4), dtype=np.uint64).astype(np.uint32)
    out["first_dependent C(35,4) gf2^32"] = _timed(
        lambda: impl.first_dependent(np.ascontiguousarray(coords32), subsets, spec32),
        repeat)

    # Full validation of a random-construction encoder on the largest
    # acceptance instance; exercises rref + reduce_rows + first_dependent.
    saved = (kernels.rref, kernels.reduce_rows, kernels.first_dependent,
             kernels.matvec, kernels.gf_mul_vec)
    kernels.rref = impl.rref
    kernels.reduce_rows = impl.reduce_rows
    kernels.first_dependent = impl.first_dependent
    kernels.matvec = impl.matvec
    kernels.gf_mul_vec = impl.gf_mul_vec
    try:
        pl = bc.placement_of(bc.pda_mn(8, 4))
        prob = bc.UpdateProblem(placement=pl, epsilon=2, field=f32)
        enc, _ = bc.encoder_vandermonde(prob, random.Random(11))
        out["validate mn(8,4) e=2 gf2^32"] = _timed(
            lambda: bc.validate_encoder(enc, prob), max(1, repeat // 3))
    finally:
        (kernels.rref, kernels.reduce_rows, kernels.first_dependent,
         kernels.matvec, kernels.gf_mul_vec) = saved
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3, help="best-of repetitions")
    args = ap.parse_args()

    backends = kernels.available_backends()
    print(f"available backends: {', '.join(backends)} (selected: {kernels.BACKEND})\n")
    results = {name: bench_backend(name, impl, args.repeat)
               for name, impl in backends.items()}

    keys = list(next(iter(results.values())))
    width = max(len(k) for k in keys)
    header = "kernel".ljust(width) + "".join(f"  {n:>12}" for n in results)
    if len(results) == 2:
        header += "  speedup"
    print(header)
    for k in keys:
        line = k.ljust(width)
        vals = [results[n][k] for n in results]
        for v in vals:
            line += f"  {v * 1e3:10.2f}ms"
        if len(vals) == 2 and vals[1] > 0:
            line += f"  {vals[0] / vals[1]:6.1f}x"
        print(line)


if __name__ == "__main__":
    main()
