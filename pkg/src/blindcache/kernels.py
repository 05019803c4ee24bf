"""Kernel backend selection.

The hot inner loops (row reduction, residual reduction, batched subset-rank
checks) exist twice: a compiled Cython core (`blindcache._ckernels`) and a
numpy fallback (`blindcache._kernels_py`) with identical signatures.  The
compiled core is used when the extension built; set BLINDCACHE_KERNELS=py or
BLINDCACHE_KERNELS=c to force a backend (forcing "c" raises if the extension
is missing).  `benchmarks/bench_kernels.py` compares the two.
"""

from __future__ import annotations

import os

from . import _kernels_py

_FORCE = os.environ.get("BLINDCACHE_KERNELS", "").strip().lower()

if _FORCE in ("py", "python"):
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        if _FORCE in ("c", "cython"):
            raise
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND

gf_mul_nt_vec = _kernels_py.gf_mul_nt_vec  # table construction helper, not hot
gf_mul_vec = _impl.gf_mul_vec
rref = _impl.rref
reduce_rows = _impl.reduce_rows
first_dependent = _impl.first_dependent
matvec = _impl.matvec


def available_backends() -> dict[str, object]:
    """Importable kernel modules keyed by backend name."""
    out = {"python": _kernels_py}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
