"""Blind cache-update codes for PDA-based coded caching.

Construct placement delivery arrays, build and validate linear encoders over
GF(2^b), simulate blind update rounds end to end, and compute converse bounds
on the optimal communication cost.
"""

from .bounds import (
    BoundEntry,
    BoundReport,
    bound_generic,
    bound_generic_greedy,
    bound_mn,
    bound_shangguan,
    bound_uv,
    bound_xs,
    exact_cases,
    oracle_exhaustive_lopt,
    report,
    upper_bound_joint,
)
from .galois import Field, FieldElement, Polynomial, field_new, poly_from_roots, sample_uniform
from .kernels import BACKEND as KERNEL_BACKEND
from .matrix import Matrix, in_span, rank, solve_consistent, submatrix_cols
from .pda import (
    Pda,
    PdaError,
    Placement,
    pda_from_file,
    pda_grouping,
    pda_hypergraph,
    pda_mn,
    pda_to_file,
    pda_validate,
    placement_of,
)
from .update_code import (
    AmbiguousDecodingError,
    DecodingError,
    EncoderMatrix,
    FileState,
    RetryExhaustedError,
    RoundReport,
    UpdateProblem,
    ValidationResult,
    VandermondeScalars,
    bnsi_decode,
    decode_user,
    encode,
    encoder_mds,
    encoder_naive,
    encoder_vandermonde,
    simulate_round,
    validate_encoder,
)

__version__ = "0.1.0"
