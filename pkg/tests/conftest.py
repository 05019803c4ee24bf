import numpy as np
import pytest

import blindcache as bc
from blindcache.matrix import Matrix
from blindcache.pda import STAR

# The (K=4, F=6, Z=3, S=4) array with subset row labels; the running example
# for most unit tests.
EXAMPLE2_ROW_LABELS = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
EXAMPLE2_COL_LABELS = [1, 2, 3, 4]
EXAMPLE2_GRID = [
    [STAR, STAR, 0, 1],
    [STAR, 0, STAR, 2],
    [STAR, 1, 2, STAR],
    [0, STAR, STAR, 3],
    [1, STAR, 3, STAR],
    [2, 3, STAR, STAR],
]

# A 5x6 binary encoder for that placement with epsilon = 1: identity on the
# first five subfiles plus an all-ones column.
EXAMPLE3_ROWS = [
    [1, 0, 0, 0, 0, 1],
    [0, 1, 0, 0, 0, 1],
    [0, 0, 1, 0, 0, 1],
    [0, 0, 0, 1, 0, 1],
    [0, 0, 0, 0, 1, 1],
]


@pytest.fixture(scope="session")
def gf2():
    return bc.field_new(1)


@pytest.fixture(scope="session")
def gf256():
    return bc.field_new(8)


@pytest.fixture(scope="session")
def gf2_16():
    return bc.field_new(16)


@pytest.fixture(scope="session")
def mn42():
    return bc.pda_mn(4, 2)


@pytest.fixture(scope="session")
def mn42_placement(mn42):
    return bc.placement_of(mn42)


@pytest.fixture(scope="session")
def example3_matrix(gf2, mn42_placement):
    return Matrix(gf2, EXAMPLE3_ROWS, mn42_placement.subfiles)


@pytest.fixture(scope="session")
def mn42_problem_gf2(mn42_placement, gf2):
    return bc.UpdateProblem(placement=mn42_placement, epsilon=1, field=gf2)


def subfile_positions(placement):
    return {f: i for i, f in enumerate(placement.subfiles)}


def cached_indices(placement, k):
    pos = subfile_positions(placement)
    return [pos[f] for f in sorted(placement.x[k])]


def all_binary_vectors(n):
    for bits in range(1 << n):
        yield np.array([(bits >> i) & 1 for i in range(n)], dtype=np.uint32)
