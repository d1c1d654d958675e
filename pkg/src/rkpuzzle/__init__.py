"""Exact uniqueness analysis for Radon-Kaczmarz line-sum puzzles."""

from .lattice import (
    ClueMatrix,
    LatticeDims,
    Line,
    Slope,
    build_coefficient_matrix,
    enumerate_lines,
    parse_slope,
    reduce_slope,
    slope_at,
    slope_prefix,
)
from .linalg import LinearSolution, NullSpaceBasis, RationalMatrix, nullspace, rank, solve
from .uniqueness import (
    InvariantReport,
    SearchCapExceeded,
    UniquenessMask,
    entry_uniqueness_mask,
    invariants,
    is_globally_unique,
    search_table,
)

__version__ = "0.1.0"
