"""Which cells of a clue system are forced, and how many slopes that takes.

Uniqueness is a property of the coefficient matrix alone: a cell is forced
exactly when every null vector vanishes on it.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .lattice import (
    Cell,
    ClueMatrix,
    LatticeDims,
    Slope,
    build_coefficient_matrix,
    enumerate_lines,
    slope_at,
)
from .linalg import NullSpaceBasis, RationalMatrix, RowReducer, bareiss_echelon

log = logging.getLogger(__name__)


class SearchCapExceeded(RuntimeError):
    """The slope scan hit its cap before the condition held.

    This says the cap was too small, nothing about the lattice itself.
    """


@dataclass(frozen=True)
class UniquenessMask:
    dims: LatticeDims
    unique: tuple[bool, ...]  # indexed like matrix columns

    def __getitem__(self, cell: Cell) -> bool:
        return self.unique[self.dims.index(cell)]

    @classmethod
    def from_cells(cls, dims: LatticeDims, cells: Iterable[Cell]) -> "UniquenessMask":
        flags = [False] * dims.size
        for cell in cells:
            flags[dims.index(cell)] = True
        return cls(dims, tuple(flags))

    def unique_cells(self) -> frozenset[Cell]:
        return frozenset(self.dims.cell_at(k) for k, u in enumerate(self.unique) if u)

    def all_unique(self) -> bool:
        return all(self.unique)

    def covers(self, cells: Iterable[Cell]) -> bool:
        return all(self[c] for c in cells)


@dataclass(frozen=True)
class BorderMask:
    dims: LatticeDims
    cells: frozenset[Cell]


def border_mask(dims: LatticeDims) -> BorderMask:
    return BorderMask(dims, dims.border())


def first_last_rows(dims: LatticeDims) -> tuple[list[Cell], list[Cell]]:
    return (
        [(i, 1) for i in range(1, dims.n + 1)],
        [(i, dims.m) for i in range(1, dims.n + 1)],
    )


def first_last_columns(dims: LatticeDims) -> tuple[list[Cell], list[Cell]]:
    return (
        [(1, j) for j in range(1, dims.m + 1)],
        [(dims.n, j) for j in range(1, dims.m + 1)],
    )


def clue_rows(cm: ClueMatrix) -> Iterator[dict[int, int]]:
    for support in cm.support:
        yield dict.fromkeys(support, 1)


def as_rational(cm: ClueMatrix) -> RationalMatrix:
    return RationalMatrix.from_rows(cm.dense(), cm.ncols)


def clue_rank(cm: ClueMatrix) -> int:
    """Bareiss rank of the incidence matrix."""
    _, pivots = bareiss_echelon(cm.dense(), cm.ncols)
    return len(pivots)


def clue_nullspace(cm: ClueMatrix) -> NullSpaceBasis:
    red = RowReducer(cm.ncols)
    red.extend(clue_rows(cm))
    return red.null_basis()


def mask_from_nullspace(dims: LatticeDims, basis: NullSpaceBasis) -> UniquenessMask:
    flags = [True] * dims.size
    for v in basis.vectors:
        for k, x in enumerate(v):
            if x:
                flags[k] = False
    return UniquenessMask(dims, tuple(flags))


def entry_uniqueness_mask(dims: LatticeDims, slopes: Sequence[Slope]) -> UniquenessMask:
    cm = build_coefficient_matrix(dims, slopes)
    return mask_from_nullspace(dims, clue_nullspace(cm))


def is_globally_unique(dims: LatticeDims, slopes: Sequence[Slope]) -> bool:
    return clue_rank(build_coefficient_matrix(dims, slopes)) == dims.size


def default_max_q(dims: LatticeDims) -> int:
    """Smallest q with q^2 + 3q - 1 >= max(n, m); enough for every lattice."""
    target = max(dims.n, dims.m)
    q = 1
    while q * q + 3 * q - 1 < target:
        q += 1
    return q


def cap_index(max_q: int) -> int:
    """Order index of the slope ``max_q``, the last slope a scan may add."""
    if max_q < 1:
        raise ValueError("max_q must be at least 1")
    return 3 if max_q == 1 else 4 * (max_q - 1) + 3


@dataclass
class PrefixState:
    slope: Slope
    prefix_len: int
    matrix_rows: int
    reducer: RowReducer


def scan_prefixes(dims: LatticeDims, last_index: int) -> Iterator[PrefixState]:
    """Grow the slope set one slope at a time, reusing the reduced rows.

    The yielded reducer is live; consume each state before advancing.
    """
    red = RowReducer(dims.size)
    nrows = 0
    for k in range(last_index + 1):
        s = slope_at(k)
        for ln in enumerate_lines(dims, s):
            red.add(dict.fromkeys((dims.index(c) for c in ln.cells), 1))
            nrows += 1
        yield PrefixState(s, k + 1, nrows, red)


@dataclass(frozen=True)
class InvariantReport:
    dims: LatticeDims
    k: Slope
    r: Slope
    c: Slope
    b: Slope
    s: Slope

    def all_equal(self) -> bool:
        return self.k == self.r == self.c == self.b == self.s


def _conditions(dims: LatticeDims, state: PrefixState) -> dict[str, bool]:
    fixed = state.reducer.determined_columns()
    mask = UniquenessMask(dims, tuple(fixed))
    rows = first_last_rows(dims)
    cols = first_last_columns(dims)
    return {
        "k": state.reducer.rank == dims.size,
        "r": mask.covers(rows[0]) or mask.covers(rows[1]),
        "c": mask.covers(cols[0]) or mask.covers(cols[1]),
        "b": mask.covers(dims.border()),
    }


def invariants(dims: LatticeDims, max_q: int | None = None) -> InvariantReport:
    """The smallest slope prefixes forcing the whole grid, a first/last row,
    a first/last column and the border."""
    if max_q is None:
        max_q = default_max_q(dims)
    found: dict[str, Slope] = {}
    for state in scan_prefixes(dims, cap_index(max_q)):
        for name, ok in _conditions(dims, state).items():
            if ok and name not in found:
                found[name] = state.slope
        if len(found) == 4:
            break
    else:
        missing = sorted({"k", "r", "c", "b"} - found.keys())
        raise SearchCapExceeded(
            f"{dims.n}x{dims.m}: {', '.join(missing)} not reached through slope {max_q}"
        )
    r, c = found["r"], found["c"]
    s = min(r, c, key=Slope.sort_key)
    return InvariantReport(dims, found["k"], r, c, found["b"], s)


@dataclass(frozen=True)
class TableRow:
    n: int
    slope: Slope
    prefix_len: int
    matrix_rows: int
    rank: int


def minimal_prefix(dims: LatticeDims, max_q: int | None = None) -> TableRow:
    """First prefix in the slope order whose clues determine every cell."""
    if max_q is None:
        max_q = default_max_q(dims)
    for state in scan_prefixes(dims, cap_index(max_q)):
        if state.reducer.rank == dims.size:
            return TableRow(dims.n, state.slope, state.prefix_len, state.matrix_rows,
                            state.reducer.rank)
    raise SearchCapExceeded(f"{dims.n}x{dims.m}: not unique through slope {max_q}")


def _table_entry(args: tuple[int, int | None]) -> TableRow:
    n, max_q = args
    row = minimal_prefix(LatticeDims(n, n), max_q)
    log.debug("n=%d minimal slope %s", n, row.slope)
    return row


def search_table(n_max: int, max_q: int | None = None, jobs: int = 1) -> list[TableRow]:
    """Minimal slope for every square lattice up to ``n_max``, in order of n."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    tasks = [(n, max_q) for n in range(1, n_max + 1)]
    jobs = max(1, min(jobs, os.cpu_count() or 1, len(tasks)))
    if jobs == 1:
        return [_table_entry(t) for t in tasks]
    # map() yields in input order whatever the completion order
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_table_entry, tasks))
