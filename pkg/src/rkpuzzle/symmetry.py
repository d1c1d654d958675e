"""Grid symmetries that carry forced cells to forced cells.

A half turn needs no hypothesis on the slopes. The two reflections need the
slope set to be closed under negation; the transpose and anti-transpose need
a square lattice and a slope set closed under reciprocals.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable

from .lattice import Cell, LatticeDims, Line, Slope
from .uniqueness import UniquenessMask


class GridTransform(str, Enum):
    ROT180 = "rot180"
    FLIP_FIRST = "flip_first"
    FLIP_SECOND = "flip_second"
    TRANSPOSE = "transpose"
    ANTI_TRANSPOSE = "anti_transpose"

    @property
    def needs_square(self) -> bool:
        return self in (GridTransform.TRANSPOSE, GridTransform.ANTI_TRANSPOSE)


def _check(t: GridTransform, dims: LatticeDims) -> None:
    if t.needs_square and not dims.square:
        raise ValueError(f"{t.value} needs a square lattice, got {dims.n}x{dims.m}")


def transform_cell(t: GridTransform, dims: LatticeDims, cell: Cell) -> Cell:
    _check(t, dims)
    if not dims.contains(cell):
        raise ValueError(f"cell {cell} is outside the {dims.n}x{dims.m} lattice")
    i, j = cell
    n, m = dims.n, dims.m
    if t is GridTransform.ROT180:
        return (n + 1 - i, m + 1 - j)
    if t is GridTransform.FLIP_FIRST:
        return (n + 1 - i, j)
    if t is GridTransform.FLIP_SECOND:
        return (i, m + 1 - j)
    if t is GridTransform.TRANSPOSE:
        return (j, i)
    return (n + 1 - j, n + 1 - i)


def transform_slope(t: GridTransform, slope: Slope) -> Slope:
    if t is GridTransform.ROT180:
        return slope
    if t in (GridTransform.FLIP_FIRST, GridTransform.FLIP_SECOND):
        return slope.negated()
    return slope.reciprocal()


def transform_offset(t: GridTransform, dims: LatticeDims, slope: Slope, offset: int) -> int:
    """Offset of the image line, in closed form."""
    _check(t, dims)
    n, m = dims.n, dims.m
    if slope.vertical:
        if t in (GridTransform.ROT180, GridTransform.FLIP_FIRST):
            return n + 1 - offset
        if t is GridTransform.FLIP_SECOND:
            return offset
        if t is GridTransform.TRANSPOSE:
            return -offset  # column i = c maps to row j = c, whose offset is -c
        return -(n + 1 - offset)
    p, q, c = slope.p, slope.q, offset
    if t is GridTransform.ROT180:
        return p * (n + 1) - q * (m + 1) - c
    if t is GridTransform.FLIP_FIRST:
        return c - p * (n + 1)
    if t is GridTransform.FLIP_SECOND:
        return -c - q * (m + 1)
    if t is GridTransform.TRANSPOSE:
        if p == 0:
            return -c
        return -c if p > 0 else c
    # anti-transpose = transpose followed by a half turn
    image = transform_slope(GridTransform.TRANSPOSE, slope)
    c1 = transform_offset(GridTransform.TRANSPOSE, dims, slope, offset)
    return transform_offset(GridTransform.ROT180, dims, image, c1)


def transform_line(t: GridTransform, dims: LatticeDims, line: Line) -> Line:
    slope = transform_slope(t, line.slope)
    offset = transform_offset(t, dims, line.slope, line.offset)
    cells = tuple(sorted(transform_cell(t, dims, c) for c in line.cells))
    return Line(slope, offset, cells)


def transform_mask(t: GridTransform, mask: UniquenessMask) -> UniquenessMask:
    dims = mask.dims
    _check(t, dims)
    flags = [False] * dims.size
    for cell in dims.cells():
        flags[dims.index(transform_cell(t, dims, cell))] = mask[cell]
    return UniquenessMask(dims, tuple(flags))


def transform_cells(t: GridTransform, dims: LatticeDims, cells: Iterable[Cell]) -> set[Cell]:
    return {transform_cell(t, dims, c) for c in cells}


def negation_closed(slopes: Iterable[Slope]) -> bool:
    ss = set(slopes)
    return all(s.negated() in ss for s in ss)


def reciprocal_closed(slopes: Iterable[Slope]) -> bool:
    ss = set(slopes)
    return all(s.reciprocal() in ss for s in ss)


def admissible_transforms(dims: LatticeDims, slopes: Iterable[Slope]) -> list[GridTransform]:
    """Transforms under which the forced-cell set of ``slopes`` is invariant."""
    slopes = list(slopes)
    out = [GridTransform.ROT180]
    if negation_closed(slopes):
        out += [GridTransform.FLIP_FIRST, GridTransform.FLIP_SECOND]
    if dims.square and reciprocal_closed(slopes):
        out += [GridTransform.TRANSPOSE, GridTransform.ANTI_TRANSPOSE]
    return out

