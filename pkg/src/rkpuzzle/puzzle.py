"""Puzzle instances: the ``rk v1`` text format, grids, clue generation.

An ``rk v1`` file::

    rk v1
    dims <n> <m>
    slopes <tok> ...
    clue <tok> <offset> <value>
    ...

Slope tokens are ``0``, ``inf``, ``<p>`` or ``<p>/<q>`` in lowest terms.
Values are integers or ``<a>/<b>`` in lowest terms. ``#`` starts a comment.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, Mapping, Sequence, Union

from .lattice import (
    LatticeDims,
    Slope,
    build_coefficient_matrix,
    enumerate_lines,
    parse_slope,
    sort_slopes,
)
from .linalg import LinearSolution, RationalMatrix, solve
from .uniqueness import UniquenessMask

ClueKey = tuple[Slope, int]


class PuzzleFormatError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


@dataclass(frozen=True)
class PuzzleInstance:
    dims: LatticeDims
    slopes: tuple[Slope, ...]
    clues: Mapping[ClueKey, Fraction] = field(hash=False)

    def __post_init__(self) -> None:
        if len(set(self.slopes)) != len(self.slopes):
            raise ValueError("duplicate slopes")
        expected = {(ln.slope, ln.offset) for s in self.slopes for ln in enumerate_lines(self.dims, s)}
        missing = expected - self.clues.keys()
        if missing:
            s, c = min(missing, key=lambda k: (k[0].sort_key(), k[1]))
            raise ValueError(f"missing clue for slope {s} offset {c}")
        extra = self.clues.keys() - expected
        if extra:
            s, c = min(extra, key=lambda k: (k[0].sort_key(), k[1]))
            raise ValueError(f"clue for slope {s} offset {c} does not match any line")

    def ordered_clues(self) -> list[tuple[Slope, int, Fraction]]:
        return [
            (s, c, self.clues[(s, c)])
            for s, c in sorted(self.clues, key=lambda k: (k[0].sort_key(), k[1]))
        ]


@dataclass(frozen=True)
class GridValues:
    dims: LatticeDims
    values: tuple[Fraction, ...]  # indexed like matrix columns

    def __post_init__(self) -> None:
        if len(self.values) != self.dims.size:
            raise ValueError("grid must give a value for every cell")

    def __getitem__(self, cell: tuple[int, int]) -> Fraction:
        return self.values[self.dims.index(cell)]

    @classmethod
    def from_rows_top_down(cls, rows: Sequence[Sequence]) -> "GridValues":
        """Build from visual rows, top row (largest j) first."""
        m, n = len(rows), len(rows[0])
        dims = LatticeDims(n, m)
        values = [Fraction(0)] * dims.size
        for r, row in enumerate(rows):
            if len(row) != n:
                raise ValueError("ragged grid rows")
            j = m - r
            for i, x in enumerate(row, start=1):
                values[dims.index((i, j))] = Fraction(x)
        return cls(dims, tuple(values))

    def rows_top_down(self) -> list[list[Fraction]]:
        n, m = self.dims.n, self.dims.m
        return [[self[(i, j)] for i in range(1, n + 1)] for j in range(m, 0, -1)]


def format_value(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_value(token: str) -> Fraction:
    try:
        if "/" in token:
            a, b = token.split("/")
            num, den = int(a), int(b)
            x = Fraction(num, den)
            if den <= 1 or (x.numerator, x.denominator) != (num, den):
                raise ValueError
            return x
        return Fraction(int(token))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad value {token!r}") from None


def _meaningful_lines(text: str) -> Iterable[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield lineno, body.split()


def _parse_dims(fields: list[str], lineno: int, keyword: str) -> LatticeDims:
    if len(fields) != 3 or fields[0] != keyword:
        raise PuzzleFormatError(f"expected '{keyword} <n> <m>'", lineno)
    try:
        return LatticeDims(int(fields[1]), int(fields[2]))
    except ValueError as exc:
        raise PuzzleFormatError(str(exc), lineno) from None


def parse_puzzle(text: str) -> PuzzleInstance:
    lines = iter(_meaningful_lines(text))
    try:
        lineno, fields = next(lines)
        if fields != ["rk", "v1"]:
            raise PuzzleFormatError("expected header 'rk v1'", lineno)
        lineno, fields = next(lines)
        dims = _parse_dims(fields, lineno, "dims")
        lineno, fields = next(lines)
    except StopIteration:
        raise PuzzleFormatError("truncated header") from None
    if fields[0] != "slopes" or len(fields) < 2:
        raise PuzzleFormatError("expected 'slopes <tok> ...'", lineno)
    try:
        slopes = [parse_slope(t) for t in fields[1:]]
    except ValueError as exc:
        raise PuzzleFormatError(str(exc), lineno) from None
    if len(set(slopes)) != len(slopes):
        raise PuzzleFormatError("duplicate slope", lineno)
    valid = {s: {ln.offset for ln in enumerate_lines(dims, s)} for s in slopes}
    clues: dict[ClueKey, Fraction] = {}
    for lineno, fields in lines:
        if fields[0] != "clue" or len(fields) != 4:
            raise PuzzleFormatError("expected 'clue <slope> <offset> <value>'", lineno)
        try:
            s = parse_slope(fields[1])
            offset = int(fields[2])
            value = parse_value(fields[3])
        except ValueError as exc:
            raise PuzzleFormatError(str(exc), lineno) from None
        if s not in valid:
            raise PuzzleFormatError(f"slope {s} is not declared", lineno)
        if offset not in valid[s]:
            raise PuzzleFormatError(f"no line of slope {s} with offset {offset} meets the lattice", lineno)
        if (s, offset) in clues:
            raise PuzzleFormatError(f"duplicate clue for slope {s} offset {offset}", lineno)
        clues[(s, offset)] = value
    try:
        return PuzzleInstance(dims, tuple(sort_slopes(slopes)), clues)
    except ValueError as exc:
        raise PuzzleFormatError(str(exc)) from None


def serialize_puzzle(p: PuzzleInstance) -> str:
    out = ["rk v1", f"dims {p.dims.n} {p.dims.m}", "slopes " + " ".join(s.token() for s in p.slopes)]
    out += [f"clue {s.token()} {c} {format_value(v)}" for s, c, v in p.ordered_clues()]
    return "\n".join(out) + "\n"


def parse_grid(text: str) -> GridValues:
    lines = list(_meaningful_lines(text))
    if not lines:
        raise PuzzleFormatError("empty grid file")
    lineno, fields = lines[0]
    dims = _parse_dims(fields, lineno, "grid")
    body = lines[1:]
    if len(body) != dims.m:
        raise PuzzleFormatError(f"expected {dims.m} grid rows, found {len(body)}")
    rows = []
    for lineno, fields in body:
        if len(fields) != dims.n:
            raise PuzzleFormatError(f"expected {dims.n} values", lineno)
        try:
            rows.append([parse_value(t) for t in fields])
        except ValueError as exc:
            raise PuzzleFormatError(str(exc), lineno) from None
    return GridValues.from_rows_top_down(rows)


def serialize_grid(grid: GridValues) -> str:
    out = [f"grid {grid.dims.n} {grid.dims.m}"]
    out += [" ".join(format_value(x) for x in row) for row in grid.rows_top_down()]
    return "\n".join(out) + "\n"


def clues_from_grid(grid: GridValues, slopes: Sequence[Slope]) -> PuzzleInstance:
    clues = {}
    for s in slopes:
        for ln in enumerate_lines(grid.dims, s):
            clues[(s, ln.offset)] = sum((grid[c] for c in ln.cells), Fraction(0))
    return PuzzleInstance(grid.dims, tuple(sort_slopes(slopes)), clues)


@dataclass(frozen=True)
class ValidationReport:
    totals: dict[Slope, Fraction]
    consistent: bool
    issues: tuple[str, ...] = ()


def validate(p: PuzzleInstance) -> ValidationReport:
    """Every slope's lines partition the grid, so all slope totals must agree."""
    totals = {s: Fraction(0) for s in p.slopes}
    for s, _, v in p.ordered_clues():
        totals[s] += v
    issues = []
    ref = p.slopes[0]
    for s in p.slopes[1:]:
        if totals[s] != totals[ref]:
            issues.append(
                f"slope {s} totals {format_value(totals[s])} but slope {ref} totals "
                f"{format_value(totals[ref])}"
            )
    return ValidationReport(totals, not issues, tuple(issues))


def random_grid(dims: LatticeDims, lo: int, hi: int, seed: int | str | None) -> GridValues:
    if lo > hi:
        raise ValueError(f"empty value range {lo}..{hi}")
    rng = random.Random(seed)
    return GridValues(dims, tuple(Fraction(rng.randint(lo, hi)) for _ in range(dims.size)))


def puzzle_system(p: PuzzleInstance) -> tuple[RationalMatrix, list[Fraction]]:
    cm = build_coefficient_matrix(p.dims, p.slopes)
    matrix = RationalMatrix.from_rows(cm.dense(), cm.ncols)
    rhs = [p.clues[(ln.slope, ln.offset)] for ln in cm.lines]
    return matrix, rhs


def solve_puzzle(p: PuzzleInstance) -> LinearSolution:
    matrix, rhs = puzzle_system(p)
    return solve(matrix, rhs)


def vector_to_grid(dims: LatticeDims, vector: Sequence[Fraction]) -> GridValues:
    return GridValues(dims, tuple(vector))


def render(obj: Union[GridValues, UniquenessMask]) -> str:
    """Fixed-width text, top row first; masks use '#' for forced cells."""
    dims = obj.dims
    if isinstance(obj, UniquenessMask):
        return "\n".join(
            "".join("#" if obj[(i, j)] else "." for i in range(1, dims.n + 1))
            for j in range(dims.m, 0, -1)
        )
    cells = [[format_value(x) for x in row] for row in obj.rows_top_down()]
    width = max(len(t) for row in cells for t in row)
    return "\n".join(" ".join(t.rjust(width) for t in row) for row in cells)


FIXTURES = ("fig1", "fig2", "fig2_fig3")


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
    return resources.files("rkpuzzle").joinpath("data").joinpath(f"{name}.rk").read_text(encoding="utf-8")


def load_fixture(name: str) -> PuzzleInstance:
    return parse_puzzle(fixture_text(name))
