"""Exact rank, null space and solving over the rationals.

Two independent integer engines live here:

* :func:`rank` runs dense Bareiss elimination (every intermediate entry is
  a minor of the input, so all divisions are exact).
* :class:`RowReducer` keeps a sparse reduced row echelon form with primitive
  integer rows and accepts rows incrementally. The reduced echelon form of a
  row space is unique, so null bases and particular solutions derived from
  it do not depend on row order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

Vector = tuple[Fraction, ...]


@dataclass(frozen=True)
class RationalMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix shape")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RationalMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        flat: list[Fraction] = []
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix rows")
            flat.extend(Fraction(x) for x in r)
        return cls(len(rows), cols, tuple(flat))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    def row(self, r: int) -> Vector:
        return self.entries[r * self.cols:(r + 1) * self.cols]

    def __getitem__(self, rc: tuple[int, int]) -> Fraction:
        r, c = rc
        return self.entries[r * self.cols + c]

    def integer_rows(self) -> list[list[int]]:
        """Rows scaled by their denominators' lcm; row space is unchanged."""
        out = []
        for r in range(self.rows):
            row = self.row(r)
            scale = reduce(lcm, (x.denominator for x in row), 1)
            out.append([int(x * scale) for x in row])
        return out

    def matvec(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise ValueError("vector length does not match column count")
        return tuple(
            sum((a * x for a, x in zip(self.row(r), v) if a), Fraction(0))
            for r in range(self.rows)
        )


def bareiss_echelon(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form; returns the matrix and pivot columns.

    Pivot rule: columns left to right, first remaining row with a non-zero
    entry in the column.
    """
    a = [list(r) for r in rows]
    prev = 1
    top = 0
    pivots: list[int] = []
    for c in range(ncols):
        pr = next((i for i in range(top, len(a)) if a[i][c]), None)
        if pr is None:
            continue
        a[top], a[pr] = a[pr], a[top]
        prow = a[top]
        p = prow[c]
        for i in range(top + 1, len(a)):
            row = a[i]
            x = row[c]
            if x:
                for k in range(c + 1, ncols):
                    row[k] = (p * row[k] - x * prow[k]) // prev
            elif p != prev:
                for k in range(c + 1, ncols):
                    if row[k]:
                        row[k] = (p * row[k]) // prev
            row[c] = 0
        prev = p
        pivots.append(c)
        top += 1
    return a, pivots


def rank(m: RationalMatrix) -> int:
    _, pivots = bareiss_echelon(m.integer_rows(), m.cols)
    return len(pivots)


def _primitive(row: dict[int, int], lead: int) -> dict[int, int]:
    g = reduce(gcd, row.values())
    if row[lead] < 0:
        g = -g
    if g == 1:
        return row
    return {k: v // g for k, v in row.items()}


def _combine(row: Mapping[int, int], piv_row: Mapping[int, int], col: int) -> dict[int, int]:
    """Integer combination of ``row`` and ``piv_row`` with ``col`` cleared."""
    a = row[col]
    p = piv_row[col]
    g = gcd(a, p)
    fr, fp = p // g, a // g
    if fr < 0:
        fr, fp = -fr, -fp
    out = {k: v * fr for k, v in row.items()} if fr != 1 else dict(row)
    for k, v in piv_row.items():
        x = out.get(k, 0) - fp * v
        if x:
            out[k] = x
        else:
            out.pop(k, None)
    return out


class RowReducer:
    """Incremental sparse reduced row echelon form over the integers.

    Rows are dicts ``{column: value}``. Column ``ncols`` may carry a
    right-hand side; a reduced row whose only entry lies there means the
    system is inconsistent.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivot_rows: dict[int, dict[int, int]] = {}
        self.inconsistent = False

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def add(self, row: Mapping[int, int]) -> bool:
        """Insert a row; returns True if it raised the coefficient rank."""
        cur = {k: v for k, v in row.items() if v}
        # pivot rows are zero on every other pivot column, so one pass clears them all
        for c in sorted(c for c in cur if c in self.pivot_rows):
            if c in cur:
                cur = _combine(cur, self.pivot_rows[c], c)
        if not cur:
            return False
        lead = min(cur)
        if lead >= self.ncols:
            self.inconsistent = True
            return False
        cur = _primitive(cur, lead)
        for c, prow in self.pivot_rows.items():
            if lead in prow:
                self.pivot_rows[c] = _primitive(_combine(prow, cur, lead), c)
        self.pivot_rows[lead] = cur
        return True

    def extend(self, rows: Iterable[Mapping[int, int]]) -> None:
        for r in rows:
            self.add(r)

    def pivots(self) -> list[int]:
        return sorted(self.pivot_rows)

    def free_columns(self) -> list[int]:
        piv = self.pivot_rows
        return [c for c in range(self.ncols) if c not in piv]

    def determined_columns(self) -> list[bool]:
        """Column c is fixed by the system iff e_c lies in the row space."""
        out = [False] * self.ncols
        for c, prow in self.pivot_rows.items():
            out[c] = all(k == c or k >= self.ncols for k in prow)
        return out

    def null_basis(self) -> "NullSpaceBasis":
        vectors = []
        zero = Fraction(0)
        free = self.free_columns()
        for f in free:
            v = [zero] * self.ncols
            v[f] = Fraction(1)
            for c, prow in self.pivot_rows.items():
                x = prow.get(f)
                if x:
                    v[c] = Fraction(-x, prow[c])
            vectors.append(tuple(v))
        return NullSpaceBasis(len(vectors), tuple(vectors), tuple(free))

    def particular(self) -> Vector | None:
        if self.inconsistent:
            return None
        v = [Fraction(0)] * self.ncols
        for c, prow in self.pivot_rows.items():
            x = prow.get(self.ncols)
            if x:
                v[c] = Fraction(x, prow[c])
        return tuple(v)


@dataclass(frozen=True)
class NullSpaceBasis:
    """Basis in reduced column echelon form: vector ``k`` is 1 on
    ``free_columns[k]`` and 0 on every other free column."""

    dim: int
    vectors: tuple[Vector, ...]
    free_columns: tuple[int, ...] = ()


@dataclass(frozen=True)
class LinearSolution:
    status: str  # "unique" | "underdetermined" | "inconsistent"
    particular: Vector | None
    nullbasis: NullSpaceBasis

    def contains(self, x: Sequence) -> bool:
        """Whether ``x`` lies in the affine solution set."""
        if self.particular is None:
            return False
        diff = [Fraction(a) - b for a, b in zip(x, self.particular)]
        recon = [Fraction(0)] * len(diff)
        for f, v in zip(self.nullbasis.free_columns, self.nullbasis.vectors):
            coef = diff[f]
            if coef:
                for k, e in enumerate(v):
                    if e:
                        recon[k] += coef * e
        return recon == diff


def _sparse_rows(m: RationalMatrix) -> list[dict[int, int]]:
    return [{k: x for k, x in enumerate(r) if x} for r in m.integer_rows()]


def nullspace(m: RationalMatrix) -> NullSpaceBasis:
    red = RowReducer(m.cols)
    red.extend(_sparse_rows(m))
    return red.null_basis()


def solve(m: RationalMatrix, rhs: Sequence) -> LinearSolution:
    if len(rhs) != m.rows:
        raise ValueError(f"right-hand side has {len(rhs)} entries, matrix has {m.rows} rows")
    red = RowReducer(m.cols)
    for r in range(m.rows):
        row = m.row(r)
        b = Fraction(rhs[r])
        scale = reduce(lcm, (x.denominator for x in row), b.denominator)
        sparse = {k: int(x * scale) for k, x in enumerate(row) if x}
        if b:
            sparse[m.cols] = int(b * scale)
        red.add(sparse)
    basis = red.null_basis()
    part = red.particular()
    if part is None:
        return LinearSolution("inconsistent", None, basis)
    status = "unique" if basis.dim == 0 else "underdetermined"
    return LinearSolution(status, part, basis)
