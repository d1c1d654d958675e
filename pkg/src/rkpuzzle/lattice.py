"""Slopes, the slope order, clue lines and clue coefficient matrices.

Cells are pairs ``(i, j)`` with ``1 <= i <= n`` and ``1 <= j <= m``; ``i`` is
the horizontal coordinate and ``j`` grows upward. A finite slope ``p/q`` line
is identified by the offset ``c = p*i - q*j``, a vertical line by its ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Iterator

Cell = tuple[int, int]


@dataclass(frozen=True, order=False)
class Slope:
    """A reduced rational slope ``p/q`` (``q > 0``) or the vertical slope.

    The vertical slope is stored as ``p=1, q=0``; build slopes through
    :func:`reduce_slope` or :func:`parse_slope` rather than directly.
    """

    p: int
    q: int

    def __post_init__(self) -> None:
        if self.q < 0 or (self.q == 0 and self.p != 1):
            raise ValueError(f"non-canonical slope ({self.p}, {self.q})")
        if self.q > 0 and gcd(self.p, self.q) != 1:
            raise ValueError(f"slope {self.p}/{self.q} is not reduced")

    @property
    def vertical(self) -> bool:
        return self.q == 0

    @property
    def kind(self) -> str:
        return "vertical" if self.vertical else "finite"

    def in_order_set(self) -> bool:
        """True for integers, reciprocals of integers and the vertical slope."""
        return self.vertical or self.q == 1 or abs(self.p) == 1

    @property
    def order_index(self) -> int:
        """Position in the order 0, inf, -1, 1, -1/2, -2, 1/2, 2, -1/3, ..."""
        if not self.in_order_set():
            raise ValueError(f"slope {self} is not an integer or a reciprocal")
        if self.vertical:
            return 1
        if self.p == 0:
            return 0
        if self.q == 1 and abs(self.p) == 1:
            return 2 if self.p < 0 else 3
        if self.q == 1:
            base = 4 * (abs(self.p) - 1)
            return base + (1 if self.p < 0 else 3)
        base = 4 * (self.q - 1)
        return base + (0 if self.p < 0 else 2)

    def sort_key(self) -> tuple[int, int, int, int]:
        # slopes outside the order set sort after every member, by height
        if self.in_order_set():
            return (0, self.order_index, 0, 0)
        return (1, max(abs(self.p), self.q), self.q, self.p)

    def negated(self) -> "Slope":
        return self if self.vertical or self.p == 0 else Slope(-self.p, self.q)

    def reciprocal(self) -> "Slope":
        if self.vertical:
            return Slope(0, 1)
        return reduce_slope(self.q, self.p)

    def token(self) -> str:
        if self.vertical:
            return "inf"
        if self.q == 1:
            return str(self.p)
        return f"{self.p}/{self.q}"

    def __str__(self) -> str:
        return self.token()

    def __repr__(self) -> str:
        return f"Slope({self.token()})"


VERTICAL = Slope(1, 0)
HORIZONTAL = Slope(0, 1)


def reduce_slope(p: int, q: int) -> Slope:
    """Normal form of ``p/q``; ``q == 0`` gives the vertical slope."""
    if p == 0 and q == 0:
        raise ValueError("slope 0/0 is undefined")
    if q == 0:
        return VERTICAL
    g = gcd(p, q)
    p, q = p // g, q // g
    if q < 0:
        p, q = -p, -q
    return Slope(p, q)


def slope_at(index: int) -> Slope:
    """Inverse of :attr:`Slope.order_index`."""
    if index < 0:
        raise ValueError("order index must be non-negative")
    if index < 4:
        return (HORIZONTAL, VERTICAL, Slope(-1, 1), Slope(1, 1))[index]
    q, r = divmod(index, 4)
    q += 1
    return (Slope(-1, q), Slope(-q, 1), Slope(1, q), Slope(q, 1))[r]


def slope_prefix(s: Slope) -> list[Slope]:
    """All slopes up to and including ``s`` in the slope order."""
    return [slope_at(k) for k in range(s.order_index + 1)]


def parse_slope(token: str, strict: bool = True) -> Slope:
    """Parse ``0``, ``inf``, ``<p>`` or ``<p>/<q>``.

    With ``strict`` the fraction must already be in lowest terms with a
    positive denominator, as required in puzzle files.
    """
    tok = token.strip()
    if tok in ("inf", "∞"):
        return VERTICAL
    try:
        if "/" in tok:
            a, b = tok.split("/")
            p, q = int(a), int(b)
        else:
            p, q = int(tok), 1
    except ValueError:
        raise ValueError(f"bad slope token {token!r}") from None
    s = reduce_slope(p, q)
    if strict and (q <= 0 or (s.p, s.q) != (p, q) or s.vertical):
        raise ValueError(f"slope token {token!r} is not reduced")
    return s


def parse_order_slope(token: str) -> Slope:
    s = parse_slope(token)
    if not s.in_order_set():
        raise ValueError(f"slope {s} is not an integer or a reciprocal of one")
    return s


@dataclass(frozen=True)
class LatticeDims:
    n: int
    m: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1:
            raise ValueError(f"lattice dimensions must be positive, got {self.n}x{self.m}")

    @property
    def size(self) -> int:
        return self.n * self.m

    @property
    def square(self) -> bool:
        return self.n == self.m

    def cells(self) -> Iterator[Cell]:
        """Cells in column-index order."""
        for j in range(1, self.m + 1):
            for i in range(1, self.n + 1):
                yield (i, j)

    def contains(self, cell: Cell) -> bool:
        i, j = cell
        return 1 <= i <= self.n and 1 <= j <= self.m

    def index(self, cell: Cell) -> int:
        i, j = cell
        return (j - 1) * self.n + (i - 1)

    def cell_at(self, index: int) -> Cell:
        j, i = divmod(index, self.n)
        return (i + 1, j + 1)

    def border(self) -> frozenset[Cell]:
        return frozenset(
            (i, j) for i, j in self.cells() if i in (1, self.n) or j in (1, self.m)
        )


def line_offset(slope: Slope, cell: Cell) -> int:
    i, j = cell
    if slope.vertical:
        return i
    return slope.p * i - slope.q * j


@dataclass(frozen=True)
class Line:
    slope: Slope
    offset: int
    cells: tuple[Cell, ...]

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("a line must meet the lattice")
        for cell in self.cells:
            if line_offset(self.slope, cell) != self.offset:
                raise ValueError(f"cell {cell} is not on line {self.slope} @ {self.offset}")

    def __len__(self) -> int:
        return len(self.cells)


def enumerate_lines(dims: LatticeDims, slope: Slope) -> list[Line]:
    """Every line of ``slope`` meeting the lattice, by ascending offset."""
    groups: dict[int, list[Cell]] = {}
    for cell in dims.cells():
        groups.setdefault(line_offset(slope, cell), []).append(cell)
    return [Line(slope, c, tuple(sorted(groups[c]))) for c in sorted(groups)]


def line_count_formula(dims: LatticeDims, slope: Slope) -> int:
    """Size of the offset range ``(n-1)|p| + (m-1)q + 1``.

    This is the line count only when every offset in the range is hit, which
    holds for ``q == 1, m >= |p|`` and for ``|p| <= 1, n >= q``. For ``|p|``
    and ``q`` both at least 2 the offsets next to either end are skipped, so
    use ``len(enumerate_lines(...))`` for the actual count.
    """
    if slope.vertical:
        return dims.n
    return (dims.n - 1) * abs(slope.p) + (dims.m - 1) * slope.q + 1


def sort_slopes(slopes: Iterable[Slope]) -> list[Slope]:
    return sorted(slopes, key=Slope.sort_key)


@dataclass(frozen=True)
class ClueMatrix:
    """0/1 incidence matrix of the clue lines of ``slopes`` over ``dims``.

    Row ``r`` is ``lines[r]``; column ``(j-1)*n + (i-1)`` is cell ``(i, j)``.
    Rows are stored sparsely as the tuple of column indices set to 1.
    """

    dims: LatticeDims
    slopes: tuple[Slope, ...]
    lines: tuple[Line, ...]
    support: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def nrows(self) -> int:
        return len(self.lines)

    @property
    def ncols(self) -> int:
        return self.dims.size

    def row(self, r: int) -> list[int]:
        out = [0] * self.ncols
        for c in self.support[r]:
            out[c] = 1
        return out

    def dense(self) -> list[list[int]]:
        return [self.row(r) for r in range(self.nrows)]


def build_coefficient_matrix(dims: LatticeDims, slopes: Iterable[Slope]) -> ClueMatrix:
    slopes = list(slopes)
    if not slopes:
        raise ValueError("at least one slope is required")
    if len(set(slopes)) != len(slopes):
        raise ValueError("duplicate slopes")
    ordered = sort_slopes(slopes)
    lines: list[Line] = []
    for s in ordered:
        lines.extend(enumerate_lines(dims, s))
    support = tuple(tuple(sorted(dims.index(c) for c in ln.cells)) for ln in lines)
    return ClueMatrix(dims, tuple(ordered), tuple(lines), support)
