"""Combinatorial certificates of uniqueness by peeling.

A cell is peeled when some clue line has it as the only undetermined cell.
Staircases describe the corner regions that the slopes ``-1/q`` peel one
cell at a time; the predicates here check each such step and the replay
walks the whole induction for a given ``q``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .lattice import (
    Cell,
    LatticeDims,
    Line,
    Slope,
    enumerate_lines,
    reduce_slope,
    sort_slopes,
)
from .symmetry import GridTransform, admissible_transforms, transform_cell


class CertificationError(AssertionError):
    """A step of a staircase schedule does not go through."""


@dataclass(frozen=True)
class Staircase:
    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(w < 0 for w in self.weights):
            raise ValueError(f"negative staircase weight in {self.weights}")

    @classmethod
    def of(cls, *weights: int) -> "Staircase":
        return cls(tuple(weights))

    @property
    def m(self) -> int:
        return len(self.weights)

    def weight(self, i: int) -> int:
        """``w_i`` (1-based); positions past the end read as 0."""
        if i < 1:
            raise IndexError(f"weight index {i} out of range")
        return self.weights[i - 1] if i <= self.m else 0

    def padded(self, length: int) -> "Staircase":
        if length <= self.m:
            return self
        return Staircase(self.weights + (0,) * (length - self.m))

    def height(self, b: int) -> int:
        """Extent of the region along row ``b``, i.e. ``partial_sum(b, m)``."""
        return partial_sum(self, b, self.m)


def partial_sum(w: Staircase, i: int, j: int) -> int:
    """``w_i + ... + w_j``; an empty range (``i > j``) sums to 0."""
    if i > j:
        return 0
    if i < 1 or j > w.m:
        raise IndexError(f"partial sum ({i}, {j}) outside 1..{w.m}")
    return sum(w.weights[i - 1:j])


def lemma41_applicable(w: Staircase, j: int, q: int) -> bool:
    """Whether the slope ``-1/q`` line through ``(w(j, m) + 1, j)`` lies,
    apart from that cell, inside the staircase region."""
    m = w.m
    if not 1 <= j <= m + 1:
        raise ValueError(f"column {j} outside 1..{m + 1}")
    if q < 1:
        raise ValueError("q must be positive")
    ahead = all(t * q >= partial_sum(w, j, j + t - 1) + 1 for t in range(1, m - j + 2))
    behind = all(t * q + 1 <= partial_sum(w, j - t, j - 1) for t in range(1, j))
    return ahead and behind


def peel_cell(w: Staircase, j: int) -> Cell:
    return (partial_sum(w, j, w.m) + 1, j)


def check_corollary_shape(w: Staircase, m0: int) -> None:
    if not 1 <= m0 <= w.m:
        raise ValueError(f"m0={m0} outside 1..{w.m}")
    head = w.weights[:m0]
    if any(a < b for a, b in zip(head, head[1:])):
        raise ValueError(f"{head} is not non-increasing")
    if any(x not in (0, 1) for x in w.weights[m0:]):
        raise ValueError(f"tail {w.weights[m0:]} has entries other than 0 and 1")


def corollary42_applicable(w: Staircase, m0: int, j: int, q: int) -> bool:
    """``w_j + 1 <= q <= w_{j-1} - 1`` with ``w_0`` taken as infinite and a
    weight past the end taken as 0."""
    check_corollary_shape(w, m0)
    if not 1 <= j <= m0 + 1:
        raise ValueError(f"j={j} outside 1..{m0 + 1}")
    if w.weight(j) + 1 > q:
        return False
    return j == 1 or q <= w.weight(j - 1) - 1


def smallest_shape_split(w: Staircase, j: int) -> int | None:
    """Least ``m0 >= j - 1`` meeting the corollary's shape hypothesis."""
    for m0 in range(max(1, j - 1), w.m + 1):
        try:
            check_corollary_shape(w, m0)
        except ValueError:
            continue
        return m0
    return None


def staircase_length(q: int) -> int:
    """``q + (q-1)(q+2)/2``; also defined for ``q = 1``."""
    if q < 1:
        raise ValueError("q must be positive")
    return q + (q - 1) * (q + 2) // 2


def _unit_positions(base: int, top: int) -> set[int]:
    return {base + (j - 1) * (j + 2) // 2 for j in range(2, top + 1)}


def omega_q(q: int) -> Staircase:
    if q < 2:
        raise ValueError("omega_q needs q >= 2")
    ones = _unit_positions(q, q)
    return Staircase(tuple(
        q + 1 - i if i <= q else (1 if i in ones else 0)
        for i in range(1, staircase_length(q) + 1)
    ))


def omega_family(q: int, t: int, s: int) -> Staircase:
    """Intermediate staircases of the step from ``omega_{q-1}`` to ``omega_q``.

    ``1 <= t <= q`` with ``1 <= s <= q + 1 - t`` are the peeling stages before
    the first transpose, ``(q + 1, 1)`` is the result of that transpose and
    ``(q + 2, s)`` with ``1 <= s <= q`` the stages before the second.
    """
    if q < 2:
        raise ValueError("omega_family needs q >= 2")
    if 1 <= t <= q and 1 <= s <= q + 1 - t:
        ones = _unit_positions(q - 1, q - 1)
        length = max(staircase_length(q - 1), q)
        out = []
        for i in range(1, length + 1):
            if i == s or q + 1 - t < i <= q:
                out.append(q + 1 - i)
            elif i <= q + 1 - t:
                out.append(q - i)
            else:
                out.append(1 if i in ones else 0)
        return Staircase(tuple(out))
    length = staircase_length(q) - 1
    ones = _unit_positions(q - 1, q)
    if t == q + 1 and s == 1:
        return Staircase(tuple(
            q + 1 - i if i <= q - 1 else (1 if i in ones else 0)
            for i in range(1, length + 1)
        ))
    if t == q + 2 and 1 <= s <= q:
        out = []
        for i in range(1, length + 1):
            if i == q - s:
                out.append(q - i)
            elif i <= q:
                out.append(q + 1 - i)
            else:
                out.append(1 if i in ones else 0)
        return Staircase(tuple(out))
    raise ValueError(f"no staircase ({t}, {s}) for q={q}")


@dataclass(frozen=True)
class StaircaseRegion:
    dims: LatticeDims
    cells: frozenset[Cell]


def region_of(w: Staircase, dims: LatticeDims) -> StaircaseRegion:
    if w.m > dims.m and any(w.weights[dims.m:]):
        raise ValueError(f"staircase of length {w.m} does not fit {dims.n}x{dims.m}")
    if partial_sum(w, 1, w.m) > dims.n:
        raise ValueError(f"staircase total {partial_sum(w, 1, w.m)} exceeds n={dims.n}")
    cells = frozenset(
        (a, b) for b in range(1, min(w.m, dims.m) + 1) for a in range(1, w.height(b) + 1)
    )
    return StaircaseRegion(dims, cells)


@dataclass(frozen=True)
class Step:
    """One certified cell: peeled from ``line`` or carried by ``transform``."""

    cell: Cell
    line: Line | None = None
    transform: GridTransform | None = None
    source: Cell | None = None

    def record(self) -> str:
        i, j = self.cell
        if self.line is not None:
            return f"({i}, {j}) <- {self.line.slope} {self.line.offset}"
        si, sj = self.source
        return f"({i}, {j}) <- {self.transform.value} ({si}, {sj})"


@dataclass(frozen=True)
class CertifiedSet:
    dims: LatticeDims
    slopes: tuple[Slope, ...]
    determined: frozenset[Cell]
    derivation: tuple[Step, ...]
    initial: frozenset[Cell] = field(default=frozenset())

    def derivation_text(self) -> str:
        return "".join(step.record() + "\n" for step in self.derivation)

    def replay(self) -> bool:
        """Re-check every logged step against the cells known before it."""
        known = set(self.initial)
        allowed = set(admissible_transforms(self.dims, self.slopes))
        slopes = set(self.slopes)
        for step in self.derivation:
            if step.cell in known:
                return False
            if step.line is not None:
                if step.line.slope not in slopes:
                    return False
                if [c for c in step.line.cells if c not in known] != [step.cell]:
                    return False
            else:
                if step.transform not in allowed or step.source not in known:
                    return False
                if transform_cell(step.transform, self.dims, step.source) != step.cell:
                    return False
            known.add(step.cell)
        return known == set(self.determined)


class _Peeler:
    def __init__(self, dims: LatticeDims, slopes: Sequence[Slope], known: set[Cell]):
        self.lines = [ln for s in sort_slopes(slopes) for ln in enumerate_lines(dims, s)]
        self.known = known
        self.through: dict[Cell, list[int]] = {c: [] for c in dims.cells()}
        for k, ln in enumerate(self.lines):
            for c in ln.cells:
                self.through[c].append(k)
        self.open = [sum(c not in known for c in ln.cells) for ln in self.lines]

    def mark(self, cell: Cell) -> None:
        self.known.add(cell)
        for k in self.through[cell]:
            self.open[k] -= 1

    def run(self, log: list[Step], rng: random.Random | None = None) -> bool:
        changed = False
        while True:
            if rng is None:
                k = next((k for k, n in enumerate(self.open) if n == 1), None)
            else:
                ready = [k for k, n in enumerate(self.open) if n == 1]
                k = rng.choice(ready) if ready else None
            if k is None:
                return changed
            ln = self.lines[k]
            cell = next(c for c in ln.cells if c not in self.known)
            self.mark(cell)
            log.append(Step(cell, line=ln))
            changed = True


def propagate(
    dims: LatticeDims,
    slopes: Sequence[Slope],
    initial: Iterable[Cell] = (),
    seed: int | None = None,
) -> CertifiedSet:
    """Least set containing ``initial`` closed under single-unknown peeling.

    Lines are scanned by slope order then offset, restarting after every
    peel. With ``seed`` the ready line is picked at random instead; the
    final set is the same, only the log differs.
    """
    start = frozenset(initial)
    for c in start:
        if not dims.contains(c):
            raise ValueError(f"initial cell {c} outside the lattice")
    peeler = _Peeler(dims, slopes, set(start))
    log: list[Step] = []
    peeler.run(log, random.Random(seed) if seed is not None else None)
    return CertifiedSet(dims, tuple(sort_slopes(slopes)), frozenset(peeler.known),
                        tuple(log), start)


def certify(
    dims: LatticeDims,
    slopes: Sequence[Slope],
    initial: Iterable[Cell] = (),
    transforms: Iterable[GridTransform] | None = None,
) -> CertifiedSet:
    """Peeling interleaved with symmetry transport until nothing changes."""
    allowed = admissible_transforms(dims, slopes)
    if transforms is None:
        transforms = allowed
    transforms = list(transforms)
    for t in transforms:
        if t not in allowed:
            raise ValueError(f"{t.value} does not preserve uniqueness for these slopes")
    start = frozenset(initial)
    peeler = _Peeler(dims, slopes, set(start))
    log: list[Step] = []
    changed = True
    while changed:
        changed = peeler.run(log)
        for t in transforms:
            for cell in sorted(peeler.known):
                image = transform_cell(t, dims, cell)
                if image not in peeler.known:
                    peeler.mark(image)
                    log.append(Step(image, transform=t, source=cell))
                    changed = True
    return CertifiedSet(dims, tuple(sort_slopes(slopes)), frozenset(peeler.known),
                        tuple(log), start)


@dataclass(frozen=True)
class ScheduleStep:
    kind: str  # "lemma" | "corollary" | "transpose"
    before: Staircase
    after: Staircase
    cell: Cell | None = None
    slope: Slope | None = None


def _region_cells(w: Staircase, dims: LatticeDims) -> frozenset[Cell]:
    return region_of(w, dims).cells


def _peel_step(before: Staircase, after: Staircase, j: int, q: int,
               dims: LatticeDims, use_corollary: bool = True) -> ScheduleStep:
    length = max(before.m, after.m)
    w = before.padded(length)
    if use_corollary:
        m0 = smallest_shape_split(w, j)
        if m0 is None or not corollary42_applicable(w, m0, j, q):
            raise CertificationError(f"corollary fails on {w.weights} at j={j}, q={q}")
    if not lemma41_applicable(w, j, q):
        raise CertificationError(f"lemma fails on {w.weights} at j={j}, q={q}")
    cell = peel_cell(w, j)
    if _region_cells(after, dims) != _region_cells(w, dims) | {cell}:
        raise CertificationError(f"{after.weights} is not {w.weights} plus {cell}")
    return ScheduleStep("corollary" if use_corollary else "lemma", before, after, cell,
                        reduce_slope(-1, q))


def _transpose_step(before: Staircase, after: Staircase, dims: LatticeDims) -> ScheduleStep:
    cells = _region_cells(before, dims)
    mirrored = {transform_cell(GridTransform.TRANSPOSE, dims, c) for c in cells}
    if not _region_cells(after, dims) <= cells | mirrored:
        raise CertificationError(f"transpose of {before.weights} misses part of {after.weights}")
    return ScheduleStep("transpose", before, after)


def staircase_schedule(q: int, dims: LatticeDims | None = None) -> list[ScheduleStep]:
    """Walk the staircase induction from the empty corner up to ``omega_q``.

    Every peel is checked with both the corollary and the lemma predicates
    and against the regions; every transpose by region containment. Raises
    :class:`CertificationError` at the first step that does not hold.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    if dims is None:
        n = 2 * staircase_length(q) + 1
        dims = LatticeDims(n, n)
    steps = [_peel_step(Staircase.of(0), Staircase.of(1), 1, 1, dims, use_corollary=False)]
    current = Staircase.of(1)
    for r in range(2, q + 1):
        nxt = omega_family(r, 1, 1)
        steps.append(_peel_step(current, nxt, 1, r, dims))
        current = nxt
        t, s = 1, 1
        while (t, s) != (r, 1):
            if s < r + 1 - t:
                nxt, j, slope_q = omega_family(r, t, s + 1), s + 1, r - s
                s += 1
            else:
                nxt, j, slope_q = omega_family(r, t + 1, 1), 1, r
                t, s = t + 1, 1
            steps.append(_peel_step(current, nxt, j, slope_q, dims))
            current = nxt
        nxt = omega_family(r, r + 1, 1)
        steps.append(_transpose_step(current, nxt, dims))
        current = nxt
        for s in range(1, r + 1):
            nxt = omega_family(r, r + 2, s)
            steps.append(_peel_step(current, nxt, r - s + 1, s, dims))
            current = nxt
        nxt = omega_q(r)
        steps.append(_transpose_step(current, nxt, dims))
        current = nxt
    return steps


def bound_count_terms(q: int, variant: int) -> tuple[int, ...]:
    """Counts of forced cells along the first row whose sum is the bound."""
    if q < 2:
        raise ValueError("q must be at least 2")
    corner = q - 2 + q * (q + 1) // 2
    if variant == 1:
        return (corner, staircase_length(q - 1), 1)
    if variant == 2:
        return (staircase_length(q), staircase_length(q - 1), 1)
    if variant == 3:
        return (staircase_length(q), corner, 1)
    if variant == 4:
        return (staircase_length(q), staircase_length(q), 1)
    raise ValueError(f"variant must be 1..4, got {variant}")


def theorem44_count(q: int, variant: int) -> int:
    """Largest n the prefix through -1/q, -q, 1/q or q (variants 1-4) is
    guaranteed to determine."""
    if q < 2:
        raise ValueError("q must be at least 2")
    closed = {
        1: q * q + 2 * q - 3,
        2: q * q + 2 * q - 2,
        3: q * q + 3 * q - 2,
        4: q * q + 3 * q - 1,
    }
    if variant not in closed:
        raise ValueError(f"variant must be 1..4, got {variant}")
    return closed[variant]


def bound_slope(q: int, variant: int) -> Slope:
    return {1: reduce_slope(-1, q), 2: reduce_slope(-q, 1),
            3: reduce_slope(1, q), 4: reduce_slope(q, 1)}[variant]
