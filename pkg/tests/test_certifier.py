import itertools
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from rkpuzzle.certifier import (
    CertificationError,
    Staircase,
    bound_slope,
    certify,
    check_corollary_shape,
    corollary42_applicable,
    lemma41_applicable,
    omega_family,
    omega_q,
    partial_sum,
    peel_cell,
    propagate,
    region_of,
    staircase_schedule,
    staircase_length,
    theorem44_count,
    bound_count_terms,
)
from rkpuzzle.lattice import LatticeDims, Slope, enumerate_lines, line_offset, slope_at, slope_prefix
from rkpuzzle.symmetry import GridTransform
from rkpuzzle.uniqueness import entry_uniqueness_mask

W = Staircase.of
OMEGA2 = W(2, 1, 0, 1)


def test_partial_sum_examples():
    assert partial_sum(OMEGA2, 1, 4) == 4
    assert partial_sum(OMEGA2, 3, 4) == 1
    assert partial_sum(OMEGA2, 2, 1) == 0
    with pytest.raises(IndexError):
        partial_sum(OMEGA2, 0, 2)
    with pytest.raises(IndexError):
        partial_sum(OMEGA2, 2, 5)


def test_staircase_rejects_negative_weights():
    with pytest.raises(ValueError):
        W(1, -1)


def test_peel_predicate_examples():
    assert lemma41_applicable(W(0), 1, 1) and peel_cell(W(0), 1) == (1, 1)
    assert lemma41_applicable(W(1), 1, 2) and peel_cell(W(1), 1) == (2, 1)
    assert not lemma41_applicable(W(2, 2), 2, 1)
    with pytest.raises(ValueError):
        lemma41_applicable(W(1, 1), 4, 1)


def test_shape_predicate_examples():
    assert corollary42_applicable(W(3, 1), 2, 2, 2)
    assert lemma41_applicable(W(3, 1), 2, 2)
    assert corollary42_applicable(W(1, 1), 2, 1, 2)
    assert all(not corollary42_applicable(W(2, 2), 2, 2, q) for q in range(1, 8))
    with pytest.raises(ValueError):
        corollary42_applicable(W(1, 2), 2, 1, 3)
    with pytest.raises(ValueError):
        check_corollary_shape(W(2, 1, 2), 2)


def _peel_line_inside(w, j, q):
    """Geometric reading of the peel predicate on a lattice wide enough never to clip
    the line on the right and one row taller than the staircase."""
    total = partial_sum(w, 1, w.m)
    dims = LatticeDims(total + 1 + q * (w.m + 1), w.m + 1)
    region = region_of(w, dims).cells
    cell = peel_cell(w, j)
    slope = Slope(-1, q)
    c = line_offset(slope, cell)
    line = next(ln for ln in enumerate_lines(dims, slope) if ln.offset == c)
    return cell not in region and all(x in region for x in line.cells if x != cell)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=5), st.data())
def test_peel_predicate_matches_line_geometry(weights, data):
    w = Staircase(tuple(weights))
    j = data.draw(st.integers(1, w.m + 1))
    q = data.draw(st.integers(1, 5))
    assert lemma41_applicable(w, j, q) == _peel_line_inside(w, j, q)


def test_shape_predicate_implies_peel_predicate():
    checked = 0
    for m in range(1, 7):
        for weights in itertools.product(range(5), repeat=m):
            w = Staircase(weights)
            for m0 in range(1, m + 1):
                try:
                    check_corollary_shape(w, m0)
                except ValueError:
                    continue
                for j in range(1, m0 + 2):
                    for q in range(1, 7):
                        if corollary42_applicable(w, m0, j, q):
                            checked += 1
                            assert lemma41_applicable(w, j, q), (weights, m0, j, q)
    assert checked > 1000


@pytest.mark.parametrize(
    "q, expected",
    [(2, (2, 1, 0, 1)), (3, (3, 2, 1, 0, 1, 0, 0, 1))],
)
def test_omega_q_examples(q, expected):
    assert omega_q(q).weights == expected


def test_omega_q_lengths():
    assert omega_q(4).m == 13
    for q in range(2, 12):
        assert omega_q(q).m == staircase_length(q) == q + (q - 1) * (q + 2) // 2
        assert 2 * staircase_length(q) + 1 == q * q + 3 * q - 1
    with pytest.raises(ValueError):
        omega_q(1)


def test_omega_family_examples():
    assert omega_family(2, 3, 1).weights == (2, 0, 1)
    d = LatticeDims(9, 9)
    first = region_of(omega_family(2, 1, 1), d).cells
    assert len(first - region_of(W(1), d).cells) == 1
    with pytest.raises(ValueError):
        omega_family(2, 0, 1)
    with pytest.raises(ValueError):
        omega_family(2, 4, 3)


def test_region_examples():
    d = LatticeDims(9, 9)
    region = region_of(OMEGA2, d)
    assert [OMEGA2.height(b) for b in range(1, 5)] == [4, 2, 1, 1]
    assert len(region.cells) == 8
    assert region.cells == {(1, 1), (2, 1), (3, 1), (4, 1), (1, 2), (2, 2), (1, 3), (1, 4)}
    assert region_of(W(0), d).cells == frozenset()
    assert region_of(W(9), d).cells == {(a, 1) for a in range(1, 10)}
    with pytest.raises(ValueError):
        region_of(W(10), d)
    with pytest.raises(ValueError):
        region_of(Staircase((0,) * 9 + (1,)), d)


@given(st.lists(st.integers(0, 3), min_size=1, max_size=6))
def test_region_count_is_sum_of_suffix_sums(weights):
    w = Staircase(tuple(weights))
    d = LatticeDims(max(1, sum(weights)), len(weights))
    assert len(region_of(w, d).cells) == sum(partial_sum(w, b, w.m) for b in range(1, w.m + 1))


def test_propagate_examples():
    d = LatticeDims(3, 3)
    cert = propagate(d, slope_prefix(Slope(1, 1)))
    assert cert.determined == frozenset(d.cells())
    # singleton lines are exactly the four corner diagonals
    singletons = {ln.cells[0] for s in cert.slopes for ln in enumerate_lines(d, s) if len(ln) == 1}
    assert singletons == {(1, 1), (3, 1), (1, 3), (3, 3)}
    assert cert.derivation[0].cell in singletons
    assert cert.replay()
    assert len(propagate(LatticeDims(4, 4), slope_prefix(Slope(1, 1))).determined) < 16
    full = propagate(LatticeDims(3, 2), [Slope(0, 1)], initial=LatticeDims(3, 2).cells())
    assert full.determined == frozenset(LatticeDims(3, 2).cells()) and full.derivation == ()
    with pytest.raises(ValueError):
        propagate(d, [Slope(0, 1)], initial=[(4, 1)])


def test_derivation_log_follows_scan_order():
    # traced by hand: slope order, then offset, restart after each peel
    cert = propagate(LatticeDims(3, 3), slope_prefix(Slope(1, 1)))
    assert cert.derivation_text().splitlines() == [
        "(3, 3) <- -1 -6",
        "(1, 1) <- -1 -2",
        "(1, 3) <- 1 -2",
        "(2, 3) <- 0 -3",
        "(1, 2) <- inf 1",
        "(3, 2) <- -1 -5",
        "(2, 2) <- 0 -2",
        "(2, 1) <- inf 2",
        "(3, 1) <- 0 -1",
    ]


def test_replay_rejects_tampering():
    cert = propagate(LatticeDims(3, 3), slope_prefix(Slope(1, 1)))
    swapped = replace(cert, derivation=cert.derivation[::-1])
    assert not swapped.replay()
    short = replace(cert, derivation=cert.derivation[:-1])
    assert not short.replay()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(1, 7), st.integers(0, 11), st.integers(0, 10**6))
def test_fixpoint_is_order_independent_and_closed(n, m, last, seed):
    d = LatticeDims(n, m)
    slopes = slope_prefix(slope_at(last))
    a = propagate(d, slopes)
    b = propagate(d, slopes, seed=seed)
    assert a.determined == b.determined
    assert a.replay() and b.replay()
    for s in slopes:
        for ln in enumerate_lines(d, s):
            assert sum(c not in a.determined for c in ln.cells) != 1


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 11), st.data())
def test_propagate_from_initial_is_monotone(n, m, last, data):
    d = LatticeDims(n, m)
    slopes = slope_prefix(slope_at(last))
    cells = list(d.cells())
    initial = data.draw(st.sets(st.sampled_from(cells), max_size=len(cells)))
    base = propagate(d, slopes).determined
    more = propagate(d, slopes, initial=initial)
    assert base | initial <= more.determined
    assert more.replay()


def test_peel_predicate_cell_reached_by_propagation():
    # whenever the predicate holds on a certified region, peeling reaches the cell
    d = LatticeDims(9, 9)
    for weights in itertools.product(range(3), repeat=3):
        w = Staircase(weights)
        region = region_of(w, d).cells
        for q in (1, 2):
            for j in range(1, w.m + 2):
                if lemma41_applicable(w, j, q):
                    cert = propagate(d, [Slope(-1, q)], initial=region)
                    assert peel_cell(w, j) in cert.determined


def test_certify_with_symmetry():
    d = LatticeDims(7, 7)
    slopes = slope_prefix(Slope(-1, 2))
    plain = propagate(d, slopes).determined
    cert = certify(d, slopes)
    assert plain <= cert.determined <= entry_uniqueness_mask(d, slopes).unique_cells()
    assert cert.replay()
    with pytest.raises(ValueError):
        certify(d, slopes, transforms=[GridTransform.TRANSPOSE])


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_staircase_schedule_reaches_omega_q(q):
    steps = staircase_schedule(q)
    assert steps[0].after == W(1)
    assert steps[-1].after == omega_q(q)
    assert sum(s.kind == "transpose" for s in steps) == 2 * (q - 1)


def test_staircase_schedule_needs_room():
    with pytest.raises((CertificationError, ValueError)):
        staircase_schedule(3, LatticeDims(5, 5))


def test_bound_count_examples():
    assert theorem44_count(2, 4) == 9
    assert theorem44_count(2, 2) == 6
    assert theorem44_count(3, 1) == 12
    with pytest.raises(ValueError):
        theorem44_count(1, 4)
    with pytest.raises(ValueError):
        theorem44_count(2, 5)
    assert [bound_slope(3, v) for v in (1, 2, 3, 4)] == [Slope(-1, 3), Slope(-3, 1), Slope(1, 3), Slope(3, 1)]


@pytest.mark.parametrize("q", range(2, 11))
def test_bound_count_constituent_sums(q):
    m_q = (q * q + 3 * q - 2) // 2
    m_prev = ((q - 1) ** 2 + 3 * (q - 1) - 2) // 2
    corner = q - 2 + q * (q + 1) // 2
    assert bound_count_terms(q, 2) == (m_q, m_prev, 1)
    assert bound_count_terms(q, 4) == (m_q, m_q, 1)
    assert bound_count_terms(q, 1) == (corner, m_prev, 1)
    assert bound_count_terms(q, 3) == (m_q, corner, 1)
    closed = [q * q + 2 * q - 3, q * q + 2 * q - 2, q * q + 3 * q - 2, q * q + 3 * q - 1]
    for v in (1, 2, 3, 4):
        assert sum(bound_count_terms(q, v)) == theorem44_count(q, v) == closed[v - 1]
