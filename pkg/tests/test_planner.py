import random

import pytest

from hamreconf.canonical import build_canonical, is_canonical
from hamreconf.decomposition import cookie_counts
from hamreconf.errors import DimsMismatch, KindMismatch, NoLargeCookiePair, PreconditionFailed
from hamreconf.grid_model import EdgeId, serpentine_cycle, tables, validate
from hamreconf.moves import MoveRecord, MoveSequence, apply_double_switch, replay
from hamreconf.oracle import build_reconfiguration_graph, bfs_distance
from hamreconf.planner import (
    MLC_DEPTH,
    cookie_delta,
    mlc_step,
    one_lc_bound,
    one_lc_step,
    reconfigure,
    rtcf,
    rtcf_bound,
    total_bound,
    verify_sequence,
)
from hamreconf.render import parse_ascii

from conftest import TWO_LARGE_6X6, edge_set, sample_cycles, walked
from test_decomposition import STACKED_8X8

# two large cookies; a flip at R(1,0) slides the lower one's neck east
NECK_SHIFT_6X6 = """\
+---+---+---+---+---+
|                   |
+   +---+---+---+---+
|   |
+   +---+---+---+---+
|                   |
+   +---+---+   +---+
|   |       |   |
+   +   +---+   +---+
|   |   |           |
+---+   +---+---+---+
"""

# the small cookie at R(0,1) is collected by a flip from R(1,1)
SMALL_WEST_6X6 = """\
+---+---+---+---+---+
|                   |
+   +---+---+---+---+
|   |
+   +---+---+---+---+
|                   |
+---+   +---+---+---+
    |   |
+---+   +---+---+---+
|                   |
+---+---+---+---+---+
"""

# one large cookie and a small one at R(4,1), collected by a flip from R(3,1)
ONE_SMALL_6X6 = """\
+---+---+---+---+---+
|                   |
+   +---+---+---+---+
|   |
+   +   +---+---+---+
|   |   |           |
+   +   +---+   +---+
|   |       |   |
+   +---+---+   +---+
|                   |
+---+---+---+---+---+
"""


def counts(state):
    return cookie_counts(tables(state.dims), state.full)


# ---------------------------------------------------------------- bounds

def test_bounds():
    assert one_lc_bound((6, 6)) == 11 and one_lc_bound((5, 8)) == 11
    assert total_bound((6, 6)) == 216 and total_bound((5, 8)) == 320 and total_bound((4, 4)) == 64
    assert rtcf_bound((6, 6)) == 6 ** 3 / 2 - 9 + 6 - 12


# ---------------------------------------------------------------- cookie accounting

def test_cookie_delta_neck_shift():
    state = parse_ascii(NECK_SHIFT_6X6)
    mv = MoveRecord((1, 0), (2, 0), "flip")
    assert counts(state) == (2, 1)
    assert cookie_delta(state, mv) == {"total_delta": 0, "large_delta": 0, "is_nsf": True}


def test_cookie_delta_collect():
    state = parse_ascii(SMALL_WEST_6X6)
    mv = MoveRecord((1, 1), (0, 1), "flip")
    assert cookie_delta(state, mv) == {"total_delta": -1, "large_delta": 0, "is_nsf": False}


def test_cookie_delta_trivial():
    s = serpentine_cycle((6, 6))
    assert cookie_delta(s, MoveRecord((0, 1), (0, 1), "trivial")) == {
        "total_delta": 0, "large_delta": 0, "is_nsf": False}


# ---------------------------------------------------------------- cascades

def test_mlc_step_two_large():
    state = parse_ascii(TWO_LARGE_6X6)
    assert counts(state)[0] == 2
    cascade = mlc_step(state)
    assert cascade.purpose == "MLC" and 1 <= len(cascade) <= MLC_DEPTH
    after = replay(state, cascade.moves)
    assert counts(after)[0] < 2


def test_mlc_needs_two_large():
    with pytest.raises(NoLargeCookiePair):
        mlc_step(parse_ascii(ONE_SMALL_6X6))
    with pytest.raises(NoLargeCookiePair):
        mlc_step(build_canonical((6, 6), [(0, 1), (2, 3)]))


def test_one_lc_preconditions():
    with pytest.raises(PreconditionFailed):
        one_lc_step(parse_ascii(TWO_LARGE_6X6))
    with pytest.raises(PreconditionFailed):
        one_lc_step(build_canonical((6, 6), [(0, 1), (2, 3)]))


def test_one_lc_single_flip():
    state = parse_ascii(ONE_SMALL_6X6)
    assert counts(state) == (1, 1)
    cascade = one_lc_step(state)
    assert cascade.purpose == "OneLC" and cascade.target == (4, 1)
    assert cascade.moves == [MoveRecord((3, 1), (4, 1), "flip")]
    assert counts(replay(state, cascade.moves)) == (1, 0)


def test_one_lc_after_merge():
    state = parse_ascii(SMALL_WEST_6X6)
    assert counts(state) == (2, 1)
    merged = replay(state, mlc_step(state).moves)
    cascade = one_lc_step(merged)
    after = replay(merged, cascade.moves)
    assert sum(counts(after)) < sum(counts(merged))
    assert counts(after)[0] <= max(counts(merged)[0], 1)


def test_unzip_of_three_leaf_stack():
    # a column of A0s topped by a closed cap unzips with one flip per leaf
    def a0(k, l):
        return [("H", k - 1, l), ("V", k, l), ("H", k, l + 1), ("V", k + 1, l), ("H", k + 1, l)]

    state = edge_set((5, 8), a0(1, 0) + a0(1, 2) + a0(1, 4) + [("H", 1, 6)])
    t = tables(state.dims)
    full = state.edges
    for x, y in [((1, 5), (1, 4)), ((1, 3), (1, 2)), ((1, 1), (1, 0))]:
        xi, yi = t.box_index(*x), t.box_index(*y)
        assert t.is_switchable(full, xi)
        full ^= t.box_mask[xi]
        assert t.is_switchable(full, yi)
        full ^= t.box_mask[yi]
    expected = edge_set((5, 8), [
        ("H", 0, 0), ("H", 1, 0), ("H", 2, 0),
        ("H", 0, 2), ("V", 1, 1), ("H", 1, 1), ("V", 2, 1), ("H", 2, 2),
        ("H", 0, 4), ("V", 1, 3), ("H", 1, 3), ("V", 2, 3), ("H", 2, 4),
        ("V", 1, 5), ("H", 1, 5), ("V", 2, 5),
    ])
    assert full == expected.edges


def test_stacked_cookie_collected_within_bound():
    state = parse_ascii(STACKED_8X8)
    large, small = counts(state)
    assert large <= 1 and small >= 1
    cascade = one_lc_step(state)
    assert len(cascade) <= one_lc_bound(state.dims)
    replay(state, cascade.moves)


# ---------------------------------------------------------------- RtCF

def test_rtcf_on_canonical_is_empty():
    state = build_canonical((6, 6), [(0, 1), (2, 3)])
    spec, seq = rtcf(state)
    assert len(seq) == 0 and spec == is_canonical(state)


def test_rtcf_lengths_6x6(cycles_6x6):
    bound = rtcf_bound((6, 6))
    for c in sample_cycles(cycles_6x6, 150, 11):
        spec, seq = rtcf(c)
        assert len(seq) <= bound
        assert replay(c, seq.moves) == spec.state()


def test_cascade_discipline(cycles_6x6):
    # no cascade may add cookies except through neck shifts
    for c in sample_cycles(cycles_6x6, 100, 12):
        _, seq = rtcf(c)
        state = c
        for mv in seq.moves:
            delta = cookie_delta(state, mv)
            assert delta["total_delta"] <= 0 or delta["is_nsf"]
            state = apply_double_switch(state, mv.first, mv.second)


def test_monotone_progress(cycles_6x6):
    for c in sample_cycles(cycles_6x6, 200, 13) + walked((8, 8), 10, 14):
        _, seq = rtcf(c)
        for cas in seq.stats["cascades"]:
            (lb, sb), (la, sa) = cas["before"], cas["after"]
            if cas["purpose"] == "MLC" or lb >= 1:
                assert (la, sa) < (lb, sb)
            else:
                # in a thin last layer a collected small cookie may leave one large behind
                assert la + sa < lb + sb and la <= 1


def test_rtcf_on_e_cycle():
    s = serpentine_cycle((6, 6))
    e = EdgeId("V", 0, 1)
    t = tables(s.dims)
    ec = validate(s.dims, s.edges & ~(1 << t.bit(e)), removed=e)
    spec, seq = rtcf(ec)
    assert spec.removed == e and seq.end.kind == "e-cycle"


# ---------------------------------------------------------------- reconfigure

def test_reconfigure_identity():
    s = serpentine_cycle((6, 6))
    assert len(reconfigure(s, s)) == 0


def test_reconfigure_4x4_all_pairs(cycles_4x4):
    g = build_reconfiguration_graph((4, 4))
    for a in cycles_4x4:
        for b in cycles_4x4:
            seq = reconfigure(a, b)
            assert verify_ok(seq)
            assert bfs_distance(g, a, b) <= len(seq) <= 64


def test_reconfigure_mismatches():
    with pytest.raises(DimsMismatch):
        reconfigure(serpentine_cycle((6, 6)), serpentine_cycle((6, 8)))
    s = serpentine_cycle((6, 6))
    e = EdgeId("V", 0, 1)
    ec = validate(s.dims, s.edges & ~(1 << tables(s.dims).bit(e)), removed=e)
    with pytest.raises(KindMismatch):
        reconfigure(s, ec)


def test_reconfigure_e_cycles():
    rng = random.Random(4)
    e = EdgeId("V", 0, 1)
    states = []
    for c in walked((6, 6), 40, 5):
        t = tables(c.dims)
        if c.has(e):
            states.append(validate(c.dims, c.edges & ~(1 << t.bit(e)), removed=e))
    assert len(states) >= 4
    for _ in range(6):
        a, b = rng.sample(states, 2)
        seq = reconfigure(a, b)
        assert verify_ok(seq) and seq.end.removed == e


def test_verify_reports_bad_index(cycles_6x6):
    a, b = sample_cycles(cycles_6x6, 2, 20)
    seq = reconfigure(a, b)
    assert len(seq) >= 3
    bad = list(seq.moves)
    bad[2] = MoveRecord((0, 0), (5, 5), "general")
    assert verify_sequence(MoveSequence(a, bad, b)) == (False, 2)
    assert verify_sequence(MoveSequence(a, seq.moves, a)) == (False, len(seq))


def test_reversed_sequence_verifies(cycles_6x6):
    a, b = sample_cycles(cycles_6x6, 2, 21)
    seq = reconfigure(a, b)
    back = MoveSequence(b, [mv.inverse() for mv in reversed(seq.moves)], a)
    assert verify_ok(back)


def test_10x10_smoke():
    a, b = walked((10, 10), 2, 30, steps=600)
    seq = reconfigure(a, b)
    assert verify_ok(seq) and len(seq) <= total_bound((10, 10))
    assert seq.stats["method"] == "canonical"


def verify_ok(seq):
    return verify_sequence(seq) == (True, None)
