import pytest

from hamreconf.decomposition import (
    a0_stack,
    classify_a_types,
    detect_turns,
    ftw_walk,
    h_components,
    interior_boxes,
    interior_start,
    looping_h_path,
)
from hamreconf.errors import NotASmallCookie, OutOfRange
from hamreconf.grid_model import DirectedEdge, EdgeId, perimeter_cycle, serpentine_cycle, tables, validate
from hamreconf.moves import switchable_boxes
from hamreconf.render import parse_ascii

import laws
from conftest import edge_set, sample_cycles

SQUARE = validate((2, 2), 0b1111)

# an 8x8 cycle reached by a random walk; the small cookie at R(3,0) carries
# one A0 above it
STACKED_8X8 = """\
+---+   +---+   +---+---+---+
|   |   |   |   |           |
+   +---+   +---+   +---+---+
|                   |
+---+   +---+   +---+   +---+
    |   |   |   |       |   |
+---+   +   +---+   +---+   +
|       |           |       |
+   +---+   +---+   +---+   +
|   |       |   |       |   |
+   +---+---+   +---+   +   +
|                   |   |   |
+   +---+   +---+   +---+   +
|   |   |   |   |           |
+---+   +---+   +---+---+---+
"""


def a0(k, l):
    """The edges of a northern A0 at R(k,l): two shoulders, two verticals, a cap."""
    return [("H", k - 1, l), ("V", k, l), ("H", k, l + 1), ("V", k + 1, l), ("H", k + 1, l)]


# ---------------------------------------------------------------- interior

def test_interior_examples():
    assert interior_boxes(SQUARE) == {(0, 0)}
    assert interior_boxes(perimeter_cycle((2, 4))) == {(0, 0), (0, 1), (0, 2)}


def test_decomposition_partitions_boxes(cycles_4x4, cycles_6x6):
    for c in cycles_4x4 + sample_cycles(cycles_6x6, 200, 1):
        dec = h_components(c)
        parts = [dec.interior] + [ck.boxes for ck in dec.cookies]
        t = tables(c.dims)
        assert sum(len(p) for p in parts) == t.nb
        assert set().union(*parts) == set(t.boxes)
        assert dec.interior == interior_boxes(c)


def test_square_has_no_cookies():
    dec = h_components(SQUARE)
    assert dec.interior == {(0, 0)} and dec.cookies == ()


def test_snake_large_necks_switchable():
    snake = serpentine_cycle((4, 4))
    dec = h_components(snake)
    assert dec.large
    sw = switchable_boxes(snake)
    assert all(c.neck in sw for c in dec.large)
    for c in dec.cookies:
        assert c.neck in c.boxes
        assert not snake.has(c.neck_edge)


def test_cookie_laws(cycles_4x4, cycles_6x6):
    for c in cycles_4x4 + cycles_6x6:
        assert laws.cookie_necks(c) == []


# ---------------------------------------------------------------- wall walks

def test_ftw_square():
    clockwise = DirectedEdge((0, 0), (0, 1))
    counter = DirectedEdge((0, 0), (1, 0))
    assert ftw_walk(SQUARE, clockwise, "right").boxes == ((0, 0),) * 4
    ring = ftw_walk(SQUARE, counter, "right").boxes
    assert ring == ((1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1))
    assert ftw_walk(SQUARE, counter, "left").boxes == ((0, 0),) * 4


def test_ftw_partial_trail():
    walk = ftw_walk(SQUARE, DirectedEdge((0, 0), (1, 0)), "right", DirectedEdge((1, 0), (1, 1)))
    # first edge adds one box; turning away from the wall adds two
    assert walk.boxes == ((0, -1), (1, -1), (1, 0))


def test_ftw_errors():
    with pytest.raises(OutOfRange):
        ftw_walk(perimeter_cycle((2, 4)), DirectedEdge((0, 1), (1, 1)))
    with pytest.raises(ValueError):
        ftw_walk(SQUARE, DirectedEdge((0, 0), (0, 1)), "up")


def test_ftw_matches_ray_cast(cycles_4x4, cycles_6x6):
    for c in cycles_4x4 + sample_cycles(cycles_6x6, 300, 2):
        assert laws.ftw_matches_ray_cast(c) == []


def test_walk_boxes_are_h_adjacent(cycles_4x4):
    for c in cycles_4x4:
        walk = ftw_walk(c, interior_start(c), "left")
        for a, b in zip(walk.boxes, walk.boxes[1:]):
            assert a == b or abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


# ---------------------------------------------------------------- looping paths

def test_looping_path_example(looping_example):
    path = looping_h_path(looping_example, (3, 2))
    assert path == [(4, 2), (4, 1), (4, 0), (3, 0), (2, 0), (2, 1), (2, 2)]


def test_looping_path_absent_between_components():
    strip = perimeter_cycle((2, 4))
    # the middle box's cycle edges face the outside of the grid
    assert looping_h_path(strip, (0, 1)) is None
    with pytest.raises(OutOfRange):
        looping_h_path(strip, (0, 0))


def test_looping_path_moves(cycles_6x6, looping_example):
    assert laws.looping_paths(looping_example) == []
    for c in sample_cycles(cycles_6x6, 300, 3):
        assert laws.looping_paths(c) == []


# ---------------------------------------------------------------- A-types and stacks

def test_a0_template():
    fixture = edge_set((6, 6), a0(2, 2))
    (match,) = classify_a_types(fixture)
    assert (match.kind, match.compass, match.anchor) == ("A0", "N", (2, 2))


def test_a1_template():
    k, l = 2, 1
    edges = [("H", k - 1, l), ("V", k, l), ("V", k + 1, l), ("H", k + 1, l),
             ("V", k, l + 1), ("V", k + 1, l + 1)]
    kinds = {(m.kind, m.compass, m.anchor) for m in classify_a_types(edge_set((6, 6), edges))}
    assert ("A1", "N", (k, l)) in kinds


def test_no_a_types_on_square():
    assert classify_a_types(SQUARE) == []


def test_a1_middle_boxes_switchable(cycles_6x6):
    seen = 0
    for c in cycles_6x6:
        sw = switchable_boxes(c)
        for m in classify_a_types(c):
            if m.kind == "A1":
                seen += 1
                assert m.middle in sw
    assert seen > 0


def test_stack_of_two():
    # three A0s at R(1,0), R(1,2), R(1,4) with the cap of the top leaf closed
    edges = a0(1, 0) + a0(1, 2) + a0(1, 4) + [("H", 1, 6)]
    info = a0_stack(edge_set((5, 8), edges), (1, 0))
    assert (info.j, info.top, info.followed_by, info.compass) == (2, (1, 4), "collectible", "N")


def test_stack_on_a_real_cycle():
    state = parse_ascii(STACKED_8X8)
    info = a0_stack(state, (3, 0))
    assert (info.j, info.top, info.followed_by) == (1, (3, 2), "collectible")
    assert a0_stack(state, (1, 0)).j == 0


def test_stack_needs_small_cookie():
    snake = serpentine_cycle((6, 6))
    with pytest.raises(NotASmallCookie):
        a0_stack(snake, (2, 2))


def test_stacks_in_every_orientation(cycles_6x6):
    compasses = set()
    for c in cycles_6x6:
        for ck in h_components(c).small:
            info = a0_stack(c, ck.neck)
            compasses.add(info.compass)
            assert info.j >= 0
    assert compasses == {"N", "E", "S", "W"}


# ---------------------------------------------------------------- turns

def test_half_open_turn():
    edges = [("V", 1, 3), ("V", 2, 3), ("H", 2, 3), ("V", 3, 2), ("H", 3, 2), ("V", 4, 1), ("H", 3, 1)]
    (turn,) = detect_turns(edge_set((6, 6), edges))
    assert turn.orientation == "NE" and turn.length == 3
    assert turn.status == "half-open" and turn.openness == ("open", "closed")
    assert turn.leaves == ((1, 3), (3, 1))


def test_no_turns_on_square():
    assert detect_turns(SQUARE) == []


def test_turn_edges_lie_in_cycle(cycles_6x6):
    found = 0
    for c in sample_cycles(cycles_6x6, 200, 4):
        for turn in detect_turns(c):
            found += 1
            assert turn.length >= 2
            assert all(c.has(e) for e in turn.edges)
    assert found > 0
