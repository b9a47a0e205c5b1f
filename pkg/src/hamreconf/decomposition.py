"""Structural analysis of a cycle: interior, cookies, wall walks, leaves,
A-types, stacks and turns.

Two boxes are H-adjacent when they share an edge that is not in the cycle.
The H-components inside the grid are trees of boxes. One of them is the
interior of the cycle; every other one is a cookie, which touches the outer
boundary through exactly one missing boundary edge (its neck edge). The box
holding that edge is the neck.

Oriented templates (leaves, A-types, turns) are written once in a
"northern" frame and matched in the other orientations by mapping frame
coordinates onto the grid.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import InternalInvariantBroken, NotASmallCookie, OutOfRange
from .grid_model import (
    Box,
    CycleState,
    DirectedEdge,
    EdgeId,
    GridDims,
    Tables,
    Vertex,
    cycle_order,
    edge_between,
    tables,
)


# ---------------------------------------------------------------- interior

def interior_boxes(state: CycleState) -> frozenset[Box]:
    """Boxes inside the cycle, by counting crossings of a westward ray."""
    t = tables(state.dims)
    full = state.full
    out = []
    for l in range(t.n - 1):
        inside = False
        for k in range(t.m - 1):
            if full >> t.v_bit(k, l) & 1:
                inside = not inside
            if inside:
                out.append((k, l))
    return frozenset(out)


def interior_mask(t: Tables, full: int) -> list[bool]:
    flags = [False] * t.nb
    for l in range(t.n - 1):
        inside = False
        for k in range(t.m - 1):
            if full >> t.v_bit(k, l) & 1:
                inside = not inside
            flags[t.box_index(k, l)] = inside
    return flags


# ---------------------------------------------------------------- cookies

@dataclass(frozen=True)
class Cookie:
    boxes: frozenset[Box]
    neck: Box
    neck_edge: EdgeId

    @property
    def is_large(self) -> bool:
        return len(self.boxes) > 1


@dataclass(frozen=True)
class CookieDecomposition:
    interior: frozenset[Box]
    cookies: tuple[Cookie, ...]

    @property
    def large(self) -> list[Cookie]:
        return [c for c in self.cookies if c.is_large]

    @property
    def small(self) -> list[Cookie]:
        return [c for c in self.cookies if not c.is_large]


def h_component_labels(t: Tables, full: int) -> tuple[int, list[int]]:
    label = [-1] * t.nb
    count = 0
    for s in range(t.nb):
        if label[s] >= 0:
            continue
        label[s] = count
        queue = [s]
        while queue:
            x = queue.pop()
            for side, y in enumerate(t.box_nbrs[x]):
                if y >= 0 and label[y] < 0 and not (full >> t.box_bits[x][side] & 1):
                    label[y] = count
                    queue.append(y)
        count += 1
    return count, label


def h_components(state: CycleState) -> CookieDecomposition:
    t = tables(state.dims)
    full = state.full
    count, label = h_component_labels(t, full)
    inside = interior_mask(t, full)
    groups: list[list[int]] = [[] for _ in range(count)]
    for x, c in enumerate(label):
        groups[c].append(x)
    interior: frozenset[Box] = frozenset()
    cookies = []
    for members in groups:
        boxes = frozenset(t.boxes[x] for x in members)
        if inside[members[0]]:
            if interior:
                raise InternalInvariantBroken("interior split over two components")
            interior = boxes
            continue
        necks = [
            (x, b) for x in members for b in t.box_bits[x]
            if t.boundary_mask >> b & 1 and not (full >> b & 1)
        ]
        if len(necks) != 1:
            raise InternalInvariantBroken(
                f"component {sorted(boxes)} has {len(necks)} neck candidates")
        x, b = necks[0]
        cookies.append(Cookie(boxes, t.boxes[x], t.edge_ids[b]))
    cookies.sort(key=lambda c: c.neck)
    return CookieDecomposition(interior, tuple(cookies))


def cookie_counts(t: Tables, full: int) -> tuple[int, int]:
    """(large, small) cookie counts read off the missing boundary edges.

    The box holding a missing boundary edge is always a neck; it has three
    cycle edges exactly when its cookie is a single box.
    """
    large = small = 0
    gone = t.boundary_mask & ~full
    while gone:
        low = gone & -gone
        gone ^= low
        x = t.edge_boxes[low.bit_length() - 1][0]
        if (full & t.box_mask[x]).bit_count() == 3:
            small += 1
        else:
            large += 1
    return large, small


def neck_boxes(t: Tables, full: int) -> list[tuple[int, bool]]:
    """(neck box index, is_large) for every cookie."""
    out = []
    gone = t.boundary_mask & ~full
    while gone:
        low = gone & -gone
        gone ^= low
        x = t.edge_boxes[low.bit_length() - 1][0]
        out.append((x, (full & t.box_mask[x]).bit_count() != 3))
    return out


# ---------------------------------------------------------------- wall walks

@dataclass(frozen=True)
class HWalk:
    boxes: tuple[Box, ...]
    side: str
    edges: tuple[DirectedEdge, ...]


def _box_on(e: DirectedEdge, side: str) -> Box:
    """The box on ``side`` of a unit directed edge, possibly outside the grid."""
    (x1, y1), (x2, y2) = e
    dx, dy = x2 - x1, y2 - y1
    # the right normal of a step (dx, dy) is (dy, -dx)
    rx, ry = (dy, -dx) if side == "right" else (-dy, dx)
    return ((x1 + x2 + rx - 1) // 2, (y1 + y2 + ry - 1) // 2)


def oriented_cycle(state: CycleState, start: DirectedEdge) -> list[Vertex]:
    """Vertices of the underlying cycle walked so that ``start`` comes first."""
    t = tables(state.dims)
    full = state.full
    if not (full >> t.bit(start.undirected()) & 1):
        raise OutOfRange(f"{start} is not an edge of the cycle")
    order = cycle_order(state.dims, full, t.vindex(start.tail), t.vindex(start.head))
    return [t.vertex(v) for v in order]


def ftw_walk(state: CycleState, start: DirectedEdge, side: str = "right",
             stop: Optional[DirectedEdge] = None) -> HWalk:
    """Follow the wall on ``side`` of the trail from ``start`` through ``stop``.

    The first edge contributes its ``side`` box. At each turn toward the
    wall the same box repeats, going straight adds the next box, and
    turning away adds the box beside the straight continuation before the
    next one. With ``stop`` omitted or equal to ``start`` the whole closed
    circuit is walked, every turn including the last is counted, and the
    opening box is not counted separately.
    """
    if side not in ("right", "left"):
        raise ValueError("side must be 'right' or 'left'")
    start = DirectedEdge(tuple(start[0]), tuple(start[1]))
    verts = oriented_cycle(state, start)
    size = len(verts)
    trail = [DirectedEdge(verts[i], verts[(i + 1) % size]) for i in range(size)]
    closed = stop is None or DirectedEdge(tuple(stop[0]), tuple(stop[1])) == start
    if closed:
        edges = trail
        pairs = [(trail[i], trail[(i + 1) % size]) for i in range(size)]
        boxes: list[Box] = []
    else:
        stop = DirectedEdge(tuple(stop[0]), tuple(stop[1]))
        if stop not in trail:
            raise OutOfRange(f"{stop} is not on the oriented cycle")
        edges = trail[: trail.index(stop) + 1]
        pairs = list(zip(edges, edges[1:]))
        boxes = [_box_on(edges[0], side)]
    sign = 1 if side == "right" else -1
    for ej, ek in pairs:
        (ux, uy), (vx, vy) = ej
        wx, wy = ek.head
        dx, dy = vx - ux, vy - uy
        cross = dx * (wy - vy) - dy * (wx - vx)  # > 0 for a left turn
        if cross * sign < 0:  # turning toward the wall
            boxes.append(_box_on(ek, side))
        elif cross == 0:
            boxes.append(_box_on(ek, side))
        else:
            ext = DirectedEdge((vx, vy), (vx + dx, vy + dy))
            boxes.append(_box_on(ext, side))
            boxes.append(_box_on(ek, side))
    return HWalk(tuple(boxes), side, tuple(edges))


def interior_start(state: CycleState) -> DirectedEdge:
    """A directed cycle edge whose right box is interior (clockwise walk)."""
    # the south-west corner vertex always uses V(0,0); walking it north
    # keeps the interior box R(0,0) on the right
    return DirectedEdge((0, 0), (0, 1))


# ---------------------------------------------------------------- looping paths

def h_path(t: Tables, full: int, a: int, b: int) -> Optional[list[int]]:
    """The unique H-path between boxes a and b, or None."""
    parent = {a: -1}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x == b:
            path = [b]
            while parent[path[-1]] >= 0:
                path.append(parent[path[-1]])
            return path[::-1]
        for side, y in enumerate(t.box_nbrs[x]):
            if y >= 0 and y not in parent and not (full >> t.box_bits[x][side] & 1):
                parent[y] = x
                queue.append(y)
    return None


def looping_h_path(state: CycleState, w: Box) -> Optional[list[Box]]:
    """The H-path joining the two boxes across W's cycle edges, if they share a component."""
    t = tables(state.dims)
    full = state.full
    k, l = w
    if not t.has_box(k, l):
        raise OutOfRange(f"box {w} not in {state.dims}")
    x = t.box_index(k, l)
    if not t.is_switchable(full, x):
        raise OutOfRange(f"R{w} is not switchable")
    ends = [t.box_nbrs[x][side] for side in range(4) if full >> t.box_bits[x][side] & 1]
    if any(e < 0 for e in ends):
        return None
    path = h_path(t, full, ends[0], ends[1])
    return None if path is None else [t.boxes[p] for p in path]


# ---------------------------------------------------------------- frames

class Frame:
    """Maps coordinates of a northern-view frame onto the grid.

    ``flip_y`` mirrors north/south, ``flip_x`` mirrors east/west and
    ``swap`` exchanges the axes, so a frame's north can be any compass side.
    """

    def __init__(self, dims: GridDims, swap: bool = False, flip_x: bool = False,
                 flip_y: bool = False):
        self.dims = dims
        self.swap, self.flip_x, self.flip_y = swap, flip_x, flip_y
        m, n = dims
        self.fm, self.fn = (n, m) if swap else (m, n)

    def vertex(self, x: int, y: int) -> Vertex:
        if self.flip_x:
            x = self.fm - 1 - x
        if self.flip_y:
            y = self.fn - 1 - y
        return (y, x) if self.swap else (x, y)

    def contains(self, x: int, y: int) -> bool:
        return 0 <= x < self.fm and 0 <= y < self.fn

    def edge(self, a: Vertex, b: Vertex) -> Optional[EdgeId]:
        if not (self.contains(*a) and self.contains(*b)):
            return None
        return edge_between(self.vertex(*a), self.vertex(*b))

    def box(self, k: int, l: int) -> Box:
        (x1, y1), (x2, y2) = self.vertex(k, l), self.vertex(k + 1, l + 1)
        return (min(x1, x2), min(y1, y2))

    def has_box(self, k: int, l: int) -> bool:
        return 0 <= k < self.fm - 1 and 0 <= l < self.fn - 1


COMPASS_FRAMES = {
    "N": dict(),
    "S": dict(flip_y=True),
    "E": dict(swap=True),
    "W": dict(swap=True, flip_y=True),
}

TURN_FRAMES = {
    "NE": dict(),
    "SE": dict(flip_y=True),
    "NW": dict(flip_x=True),
    "SW": dict(flip_x=True, flip_y=True),
}


def _edge_test(state: CycleState, frame: Frame) -> Callable[[Vertex, Vertex], bool]:
    t = tables(state.dims)
    bits = state.full

    def has(a: Vertex, b: Vertex) -> bool:
        e = frame.edge(a, b)
        return e is not None and bool(bits >> t.bit_of[e] & 1)

    return has


def H_(has, i, j):
    return has((i, j), (i + 1, j))


def V_(has, i, j):
    return has((i, j), (i, j + 1))


# ---------------------------------------------------------------- A-types

@dataclass(frozen=True)
class ATypeMatch:
    kind: str           # "A", "A0" or "A1"
    compass: str        # N, E, S or W
    anchor: Box         # the box between the two verticals
    middle: Optional[Box] = None  # the switchable middle box of an A1


def classify_a_types(state: CycleState) -> list[ATypeMatch]:
    """Every A-type, labelled with its most specific kind.

    In the northern frame an A-type at (k, l) is the pair of shoulders
    e(k-1,k;l), e(k+1,k+2;l) with the verticals e(k;l,l+1), e(k+1;l,l+1).
    A cap e(k,k+1;l+1) makes it an A0; both verticals continuing to l+2
    make it an A1.
    """
    out = []
    for compass, kw in COMPASS_FRAMES.items():
        fr = Frame(state.dims, **kw)
        has = _edge_test(state, fr)
        for l in range(fr.fn - 1):
            for k in range(1, fr.fm - 2):
                if not (H_(has, k - 1, l) and V_(has, k, l) and H_(has, k + 1, l) and V_(has, k + 1, l)):
                    continue
                anchor = fr.box(k, l)
                if H_(has, k, l + 1):
                    out.append(ATypeMatch("A0", compass, anchor))
                elif V_(has, k, l + 1) and V_(has, k + 1, l + 1):
                    out.append(ATypeMatch("A1", compass, anchor, anchor))
                else:
                    out.append(ATypeMatch("A", compass, anchor))
    out.sort(key=lambda a: (a.compass, a.anchor))
    return out


@dataclass(frozen=True)
class StackInfo:
    j: int                 # number of A0s stacked above the cookie
    top: Box               # topmost leaf of the stack
    followed_by: str       # collectible, detour, A1, A or boundary
    compass: str


def cookie_frame(state: CycleState, c: Box) -> tuple[Frame, int, int]:
    """Frame in which small cookie ``c`` sits on the southern side, and its frame coords."""
    t = tables(state.dims)
    full = state.full
    k, l = c
    if not t.has_box(k, l):
        raise NotASmallCookie(f"R{c} is not a box")
    x = t.box_index(k, l)
    missing = [s for s, b in enumerate(t.box_bits[x]) if not (full >> b & 1)]
    if len(missing) != 1 or not (t.boundary_mask >> t.box_bits[x][missing[0]] & 1):
        raise NotASmallCookie(f"R{c} is not a small cookie")
    compass = "NWSE"[missing[0]]  # missing S -> northern leaf, E -> western, ...
    fr = Frame(state.dims, **COMPASS_FRAMES[compass])
    for fk in range(fr.fm - 1):
        if fr.box(fk, 0) == c:
            return fr, fk, compass
    raise InternalInvariantBroken("cookie frame lookup failed")


def a0_stack(state: CycleState, c: Box) -> StackInfo:
    """Walk the A0s stacked above small cookie ``c`` and report what caps them."""
    fr, k, compass = cookie_frame(state, c)
    has = _edge_test(state, fr)
    j, top = 0, 0
    while True:
        if top + 1 >= fr.fn - 1:
            return StackInfo(j, fr.box(k, top), "boundary", compass)
        if H_(has, k, top + 2):
            return StackInfo(j, fr.box(k, top), "collectible", compass)
        # the A-type two rows up is forced
        if top + 3 > fr.fn - 1:
            raise InternalInvariantBroken("leaf without room for its A-type")
        if H_(has, k, top + 3):
            j += 1
            top += 2
            continue
        if V_(has, k, top + 3) and V_(has, k + 1, top + 3):
            return StackInfo(j, fr.box(k, top), "A1", compass)
        if H_(has, k - 1, top + 3) or H_(has, k + 1, top + 3):
            return StackInfo(j, fr.box(k, top), "detour", compass)
        return StackInfo(j, fr.box(k, top), "A", compass)


# ---------------------------------------------------------------- turns

@dataclass(frozen=True)
class Turn:
    orientation: str
    length: int
    stairs: frozenset[EdgeId]
    edges: frozenset[EdgeId]
    leaves: tuple[Box, Box]         # (first leaf, second leaf) e.g. (north, east)
    openness: tuple[str, str]
    sector: tuple[int, int, int, int]  # x0, y0, x1, y1 vertex bounds

    @property
    def status(self) -> str:
        opened = self.openness.count("open")
        return ("closed", "half-open", "open")[opened]


def detect_turns(state: CycleState) -> list[Turn]:
    """Staircase turns with d >= 2 in all four orientations.

    Works on raw edge sets too, so partial fixtures can be inspected.
    In the NE frame a turn of length d at (k, l) is e(k;l-1,l), then d-1
    stair steps (down, right) starting at (k+1, l), then e(k'-1,k';l') with
    k' = k+d and l' = l-d.
    """
    out = []
    for orient, kw in TURN_FRAMES.items():
        fr = Frame(state.dims, **kw)
        has = _edge_test(state, fr)
        for k in range(fr.fm):
            for l in range(1, fr.fn):
                if not V_(has, k, l - 1):
                    continue
                stairs = []
                r = 0
                while True:
                    a, b = k + 1 + r, l - r
                    if b - 1 < 0 or not (V_(has, a, b - 1) and H_(has, a, b - 1)):
                        break
                    stairs += [fr.edge((a, b - 1), (a, b)), fr.edge((a, b - 1), (a + 1, b - 1))]
                    r += 1
                    d = r + 1
                    kp, lp = k + d, l - d
                    if lp >= 0 and H_(has, kp - 1, lp):
                        # longer matches are impossible in a valid cycle but a
                        # raw fixture could contain both; report each
                        north_leaf = fr.box(k, l - 1)
                        east_leaf = fr.box(kp - 1, lp)
                        n_open = "closed" if H_(has, k, l) else "open"
                        e_open = "closed" if V_(has, kp, lp) else "open"
                        corners = [fr.vertex(k, lp), fr.vertex(fr.fm - 1, fr.fn - 1)]
                        xs = sorted(c[0] for c in corners)
                        ys = sorted(c[1] for c in corners)
                        first = fr.edge((k, l - 1), (k, l))
                        last = fr.edge((kp - 1, lp), (kp, lp))
                        out.append(Turn(
                            orient, d, frozenset(stairs),
                            frozenset(stairs) | {first, last},
                            (north_leaf, east_leaf), (n_open, e_open),
                            (xs[0], ys[0], xs[1], ys[1]),
                        ))
    # keep maximal turns only
    out = [tn for tn in out if not any(o is not tn and tn.stairs < o.stairs for o in out)]
    out.sort(key=lambda tn: (tn.orientation, sorted(tn.edges)))
    return out

