"""Switches, double-switch moves and the backbite move.

A box is switchable when exactly two of its edges are in the cycle and
they are parallel; switching it swaps that pair for the other pair. On a
Hamiltonian cycle a switch always leaves two disjoint cycles, and a second
switch at Y reconnects them exactly when Y is a port: switchable in the
two-factor with one edge on each cycle.

For e-cycles every move works on the underlying cycle with the removed
edge put back, and the one box incident on that edge is never switched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import (
    IllegalNeighbor,
    InvalidState,
    MoreThanTwoComponents,
    NotAPath,
    NotHamiltonianAfter,
    NotSwitchable,
    OutOfRange,
    ParseError,
    SecondNotSwitchable,
)
from .grid_model import (
    COMPASS,
    Box,
    CycleState,
    GridDims,
    Tables,
    Vertex,
    _components,
    cycle_order,
    edge_between,
    tables,
    validate,
)

MOVE_KINDS = ("trivial", "flip", "transpose", "general")


class MoveRecord(NamedTuple):
    first: Box
    second: Box
    kind: str = "general"

    def to_json(self) -> dict:
        return {"first": list(self.first), "second": list(self.second), "kind": self.kind}

    @classmethod
    def from_json(cls, obj: dict) -> "MoveRecord":
        kind = obj.get("kind", "general")
        if kind not in MOVE_KINDS:
            raise ValueError(f"unknown move kind {kind!r}")
        first, second = (tuple(int(v) for v in obj[key]) for key in ("first", "second"))
        if len(first) != 2 or len(second) != 2:
            raise ValueError("boxes are [k, l] pairs")
        return cls(first, second, kind)

    def inverse(self) -> "MoveRecord":
        return MoveRecord(self.second, self.first, self.kind)

    def shifted(self, dx: int, dy: int) -> "MoveRecord":
        (a, b), (c, d) = self.first, self.second
        return MoveRecord((a + dx, b + dy), (c + dx, d + dy), self.kind)

    def __str__(self) -> str:
        return f"R{self.first} -> R{self.second} ({self.kind})"


@dataclass(frozen=True)
class TwoFactor:
    dims: GridDims
    edges: int
    cycle_count: int
    labels: tuple[int, ...]
    forbidden: int = -1


def forbidden_box(state: CycleState) -> int:
    """Index of the box that holds an e-cycle's removed edge, else -1."""
    if state.removed is None:
        return -1
    t = tables(state.dims)
    return t.edge_boxes[t.bit(state.removed)][0]


def _box_index(t: Tables, box: Box) -> int:
    k, l = box
    if not t.has_box(k, l):
        raise OutOfRange(f"box {box} not in {t.dims}")
    return t.box_index(k, l)


def switchable_indices(t: Tables, full: int, forbid: int = -1) -> list[int]:
    return [x for x in range(t.nb) if x != forbid and t.is_switchable(full, x)]


def switchable_boxes(state: CycleState) -> set[Box]:
    t = tables(state.dims)
    return {t.boxes[x] for x in switchable_indices(t, state.full, forbidden_box(state))}


def leaves(state: CycleState) -> dict[str, set[Box]]:
    """Boxes with exactly three cycle edges, keyed by compass name.

    A leaf is named after the side its closed end points to, so a
    ``"N"`` leaf is open on its south side.
    """
    t = tables(state.dims)
    full = state.full
    out: dict[str, set[Box]] = {c: set() for c in COMPASS}
    for x, bits in enumerate(t.box_bits):
        present = [full >> b & 1 for b in bits]
        if sum(present) == 3:
            missing = present.index(0)
            out[COMPASS[(missing + 2) % 4]].add(t.boxes[x])
    return out


def all_leaves(state: CycleState) -> set[Box]:
    return set().union(*leaves(state).values())


def apply_switch(state: CycleState, box: Box) -> TwoFactor:
    t = tables(state.dims)
    x = _box_index(t, box)
    if x == forbidden_box(state) or not t.is_switchable(state.full, x):
        raise NotSwitchable(f"R{box} is not switchable")
    edges = state.full ^ t.box_mask[x]
    count, labels = _components(t, edges)
    return TwoFactor(state.dims, edges, count, tuple(labels), forbidden_box(state))


def ports(tf: TwoFactor) -> set[Box]:
    if tf.cycle_count != 2:
        raise MoreThanTwoComponents(f"expected 2 cycles, found {tf.cycle_count}")
    t = tables(tf.dims)
    out = set()
    for y in range(t.nb):
        if y == tf.forbidden or not t.is_switchable(tf.edges, y):
            continue
        a, b = _pair(t, tf.edges, y)
        if tf.labels[t.edge_ends[a][0]] != tf.labels[t.edge_ends[b][0]]:
            out.add(t.boxes[y])
    return out


def _pair(t: Tables, mask: int, x: int) -> tuple[int, int]:
    s, e, n, w = t.box_bits[x]
    return (s, n) if mask >> s & 1 else (e, w)


def classify(t: Tables, full: int, x: int, y: int) -> str:
    """Name the shape of move x -> y on the pre-move cycle ``full``."""
    if x == y:
        return "trivial"
    if y in t.box_nbrs[x]:
        return "flip"
    (k1, l1), (k2, l2) = t.boxes[x], t.boxes[y]
    if abs(k1 - k2) == 1 and abs(l1 - l2) == 1:
        for c in ((k2, l1), (k1, l2)):
            ci = t.box_index(*c)
            shared = set(t.box_bits[x]) & set(t.box_bits[ci])
            (sb,) = shared
            rest = [b for b in t.box_bits[ci] if b != sb]
            if not (full >> sb & 1) and all(full >> b & 1 for b in rest):
                return "transpose"
    return "general"


def apply_double_switch(state: CycleState, first: Box, second: Box) -> CycleState:
    """Switch ``first`` then ``second``; the result must be Hamiltonian again."""
    if tuple(first) == tuple(second):
        return state
    t = tables(state.dims)
    x, y = _box_index(t, first), _box_index(t, second)
    forbid = forbidden_box(state)
    if x == forbid or not t.is_switchable(state.full, x):
        raise NotSwitchable(f"R{tuple(first)} is not switchable")
    mid = state.full ^ t.box_mask[x]
    if y == forbid or not t.is_switchable(mid, y):
        raise SecondNotSwitchable(f"R{tuple(second)} is not switchable after the first switch")
    out = state.with_full(mid ^ t.box_mask[y])
    try:
        return validate(out.dims, out.edges, out.kind, out.removed)
    except InvalidState as exc:
        raise NotHamiltonianAfter(str(exc)) from None


def move_table(t: Tables, full: int, forbid: int = -1) -> list[tuple[int, int, int]]:
    """All valid nontrivial moves of a cycle as ``(x, y, new_full)``.

    Uses the cycle order so each port test is a range check: switching x
    at cycle positions s < u leaves one cycle on positions s+1..u.
    """
    order = cycle_order(t.dims, full)
    size = len(order)
    pos = [0] * t.nv
    for p, v in enumerate(order):
        pos[v] = p

    def epos(b: int) -> int:
        u, v = t.edge_ends[b]
        pu, pv = pos[u], pos[v]
        if pu - pv == 1 or pv - pu == 1:
            return pu if pu < pv else pv
        return size - 1

    sw = switchable_indices(t, full, forbid)
    swset = set(sw)
    out = []
    for x in sw:
        a, b = _pair(t, full, x)
        s, u = sorted((epos(a), epos(b)))
        mid = full ^ t.box_mask[x]
        cands = set(swset)
        cands.discard(x)
        for z in t.box_nbrs[x]:
            if z < 0 or z == forbid:
                continue
            if t.is_switchable(mid, z):
                cands.add(z)
            else:
                cands.discard(z)
        for y in sorted(cands):
            c, d = _pair(t, mid, y)
            pc = pos[t.edge_ends[c][0]]
            pd = pos[t.edge_ends[d][0]]
            if (s < pc <= u) != (s < pd <= u):
                out.append((x, y, mid ^ t.box_mask[y]))
    return out


def enumerate_valid_moves(state: CycleState) -> list[MoveRecord]:
    t = tables(state.dims)
    full = state.full
    return [
        MoveRecord(t.boxes[x], t.boxes[y], classify(t, full, x, y))
        for x, y, _ in move_table(t, full, forbidden_box(state))
    ]


def make_move(state: CycleState, first: Box, second: Box) -> MoveRecord:
    """A classified record for a move on ``state`` (validity not checked)."""
    t = tables(state.dims)
    return MoveRecord(tuple(first), tuple(second),
                      classify(t, state.full, _box_index(t, first), _box_index(t, second)))


class HamPath(NamedTuple):
    """A Hamiltonian path as its vertex sequence.

    Stored with the smaller endpoint first, so equal paths compare equal
    whichever way they were walked.
    """

    dims: GridDims
    vertices: tuple[Vertex, ...]

    @classmethod
    def of(cls, dims, vertices) -> "HamPath":
        vs = tuple(tuple(v) for v in vertices)
        if vs and vs[-1] < vs[0]:
            vs = vs[::-1]
        path = cls(GridDims(*dims), vs)
        check_path(path)
        return path

    def edges(self) -> frozenset:
        return frozenset(edge_between(a, b) for a, b in zip(self.vertices, self.vertices[1:]))


def check_path(path: HamPath) -> None:
    m, n = path.dims
    vs = path.vertices
    if len(vs) != m * n or len(set(vs)) != len(vs):
        raise NotAPath("vertex sequence does not visit every vertex exactly once")
    for (a, b), (c, d) in zip(vs, vs[1:]):
        if not (0 <= a < m and 0 <= b < n) or abs(a - c) + abs(b - d) != 1:
            raise NotAPath(f"{(a, b)} and {(c, d)} are not adjacent")
    a, b = vs[-1]
    if not (0 <= a < m and 0 <= b < n):
        raise NotAPath(f"{vs[-1]} is outside the grid")


def backbite(path: HamPath, end: str, neighbor: Vertex) -> HamPath:
    """Join an endpoint to a grid neighbour and cut the path just before it."""
    if end not in ("first", "last"):
        raise ValueError("end must be 'first' or 'last'")
    check_path(path)
    vs = list(path.vertices if end == "first" else reversed(path.vertices))
    v1 = vs[0]
    neighbor = tuple(neighbor)
    if abs(v1[0] - neighbor[0]) + abs(v1[1] - neighbor[1]) != 1:
        raise IllegalNeighbor(f"{neighbor} is not adjacent to {v1}")
    s = vs.index(neighbor) if neighbor in vs else -1
    if s <= 1:
        raise IllegalNeighbor(f"{neighbor} already follows {v1} on the path")
    # v_{s-1} .. v_1, v_s .. v_r  (0-based: vs[s-1] down to vs[0], then vs[s:])
    new = vs[s - 1::-1] + vs[s:]
    return HamPath.of(path.dims, new)


@dataclass
class MoveSequence:
    start: CycleState
    moves: list[MoveRecord]
    end: CycleState
    stats: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.moves)

    def to_json(self) -> list[dict]:
        return [mv.to_json() for mv in self.moves]


def dump_moves(moves) -> str:
    """A JSON array with one move per line."""
    body = ",\n".join("  " + json.dumps(mv.to_json()) for mv in moves)
    return "[\n" + body + "\n]\n" if body else "[]\n"


def load_moves(text: str) -> list[MoveRecord]:
    """Read moves from a JSON array or from JSON lines."""
    text = text.strip()
    if not text:
        return []
    try:
        if text.startswith("["):
            items = json.loads(text)
        else:
            items = [json.loads(line) for line in text.splitlines() if line.strip()]
        return [MoveRecord.from_json(obj) for obj in items]
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(0, f"bad move sequence: {exc}") from None


def replay(state: CycleState, moves) -> CycleState:
    for mv in moves:
        state = apply_double_switch(state, mv.first, mv.second)
    return state


def reclassify(state: CycleState, moves) -> list[MoveRecord]:
    """Recompute each move's kind against the state it is applied to."""
    out = []
    for mv in moves:
        rec = make_move(state, mv.first, mv.second)
        out.append(rec)
        state = apply_double_switch(state, mv.first, mv.second)
    return out
