"""Grid graph index spaces and the Hamiltonian cycle state.

Coordinates put the origin at the south-west corner, x grows east and y
grows north. Vertex (i, j) has 0 <= i < m and 0 <= j < n.

Edges are named by orientation and anchor vertex (the endpoint nearer the
origin): ``H i j`` joins (i, j) to (i+1, j) and ``V i j`` joins (i, j) to
(i, j+1). Box R(k, l) is the unit square with south-west corner (k, l).

Edge sets are Python ints used as bit vectors. Bits are row-major with the
horizontal block first::

    H(i, j) -> j*(m-1) + i
    V(i, j) -> (m-1)*n + j*m + i

so a bit vector written on one machine means the same thing on another.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Optional, Union

from .errors import (
    InvalidState,
    BadECycleEdge,
    DegreeViolation,
    Disconnected,
    NotSpanning,
    OutOfRange,
    ParseError,
)

Vertex = tuple[int, int]
Box = tuple[int, int]

S, E, N, W = 0, 1, 2, 3
COMPASS = ("S", "E", "N", "W")


class GridDims(NamedTuple):
    m: int
    n: int

    @property
    def vertex_count(self) -> int:
        return self.m * self.n

    @property
    def h_count(self) -> int:
        return (self.m - 1) * self.n

    @property
    def v_count(self) -> int:
        return self.m * (self.n - 1)

    @property
    def edge_count(self) -> int:
        return self.h_count + self.v_count

    @property
    def box_count(self) -> int:
        return max(self.m - 1, 0) * max(self.n - 1, 0)

    def __str__(self) -> str:
        return f"{self.m}x{self.n}"


class EdgeId(NamedTuple):
    orient: str
    i: int
    j: int

    def endpoints(self) -> tuple[Vertex, Vertex]:
        if self.orient == "H":
            return (self.i, self.j), (self.i + 1, self.j)
        return (self.i, self.j), (self.i, self.j + 1)

    def __str__(self) -> str:
        return f"{self.orient} {self.i} {self.j}"


class DirectedEdge(NamedTuple):
    tail: Vertex
    head: Vertex

    def reversed(self) -> "DirectedEdge":
        return DirectedEdge(self.head, self.tail)

    def undirected(self) -> EdgeId:
        return edge_between(self.tail, self.head)


def edge_between(u: Vertex, v: Vertex) -> EdgeId:
    (a, b), (c, d) = sorted((u, v))
    if b == d and c == a + 1:
        return EdgeId("H", a, b)
    if a == c and d == b + 1:
        return EdgeId("V", a, b)
    raise OutOfRange(f"{u} and {v} are not grid neighbours")


def has_hamiltonian_cycle(dims: GridDims) -> bool:
    m, n = dims
    return m * n >= 4 and m >= 2 and n >= 2 and (m % 2 == 0 or n % 2 == 0)


class Tables:
    """Precomputed incidence data for one grid size."""

    def __init__(self, dims: GridDims):
        m, n = dims
        self.dims = dims
        self.m, self.n = m, n
        self.nv = m * n
        self.nh = (m - 1) * n
        self.ne = self.nh + m * (n - 1)
        self.nb = max(m - 1, 0) * max(n - 1, 0)

        self.edge_ids: list[EdgeId] = []
        self.edge_ends: list[tuple[int, int]] = []
        for j in range(n):
            for i in range(m - 1):
                self.edge_ids.append(EdgeId("H", i, j))
                self.edge_ends.append((j * m + i, j * m + i + 1))
        for j in range(n - 1):
            for i in range(m):
                self.edge_ids.append(EdgeId("V", i, j))
                self.edge_ends.append((j * m + i, (j + 1) * m + i))
        self.bit_of = {e: b for b, e in enumerate(self.edge_ids)}

        self.vert_edges: list[list[int]] = [[] for _ in range(self.nv)]
        for b, (u, v) in enumerate(self.edge_ends):
            self.vert_edges[u].append(b)
            self.vert_edges[v].append(b)
        self.vert_mask = [sum(1 << b for b in es) for es in self.vert_edges]
        # neighbour vertex across each incident edge
        self.vert_nbrs = [
            [(b, self.edge_ends[b][0] ^ self.edge_ends[b][1] ^ v) for b in self.vert_edges[v]]
            for v in range(self.nv)
        ]

        self.boxes: list[Box] = [(k, l) for l in range(n - 1) for k in range(m - 1)]
        self.box_bits: list[tuple[int, int, int, int]] = []
        for k, l in self.boxes:
            self.box_bits.append((
                self.h_bit(k, l),
                self.v_bit(k + 1, l),
                self.h_bit(k, l + 1),
                self.v_bit(k, l),
            ))
        self.box_mask = [sum(1 << b for b in bits) for bits in self.box_bits]
        self.box_hmask = [(1 << bits[S]) | (1 << bits[N]) for bits in self.box_bits]
        self.box_vmask = [(1 << bits[E]) | (1 << bits[W]) for bits in self.box_bits]

        self.edge_boxes: list[list[int]] = [[] for _ in range(self.ne)]
        for x, bits in enumerate(self.box_bits):
            for b in bits:
                self.edge_boxes[b].append(x)

        self.boundary_mask = 0
        for b, boxes in enumerate(self.edge_boxes):
            if len(boxes) == 1:
                self.boundary_mask |= 1 << b

        # box across each side, or -1
        self.box_nbrs: list[tuple[int, int, int, int]] = []
        for x, (k, l) in enumerate(self.boxes):
            self.box_nbrs.append((
                self.box_index(k, l - 1) if l > 0 else -1,
                self.box_index(k + 1, l) if k < m - 2 else -1,
                self.box_index(k, l + 1) if l < n - 2 else -1,
                self.box_index(k - 1, l) if k > 0 else -1,
            ))

    def h_bit(self, i: int, j: int) -> int:
        return j * (self.m - 1) + i

    def v_bit(self, i: int, j: int) -> int:
        return self.nh + j * self.m + i

    def box_index(self, k: int, l: int) -> int:
        return l * (self.m - 1) + k

    def has_box(self, k: int, l: int) -> bool:
        return 0 <= k < self.m - 1 and 0 <= l < self.n - 1

    def vertex(self, v: int) -> Vertex:
        return (v % self.m, v // self.m)

    def vindex(self, p: Vertex) -> int:
        return p[1] * self.m + p[0]

    def bit(self, e: EdgeId) -> int:
        try:
            return self.bit_of[e]
        except KeyError:
            raise OutOfRange(f"edge {e} not in {self.dims}") from None

    def mask_of(self, edges: Iterable[EdgeId]) -> int:
        out = 0
        for e in edges:
            out |= 1 << self.bit(e)
        return out

    def edges_of(self, mask: int) -> list[EdgeId]:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.edge_ids[low.bit_length() - 1])
            mask ^= low
        return out

    def is_switchable(self, mask: int, x: int) -> bool:
        h = mask & self.box_hmask[x]
        v = mask & self.box_vmask[x]
        return (h == self.box_hmask[x] and not v) or (v == self.box_vmask[x] and not h)


@lru_cache(maxsize=None)
def tables(dims: GridDims) -> Tables:
    return Tables(GridDims(*dims))


def box_edges(dims: GridDims, box: Box) -> tuple[EdgeId, EdgeId, EdgeId, EdgeId]:
    """The four edges of ``box`` in the order S, E, N, W."""
    k, l = box
    if not (0 <= k <= dims[0] - 2 and 0 <= l <= dims[1] - 2):
        raise OutOfRange(f"box {box} not in {GridDims(*dims)}")
    return (EdgeId("H", k, l), EdgeId("V", k + 1, l), EdgeId("H", k, l + 1), EdgeId("V", k, l))


def side_of(edge: DirectedEdge, box: Box) -> str:
    """Which side of the directed edge the box lies on: ``'right'`` or ``'left'``."""
    (x1, y1), (x2, y2) = edge
    k, l = box
    if edge_between(edge.tail, edge.head) not in box_edges((k + 2, l + 2), box):
        raise OutOfRange(f"box {box} is not incident on {edge}")
    x, y = k + 0.5, l + 0.5
    return "right" if (x - x1) * (y2 - y1) + (y - y1) * (x1 - x2) > 0 else "left"


@dataclass(frozen=True)
class CycleState:
    """An edge set on a grid, normally certified by :func:`validate`.

    For an e-cycle ``removed`` names the boundary edge taken out of the
    underlying Hamiltonian cycle.
    """

    dims: GridDims
    edges: int
    kind: str = "cycle"
    removed: Optional[EdgeId] = None

    def __post_init__(self):
        if type(self.dims) is not GridDims:
            object.__setattr__(self, "dims", GridDims(*self.dims))
        if self.removed is not None and type(self.removed) is not EdgeId:
            object.__setattr__(self, "removed", EdgeId(*self.removed))
        kind = "cycle" if self.removed is None else "e-cycle"
        if self.kind not in ("cycle", "e-cycle"):
            raise ValueError(f"unknown kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)

    @property
    def full(self) -> int:
        """Bits of the underlying cycle (the e-cycle with its edge restored)."""
        if self.removed is None:
            return self.edges
        return self.edges | (1 << tables(self.dims).bit(self.removed))

    def has(self, e: EdgeId) -> bool:
        return bool(self.edges >> tables(self.dims).bit(e) & 1)

    def edge_list(self) -> list[EdgeId]:
        return tables(self.dims).edges_of(self.edges)

    def with_full(self, full: int) -> "CycleState":
        """Same kind and removed edge, new underlying cycle bits."""
        if self.removed is not None:
            full &= ~(1 << tables(self.dims).bit(self.removed))
        return CycleState(self.dims, full, self.kind, self.removed)

    def __repr__(self) -> str:
        extra = f", removed={self.removed}" if self.removed else ""
        return f"CycleState({self.dims}, {self.edges:#x}, {self.kind}{extra})"


def _components(t: Tables, mask: int) -> tuple[int, list[int]]:
    label = [-1] * t.nv
    count = 0
    for s in range(t.nv):
        if label[s] >= 0 or not (mask & t.vert_mask[s]):
            continue
        stack = [s]
        label[s] = count
        while stack:
            v = stack.pop()
            for b, w in t.vert_nbrs[v]:
                if mask >> b & 1 and label[w] < 0:
                    label[w] = count
                    stack.append(w)
        count += 1
    return count, label


def validate(dims, edges: Union[int, Iterable[EdgeId]], kind: Optional[str] = None,
             removed: Optional[EdgeId] = None) -> CycleState:
    """Certify an edge set as a Hamiltonian cycle, or an e-cycle when ``removed`` is given."""
    dims = GridDims(*dims)
    t = tables(dims)
    if isinstance(edges, int):
        if edges < 0 or edges >> t.ne:
            raise OutOfRange("edge bits beyond the grid")
        mask = edges
    else:
        mask = t.mask_of(edges)
    if kind is None:
        kind = "e-cycle" if removed is not None else "cycle"
    if kind not in ("cycle", "e-cycle"):
        raise ValueError(f"unknown kind {kind!r}")
    full = mask
    if kind == "e-cycle":
        if removed is None:
            raise BadECycleEdge("e-cycle without a removed edge")
        removed = EdgeId(*removed)
        rb = t.bit(removed)
        if not (t.boundary_mask >> rb & 1):
            raise BadECycleEdge(f"{removed} is not a boundary edge")
        if mask >> rb & 1:
            raise BadECycleEdge(f"{removed} is present in the edge set")
        full = mask | (1 << rb)
    elif removed is not None:
        raise BadECycleEdge("a plain cycle has no removed edge")
    if dims.m < 2 or dims.n < 2:
        raise NotSpanning((0, 0))

    missing = None
    for v in range(t.nv):
        d = (full & t.vert_mask[v]).bit_count()
        if d == 0:
            if missing is None:
                missing = t.vertex(v)
        elif d != 2:
            if kind == "e-cycle" and t.vertex(v) in removed.endpoints():
                d -= 1
            raise DegreeViolation(t.vertex(v), d)
    if missing is not None:
        raise NotSpanning(missing)
    count, _ = _components(t, full)
    if count != 1:
        raise Disconnected(count)
    return CycleState(dims, mask, kind, removed)


def is_valid(state: CycleState) -> bool:
    try:
        validate(state.dims, state.edges, state.kind, state.removed)
    except Exception:
        return False
    return True


def cycle_order(dims, mask: int, start: int = 0, first: Optional[int] = None) -> list[int]:
    """Vertex indices along the 2-regular component through ``start``.

    ``first`` picks the second vertex; by default the lower-indexed
    neighbour, which from the SW corner walks east (counter-clockwise).
    """
    t = tables(dims)
    nbrs = [w for b, w in t.vert_nbrs[start] if mask >> b & 1]
    if len(nbrs) != 2:
        raise DegreeViolation(t.vertex(start), len(nbrs))
    if first is None:
        first = min(nbrs)
    elif first not in nbrs:
        raise OutOfRange("first vertex is not a cycle neighbour of start")
    order = [start]
    prev, cur = start, first
    while cur != start:
        order.append(cur)
        for b, w in t.vert_nbrs[cur]:
            if w != prev and mask >> b & 1:
                prev, cur = cur, w
                break
        else:
            raise DegreeViolation(t.vertex(cur), 1)
    return order


def serialize(state: CycleState) -> str:
    lines = [f"{state.dims.m} {state.dims.n}"]
    if state.removed is not None:
        lines.append(f"E {state.removed}")
    edges = sorted(state.edge_list(), key=lambda e: (e.orient, e.i, e.j))
    lines.extend(str(e) for e in edges)
    return "\n".join(lines) + "\n"


def parse(text: str) -> CycleState:
    dims = None
    edges: list[EdgeId] = []
    seen: set[EdgeId] = set()
    removed = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if dims is None:
            if len(parts) != 2:
                raise ParseError(no, "expected header 'm n'")
            try:
                dims = GridDims(int(parts[0]), int(parts[1]))
            except ValueError:
                raise ParseError(no, "dimensions must be integers") from None
            if dims.m < 1 or dims.n < 1:
                raise ParseError(no, "dimensions must be positive")
            continue
        is_removed = parts[0] == "E"
        if is_removed:
            parts = parts[1:]
        if len(parts) != 3 or parts[0] not in ("H", "V"):
            raise ParseError(no, f"expected 'H i j' or 'V i j', got {raw.strip()!r}")
        try:
            e = EdgeId(parts[0], int(parts[1]), int(parts[2]))
        except ValueError:
            raise ParseError(no, "edge coordinates must be integers") from None
        if e not in tables(dims).bit_of:
            raise ParseError(no, f"edge {e} outside a {dims} grid")
        if is_removed:
            if removed is not None:
                raise ParseError(no, "more than one removed edge")
            removed = e
            continue
        if e in seen:
            raise ParseError(no, f"duplicate edge {e}")
        seen.add(e)
        edges.append(e)
    if dims is None:
        raise ParseError(0, "empty input")
    return validate(dims, edges, removed=removed)


def state_hash(state: CycleState) -> str:
    return hashlib.blake2b(serialize(state).encode(), digest_size=8).hexdigest()


def perimeter_cycle(dims) -> CycleState:
    """The boundary cycle; Hamiltonian only on 2×n strips."""
    m, n = dims
    t = tables(GridDims(m, n))
    mask = 0
    for i in range(m - 1):
        mask |= 1 << t.h_bit(i, 0) | 1 << t.h_bit(i, n - 1)
    for j in range(n - 1):
        mask |= 1 << t.v_bit(0, j) | 1 << t.v_bit(m - 1, j)
    return CycleState(GridDims(m, n), mask)


def serpentine_cycle(dims) -> CycleState:
    """A fixed Hamiltonian cycle: one straight side and a zig-zag back over the rest."""
    m, n = dims
    if not has_hamiltonian_cycle((m, n)):
        raise InvalidState(f"{m}x{n} has no Hamiltonian cycle")
    if m % 2 == 0:
        pts = [(x, 0) for x in range(m)]
        for c in range(m - 1, -1, -1):
            rows = range(1, n) if (m - 1 - c) % 2 == 0 else range(n - 1, 0, -1)
            pts += [(c, r) for r in rows]
    else:
        pts = [(0, y) for y in range(n)]
        for c in range(n - 1, -1, -1):
            cols = range(1, m) if (n - 1 - c) % 2 == 0 else range(m - 1, 0, -1)
            pts += [(r, c) for r in cols]
    t = tables(GridDims(m, n))
    mask = 0
    for a, b in zip(pts, pts[1:] + pts[:1]):
        mask |= 1 << t.bit(edge_between(a, b))
    return CycleState(GridDims(m, n), mask)


def from_vertex_loop(dims, corners: list[Vertex]) -> int:
    """Edge mask of a closed rectilinear polyline given by its corner points."""
    t = tables(GridDims(*dims))
    mask = 0
    pts = list(corners) + [corners[0]]
    for (x1, y1), (x2, y2) in zip(pts, pts[1:]):
        if x1 != x2 and y1 != y2:
            raise OutOfRange(f"segment {(x1, y1)}-{(x2, y2)} is not axis-parallel")
        if y1 == y2:
            for x in range(min(x1, x2), max(x1, x2)):
                mask |= 1 << t.h_bit(x, y1)
        else:
            for y in range(min(y1, y2), max(y1, y2)):
                mask |= 1 << t.v_bit(x1, y)
    return mask


def crop(dims, mask: int, x0: int, y0: int, w: int, h: int) -> int:
    """Edges of ``mask`` inside the w×h vertex window at (x0, y0), re-indexed for that window."""
    src = tables(GridDims(*dims))
    dst = tables(GridDims(w, h))
    out = 0
    for b, (orient, i, j) in enumerate(dst.edge_ids):
        sb = src.h_bit(i + x0, j + y0) if orient == "H" else src.v_bit(i + x0, j + y0)
        if mask >> sb & 1:
            out |= 1 << b
    return out


def paste(dims, mask: int, sub: int, x0: int, y0: int, w: int, h: int) -> int:
    """Replace the window's edges in ``mask`` with ``sub`` (window-indexed)."""
    src = tables(GridDims(*dims))
    dst = tables(GridDims(w, h))
    for b, (orient, i, j) in enumerate(dst.edge_ids):
        sb = src.h_bit(i + x0, j + y0) if orient == "H" else src.v_bit(i + x0, j + y0)
        if sub >> b & 1:
            mask |= 1 << sb
        else:
            mask &= ~(1 << sb)
    return mask


def shift_edge(e: EdgeId, dx: int, dy: int) -> EdgeId:
    return EdgeId(e.orient, e.i + dx, e.j + dy)
