"""Brute-force ground truth for small grids.

Cycles are enumerated by a scanline search over edge choices: vertices are
visited in bit order and each one is completed to degree two using its east
and north edges. Path fragments are tracked by their endpoints so a
premature subcycle is refused in O(1).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .errors import CapExceeded, HamError
from .grid_model import CycleState, EdgeId, GridDims, tables
from .moves import HamPath, MoveRecord, classify, forbidden_box, move_table

DEFAULT_CAP = 42


def _check_cap(dims: GridDims, cap: int) -> None:
    if dims.m * dims.n > cap:
        raise CapExceeded(f"{dims} has {dims.m * dims.n} vertices, cap is {cap}")


def enumerate_cycle_masks(dims, cap: int = DEFAULT_CAP) -> list[int]:
    dims = GridDims(*dims)
    _check_cap(dims, cap)
    m, n = dims
    if m < 2 or n < 2:
        return []
    t = tables(dims)
    nv = t.nv
    deg = [0] * nv
    end = list(range(nv))  # other endpoint of the fragment, for fragment endpoints
    found: list[int] = []

    def add(u: int, w: int) -> Optional[tuple]:
        a, b = end[u], end[w]
        saved = (a, end[a], b, end[b])
        deg[u] += 1
        deg[w] += 1
        end[a] = b
        end[b] = a
        return saved

    def undo(u: int, w: int, saved: tuple) -> None:
        a, ea, b, eb = saved
        deg[u] -= 1
        deg[w] -= 1
        end[a] = ea
        end[b] = eb

    def can_add(u: int, w: int, count: int) -> bool:
        if deg[w] >= 2:
            return False
        if end[u] == w and deg[u] > 0:
            return count + 1 == nv  # closing edge must finish the cycle
        return True

    def rec(v: int, mask: int, count: int) -> None:
        if v == nv:
            if count == nv:
                found.append(mask)
            return
        need = 2 - deg[v]
        i, j = v % m, v // m
        right = v + 1 if i < m - 1 else -1
        up = v + m if j < n - 1 else -1
        rb = t.h_bit(i, j) if right >= 0 else -1
        ub = t.v_bit(i, j) if up >= 0 else -1
        if need == 0:
            rec(v + 1, mask, count)
        elif need == 1:
            for w, b in ((right, rb), (up, ub)):
                if w >= 0 and can_add(v, w, count):
                    s = add(v, w)
                    rec(v + 1, mask | (1 << b), count + 1)
                    undo(v, w, s)
        elif need == 2:
            if right >= 0 and up >= 0 and can_add(v, right, count):
                s1 = add(v, right)
                if can_add(v, up, count + 1):
                    s2 = add(v, up)
                    rec(v + 1, mask | (1 << rb) | (1 << ub), count + 2)
                    undo(v, up, s2)
                undo(v, right, s1)

    rec(0, 0, 0)
    found.sort()
    return found


def enumerate_hamiltonian_cycles(dims, cap: int = DEFAULT_CAP) -> list[CycleState]:
    dims = GridDims(*dims)
    return [CycleState(dims, mask) for mask in enumerate_cycle_masks(dims, cap)]


def enumerate_hamiltonian_paths(dims, cap: int = DEFAULT_CAP) -> list[HamPath]:
    """Every undirected Hamiltonian path, each listed once."""
    dims = GridDims(*dims)
    _check_cap(dims, cap)
    m, n = dims
    total = m * n
    if total == 0:
        return []
    if total == 1:
        return [HamPath(dims, ((0, 0),))]
    nbrs = {}
    for i in range(m):
        for j in range(n):
            nbrs[(i, j)] = [(a, b) for a, b in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1))
                            if 0 <= a < m and 0 <= b < n]
    out = []
    path: list = []
    seen: set = set()

    def rec(v) -> None:
        if len(path) == total:
            if path[0] < path[-1]:
                out.append(HamPath(dims, tuple(path)))
            return
        for w in nbrs[v]:
            if w not in seen:
                seen.add(w)
                path.append(w)
                rec(w)
                path.pop()
                seen.discard(w)

    for start in sorted(nbrs):
        seen.add(start)
        path.append(start)
        rec(start)
        path.pop()
        seen.discard(start)
    out.sort(key=lambda p: p.vertices)
    return out


@dataclass
class ReconfigurationGraph:
    dims: GridDims
    nodes: list[CycleState]
    adjacency: list[list[int]]
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {s: i for i, s in enumerate(self.nodes)}

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def distances_from(self, a: int) -> list[float]:
        dist = [math.inf] * len(self.nodes)
        dist[a] = 0
        queue = deque([a])
        while queue:
            u = queue.popleft()
            for w in self.adjacency[u]:
                if dist[w] == math.inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def is_connected(self) -> bool:
        return not self.nodes or all(d < math.inf for d in self.distances_from(0))

    def diameter(self) -> float:
        best = 0
        for a in range(len(self.nodes)):
            best = max(best, max(self.distances_from(a), default=0))
        return best

    def degree_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for a in self.adjacency:
            hist[len(a)] = hist.get(len(a), 0) + 1
        return dict(sorted(hist.items()))


def build_reconfiguration_graph(dims, cap: int = DEFAULT_CAP,
                                removed: Optional[EdgeId] = None) -> ReconfigurationGraph:
    """Nodes are all cycles (or all e-cycles for ``removed``); edges are valid moves."""
    dims = GridDims(*dims)
    t = tables(dims)
    masks = enumerate_cycle_masks(dims, cap)
    if removed is not None:
        rb = 1 << t.bit(removed)
        nodes = [CycleState(dims, mk ^ rb, "e-cycle", removed) for mk in masks if mk & rb]
    else:
        nodes = [CycleState(dims, mk) for mk in masks]
    index = {s.full: i for i, s in enumerate(nodes)}
    forbid = forbidden_box(nodes[0]) if nodes else -1
    adjacency = []
    for s in nodes:
        adj = sorted({index[new] for _, _, new in move_table(t, s.full, forbid)})
        adjacency.append(adj)
    return ReconfigurationGraph(dims, nodes, adjacency)


def bfs_distance(graph: ReconfigurationGraph, a: CycleState, b: CycleState) -> float:
    """Fewest valid moves from a to b; ``math.inf`` if unreachable."""
    try:
        ia, ib = graph.index[a], graph.index[b]
    except KeyError:
        raise HamError("state is not a node of the graph") from None
    return graph.distances_from(ia)[ib]


def shortest_move_path(h: CycleState, k: CycleState, limit: int = 2_000_000) -> list[MoveRecord]:
    """A shortest move sequence from h to k by bidirectional BFS over states."""
    if h == k:
        return []
    t = tables(h.dims)
    forbid = forbidden_box(h)
    # parent maps: state bits -> (previous bits, x, y) in the direction of search
    fwd = {h.full: None}
    bwd = {k.full: None}
    qf, qb = [h.full], [k.full]
    meet = None
    while qf and qb and meet is None:
        grow_fwd = len(qf) <= len(qb)
        frontier, mine, other = (qf, fwd, bwd) if grow_fwd else (qb, bwd, fwd)
        nxt = []
        for s in frontier:
            for x, y, new in move_table(t, s, forbid):
                if new in mine:
                    continue
                mine[new] = (s, x, y)
                if new in other:
                    meet = new
                    break
                nxt.append(new)
            if meet is not None:
                break
        if len(fwd) + len(bwd) > limit:
            raise CapExceeded("state space too large for exhaustive search")
        if grow_fwd:
            qf = nxt
        else:
            qb = nxt
    if meet is None:
        raise HamError("target unreachable")
    moves = []
    s = meet
    while fwd[s] is not None:
        prev, x, y = fwd[s]
        moves.append(MoveRecord(t.boxes[x], t.boxes[y], classify(t, prev, x, y)))
        s = prev
    moves.reverse()
    s = meet
    while bwd[s] is not None:
        prev, x, y = bwd[s]
        # prev -> s by (x, y) in the backward tree, so s -> prev by (y, x)
        moves.append(MoveRecord(t.boxes[y], t.boxes[x], classify(t, s, y, x)))
        s = prev
    return moves
