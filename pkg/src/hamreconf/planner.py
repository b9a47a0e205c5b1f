"""Reconfiguration to canonical form and between arbitrary cycles.

The grid is peeled one ring at a time. On the current layer the cycle is
pushed, by cascades of valid moves, to a state with a single cookie:
first large cookies are merged two moves at a time (MLC), then small ones
are collected one at a time (1LC). The layer's ring is then intact except
for the neck of that last cookie, and what remains inside is an e-cycle of
the next layer, whose removed edge is the neck's inner edge.

Cascades are found by breadth-first search over valid moves. A cascade
may never take a boundary edge out of the cycle, since that would create a
cookie, with one exception: a neck-shifting flip (NSF) that slides a large
cookie's neck one box along the boundary. Search depth is capped at the
proven cascade lengths; hitting the cap raises ``BoundExceeded``, which
means a defect, not bad input.

Any two cycles are joined by taking both to canonical form, bridging the
two canonical forms, and walking the second leg backwards (the inverse of
move X -> Y is Y -> X).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

from .canonical import CanonicalSpec, LayerFrame, is_canonical, reconfigure_canonicals
from .decomposition import cookie_counts, neck_boxes
from .errors import (
    BoundExceeded,
    DimsMismatch,
    DimsTooSmall,
    HamError,
    InternalInvariantBroken,
    KindMismatch,
    NoLargeCookiePair,
    PreconditionFailed,
)
from .grid_model import CycleState, EdgeId, GridDims, Tables, crop, paste, tables
from .moves import (
    MoveRecord,
    MoveSequence,
    apply_double_switch,
    classify,
    forbidden_box,
    move_table,
    reclassify,
)
from .oracle import shortest_move_path

log = logging.getLogger(__name__)

MLC_DEPTH = 2


def one_lc_bound(dims) -> int:
    m, n = dims
    return max(m, n) // 2 + min(m, n) + 2


def total_bound(dims) -> int:
    """Move budget for reconfiguring any two cycles: n²m with n the longer side."""
    m, n = dims
    return max(m, n) ** 2 * min(m, n)


def rtcf_bound(dims) -> float:
    m, n = sorted(dims)
    return n * n * m / 2 - n * m / 4 + m - 2 * n


@dataclass
class Cascade:
    moves: list[MoveRecord]
    purpose: str                 # "MLC", "OneLC" or "CoreStrip"
    target: Optional[tuple] = None

    def __len__(self) -> int:
        return len(self.moves)


# ---------------------------------------------------------------- cookie accounting

def _boundary_bits(t: Tables, x: int) -> list[int]:
    return [b for b in t.box_bits[x] if t.boundary_mask >> b & 1]


def _is_nsf(t: Tables, before: int, after: int, x: int, y: int) -> bool:
    """A flip at a large cookie's neck that moves the neck to the next boundary box."""
    if y not in t.box_nbrs[x] or not t.is_switchable(before, x):
        return False
    neck = [b for b in _boundary_bits(t, x) if not (before >> b & 1)]
    if not neck or not (after >> neck[0] & 1):
        return False
    lost = before & ~after & t.boundary_mask
    if lost.bit_count() != 1 or (lost.bit_length() - 1) not in t.box_bits[y]:
        return False
    return cookie_counts(t, before) == cookie_counts(t, after)


def _cascade_ok(t: Tables, before: int, after: int, x: int, y: int) -> bool:
    if before & ~after & t.boundary_mask:
        return _is_nsf(t, before, after, x, y)
    return True


def cookie_delta(state: CycleState, move: MoveRecord) -> dict:
    after = apply_double_switch(state, move.first, move.second)
    t = tables(state.dims)
    lb, sb = cookie_counts(t, state.full)
    la, sa = cookie_counts(t, after.full)
    nsf = False
    if move.first != move.second:
        x, y = t.box_index(*move.first), t.box_index(*move.second)
        nsf = _is_nsf(t, state.full, after.full, x, y)
    return {"total_delta": (la + sa) - (lb + sb), "large_delta": la - lb, "is_nsf": nsf}


# ---------------------------------------------------------------- search

def _search(t: Tables, start: int, forbid: int, goal: Callable[[int], bool],
            max_depth: int) -> Optional[list[tuple[int, int, int]]]:
    """Shortest cascade (as (pre_state, x, y) triples) from ``start`` to a goal state."""
    parent: dict[int, Optional[tuple[int, int, int]]] = {start: None}
    frontier = [start]
    bmask = t.boundary_mask
    for _ in range(max_depth):
        nxt = []
        for s in frontier:
            for x, y, new in move_table(t, s, forbid):
                if new in parent:
                    continue
                if s & ~new & bmask and not _is_nsf(t, s, new, x, y):
                    continue
                parent[new] = (s, x, y)
                if goal(new):
                    path = []
                    while parent[new] is not None:
                        path.append(parent[new])
                        new = parent[new][0]
                    return path[::-1]
                nxt.append(new)
        frontier = nxt
        if not frontier:
            break
    return None


def _records(t: Tables, path) -> list[MoveRecord]:
    return [MoveRecord(t.boxes[x], t.boxes[y], classify(t, s, x, y)) for s, x, y in path]


def outermost_small_cookie(t: Tables, full: int) -> Optional[int]:
    """Neck index of the outermost small cookie.

    Cookies on the southern or northern side come first, and among them
    the westernmost and easternmost are the candidates; otherwise the
    southernmost and northernmost on the western or eastern side. Ties go
    to the lexicographically smaller box.
    """
    ns, ew = [], []
    for x, large in neck_boxes(t, full):
        if large:
            continue
        k, l = t.boxes[x]
        if l == 0 and not (full >> t.box_bits[x][0] & 1) or \
                l == t.n - 2 and not (full >> t.box_bits[x][2] & 1):
            ns.append((k, l))
        else:
            ew.append((k, l))
    if ns:
        lo = min(k for k, _ in ns)
        hi = max(k for k, _ in ns)
        cands = [c for c in ns if c[0] in (lo, hi)]
    elif ew:
        lo = min(l for _, l in ew)
        hi = max(l for _, l in ew)
        cands = [c for c in ew if c[1] in (lo, hi)]
    else:
        return None
    return t.box_index(*min(cands))


def _mlc(t: Tables, full: int, forbid: int) -> Optional[list]:
    large0, _ = cookie_counts(t, full)
    return _search(t, full, forbid, lambda s: cookie_counts(t, s)[0] < large0, MLC_DEPTH)


def _one_lc(t: Tables, full: int, forbid: int, depth: int) -> tuple[Optional[list], int]:
    large0, small0 = cookie_counts(t, full)
    target = outermost_small_cookie(t, full)
    neck = [b for b in _boundary_bits(t, target) if not (full >> b & 1)][0]
    cap = max(large0, 1)

    def goal(s: int) -> bool:
        if not (s >> neck & 1):
            return False
        large, small = cookie_counts(t, s)
        return small < small0 and large <= cap

    return _search(t, full, forbid, goal, depth), target


def _sub_problem(state: CycleState):
    t = tables(state.dims)
    return t, state.full, forbidden_box(state)


def mlc_step(state: CycleState) -> Cascade:
    """A cascade of at most two moves that lowers the number of large cookies."""
    t, full, forbid = _sub_problem(state)
    large, _ = cookie_counts(t, full)
    if large < 2:
        raise NoLargeCookiePair(f"state has {large} large cookie(s)")
    path = _mlc(t, full, forbid)
    if path is None:
        raise BoundExceeded(f"no cascade of length <= {MLC_DEPTH} merges a large cookie")
    return Cascade(_records(t, path), "MLC")


def one_lc_step(state: CycleState) -> Cascade:
    """A cascade that collects the outermost small cookie without adding large ones."""
    t, full, forbid = _sub_problem(state)
    large, small = cookie_counts(t, full)
    if large > 1 or small < 1:
        raise PreconditionFailed(f"need at most 1 large and at least 1 small cookie, have {large}/{small}")
    bound = one_lc_bound(state.dims)
    path, target = _one_lc(t, full, forbid, bound)
    if path is None:
        raise BoundExceeded(f"no cascade of length <= {bound} collects R{t.boxes[target]}")
    return Cascade(_records(t, path), "OneLC", t.boxes[target])


# ---------------------------------------------------------------- RtCF

def _layer(t: Tables, full: int, forbid: int, bound: int, j: int, stats: dict) -> tuple[int, list[MoveRecord]]:
    """Drive one layer's sub-problem to a single cookie; returns the end state and moves."""
    out: list[MoveRecord] = []

    def record(purpose, path, target=None):
        nonlocal full
        before = cookie_counts(t, full)
        out.extend(_records(t, path))
        full = _end_of(t, path)
        stats["mlc" if purpose == "MLC" else "one_lc"].append(len(path))
        stats["cascades"].append({
            "layer": j, "purpose": purpose, "length": len(path), "target": target,
            "before": before, "after": cookie_counts(t, full),
        })

    while cookie_counts(t, full)[0] > 1:
        path = _mlc(t, full, forbid)
        if path is None:
            raise BoundExceeded(f"MLC found no cascade of length <= {MLC_DEPTH}")
        record("MLC", path)
    while cookie_counts(t, full)[1] > 0:
        path, target = _one_lc(t, full, forbid, bound)
        if path is None:
            raise BoundExceeded(f"1LC found no cascade of length <= {bound}")
        k, l = t.boxes[target]
        record("OneLC", path, (k + j, l + j))
    return full, out


def _end_of(t: Tables, path) -> int:
    s, x, y = path[-1]
    return s ^ t.box_mask[x] ^ t.box_mask[y]


def rtcf(state: CycleState) -> tuple[CanonicalSpec, MoveSequence]:
    """Reconfigure ``state`` into a canonical form."""
    dims = state.dims
    if min(dims) < 5:
        raise DimsTooSmall(f"{dims}: canonical reconfiguration needs both sides >= 5")
    fr = LayerFrame.of(dims)
    m, n = dims
    bound = one_lc_bound(dims)
    stats: dict = {"mlc": [], "one_lc": [], "layers": [], "cascades": []}
    moves: list[MoveRecord] = []
    cur = state.full
    inner: Optional[EdgeId] = None       # removed edge of the current layer, layer coords
    for j in range(fr.t + 1):
        w, h = m - 2 * j, n - 2 * j
        t = tables(GridDims(w, h))
        if j == 0:
            sub, forbid = cur, forbidden_box(state)
        else:
            eb = t.bit(inner)
            sub = crop(dims, cur, j, j, w, h) | (1 << eb)
            forbid = t.edge_boxes[eb][0]
        before = len(moves)
        sub, layer_moves = _layer(t, sub, forbid, bound, j, stats)
        moves += [mv.shifted(j, j) for mv in layer_moves]
        stats["layers"].append(len(moves) - before)
        if j == 0:
            cur = sub
        else:
            cur = paste(dims, cur, sub & ~(1 << t.bit(inner)), j, j, w, h)
        necks = neck_boxes(t, sub)
        if len(necks) != 1 or not necks[0][1]:
            raise InternalInvariantBroken(f"layer {j} ended with cookies {necks}")
        x = necks[0][0]
        # the neck's edge opposite its boundary edge becomes the next layer's removed edge
        side = [s for s, b in enumerate(t.box_bits[x]) if t.boundary_mask >> b & 1 and not (sub >> b & 1)][0]
        opp = t.edge_ids[t.box_bits[x][(side + 2) % 4]]
        inner = EdgeId(opp.orient, opp.i - 1, opp.j - 1)
    end = state.with_full(cur)
    spec = is_canonical(end)
    if spec is None:
        raise InternalInvariantBroken("layer loop finished on a non-canonical cycle")
    seq = MoveSequence(state, moves, end, stats)
    log.debug("rtcf %s: %d moves, stats %s", dims, len(moves), stats)
    return spec, seq


def reconfigure(h: CycleState, k: CycleState) -> MoveSequence:
    """A certified move sequence from ``h`` to ``k``."""
    if h.dims != k.dims:
        raise DimsMismatch(f"{h.dims} vs {k.dims}")
    if h.kind != k.kind or h.removed != k.removed:
        raise KindMismatch("both states must be of the same kind with the same removed edge")
    dims = h.dims
    stats: dict = {}
    if h == k:
        return MoveSequence(h, [], k, {"bound": total_bound(dims)})
    if min(dims) < 5:
        moves = shortest_move_path(h, k)
        stats["method"] = "exhaustive"
    else:
        spec_h, seq_h = rtcf(h)
        spec_k, seq_k = rtcf(k)
        bridge = reconfigure_canonicals(spec_h, spec_k)
        back = [mv.inverse() for mv in reversed(seq_k.moves)]
        moves = reclassify(h, seq_h.moves + bridge.moves + back)
        stats.update({
            "method": "canonical",
            "to_canonical": len(seq_h),
            "bridge": len(bridge),
            "from_canonical": len(seq_k),
            "mlc": seq_h.stats["mlc"] + seq_k.stats["mlc"],
            "one_lc": seq_h.stats["one_lc"] + seq_k.stats["one_lc"],
            "core_search": bridge.stats.get("core_search", 0),
        })
    bound = total_bound(dims)
    stats["length"] = len(moves)
    stats["bound"] = bound
    if len(moves) > bound:
        raise BoundExceeded(f"{len(moves)} moves exceeds the budget {bound}")
    return MoveSequence(h, moves, k, stats)


def verify_sequence(seq: MoveSequence) -> tuple[bool, Optional[int]]:
    """Replay every move with full validation; on failure report the move index."""
    state = seq.start
    for i, mv in enumerate(seq.moves):
        try:
            state = apply_double_switch(state, mv.first, mv.second)
        except HamError:
            return False, i
        if state.kind != seq.start.kind or state.removed != seq.start.removed:
            return False, i
    if state != seq.end:
        return False, len(seq.moves)
    return True, None


__all__ = [
    "Cascade",
    "cookie_delta",
    "mlc_step",
    "one_lc_step",
    "rtcf",
    "reconfigure",
    "verify_sequence",
    "one_lc_bound",
    "total_bound",
    "rtcf_bound",
]
