"""Canonical forms built from nested rectangles.

For an m×n grid with s = min(m, n) >= 5 let t = (s - 4) // 2. ``G_i`` is the
set of vertices at L-infinity distance at least i from the outer boundary
and ``R_i`` is the rectangle bounding it. The rectangles R_0..R_t surround a
core strip G_{t+1}, 2 vertices thick when s is even and 3 thick when s is
odd. The scaffold U is the disjoint union of the rectangles and a core cycle
D. A canonical form is obtained from U by switching, for each i = 0..t, one
box X_i lying between R_i and the next ring in. Each switch merges two
cycles, so the result is a single Hamiltonian cycle.

An e-cycle canonical form takes its boundary edge out of U first.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .errors import DimsMismatch, DimsTooSmall, HamError, IllegalChoice, InvalidState, KindMismatch
from .grid_model import (
    Box,
    CycleState,
    EdgeId,
    GridDims,
    has_hamiltonian_cycle,
    tables,
    validate,
)
from .moves import MoveRecord, MoveSequence, classify, forbidden_box, move_table


def _rect_mask(dims: GridDims, x0: int, y0: int, x1: int, y1: int) -> int:
    """Edges of the axis-parallel rectangle with corners (x0, y0) and (x1, y1)."""
    t = tables(dims)
    mask = 0
    for x in range(x0, x1):
        mask |= 1 << t.h_bit(x, y0) | 1 << t.h_bit(x, y1)
    for y in range(y0, y1):
        mask |= 1 << t.v_bit(x0, y) | 1 << t.v_bit(x1, y)
    return mask


def comb_cycle(dims: GridDims, x0: int, y0: int, w: int, h: int) -> int:
    """The comb cycle of a strip that is 3 vertices thick.

    Runs straight along one long side and zig-zags back over the other two
    rows (or columns) with teeth pointing away from the straight side.
    """
    t = tables(dims)
    if h == 3:
        pts = [(x0 + x, y0) for x in range(w)]
        for c in range(w - 1, -1, -1):
            rows = (1, 2) if (w - 1 - c) % 2 == 0 else (2, 1)
            pts += [(x0 + c, y0 + r) for r in rows]
    elif w == 3:
        pts = [(x0, y0 + y) for y in range(h)]
        for c in range(h - 1, -1, -1):
            cols = (1, 2) if (h - 1 - c) % 2 == 0 else (2, 1)
            pts += [(x0 + r, y0 + c) for r in cols]
    else:
        raise DimsTooSmall("comb cycles need a strip 3 vertices thick")
    mask = 0
    for (a, b), (c, d) in zip(pts, pts[1:] + pts[:1]):
        if b == d:
            mask |= 1 << t.h_bit(min(a, c), b)
        else:
            mask |= 1 << t.v_bit(a, min(b, d))
    return mask


@dataclass(frozen=True)
class LayerFrame:
    dims: GridDims
    t: int
    core_kind: str                      # "strip2" or "strip3"
    core_origin: tuple[int, int]
    core_size: tuple[int, int]          # vertices along x and y

    @classmethod
    def of(cls, dims) -> "LayerFrame":
        dims = GridDims(*dims)
        m, n = dims
        s = min(m, n)
        if s < 5:
            raise DimsTooSmall(f"{dims}: canonical forms need both sides >= 5")
        t = (s - 4) // 2
        c = t + 1
        return cls(dims, t, "strip2" if s % 2 == 0 else "strip3", (c, c),
                   (m - 2 * c, n - 2 * c))

    def ring(self, i: int) -> int:
        m, n = self.dims
        return _rect_mask(self.dims, i, i, m - 1 - i, n - 1 - i)

    def core_boxes(self) -> set[Box]:
        (x0, y0), (w, h) = self.core_origin, self.core_size
        return {(x0 + a, y0 + b) for a in range(w - 1) for b in range(h - 1)}

    def core_edges_mask(self) -> int:
        """All grid edges with both ends in the core."""
        t = tables(self.dims)
        (x0, y0), (w, h) = self.core_origin, self.core_size
        mask = 0
        for y in range(y0, y0 + h):
            for x in range(x0, x0 + w - 1):
                mask |= 1 << t.h_bit(x, y)
        for y in range(y0, y0 + h - 1):
            for x in range(x0, x0 + w):
                mask |= 1 << t.v_bit(x, y)
        return mask

    def default_core(self) -> int:
        (x0, y0), (w, h) = self.core_origin, self.core_size
        if self.core_kind == "strip2":
            return _rect_mask(self.dims, x0, y0, x0 + w - 1, y0 + h - 1)
        return comb_cycle(self.dims, x0, y0, w, h)

    def gap_boxes(self, i: int) -> list[Box]:
        """Non-corner boxes of the ring of boxes between R_i and the next ring in."""
        m, n = self.dims
        lo_x, hi_x, lo_y, hi_y = i, m - 2 - i, i, n - 2 - i
        out = []
        for k in range(lo_x + 1, hi_x):
            out += [(k, lo_y), (k, hi_y)]
        for l in range(lo_y + 1, hi_y):
            out += [(lo_x, l), (hi_x, l)]
        return sorted(set(out))

    def short_side_boxes(self) -> list[Box]:
        """Gap boxes across the core's two short ends (3-vertex sides of a strip3 core)."""
        (x0, y0), (w, h) = self.core_origin, self.core_size
        if h == 3 and w >= h:
            cands = [(x0 - 1, y0), (x0 - 1, y0 + 1), (x0 + w - 1, y0), (x0 + w - 1, y0 + 1)]
        else:
            cands = [(x0, y0 - 1), (x0 + 1, y0 - 1), (x0, y0 + h - 1), (x0 + 1, y0 + h - 1)]
        return sorted(cands)


@dataclass(frozen=True)
class CanonicalSpec:
    frame: LayerFrame
    choices: tuple[Box, ...]
    core: int                           # edge mask of D in grid bits
    removed: Optional[EdgeId] = None

    @property
    def dims(self) -> GridDims:
        return self.frame.dims

    def state(self) -> CycleState:
        return build_canonical(self.dims, self.choices, self.core, self.removed)


def base_union(dims, core: Optional[int] = None, removed: Optional[EdgeId] = None) -> int:
    """Edge mask of the scaffold: rings R_0..R_t plus the core cycle, minus ``removed``."""
    dims = GridDims(*dims)
    if not has_hamiltonian_cycle(dims):
        raise DimsTooSmall(f"{dims} has no Hamiltonian cycle")
    fr = LayerFrame.of(dims)
    mask = 0
    for i in range(fr.t + 1):
        mask |= fr.ring(i)
    mask |= fr.default_core() if core is None else core
    if removed is not None:
        t = tables(dims)
        rb = t.bit(removed)
        if not (fr.ring(0) >> rb & 1):
            raise HamError(f"{removed} is not a boundary edge")
        mask &= ~(1 << rb)
    return mask


def count_gap_switchables(dims, i: int = 0) -> int:
    """Switchable boxes between R_i and R_{i+1} on the bare ring scaffold R_i ∪ R_{i+1}."""
    dims = GridDims(*dims)
    m, n = dims
    if min(m, n) - 2 * (i + 1) < 2:
        raise DimsTooSmall(f"{dims} has no ring R_{i + 1}")
    t = tables(dims)
    rings = _rect_mask(dims, i, i, m - 1 - i, n - 1 - i) | _rect_mask(
        dims, i + 1, i + 1, m - 2 - i, n - 2 - i)
    count = 0
    for l in range(n - 1):
        for k in range(m - 1):
            if min(k, l, m - 2 - k, n - 2 - l) == i and t.is_switchable(rings, t.box_index(k, l)):
                count += 1
    return count


def legal_choices(fr: LayerFrame, step: int, mask: int, forbid: int = -1) -> list[Box]:
    """Gap boxes switchable at CFB step ``step`` on the evolving edge set ``mask``."""
    t = tables(fr.dims)
    out = []
    for k, l in fr.gap_boxes(step):
        x = t.box_index(k, l)
        if x != forbid and t.is_switchable(mask, x):
            out.append((k, l))
    return out


def _core_mask(fr: LayerFrame, core) -> int:
    if core is None:
        return fr.default_core()
    if isinstance(core, int):
        return core
    return tables(fr.dims).mask_of(core)


def build_canonical(dims, choices: Sequence[Box], core: Union[int, Iterable[EdgeId], None] = None,
                    removed: Optional[EdgeId] = None) -> CycleState:
    """Run the builder with the given box per layer (outermost first)."""
    dims = GridDims(*dims)
    fr = LayerFrame.of(dims)
    t = tables(dims)
    core_mask = _core_mask(fr, core)
    if core_mask & ~fr.core_edges_mask():
        raise IllegalChoice(fr.t, None, "core cycle leaves the core strip")
    mask = base_union(dims, core_mask)
    choices = [tuple(c) for c in choices]
    if len(choices) != fr.t + 1:
        raise IllegalChoice(len(choices), None, f"expected {fr.t + 1} boxes")
    forbid = -1
    if removed is not None:
        removed = EdgeId(*removed)
        forbid = t.edge_boxes[t.bit(removed)][0]
    for step, box in enumerate(choices):
        if box not in fr.gap_boxes(step):
            raise IllegalChoice(step, box, "not between the rings")
        x = t.box_index(*box)
        if x == forbid:
            raise IllegalChoice(step, box, "holds the removed edge")
        if not t.is_switchable(mask, x):
            raise IllegalChoice(step, box, "not switchable")
        mask ^= t.box_mask[x]
    try:
        if removed is not None:
            return validate(dims, mask & ~(1 << t.bit(removed)), removed=removed)
        return validate(dims, mask)
    except InvalidState as exc:
        raise IllegalChoice(fr.t, choices[-1], f"result is not Hamiltonian: {exc}") from None


def random_canonical(dims, rng: random.Random, removed: Optional[EdgeId] = None,
                     core: Optional[int] = None) -> CanonicalSpec:
    """A canonical form with each layer's box drawn uniformly from the legal ones."""
    dims = GridDims(*dims)
    fr = LayerFrame.of(dims)
    t = tables(dims)
    core_mask = _core_mask(fr, core)
    mask = base_union(dims, core_mask)
    forbid = t.edge_boxes[t.bit(removed)][0] if removed is not None else -1
    picks = []
    for step in range(fr.t + 1):
        opts = legal_choices(fr, step, mask, forbid)
        box = rng.choice(opts)
        picks.append(box)
        mask ^= t.box_mask[t.box_index(*box)]
    return CanonicalSpec(fr, tuple(picks), core_mask, removed)


def is_canonical(state: CycleState) -> Optional[CanonicalSpec]:
    """Recover the layer boxes and core of a canonical form, or None."""
    dims = state.dims
    if min(dims) < 5:
        return None
    fr = LayerFrame.of(dims)
    t = tables(dims)
    full = state.full
    picks = []
    for i in range(fr.t + 1):
        found = []
        for k, l in fr.gap_boxes(i):
            x = t.box_index(k, l)
            if full & t.box_mask[x] in (t.box_hmask[x], t.box_vmask[x]):
                # both rungs present, outer and inner edges absent
                s, e, n, w = t.box_bits[x]
                outer_is_h = l == i or l == dims.n - 2 - i
                rung = t.box_vmask[x] if outer_is_h else t.box_hmask[x]
                if full & t.box_mask[x] == rung:
                    found.append((k, l))
        if len(found) != 1:
            return None
        picks.append(found[0])
    undone = full
    for box in picks:
        undone ^= t.box_mask[t.box_index(*box)]
    core = undone & fr.core_edges_mask()
    try:
        spec = CanonicalSpec(fr, tuple(picks), core, state.removed)
        rebuilt = spec.state()
    except HamError:
        return None
    return spec if rebuilt == state else None


# ---------------------------------------------------------------- bridging

@dataclass
class _Walker:
    state: CycleState
    moves: list = field(default_factory=list)

    def try_move(self, x: Box, y: Box) -> bool:
        from .moves import apply_double_switch

        try:
            new = apply_double_switch(self.state, x, y)
        except HamError:
            return False
        t = tables(self.state.dims)
        xi, yi = t.box_index(*x), t.box_index(*y)
        self.moves.append(MoveRecord(x, y, classify(t, self.state.full, xi, yi)))
        self.state = new
        return True


def _core_search(state: CycleState, boxes: set[Box], target: int,
                 limit: int = 200_000) -> Optional[list[MoveRecord]]:
    """Shortest move sequence to cycle bits ``target`` that switches only ``boxes``."""
    t = tables(state.dims)
    allowed = {t.box_index(*b) for b in boxes}
    forbid = forbidden_box(state)
    start = state.full
    if start == target:
        return []
    parent = {start: None}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for x, y, new in move_table(t, s, forbid):
            if x not in allowed or y not in allowed or new in parent:
                continue
            parent[new] = (s, x, y)
            if new == target:
                out = []
                while parent[new] is not None:
                    prev, a, b = parent[new]
                    out.append(MoveRecord(t.boxes[a], t.boxes[b], classify(t, prev, a, b)))
                    new = prev
                return out[::-1]
            queue.append(new)
            if len(parent) > limit:
                return None
    return None


def reconfigure_canonicals(a: CanonicalSpec, b: CanonicalSpec) -> MoveSequence:
    """Valid moves from canonical form ``a`` to canonical form ``b``.

    Layer by layer from the outside in, X_i is moved onto Y_i. When Y_i is
    blocked because X_{i+1} has taken its inner edge, X_{i+1} is first
    moved to another legal box. A strip3 core that differs is rebuilt by an
    exhaustive search over moves inside the core while the last layer box
    sits on one of the core's short ends.
    """
    if a.dims != b.dims:
        raise DimsMismatch(f"{a.dims} vs {b.dims}")
    if a.removed != b.removed:
        raise KindMismatch("canonical forms differ in their removed edge")
    fr = a.frame
    t = tables(fr.dims)
    start, end = a.state(), b.state()
    walker = _Walker(start)
    cur = list(a.choices)
    detours = 0
    core_len = 0
    ys = list(b.choices)

    def place(i: int) -> None:
        nonlocal detours
        if cur[i] == ys[i]:
            return
        if walker.try_move(cur[i], ys[i]):
            cur[i] = ys[i]
            return
        if i < fr.t:
            for alt in fr.gap_boxes(i + 1):
                if alt in (cur[i + 1],):
                    continue
                saved = (walker.state, len(walker.moves))
                if walker.try_move(cur[i + 1], alt):
                    if walker.try_move(cur[i], ys[i]):
                        cur[i + 1] = alt
                        cur[i] = ys[i]
                        detours += 1
                        return
                    walker.state = saved[0]
                    del walker.moves[saved[1]:]
        raise HamError(f"could not move layer {i} box {cur[i]} to {ys[i]}")

    for i in range(fr.t):
        place(i)
    last = fr.t
    if fr.core_kind == "strip2" or a.core == b.core:
        place(last)
    else:
        core_boxes = fr.core_boxes()
        # preference: stay put, or go straight to the target box
        cands = fr.short_side_boxes()
        order = [c for c in (cur[last], ys[last]) if c in cands] + [c for c in cands]
        done = False
        for alt in dict.fromkeys(order):
            try:
                goal = build_canonical(fr.dims, ys[:last] + [alt], b.core, b.removed).full
            except HamError:
                continue
            saved = (walker.state, len(walker.moves))
            if alt != cur[last] and not walker.try_move(cur[last], alt):
                continue
            path = _core_search(walker.state, core_boxes, goal)
            if path is not None:
                for mv in path:
                    if not walker.try_move(mv.first, mv.second):
                        raise HamError("core search produced an invalid move")
                core_len = len(path)
                cur[last] = alt
                place(last)
                done = True
                break
            walker.state = saved[0]
            del walker.moves[saved[1]:]
        if not done:
            raise HamError("core strip could not be reconfigured")
    if walker.state != end:
        raise HamError("canonical bridge ended at the wrong state")
    return MoveSequence(start, walker.moves, end,
                        {"detours": detours, "core_search": core_len})
