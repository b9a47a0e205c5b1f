"""ASCII and SVG drawings of cycles with optional box overlays.

North is up. In ASCII, vertices are ``+``, horizontal edges ``---`` and
vertical edges ``|``; absent edges are blank, and an e-cycle's removed
edge is drawn dotted (``...`` or ``:``). Each box shows at most one
overlay letter. When overlays overlap, the first match in this order wins:

====  =====================================
X, Y  move highlight (first and second box)
N     neck of a cookie
S     switchable box
n e   leaf, by the compass name of its
s w   closed side
T     turn leaf; ``t`` marks the sector
C c   large / small cookie box
i     interior box
====  =====================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional
from xml.sax.saxutils import escape

from .decomposition import detect_turns, h_components
from .errors import ParseError
from .grid_model import CycleState, EdgeId, GridDims, tables, validate
from .moves import MoveRecord, leaves, switchable_boxes

OVERLAYS = ("interior", "cookies", "switchables", "leaves", "turns", "move-highlight")
FORMATS = ("ascii", "svg")

_COLORS = {
    "X": "#d62728", "Y": "#ff7f0e", "N": "#8c564b", "S": "#2ca02c",
    "n": "#9467bd", "e": "#9467bd", "s": "#9467bd", "w": "#9467bd",
    "T": "#17becf", "t": "#c7eef2", "C": "#aec7e8", "c": "#ffbb78", "i": "#e8e8e8",
}


@dataclass(frozen=True)
class RenderOptions:
    format: str = "ascii"
    overlays: frozenset = field(default_factory=frozenset)
    move: Optional[MoveRecord] = None
    cell: int = 40

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}")
        bad = set(self.overlays) - set(OVERLAYS)
        if bad:
            raise ValueError(f"unknown overlays {sorted(bad)}")
        object.__setattr__(self, "overlays", frozenset(self.overlays))


def box_letters(state: CycleState, opts: RenderOptions) -> dict[tuple[int, int], str]:
    """The overlay letter of every marked box."""
    layers: list[dict] = []
    ov = opts.overlays
    if "move-highlight" in ov and opts.move is not None:
        layers.append({tuple(opts.move.second): "Y", tuple(opts.move.first): "X"})
    dec = h_components(state) if ov & {"cookies", "interior"} else None
    if "cookies" in ov:
        layers.append({c.neck: "N" for c in dec.cookies})
    if "switchables" in ov:
        layers.append({b: "S" for b in switchable_boxes(state)})
    if "leaves" in ov:
        layers.append({b: c.lower() for c, bs in leaves(state).items() for b in bs})
    if "turns" in ov:
        marks: dict = {}
        sector: dict = {}
        for turn in detect_turns(state):
            x0, y0, x1, y1 = turn.sector
            for k in range(x0, x1):
                for l in range(y0, y1):
                    sector[(k, l)] = "t"
            for b in turn.leaves:
                marks[b] = "T"
        layers += [marks, sector]
    if "cookies" in ov:
        layers.append({b: "C" if c.is_large else "c" for c in dec.cookies for b in c.boxes})
    if "interior" in ov:
        layers.append({b: "i" for b in dec.interior})
    out: dict = {}
    for layer in reversed(layers):
        out.update(layer)
    return out


def render_ascii(state: CycleState, opts: RenderOptions = RenderOptions()) -> str:
    m, n = state.dims
    t = tables(state.dims)
    letters = box_letters(state, opts)
    rem = t.bit(state.removed) if state.removed is not None else -1

    def hseg(i, j):
        b = t.h_bit(i, j)
        return "---" if state.edges >> b & 1 else "..." if b == rem else "   "

    def vseg(i, j):
        b = t.v_bit(i, j)
        return "|" if state.edges >> b & 1 else ":" if b == rem else " "

    lines = []
    for j in range(n - 1, -1, -1):
        lines.append("+" + "+".join(hseg(i, j) for i in range(m - 1)) + "+")
        if j > 0:
            row = ""
            for i in range(m):
                row += vseg(i, j - 1)
                if i < m - 1:
                    row += f" {letters.get((i, j - 1), ' ')} "
            lines.append(row.rstrip())
    return "\n".join(lines) + "\n"


def parse_ascii(text: str, check: bool = True) -> CycleState:
    """Read a drawing in the ASCII format back into a state (overlay letters are ignored).

    With ``check`` off the edge set is returned as drawn, which is handy for
    partial configurations.
    """
    lines = [ln for ln in text.strip("\n").splitlines()]
    lines = [ln.rstrip() for ln in lines]
    if not lines or len(lines) % 2 == 0 or not lines[0].lstrip().startswith("+"):
        raise ParseError(1, "a drawing has an odd number of lines starting with '+'")
    indent = len(lines[0]) - len(lines[0].lstrip())
    lines = [ln[indent:] for ln in lines]
    n = (len(lines) + 1) // 2
    m = lines[0].count("+")
    t = tables(GridDims(m, n))
    edges = 0
    removed = None
    for r, line in enumerate(lines):
        line = line.ljust(4 * (m - 1) + 1)
        if r % 2 == 0:
            j = n - 1 - r // 2
            for i in range(m - 1):
                seg = line[4 * i + 1:4 * i + 4]
                if seg == "---":
                    edges |= 1 << t.h_bit(i, j)
                elif seg == "...":
                    removed = EdgeId("H", i, j)
                elif seg.strip():
                    raise ParseError(r + 1, f"unexpected {seg!r} between vertices")
        else:
            l = n - 2 - r // 2
            for i in range(m):
                ch = line[4 * i]
                if ch == "|":
                    edges |= 1 << t.v_bit(i, l)
                elif ch == ":":
                    removed = EdgeId("V", i, l)
                elif ch != " ":
                    raise ParseError(r + 1, f"unexpected {ch!r} in an edge column")
    if check:
        return validate(GridDims(m, n), edges, removed=removed)
    return CycleState(GridDims(m, n), edges, removed=removed)


def render_svg(state: CycleState, opts: RenderOptions = RenderOptions()) -> str:
    m, n = state.dims
    t = tables(state.dims)
    c = opts.cell
    pad = c // 2
    width, height = (m - 1) * c + 2 * pad, (n - 1) * c + 2 * pad

    def x(i):
        return pad + i * c

    def y(j):
        return pad + (n - 1 - j) * c

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>{escape(f"{m}x{n} {state.kind}")}</title>',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for (k, l), ch in sorted(box_letters(state, opts).items()):
        out.append(f'<rect x="{x(k)}" y="{y(l + 1)}" width="{c}" height="{c}" '
                   f'fill="{_COLORS[ch]}" class="box-{ch}"/>')
        out.append(f'<text x="{x(k) + c // 2}" y="{y(l) - c // 2 + 4}" font-size="{c // 3}" '
                   f'text-anchor="middle" font-family="monospace">{escape(ch)}</text>')
    for i in range(m):
        for j in range(n):
            out.append(f'<circle cx="{x(i)}" cy="{y(j)}" r="2" fill="#999999"/>')
    rem = t.bit(state.removed) if state.removed is not None else -1
    for b, e in enumerate(t.edge_ids):
        (i1, j1), (i2, j2) = e.endpoints()
        if state.edges >> b & 1:
            style = 'stroke="#000000" stroke-width="4"'
        elif b == rem:
            style = 'stroke="#000000" stroke-width="2" stroke-dasharray="4 4"'
        else:
            continue
        out.append(f'<line x1="{x(i1)}" y1="{y(j1)}" x2="{x(i2)}" y2="{y(j2)}" {style} '
                   f'stroke-linecap="round"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(state: CycleState, opts: RenderOptions = RenderOptions()) -> str:
    return render_svg(state, opts) if opts.format == "svg" else render_ascii(state, opts)
