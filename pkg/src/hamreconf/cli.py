"""Command-line entry point.

Exit status is 0 on success, 1 on a domain error (bad cycle file, invalid
move, failed verification, ...) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
from typing import Optional, Sequence

from . import canonical, oracle, planner, sampler
from .errors import HamError
from .grid_model import CycleState, EdgeId, GridDims, parse, serialize, state_hash
from .moves import MoveRecord, MoveSequence, dump_moves, load_moves
from .render import FORMATS, OVERLAYS, RenderOptions, render

DEFAULT_SEED = 0


def _dims(text: str) -> GridDims:
    m = re.fullmatch(r"\s*(\d+)\s*[xX×,]\s*(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected MxN, got {text!r}")
    dims = GridDims(int(m.group(1)), int(m.group(2)))
    if dims.m < 1 or dims.n < 1:
        raise argparse.ArgumentTypeError("dimensions must be positive")
    return dims


def _edge(text: str) -> EdgeId:
    parts = [p for p in re.split(r"[\s,]+", text.strip()) if p]
    if len(parts) != 3 or parts[0].upper() not in ("H", "V"):
        raise argparse.ArgumentTypeError(f"expected H|V,i,j, got {text!r}")
    try:
        return EdgeId(parts[0].upper(), int(parts[1]), int(parts[2]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad edge coordinates in {text!r}") from None


def _boxes(text: str) -> list[tuple[int, int]]:
    pairs = re.findall(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)", text)
    if not pairs or re.sub(r"[\s;()\d,\-]", "", text):
        raise argparse.ArgumentTypeError(f'expected "(k0,l0);(k1,l1);...", got {text!r}')
    return [(int(a), int(b)) for a, b in pairs]


def _move(text: str) -> MoveRecord:
    boxes = _boxes(text)
    if len(boxes) != 2:
        raise argparse.ArgumentTypeError('expected "(k,l);(k,l)"')
    return MoveRecord(boxes[0], boxes[1])


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load_state(path: str) -> CycleState:
    return parse(_read(path))


# ---------------------------------------------------------------- commands

def cmd_enumerate(args) -> int:
    cycles = oracle.enumerate_hamiltonian_cycles(args.dims, cap=args.cap)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        width = max(4, len(str(len(cycles))))
        for i, c in enumerate(cycles):
            _write(os.path.join(args.out, f"{i:0{width}d}.cycle"), serialize(c))
    if not args.count_only:
        for c in cycles:
            print(state_hash(c))
    print(f"count {len(cycles)}")
    return 0


def cmd_rgraph(args) -> int:
    g = oracle.build_reconfiguration_graph(args.dims, cap=args.cap, removed=args.e)
    m, n = sorted(args.dims)
    print(f"nodes {len(g.nodes)}")
    print(f"edges {g.edge_count}")
    print(f"connected {str(g.is_connected()).lower()}")
    if args.stats:
        print(f"diameter {g.diameter()}")
        print(f"bound {n * n * m}")
        hist = " ".join(f"{d}:{c}" for d, c in sorted(g.degree_histogram().items()))
        print(f"degrees {hist}")
    return 0


def cmd_gen_canonical(args) -> int:
    if args.list is None and not args.random:
        raise _Usage("gen-canonical needs --list or --random")
    if args.random:
        rng = random.Random(args.seed)
        spec = canonical.random_canonical(args.dims, rng, removed=args.e)
        state = spec.state()
    else:
        state = canonical.build_canonical(args.dims, args.list, removed=args.e)
    _write(args.out, serialize(state))
    return 0


def cmd_reconfigure(args) -> int:
    h, k = _load_state(args.from_), _load_state(args.to)
    seq = planner.reconfigure(h, k)
    ok, bad = planner.verify_sequence(seq)
    if not ok:
        raise HamError(f"internal error: emitted sequence fails at move {bad}")
    _write(args.out, dump_moves(seq.moves))
    if args.stats:
        stats = dict(seq.stats)
        stats["headroom"] = stats["bound"] - len(seq)
        print(json.dumps(stats, sort_keys=True))
    elif args.out not in (None, "-"):
        print(f"{len(seq)} moves (bound {seq.stats['bound']})")
    return 0


def cmd_verify(args) -> int:
    start, end = _load_state(args.start), _load_state(args.end)
    moves = load_moves(_read(args.seq))
    ok, bad = planner.verify_sequence(MoveSequence(start, moves, end))
    if ok:
        print(f"ok {len(moves)} moves")
        return 0
    where = "end state mismatch" if bad == len(moves) else f"move {bad} ({moves[bad]}) is invalid"
    print(f"FAIL: {where}", file=sys.stderr)
    return 1


def cmd_sample(args) -> int:
    start = _load_state(args.start) if args.start else None
    dims = start.dims if start and args.dims is None else args.dims
    if dims is None:
        raise _Usage("sample needs --dims or --start")
    cfg = sampler.ChainConfig(dims, args.steps, seed=args.seed, proposal=args.proposal,
                              burn_in=args.burn_in, thin=args.thin,
                              include_trivial=args.include_trivial, start=start)
    if args.log:
        with open(args.log, "w", encoding="utf-8", newline="\n") as fh:
            res = sampler.run_chain(cfg, log=fh)
    else:
        res = sampler.run_chain(cfg)
    chi2, dof = res.chi_square()
    print(f"steps {res.steps}")
    print(f"acceptance {res.acceptance_rate:.6f}")
    print(f"distinct {len(res.visits)}")
    print(f"chi2 {chi2:.3f} dof {dof}")
    print(f"final {state_hash(res.final)}")
    return 0


def cmd_render(args) -> int:
    state = _load_state(args.input)
    overlays = set()
    for part in args.overlays or []:
        overlays |= {o.strip() for o in part.split(",") if o.strip()}
    if args.move is not None:
        overlays.add("move-highlight")
    try:
        opts = RenderOptions(args.format, frozenset(overlays), args.move)
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    _write(args.out, render(state, opts))
    return 0


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hamreconf", description="Hamiltonian cycles on grid graphs "
                                "and double-switch reconfiguration.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("enumerate", help="list every Hamiltonian cycle of a small grid")
    s.add_argument("--dims", type=_dims, required=True)
    s.add_argument("--count-only", action="store_true")
    s.add_argument("--out", metavar="DIR", help="write one .cycle file per cycle")
    s.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP, help="vertex limit")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("rgraph", help="reconfiguration graph of a small grid")
    s.add_argument("--dims", type=_dims, required=True)
    s.add_argument("--stats", action="store_true", help="also print diameter and degrees")
    s.add_argument("--e", type=_edge, help="removed boundary edge for e-cycles")
    s.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP)
    s.set_defaults(func=cmd_rgraph)

    s = sub.add_parser("gen-canonical", help="build a canonical form")
    s.add_argument("--dims", type=_dims, required=True)
    s.add_argument("--list", type=_boxes, help='layer boxes, "(k0,l0);(k1,l1);..."')
    s.add_argument("--random", action="store_true", help="draw each layer box uniformly")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--e", type=_edge, help="build an e-cycle without this boundary edge")
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen_canonical)

    s = sub.add_parser("reconfigure", help="move sequence between two cycles")
    s.add_argument("--from", dest="from_", required=True, metavar="FILE")
    s.add_argument("--to", required=True, metavar="FILE")
    s.add_argument("--out", metavar="FILE")
    s.add_argument("--stats", action="store_true", help="print per-phase counts as JSON")
    s.set_defaults(func=cmd_reconfigure)

    s = sub.add_parser("verify", help="replay and check a move sequence")
    s.add_argument("--start", required=True, metavar="FILE")
    s.add_argument("--seq", required=True, metavar="FILE")
    s.add_argument("--end", required=True, metavar="FILE")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("sample", help="run the double-switch Markov chain")
    s.add_argument("--dims", type=_dims)
    s.add_argument("--start", metavar="FILE", help="initial cycle (default: a serpentine)")
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--proposal", choices=sampler.PROPOSALS, default=sampler.PROPOSALS[0])
    s.add_argument("--burn-in", type=int, default=0)
    s.add_argument("--thin", type=int, default=1)
    s.add_argument("--include-trivial", action="store_true")
    s.add_argument("--log", metavar="FILE", help="JSONL trajectory")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("render", help="draw a cycle as ASCII or SVG")
    s.add_argument("--in", dest="input", required=True, metavar="FILE")
    s.add_argument("--format", choices=FORMATS, default="ascii")
    s.add_argument("--overlays", action="append", metavar="LIST",
                   help="comma-separated: " + ",".join(OVERLAYS))
    s.add_argument("--move", type=_move, help='highlight "(k,l);(k,l)"')
    s.add_argument("--out")
    s.set_defaults(func=cmd_render)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"hamreconf: error: {exc}", file=sys.stderr)
        return 2
    except (HamError, OSError, ValueError) as exc:
        print(f"hamreconf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
