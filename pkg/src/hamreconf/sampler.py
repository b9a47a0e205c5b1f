"""Markov chain over Hamiltonian cycles driven by double-switch moves.

Two proposal kernels are offered:

``uniform-ordered-pair`` (default)
    Draw X uniformly from the switchable boxes of the current cycle, switch
    it, then draw Y uniformly from the boxes switchable in the resulting
    two-factor. Accept if the double switch gives a Hamiltonian cycle,
    otherwise stay.

``uniform-first-then-port``
    Draw X as above, then Y uniformly from the ports of the two-factor, so
    every proposal with at least one port is accepted.

By default Y = X is not proposable; ``include_trivial`` adds it as a
self-loop. Nothing here claims the chain is reversible or uniform; the
chi-square statistic against uniform visits is a diagnostic only.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Optional

from .grid_model import CycleState, GridDims, Tables, serpentine_cycle, state_hash, tables, validate
from .moves import forbidden_box, move_table, switchable_indices

PROPOSALS = ("uniform-ordered-pair", "uniform-first-then-port")


@dataclass
class ChainConfig:
    dims: GridDims
    steps: int
    seed: int = 0
    proposal: str = "uniform-ordered-pair"
    burn_in: int = 0
    thin: int = 1
    include_trivial: bool = False
    start: Optional[CycleState] = None
    trajectory_limit: int = 10_000

    def __post_init__(self):
        self.dims = GridDims(*self.dims)
        if self.steps < 0 or self.burn_in < 0 or self.thin < 1:
            raise ValueError("steps and burn_in must be >= 0 and thin >= 1")
        if self.proposal not in PROPOSALS:
            raise ValueError(f"unknown proposal {self.proposal!r}; choose from {PROPOSALS}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")


@dataclass
class ChainResult:
    visits: Counter
    accepted: int
    steps: int
    final: CycleState
    trajectory: list[dict] = field(default_factory=list)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.steps if self.steps else 0.0

    def chi_square(self, n_states: Optional[int] = None) -> tuple[float, int]:
        """Pearson statistic of the visit counts against a uniform target, with its dof."""
        k = n_states or len(self.visits)
        total = sum(self.visits.values())
        if k < 2 or total == 0:
            return 0.0, 0
        expected = total / k
        observed = list(self.visits.values()) + [0] * (k - len(self.visits))
        return sum((o - expected) ** 2 / expected for o in observed), k - 1


class _Moves:
    """Per-state cache: switchable boxes, Y candidates and move outcomes for each X."""

    def __init__(self, t: Tables, forbid: int):
        self.t = t
        self.forbid = forbid
        self.cache: dict[int, tuple[list[int], dict[int, tuple[list[int], dict[int, int]]]]] = {}

    def get(self, full: int):
        hit = self.cache.get(full)
        if hit is not None:
            return hit
        t, forbid = self.t, self.forbid
        sw = switchable_indices(t, full, forbid)
        swset = set(sw)
        valid: dict[int, dict[int, int]] = {x: {} for x in sw}
        for x, y, new in move_table(t, full, forbid):
            valid[x][y] = new
        per_x = {}
        for x in sw:
            mid = full ^ t.box_mask[x]
            cands = set(swset)
            for z in t.box_nbrs[x]:
                if z < 0 or z == forbid:
                    continue
                if t.is_switchable(mid, z):
                    cands.add(z)
                else:
                    cands.discard(z)
            per_x[x] = (sorted(cands), valid[x])
        hit = (sw, per_x)
        self.cache[full] = hit
        return hit


def _step(moves: _Moves, full: int, rng: random.Random, proposal: str,
          include_trivial: bool) -> tuple[int, bool]:
    sw, per_x = moves.get(full)
    if not sw:
        return full, False
    x = sw[rng.randrange(len(sw))]
    cands, valid = per_x[x]
    if proposal == "uniform-first-then-port":
        ports = sorted(valid)
        if include_trivial:
            ports.append(x)
        if not ports:
            return full, False
        y = ports[rng.randrange(len(ports))]
    else:
        if not include_trivial:
            cands = [c for c in cands if c != x]
        if not cands:
            return full, False
        y = cands[rng.randrange(len(cands))]
    if y == x:
        return full, True
    new = valid.get(y)
    if new is None:
        return full, False
    return new, True


def mcmc_step(state: CycleState, rng: random.Random, proposal: str = "uniform-ordered-pair",
              include_trivial: bool = False) -> CycleState:
    """One transition; rejected proposals return ``state`` unchanged."""
    if proposal not in PROPOSALS:
        raise ValueError(f"unknown proposal {proposal!r}")
    t = tables(state.dims)
    moves = _Moves(t, forbidden_box(state))
    full, accepted = _step(moves, state.full, rng, proposal, include_trivial)
    if not accepted or full == state.full:
        return state
    return state.with_full(full)


def run_chain(config: ChainConfig, log: Optional[IO[str]] = None, validate_every: bool = False) -> ChainResult:
    """Run a seeded chain; visits are counted for every step after burn-in.

    With ``log`` set, one JSON line ``{step, state_hash, accepted}`` is
    written every ``thin`` steps after burn-in. ``validate_every``
    revalidates each accepted state from scratch.
    """
    state = config.start or serpentine_cycle(config.dims)
    if state.dims != config.dims:
        raise ValueError("start state does not match the configured dims")
    t = tables(state.dims)
    rng = random.Random(config.seed)
    moves = _Moves(t, forbidden_box(state))
    hashes: dict[int, str] = {}

    def hash_of(full: int) -> str:
        h = hashes.get(full)
        if h is None:
            h = hashes[full] = state_hash(state.with_full(full))
        return h

    full = state.full
    visits: Counter = Counter()
    trajectory: list[dict] = []
    accepted = 0
    if config.steps == 0:
        visits[hash_of(full)] += 1
    for step in range(1, config.steps + 1):
        new, ok = _step(moves, full, rng, config.proposal, config.include_trivial)
        if ok:
            accepted += 1
            if validate_every and new != full:
                out = state.with_full(new)
                validate(out.dims, out.edges, out.kind, out.removed)
            full = new
        if step <= config.burn_in:
            continue
        h = hash_of(full)
        visits[h] += 1
        if (step - config.burn_in) % config.thin == 0:
            rec = {"step": step, "state_hash": h, "accepted": ok}
            if log is not None:
                log.write(json.dumps(rec) + "\n")
            if len(trajectory) < config.trajectory_limit:
                trajectory.append(rec)
    return ChainResult(visits, accepted, config.steps, state.with_full(full), trajectory)


def random_walk(state: CycleState, steps: int, rng: random.Random) -> CycleState:
    """A cycle reached from ``state`` by ``steps`` chain transitions."""
    moves = _Moves(tables(state.dims), forbidden_box(state))
    full = state.full
    for _ in range(steps):
        full, _ = _step(moves, full, rng, "uniform-first-then-port", False)
        if len(moves.cache) > 4096:
            moves.cache.clear()
    return state.with_full(full)


__all__ = [
    "PROPOSALS",
    "ChainConfig",
    "ChainResult",
    "mcmc_step",
    "run_chain",
    "random_walk",
]
