import io
import json
import random

import pytest

from hamreconf.grid_model import EdgeId, is_valid, perimeter_cycle, serpentine_cycle, state_hash, tables, validate
from hamreconf.oracle import enumerate_hamiltonian_cycles
from hamreconf.sampler import PROPOSALS, ChainConfig, mcmc_step, random_walk, run_chain


def chain_log(**kw):
    buf = io.StringIO()
    result = run_chain(ChainConfig(**kw), log=buf)
    return result, buf.getvalue()


def test_same_seed_same_log():
    a, log_a = chain_log(dims=(6, 6), steps=2000, seed=9)
    b, log_b = chain_log(dims=(6, 6), steps=2000, seed=9)
    assert log_a == log_b and a.final == b.final
    _, log_c = chain_log(dims=(6, 6), steps=2000, seed=10)
    assert log_c != log_a


def test_log_lines():
    result, log = chain_log(dims=(4, 4), steps=100, seed=1, burn_in=10, thin=5)
    lines = [json.loads(line) for line in log.splitlines()]
    assert len(lines) == 18
    assert [r["step"] for r in lines] == list(range(15, 101, 5))
    assert set(lines[0]) == {"step", "state_hash", "accepted"}
    assert sum(result.visits.values()) == 90


def test_zero_steps():
    start = serpentine_cycle((4, 4))
    result = run_chain(ChainConfig((4, 4), 0, start=start))
    assert result.final == start and result.acceptance_rate == 0.0
    assert result.visits == {state_hash(start): 1}


def test_chain_stays_on_a_strip():
    strip = perimeter_cycle((2, 4))
    for proposal in PROPOSALS:
        result = run_chain(ChainConfig((2, 4), 200, proposal=proposal, start=strip))
        assert result.final == strip and result.accepted == 0


@pytest.mark.parametrize("proposal", PROPOSALS)
def test_both_proposals_reach_every_4x4_cycle(proposal):
    result = run_chain(ChainConfig((4, 4), 20_000, seed=3, proposal=proposal), validate_every=True)
    hashes = {state_hash(c) for c in enumerate_hamiltonian_cycles((4, 4))}
    assert set(result.visits) == hashes
    assert 0.0 <= result.acceptance_rate <= 1.0
    stat, dof = result.chi_square(len(hashes))
    assert stat >= 0 and dof == 5


def test_port_proposal_accepts_more():
    ordered = run_chain(ChainConfig((6, 6), 5000, seed=2))
    ported = run_chain(ChainConfig((6, 6), 5000, seed=2, proposal="uniform-first-then-port"))
    assert ported.acceptance_rate > ordered.acceptance_rate


def test_trivial_moves_count_as_accepted():
    # the strip's one switchable box can only be paired with itself
    strip = perimeter_cycle((2, 4))
    result = run_chain(ChainConfig((2, 4), 100, include_trivial=True, start=strip))
    assert result.acceptance_rate == 1.0 and result.final == strip


def test_config_validation():
    for kw in ({"steps": -1}, {"thin": 0}, {"burn_in": -2}, {"proposal": "metropolis"}, {"seed": -1}):
        args = {"dims": (4, 4), "steps": 10, **kw}
        with pytest.raises(ValueError):
            ChainConfig(**args)
    with pytest.raises(ValueError):
        run_chain(ChainConfig((4, 4), 10, start=serpentine_cycle((6, 6))))


def test_mcmc_step():
    rng = random.Random(0)
    state = serpentine_cycle((6, 6))
    for _ in range(200):
        nxt = mcmc_step(state, rng)
        assert is_valid(nxt)
        state = nxt
    with pytest.raises(ValueError):
        mcmc_step(state, rng, proposal="other")


def test_e_cycle_chain_keeps_removed_edge():
    s = serpentine_cycle((6, 6))
    e = EdgeId("V", 0, 1)
    ec = validate(s.dims, s.edges & ~(1 << tables(s.dims).bit(e)), removed=e)
    result = run_chain(ChainConfig((6, 6), 3000, seed=5, start=ec), validate_every=True)
    assert result.final.removed == e and result.final.kind == "e-cycle"
    assert len(result.visits) > 1


def test_random_walk_is_seeded():
    s = serpentine_cycle((8, 8))
    a = random_walk(s, 300, random.Random(1))
    b = random_walk(s, 300, random.Random(1))
    assert a == b and a != s and is_valid(a)
