import random

import pytest

from hamreconf.grid_model import CycleState, GridDims, from_vertex_loop, tables, validate
from hamreconf.oracle import enumerate_hamiltonian_cycles
from hamreconf.sampler import random_walk


@pytest.fixture(scope="session")
def cycles_4x4():
    return enumerate_hamiltonian_cycles((4, 4))


@pytest.fixture(scope="session")
def cycles_6x6():
    return enumerate_hamiltonian_cycles((6, 6))


@pytest.fixture(scope="session")
def cycles_5x6():
    return enumerate_hamiltonian_cycles((5, 6))


def sample_cycles(cycles, count, seed):
    rng = random.Random(seed)
    return rng.sample(cycles, min(count, len(cycles)))


def walked(dims, count, seed, steps=400):
    """``count`` cycles reached by independent seeded random walks from a serpentine."""
    from hamreconf.grid_model import serpentine_cycle

    rng = random.Random(seed)
    start = serpentine_cycle(dims)
    return [random_walk(start, steps, rng) for _ in range(count)]


def edge_set(dims, spec):
    """A raw (unvalidated) state from a list of ("H"|"V", i, j) triples."""
    t = tables(GridDims(*dims))
    mask = 0
    for o, i, j in spec:
        mask |= 1 << (t.h_bit(i, j) if o == "H" else t.v_bit(i, j))
    return CycleState(GridDims(*dims), mask)


LOOPING_EXAMPLE_LOOP = [(0, 0), (5, 0), (5, 5), (3, 5), (3, 4), (4, 4), (4, 1), (3, 1), (3, 3),
                (2, 3), (2, 1), (1, 1), (1, 4), (2, 4), (2, 5), (0, 5)]


@pytest.fixture
def looping_example():
    dims = GridDims(6, 6)
    return validate(dims, from_vertex_loop(dims, LOOPING_EXAMPLE_LOOP))


TWO_LARGE_6X6 = """\
+---+   +---+---+---+
|   |   |           |
+   +   +---+---+   +
|   |           |   |
+   +---+---+---+   +
|                   |
+   +---+---+---+   +
|   |           |   |
+   +   +---+---+   +
|   |   |           |
+---+   +---+---+---+
"""
