"""Hamiltonian cycles on rectangular grid graphs and their reconfiguration by double-switch moves."""

from .canonical import (
    CanonicalSpec,
    LayerFrame,
    base_union,
    build_canonical,
    count_gap_switchables,
    is_canonical,
    random_canonical,
    reconfigure_canonicals,
)
from .decomposition import (
    Cookie,
    CookieDecomposition,
    a0_stack,
    classify_a_types,
    detect_turns,
    ftw_walk,
    h_components,
    interior_boxes,
    looping_h_path,
)
from .errors import HamError
from .grid_model import (
    CycleState,
    DirectedEdge,
    EdgeId,
    GridDims,
    parse,
    serialize,
    serpentine_cycle,
    side_of,
    state_hash,
    validate,
)
from .moves import (
    HamPath,
    MoveRecord,
    MoveSequence,
    apply_double_switch,
    apply_switch,
    backbite,
    enumerate_valid_moves,
    leaves,
    ports,
    switchable_boxes,
)
from .oracle import (
    ReconfigurationGraph,
    bfs_distance,
    build_reconfiguration_graph,
    enumerate_hamiltonian_cycles,
    enumerate_hamiltonian_paths,
)
from .planner import Cascade, cookie_delta, mlc_step, one_lc_step, reconfigure, rtcf, verify_sequence
from .render import RenderOptions, render
from .sampler import ChainConfig, mcmc_step, run_chain

__version__ = "0.1.0"
