"""Omega-2 multistage interconnection networks: model, arrangements, routing, oracles."""

from .permcore import (
    Permutation,
    RoutingMatrix,
    SwitchLayer,
    compose,
    from_matrix,
    identity,
    invert,
    layer_to_permutation,
    to_matrix,
    validate_switch_matrix,
)
from .topology import ShuffleKind, shuffle_period, stage_permutation
from .fabric import (
    HazardReport,
    NetworkConfig,
    evaluate,
    load_network,
    save_network,
    stage_pairings,
    to_dot,
    toggle,
    wsnb_hazard,
)
from .fa import (
    ConstructionError,
    CoverageReport,
    FundamentalArrangement,
    build_fa,
    load_fa,
    save_fa,
    verify_coverage,
)
from .router import (
    ChainReport,
    NotAnFAError,
    RouteRequest,
    RouteTrace,
    StalledError,
    SwapCase,
    ToggleRecord,
    chain_analysis,
    exhaustive_route_check,
    replay,
    required_pairs,
    route_any_to_any,
    route_from_fa,
)
from .oracle import (
    EnumerationLimitError,
    crossbar_reference,
    equivalence_evidence,
    matrix_evaluate,
    reachable_set,
    snb_impossibility_evidence,
)

__version__ = "0.1.0"
