"""Flow-based propagators for the Sequence family of global constraints."""

from .domains import (
    FIXPOINT,
    INCONSISTENT,
    BoolDomainStore,
    CostVarDomain,
    IntDomainStore,
    PropagationOutcome,
)
from .among import AmongSpec, among_propagate, sequence_among_windows, soft_among_min_cost
from .flow import (
    INF,
    FlowEdge,
    FlowNetwork,
    FlowState,
    NegativeCycle,
    ResidualArc,
    ResidualGraph,
    all_pairs_shortest_paths,
    build_residual,
    find_feasible_flow,
    min_cost_flow,
    min_cost_through_arc,
    push_unit_on_cycle,
    shortest_paths_from,
    strongly_connected_components,
)
from .rng import SplitMix64, mix_seed
from .sequence import (
    SequenceNetworkLayout,
    SequencePropagator,
    SequenceSpec,
    build_sequence_network,
    decode_flow,
    flow_for_assignment,
    propagate_dc,
)
from .slidingsum import (
    DualGraph,
    WindowSpec,
    build_dual_graph,
    check_satisfiable,
    gen_sequence_propagate,
    propagate_bc,
)
from .soft import (
    SoftNetworkLayout,
    SoftSequencePropagator,
    SoftSequenceSpec,
    build_soft_network,
    propagate_soft,
    violation_cost,
)
from .solver import Model, SearchStats, Solution, Solver, Var, solve

__version__ = "0.1.0"
