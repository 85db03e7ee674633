"""qrlab: a laboratory for distributed multi-constrained QoS routing."""

from .classify import (
    Ledger,
    LedgerConflictError,
    NONSATISFIED,
    PairSet,
    PruneCounters,
    SATISFIED,
    UNCERTAIN,
    classify_probe,
    discovery_rate,
    merge_probe,
    probe_counts,
)
from .costmodels import (
    CostModel,
    DiscreteUniform,
    Normal,
    PositiveNormal,
    Uniform,
    assign_costs,
    derive_constraints,
    max_single_metric_costs,
    paper_cost_model,
)
from .distsim import (
    FeasiblePair,
    ForwardResult,
    adversarial_bound,
    best_p_formula,
    best_structured_choices,
    build_star_tables,
    count_satisfied,
    exhaustive_max_satisfied,
    forward,
    montecarlo_PA,
    montecarlo_best_p,
    sampled_max_satisfied,
    theorem2_route,
    theorem3_route,
)
from .graph import (
    Constraints,
    GraphError,
    MixVector,
    MultiCostGraph,
    SpfTree,
    UNREACHABLE,
    composite_weight,
    normalize,
    shortest_cost_vector,
    spf,
)
from .harness import ExperimentConfig, ResultRow, TopologySpec, run_experiment, write_results_csv
from .optimize import (
    Direction,
    EnvelopeSample,
    SearchStrategy,
    SearchTrace,
    envelope_scan,
    equalizer_signal,
    monotonicity_check,
    optimize_p,
    simplex_lattice,
)
from .topologies import (
    Topology,
    gen_adversarial,
    gen_dual_home,
    gen_grid,
    gen_mouth_like,
    gen_three_path,
    gen_transmit_scheme,
)

__version__ = "0.1.0"
