"""qubokit: QUBO sampling and optimization by iterative belief propagation.

Minimizes E(x) = sum_i h_i x_i + sum_{i<j} w_ij x_i x_j over binary x.
The IBP solver is a Markov chain whose moves exactly resample random
induced sub-trees via belief propagation; a simulated-annealing baseline,
benchmark generators, exact small-instance oracles, and a CLI round out
the toolkit.
"""

from .anneal import (
    AnnealSchedule,
    Checkpoint,
    ReplicaEnsemble,
    RunTrace,
    geometric_schedule,
    run_schedule,
)
from .generate import (
    RandomGraph,
    gen_er_graph,
    load_graph,
    maxcut_to_qubo,
    mis_to_qubo,
    random_sparse_qubo,
    save_graph,
)
from .ibp import ibp_run, ibp_step
from .oracle import (
    CapacityError,
    ExactDistribution,
    boltzmann_distribution,
    brute_force_min,
    exact_marginals,
    total_variation,
    tree_dp_min,
)
from .qubo import (
    ParseError,
    QuboInstance,
    delta_energy,
    energy,
    energy_batch,
    load_instance,
    save_instance,
)
from .sa import sa_run, sa_sweep
from .subtree import SubTree, TreeProblem, build_tree_problem, select_subtree
from .treebp import (
    ConvergenceError,
    MessageSet,
    NodeBelief,
    NumericError,
    bp_pass,
    bp_pass_reference,
    map_assign_tree,
    marginal,
    sample_tree,
)

__version__ = "0.1.0"

__all__ = [
    "AnnealSchedule",
    "CapacityError",
    "Checkpoint",
    "ConvergenceError",
    "ExactDistribution",
    "MessageSet",
    "NodeBelief",
    "NumericError",
    "ParseError",
    "QuboInstance",
    "RandomGraph",
    "ReplicaEnsemble",
    "RunTrace",
    "SubTree",
    "TreeProblem",
    "boltzmann_distribution",
    "bp_pass",
    "bp_pass_reference",
    "brute_force_min",
    "build_tree_problem",
    "delta_energy",
    "energy",
    "energy_batch",
    "exact_marginals",
    "gen_er_graph",
    "geometric_schedule",
    "ibp_run",
    "ibp_step",
    "load_graph",
    "load_instance",
    "map_assign_tree",
    "marginal",
    "maxcut_to_qubo",
    "mis_to_qubo",
    "random_sparse_qubo",
    "run_schedule",
    "sa_run",
    "sa_sweep",
    "sample_tree",
    "save_graph",
    "save_instance",
    "select_subtree",
    "total_variation",
    "tree_dp_min",
]
