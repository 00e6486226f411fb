"""Hamming-metric stability tools for permutation tuples.

Measure how far a tuple of permutations is from satisfying a relator system,
and round almost-commuting tuples to exactly commuting (optionally even) ones.
"""

from .estimators import CommutingRounder, NearestSolutionOracle
from .instances import (
    GenSpec,
    amplify,
    amplify_even,
    bs_exact,
    coset_action,
    generate,
    glue,
    perturb,
    random_commuting_tuple,
    torus_tuple,
)
from .lattice import IntegerLattice, hnf, lattice_index
from .oracle import OracleResult, enumerate_solutions, nearest_solution
from .perm import (
    PartialAssignment,
    Permutation,
    PermTuple,
    compose,
    cycles,
    direct_sum,
    fixed_fraction,
    hamming,
    hs_distance_squared,
    identity,
    inverse,
    sign,
    tensor_then_pad,
)
from .rounding import (
    ParityRepairExhausted,
    RoundingReport,
    cluster_components,
    defect_points,
    infer_stabilizer,
    is_regular,
    repair_component,
    round_tuple,
    round_tuple_even,
    window_evaluate,
)
from .words import (
    FreeWord,
    RelatorSystem,
    abelian_membership,
    bs_system,
    commutator_system,
    defect,
    evaluate,
    parse_word,
    reduce,
    strong_solution_check,
    word_length,
)

__version__ = "0.1.0"

__all__ = [
    "abelian_membership",
    "amplify",
    "amplify_even",
    "bs_exact",
    "bs_system",
    "cluster_components",
    "commutator_system",
    "CommutingRounder",
    "compose",
    "coset_action",
    "cycles",
    "defect",
    "defect_points",
    "direct_sum",
    "enumerate_solutions",
    "evaluate",
    "fixed_fraction",
    "FreeWord",
    "generate",
    "GenSpec",
    "glue",
    "hamming",
    "hnf",
    "hs_distance_squared",
    "identity",
    "infer_stabilizer",
    "IntegerLattice",
    "inverse",
    "is_regular",
    "lattice_index",
    "nearest_solution",
    "NearestSolutionOracle",
    "OracleResult",
    "ParityRepairExhausted",
    "parse_word",
    "PartialAssignment",
    "PermTuple",
    "Permutation",
    "perturb",
    "random_commuting_tuple",
    "reduce",
    "RelatorSystem",
    "repair_component",
    "round_tuple",
    "round_tuple_even",
    "RoundingReport",
    "sign",
    "strong_solution_check",
    "tensor_then_pad",
    "torus_tuple",
    "window_evaluate",
    "word_length",
]
