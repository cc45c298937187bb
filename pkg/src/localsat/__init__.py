"""k-consistency, negative-hyper-resolution and a clause-learning SAT solver on sparse CSP encodings."""

from .cdcl import (
    SATISFIED,
    Branching,
    LearningScheme,
    RestartPolicy,
    SolverConfig,
    SolverStats,
    is_absorbed,
    propagate,
    restrict,
    solve,
)
from .consistency import is_strategy, k_consistency_closure, solve_via_closure
from .csp import Constraint, CspInstance, enumerate_solutions, extends, is_partial_solution, validate_instance
from .encode import CnfFormula, VarMap, decode_model, direct_encode, parse_dimacs, support_encode, write_dimacs
from .hyperres import expand_to_resolution, negative_hyper_resolve, refute_width_k, theoretical_bounds

__version__ = "0.1.0"
