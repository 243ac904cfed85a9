"""Exact comparison of MDP reward streams under the 1-optimality and
average overtaking criteria."""

from .chain import ChainStructure, LimitData, chain_structure, cycle_limit_vectors, limiting_matrix
from .linalg import SingularMatrixError, solve_exact
from .mdp import (
    DecisionRule,
    Mdp,
    MdpError,
    PolicySpec,
    StatStream,
    enumerate_decision_rules,
    generate_stream,
    policy_stream,
    rule_matrices,
    stationary_stream,
    validate_mdp,
)
from .ordering import (
    CompareReport,
    LaurentSignature,
    OrderResult,
    avg_overtaking_compare,
    blackwell_compare,
    find_blackwell_optimal,
    laurent_signature,
    oracle_avg_overtaking,
    oracle_discounted,
    oracle_value,
)
from .streams import (
    Decomposition,
    EPStream,
    add,
    cesaro_of_partial_sums,
    decompose,
    dominates,
    long_run_average,
    negate,
    prepend,
)

__version__ = "0.1.0"
