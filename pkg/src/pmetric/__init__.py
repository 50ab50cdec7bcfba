"""Exact arithmetic for partial metric spaces, their completions and the Kahn domain."""

from .errors import (
    AxiomViolationError,
    BudgetExceededError,
    InvalidRadiusError,
    LimitNotComputableError,
    MalformedInputError,
    OracleViolationError,
    PMetricError,
    PmsParseError,
    PreconditionError,
)
from .pms import emit_pms, parse_pms
from .space import (
    PMetricSpace,
    check_axioms,
    find_isometry,
    is_dense,
    is_symmetrically_dense,
    open_ball,
)

__all__ = [
    "AxiomViolationError",
    "BudgetExceededError",
    "InvalidRadiusError",
    "LimitNotComputableError",
    "MalformedInputError",
    "OracleViolationError",
    "PMetricError",
    "PMetricSpace",
    "PmsParseError",
    "PreconditionError",
    "check_axioms",
    "emit_pms",
    "find_isometry",
    "is_dense",
    "is_symmetrically_dense",
    "open_ball",
    "parse_pms",
]
