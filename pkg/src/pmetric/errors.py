"""Exception hierarchy shared by every module."""

from __future__ import annotations


class PMetricError(Exception):
    """Base class for all library errors."""


class MalformedInputError(PMetricError, ValueError):
    """Input is structurally unusable (non-square matrix, negative entry, bad index)."""


class AxiomViolationError(PMetricError, ValueError):
    """A space required to be a partial metric fails one of P1-P4."""

    def __init__(self, report):
        self.report = report
        first = report.violations[0]
        super().__init__(
            f"not a partial metric: {len(report.violations)} violation(s), "
            f"first {first.axiom} at {first.indices}"
        )


class InvalidRadiusError(PMetricError, ValueError):
    pass


class PreconditionError(PMetricError, ValueError):
    pass


class OracleViolationError(PMetricError):
    """A stream prefix oracle returned an incoherent answer."""


class BudgetExceededError(PMetricError):
    def __init__(self, required: int, budget: int, what: str = "points"):
        self.required = required
        self.budget = budget
        super().__init__(f"requires {required} {what}, budget is {budget}")


class LimitNotComputableError(PMetricError):
    """A limit could not be decided within the configured scan bound."""


class PmsParseError(PMetricError, ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")
