"""Exception hierarchy. CLI exit codes are attached to the top-level classes."""


class DaopfError(Exception):
    exit_code = 1


class ParseError(DaopfError):
    exit_code = 3


class ValidationError(DaopfError):
    exit_code = 3

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class NumericalError(DaopfError):
    exit_code = 4


class DimensionError(DaopfError, ValueError):
    exit_code = 3


class InfeasibleBoundsError(ValidationError):
    pass


class SingularNetworkError(NumericalError):
    pass


class InfeasibleError(DaopfError):
    exit_code = 2


class HourInfeasibleError(InfeasibleError):
    def __init__(self, hour, phase1_objective):
        super().__init__(
            f"hour {hour} is infeasible (phase-1 residual {phase1_objective:.6g} MW)"
        )
        self.hour = hour
        self.phase1_objective = phase1_objective


class OutOfRangeError(DaopfError):
    """Perturbation lies outside the ranges certified for the current basis."""


class BasisInvalidError(DaopfError):
    """The retained basis is not primal feasible for the requested RHS."""


class ZeroTotalDelta(DaopfError, ZeroDivisionError):
    pass


class MissingModelError(DaopfError):
    pass
