"""Exception types raised by the solvers and loaders."""


class ElpError(Exception):
    """Base class for all package errors."""


class ProblemFormatError(ElpError, ValueError):
    """Malformed problem file or inconsistent dimensions."""


class NonPositivePrior(ElpError, ValueError):
    pass


class ZeroMass(ElpError, ValueError):
    pass


class DomainError(ElpError, ValueError):
    pass


class ScheduleDegenerate(ElpError, ArithmeticError):
    """The logarithm in an iteration bound has argument <= 1.

    Happens when the tolerances are looser than the problem scale; callers
    run a single step and rely on the certificate instead.
    """


class BudgetExhausted(ElpError, RuntimeError):
    """Iteration or restart budget used up without a satisfied certificate.

    The partial result is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class InfeasibleSuspected(ElpError, RuntimeError):
    """Residual stalled across consecutive restarts (heuristic)."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
