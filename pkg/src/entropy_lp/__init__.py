"""Solvers for entropy-linear programs: regularized dual fast gradient
methods with a priori iteration schedules, a restart driver for unknown dual
size, and the balancing method for correspondence matrices."""

from .balancing import (
    BalancingState,
    TransportProblem,
    balancing_iteration_estimate,
    balancing_step,
    hilbert_metric,
    solve_balancing,
    theta,
    transport_dual_value,
    transport_to_elp,
)
from .errors import (
    BudgetExhausted,
    DomainError,
    ElpError,
    InfeasibleSuspected,
    NonPositivePrior,
    ProblemFormatError,
    ScheduleDegenerate,
    ZeroMass,
)
from .fgm import (
    DualIterate,
    FgmConfig,
    RestartConfig,
    SolveResult,
    baseline_iteration_bound,
    delta_theorem1,
    delta_theorem2,
    fgm_step,
    iterations_theorem1,
    iterations_theorem2,
    regularized_gradient,
    restart_solve,
    solve_regularized,
    solve_theorem1,
    solve_theorem2,
)
from .model import (
    Certificate,
    ElpProblem,
    ToleranceSpec,
    check_certificate,
    dual_gradient,
    dual_value,
    entropy_gap,
    entropy_objective,
    lipschitz_constant,
    normalize,
    primal_from_dual,
)

__version__ = "0.1.0"

__all__ = [
    "BalancingState",
    "TransportProblem",
    "balancing_iteration_estimate",
    "balancing_step",
    "hilbert_metric",
    "solve_balancing",
    "theta",
    "transport_dual_value",
    "transport_to_elp",
    "BudgetExhausted",
    "DomainError",
    "ElpError",
    "InfeasibleSuspected",
    "NonPositivePrior",
    "ProblemFormatError",
    "ScheduleDegenerate",
    "ZeroMass",
    "DualIterate",
    "FgmConfig",
    "RestartConfig",
    "SolveResult",
    "baseline_iteration_bound",
    "delta_theorem1",
    "delta_theorem2",
    "fgm_step",
    "iterations_theorem1",
    "iterations_theorem2",
    "regularized_gradient",
    "restart_solve",
    "solve_regularized",
    "solve_theorem1",
    "solve_theorem2",
    "Certificate",
    "ElpProblem",
    "ToleranceSpec",
    "check_certificate",
    "dual_gradient",
    "dual_value",
    "entropy_gap",
    "entropy_objective",
    "lipschitz_constant",
    "normalize",
    "primal_from_dual",
]
