"""Fast gradient method on the Tikhonov-regularized dual.

The dual ``phi`` is smoothed into ``phi_delta(lam) = phi(lam) - delta/2 |lam|^2``,
which is delta-strongly concave with an (L + delta)-Lipschitz gradient, and
maximized by the constant-step accelerated scheme

    lam_{k+1} = u_k + grad phi_delta(u_k) / L_delta
    u_{k+1}   = lam_{k+1} + q (lam_{k+1} - lam_k),
    q = (sqrt(L_delta) - sqrt(delta)) / (sqrt(L_delta) + sqrt(delta))

started from ``lam_0 = u_0 = 0``.  Two schedules fix delta and the number of
steps in advance: one from the entropy gap alone, one from a known bound R on
the dual iterates.  ``restart_solve`` grows R geometrically when it is not
known.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BudgetExhausted, InfeasibleSuspected, ScheduleDegenerate
from .model import (
    Certificate,
    ElpProblem,
    ToleranceSpec,
    _exponents,
    _require_normalized,
    _softmax,
    check_certificate,
    dual_value,
    entropy_gap,
    lipschitz_constant,
    objective,
    primal_from_dual,
)

log = logging.getLogger(__name__)

SCHEDULES = ("theorem1", "theorem2", "fixed_delta")


@dataclass(frozen=True)
class FgmConfig:
    delta: float
    L: float
    max_iterations: int = 10**6
    check_every: int = 10
    schedule: str = "fixed_delta"

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.max_iterations < 1 or self.check_every < 1:
            raise ValueError("max_iterations and check_every must be positive")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {self.schedule!r}")

    @property
    def L_delta(self) -> float:
        return self.L + self.delta

    @property
    def momentum(self) -> float:
        a, d = math.sqrt(self.L_delta), math.sqrt(self.delta)
        return (a - d) / (a + d)


@dataclass(frozen=True, eq=False)
class DualIterate:
    lam: np.ndarray
    u: np.ndarray
    k: int = 0
    last_gradient: np.ndarray | None = None
    momentum: float = 0.0

    @classmethod
    def zero(cls, m: int, momentum: float = 0.0) -> "DualIterate":
        z = np.zeros(m)
        return cls(lam=z, u=z, k=0, momentum=momentum)


@dataclass(frozen=True)
class RestartConfig:
    R0: float = 100.0
    beta: float = 4.0
    max_restarts: int = 12
    stall_ratio: float = 0.99

    def __post_init__(self):
        if not self.beta > 1:
            raise ValueError("beta must exceed 1")
        if not self.R0 > 0:
            raise ValueError("R0 must be positive")


@dataclass(frozen=True)
class TraceRow:
    k: int
    phi_delta: float
    grad_norm: float
    lambda_norm: float
    seconds: float


@dataclass(eq=False)
class SolveResult:
    x: np.ndarray
    lam: np.ndarray
    iterations: int
    certificate: Certificate
    f_value: float
    dual_value: float
    restarts: int = 0
    R_used: float = float("nan")
    delta_used: float = float("nan")
    R_delta: float = 0.0  # max_k |lam_k|, diagnostic
    tolerance: ToleranceSpec | None = None
    status: str = "success"
    extra: dict = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return self.certificate.satisfied

    @property
    def x_original(self) -> np.ndarray:
        """Solution of the problem before mass normalization."""
        return self.extra.get("scale", 1.0) * self.x


def regularized_gradient(problem: ElpProblem, delta: float, lam) -> np.ndarray:
    """b - A x(lam) - delta lam."""
    lam = np.asarray(lam, dtype=float)
    x = _softmax(_exponents(problem, lam))
    g = problem.b - problem.A @ x if problem.m else np.zeros(0)
    return g - delta * lam


def regularized_dual_value(problem: ElpProblem, delta: float, lam) -> float:
    lam = np.asarray(lam, dtype=float)
    return dual_value(problem, lam) - 0.5 * delta * float(lam @ lam)


def fgm_step(problem: ElpProblem, config: FgmConfig, state: DualIterate) -> DualIterate:
    g = regularized_gradient(problem, config.delta, state.u)
    lam = state.u + g / config.L_delta
    q = config.momentum
    u = lam + q * (lam - state.lam)
    return DualIterate(lam=lam, u=u, k=state.k + 1, last_gradient=g, momentum=q)


# -- schedules ---------------------------------------------------------------

def delta_theorem1(eps: float, eps_f: float, delta_phi: float) -> float:
    """delta = eps^2 / (9 Delta_phi); eps_f does not enter."""
    return eps * eps / (9.0 * delta_phi)


def iterations_theorem1(L, delta_phi, eps, eps_f, log_const: float = 9.0) -> int:
    """ceil( sqrt(9 L D)/eps * ln(c L D / (eps_f eps^2)) ), c = ``log_const``.

    The log constant is 9 in the statement and 18 in the proof; both are
    accepted.
    """
    arg = log_const * L * delta_phi / (eps_f * eps * eps)
    if not arg > 1.0:
        raise ScheduleDegenerate(f"log argument {arg:g} <= 1")
    return math.ceil(math.sqrt(9.0 * L * delta_phi) / eps * math.log(arg))


def delta_theorem2(eps: float, eps_f: float, R: float) -> float:
    """delta = eps^2 / (2 eps_f + 4 R eps)."""
    return eps * eps / (2.0 * eps_f + 4.0 * R * eps)


def iterations_theorem2(L, delta_phi, eps, eps_f, R) -> int:
    s = eps_f + 2.0 * R * eps
    arg = 4.0 * L * delta_phi * s / (eps_f * eps * eps)
    if not arg > 1.0:
        raise ScheduleDegenerate(f"log argument {arg:g} <= 1")
    return math.ceil(math.sqrt(2.0 * L * s / (eps * eps)) * math.log(arg))


def baseline_iteration_bound(L, R, eps, eps_f) -> int:
    """Unregularized FGM bound max(LR/eps, LR^2/eps_f); for comparison only."""
    return math.ceil(max(L * R / eps, L * R * R / eps_f))


def dual_size_bound(delta_phi: float, r: float) -> float:
    """|lam*| <= Delta/r when a ball of radius r sits inside {b - Ax : x in simplex}."""
    return delta_phi / r


# -- drivers -----------------------------------------------------------------

def _finish(problem, lam, it, tol, delta, R, R_delta, failed_status="unsatisfied"):
    cert = check_certificate(problem, lam, tol)
    x = primal_from_dual(problem, lam)
    status = "success" if cert.satisfied else failed_status
    return SolveResult(
        x=x, lam=lam, iterations=it, certificate=cert,
        f_value=objective(problem, x), dual_value=dual_value(problem, lam),
        R_used=R, delta_used=delta, R_delta=R_delta,
        tolerance=tol, status=status, extra={"scale": problem.scale})


def solve_regularized(
    problem: ElpProblem,
    tol: ToleranceSpec,
    delta: float,
    *,
    fixed_steps: int | None = None,
    max_iterations: int = 10**6,
    check_every: int = 10,
    L: float | None = None,
    trace: Callable[[TraceRow], None] | None = None,
    iterate_hook: Callable[[DualIterate], None] | None = None,
    R: float = float("nan"),
) -> SolveResult:
    """Run the accelerated scheme from lam = u = 0.

    With ``fixed_steps`` exactly that many steps are taken and the
    certificate is evaluated once at the end.  Otherwise the certificate is
    checked at k = 0 and every ``check_every`` steps, stopping at the first
    success or at ``max_iterations`` (status ``budget_exhausted``).
    """
    _require_normalized(problem)
    tol = tol.resolve(problem)
    if L is None:
        L = lipschitz_constant(problem.A)
    budget = fixed_steps if fixed_steps is not None else max_iterations
    config = FgmConfig(delta=delta, L=L, max_iterations=max(budget, 1),
                       check_every=check_every)
    state = DualIterate.zero(problem.m, config.momentum)
    R_delta = 0.0
    t0 = time.perf_counter()

    def emit(st):
        if trace is not None:
            g = regularized_gradient(problem, delta, st.lam)
            trace(TraceRow(st.k, regularized_dual_value(problem, delta, st.lam),
                           float(np.linalg.norm(g)), float(np.linalg.norm(st.lam)),
                           time.perf_counter() - t0))
        if iterate_hook is not None:
            iterate_hook(st)

    emit(state)
    if fixed_steps is None and check_certificate(problem, state.lam, tol).satisfied:
        return _finish(problem, state.lam, 0, tol, delta, R, 0.0)

    while state.k < budget:
        state = fgm_step(problem, config, state)
        R_delta = max(R_delta, float(np.linalg.norm(state.lam)))
        emit(state)
        if fixed_steps is None and state.k % check_every == 0:
            if check_certificate(problem, state.lam, tol).satisfied:
                return _finish(problem, state.lam, state.k, tol, delta, R, R_delta)

    failed = "unsatisfied" if fixed_steps is not None else "budget_exhausted"
    return _finish(problem, state.lam, state.k, tol, delta, R, R_delta, failed)


def _schedule_or_one(fn, *args) -> int:
    try:
        return fn(*args)
    except ScheduleDegenerate:
        log.info("schedule degenerate; running a single step")
        return 1


def solve_theorem1(problem: ElpProblem, tol: ToleranceSpec, *, mode: str = "fixed",
                   log_const: float = 9.0, check_every: int = 10,
                   trace=None) -> SolveResult:
    """Entropy-gap schedule.

    ``mode="fixed"`` runs exactly the prescribed number of steps;
    ``mode="certificate"`` uses the same delta but stops at the first
    satisfied certificate, with the prescribed count as budget.
    """
    _require_normalized(problem)
    tol = tol.resolve(problem)
    dphi = entropy_gap(problem)
    L = lipschitz_constant(problem.A)
    delta = delta_theorem1(tol.eps, tol.eps_f, dphi)
    N = _schedule_or_one(iterations_theorem1, L, dphi, tol.eps, tol.eps_f, log_const)
    R_bound = math.sqrt(8.0 * dphi / delta)
    if mode == "fixed":
        res = solve_regularized(problem, tol, delta, fixed_steps=N, L=L, trace=trace, R=R_bound)
    elif mode == "certificate":
        res = solve_regularized(problem, tol, delta, max_iterations=N, L=L,
                                check_every=check_every, trace=trace, R=R_bound)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    res.extra["schedule_iterations"] = N
    return res


def solve_theorem2(problem: ElpProblem, tol: ToleranceSpec, R: float, *,
                   check_every: int = 10, trace=None) -> SolveResult:
    """Schedule for a known bound R on the dual iterates, certificate stopping."""
    if not R > 0:
        raise ValueError("R must be positive")
    _require_normalized(problem)
    tol = tol.resolve(problem)
    dphi = entropy_gap(problem)
    L = lipschitz_constant(problem.A)
    delta = delta_theorem2(tol.eps, tol.eps_f, R)
    N = _schedule_or_one(iterations_theorem2, L, dphi, tol.eps, tol.eps_f, R)
    res = solve_regularized(problem, tol, delta, max_iterations=N, L=L,
                            check_every=check_every, trace=trace, R=R)
    res.extra["schedule_iterations"] = N
    return res


def restart_solve(problem: ElpProblem, tol: ToleranceSpec,
                  config: RestartConfig = RestartConfig(), *,
                  check_every: int = 10, trace=None) -> SolveResult:
    """Guess R = R0, run the R-schedule, and multiply R by beta until certified.

    Raises InfeasibleSuspected when the best residual improves by less than
    1% between two consecutive restarts, and BudgetExhausted after
    ``max_restarts`` unsuccessful restarts.  Iteration counts accumulate over
    all runs.
    """
    tol = tol.resolve(problem)
    R = config.R0
    total = 0
    prev_best = math.inf
    for restart in range(config.max_restarts + 1):
        res = solve_theorem2(problem, tol, R, check_every=check_every, trace=trace)
        total += res.iterations
        res.iterations = total
        res.restarts = restart
        if res.satisfied:
            res.status = "success"
            return res
        best = res.certificate.grad_norm
        log.info("restart %d: R=%g residual=%.3e", restart, R, best)
        if restart > 0 and best > config.stall_ratio * prev_best:
            res.status = "infeasible_suspected"
            raise InfeasibleSuspected(
                f"residual stalled at {best:.3e} after {restart} restarts", res)
        prev_best = min(prev_best, best)
        R *= config.beta
    res.status = "budget_exhausted"
    raise BudgetExhausted(f"no certificate after {config.max_restarts} restarts", res)
