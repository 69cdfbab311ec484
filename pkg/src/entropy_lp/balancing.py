"""Entropy model of a correspondence matrix and the balancing method.

    minimize  sum_ij x_ij ln x_ij + alpha sum_ij c_ij x_ij
    s.t.      row sums = L, column sums = W, sum x = 1

The dual over (lam, mu) separates: for fixed mu the maximizing lam is
explicit and vice versa, so alternating the two closed forms gives the
balancing (Sinkhorn, RAS) iteration.  Everything runs on log-potentials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp, xlogy

from .errors import BudgetExhausted, DomainError, ProblemFormatError
from .fgm import SolveResult
from .model import (
    ElpProblem,
    ToleranceSpec,
    check_certificate,
    dual_value,
    objective,
    primal_from_dual,
)

VARIANTS = ("gauss_seidel", "jacobi")


@dataclass(frozen=True, eq=False)
class TransportProblem:
    """Cost matrix, positive marginals and temperature.

    Marginals are rescaled to unit mass on construction.
    """

    c: np.ndarray
    L: np.ndarray
    W: np.ndarray
    alpha: float

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        n = int(round(math.sqrt(c.size)))
        if c.ndim == 1 and n * n == c.size:
            c = c.reshape(n, n)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ProblemFormatError("cost matrix must be square")
        L = np.array(self.L, dtype=float).ravel()
        W = np.array(self.W, dtype=float).ravel()
        if L.size != c.shape[0] or W.size != c.shape[0]:
            raise ProblemFormatError("marginal lengths must match the cost matrix")
        if np.any(L <= 0) or np.any(W <= 0):
            raise DomainError("marginals must be strictly positive")
        if not np.all(np.isfinite(c)):
            raise ProblemFormatError("costs must be finite")
        if not self.alpha >= 0:
            raise ProblemFormatError("alpha must be nonnegative")
        L, W = L / L.sum(), W / W.sum()
        for arr in (c, L, W):
            arr.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def n_prime(self) -> int:
        return self.c.shape[0]

    @property
    def log_kernel(self) -> np.ndarray:
        return -self.alpha * self.c


@dataclass(frozen=True, eq=False)
class BalancingState:
    lam: np.ndarray
    mu: np.ndarray
    k: int = 0
    variant: str = "gauss_seidel"

    @classmethod
    def zero(cls, n: int, variant: str = "gauss_seidel") -> "BalancingState":
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        return cls(np.zeros(n), np.zeros(n), 0, variant)


def transport_to_elp(tp: TransportProblem) -> ElpProblem:
    """Rewrite as ``min KL(x || xi)`` with xi proportional to exp(-alpha c).

    Variables are the row-major flattening of the n x n matrix.  Constraints
    are all n row sums followed by the first n-1 column sums; the last column
    sum is implied by the simplex.  ``offset`` is -ln Z so that reported
    objectives are the transport objective.
    """
    n = tp.n_prime
    z = tp.log_kernel.ravel()
    log_Z = float(logsumexp(z))
    xi = np.exp(z - log_Z)
    idx = np.arange(n * n).reshape(n, n)
    rows = [np.repeat(np.arange(n), n), n + np.repeat(np.arange(n - 1), n)]
    cols = [idx.ravel(), idx[:, : n - 1].T.ravel()]
    rows, cols = np.concatenate(rows), np.concatenate(cols)
    A = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(2 * n - 1, n * n))
    b = np.concatenate([tp.L, tp.W[: n - 1]])
    return ElpProblem(A, b, xi, offset=-log_Z)


def elp_multipliers(lam, mu) -> np.ndarray:
    """Map transport potentials (lam, mu) to multipliers of transport_to_elp."""
    lam, mu = np.asarray(lam, dtype=float), np.asarray(mu, dtype=float)
    return np.concatenate([lam + mu[-1], mu[:-1] - mu[-1]])


def transport_plan(tp: TransportProblem, lam, mu) -> np.ndarray:
    """x_ij proportional to exp(-alpha c_ij + lam_i + mu_j), normalized to unit mass."""
    z = tp.log_kernel + np.asarray(lam)[:, None] + np.asarray(mu)[None, :]
    return np.exp(z - logsumexp(z))


def transport_objective(tp: TransportProblem, x) -> float:
    x = np.asarray(x, dtype=float).reshape(tp.n_prime, tp.n_prime)
    return float(xlogy(x, x).sum() + tp.alpha * (tp.c * x).sum())


def transport_dual_value(tp: TransportProblem, lam, mu) -> float:
    lam, mu = np.asarray(lam, dtype=float), np.asarray(mu, dtype=float)
    z = tp.log_kernel + lam[:, None] + mu[None, :]
    return float(lam @ tp.L + mu @ tp.W - logsumexp(z))


def balancing_step(tp: TransportProblem, state: BalancingState) -> BalancingState:
    K = tp.log_kernel
    lam = np.log(tp.L) - logsumexp(K + state.mu[None, :], axis=1)
    src = lam if state.variant == "gauss_seidel" else state.lam
    mu = np.log(tp.W) - logsumexp(K + src[:, None], axis=0)
    return BalancingState(lam, mu, state.k + 1, state.variant)


def marginal_residual(tp: TransportProblem, lam, mu) -> float:
    """|row sums - L|_2 + |col sums - W|_2 of the normalized plan."""
    x = transport_plan(tp, lam, mu)
    return float(np.linalg.norm(x.sum(axis=1) - tp.L) + np.linalg.norm(x.sum(axis=0) - tp.W))


def solve_balancing(
    tp: TransportProblem,
    tol: ToleranceSpec,
    variant: str = "gauss_seidel",
    *,
    max_iterations: int = 100_000,
    callback: Callable[[BalancingState], None] | None = None,
    elp: ElpProblem | None = None,
) -> SolveResult:
    """Balance until the marginal residual and the ELP certificate both hold.

    Tolerances (relative ones included) are resolved on the equivalent ELP,
    so results are directly comparable with the gradient methods.  At least
    one step is always taken.  Raises BudgetExhausted (carrying the partial
    result) when ``max_iterations`` is reached.
    """
    if elp is None:
        elp = transport_to_elp(tp)
    tol = tol.resolve(elp)
    state = BalancingState.zero(tp.n_prime, variant)
    cert = None
    while state.k < max_iterations:
        state = balancing_step(tp, state)
        if callback is not None:
            callback(state)
        cert = check_certificate(elp, elp_multipliers(state.lam, state.mu), tol)
        if cert.satisfied and marginal_residual(tp, state.lam, state.mu) <= tol.eps:
            break
    # gauge: lam_0 = 0; the plan and the ELP multipliers are unchanged
    shift = state.lam[0]
    lam, mu = state.lam - shift, state.mu + shift
    nu = elp_multipliers(lam, mu)
    cert = check_certificate(elp, nu, tol)
    x = primal_from_dual(elp, nu)
    done = cert.satisfied and marginal_residual(tp, lam, mu) <= tol.eps
    res = SolveResult(
        x=x, lam=nu, iterations=state.k, certificate=cert,
        f_value=objective(elp, x), dual_value=dual_value(elp, nu) + elp.offset,
        tolerance=tol, status="success" if done else "budget_exhausted",
        extra={"lam": lam, "mu": mu, "variant": variant, "scale": 1.0})
    if not done:
        raise BudgetExhausted(f"balancing did not converge in {max_iterations} steps", res)
    return res


class ThetaValue(NamedTuple):
    theta: float
    log_theta: float


def theta(tp: TransportProblem) -> ThetaValue:
    """max over (i, j, p, q) of exp(alpha (c_iq + c_pj - c_ij - c_pq)).

    For fixed (i, p) the q- and j-terms separate, so the maximum is
    ``max_{i,p} D[i,p] + D[p,i]`` with ``D[i,p] = max_q (c_iq - c_pq)``; this
    is exact and O(n^3).
    """
    c = tp.c
    n = c.shape[0]
    D = np.empty((n, n))
    chunk = max(1, 2_000_000 // max(n * n, 1))
    for s in range(0, n, chunk):
        D[s:s + chunk] = (c[s:s + chunk, None, :] - c[None, :, :]).max(axis=2)
    log_theta = tp.alpha * float((D + D.T).max())
    with np.errstate(over="ignore"):
        return ThetaValue(float(np.exp(log_theta)), log_theta)


def balancing_iteration_estimate(theta_value: float, eps0: float, eps: float) -> int:
    """ceil(sqrt(theta) ln(eps0/eps)); the hidden constant is unknown, diagnostic only."""
    if not (eps0 > eps > 0) or not theta_value >= 1:
        raise ValueError("need eps0 > eps > 0 and theta >= 1")
    return math.ceil(math.sqrt(theta_value) * math.log(eps0 / eps))


def hilbert_metric(u, v) -> float:
    """Projective distance ln(max(u/v) * max(v/u)) between positive vectors."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    if np.any(u <= 0) or np.any(v <= 0):
        raise DomainError("Hilbert metric needs strictly positive vectors")
    r = np.log(u) - np.log(v)
    return float(r.max() - r.min())


def hilbert_metric_log(a, b) -> float:
    """Hilbert distance between exp(a) and exp(b), without exponentiating."""
    r = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return float(r.max() - r.min())
