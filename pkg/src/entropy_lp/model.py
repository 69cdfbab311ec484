"""Entropy-linear programs and their dual oracle.

The primal problem is

    minimize   sum_i x_i ln(x_i / xi_i)
    subject to x on the unit simplex, A x = b

and its (concave) dual is

    phi(lam) = <lam, b> - ln(sum_i xi_i exp([A^T lam]_i)),

with the primal point recovered as a softmax of ``ln xi + A^T lam``.  All
exponentials are evaluated with max-subtraction so that large multipliers
(temperature 100 transport instances produce exponents of order 100) never
overflow.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.special import xlogy

from .errors import DomainError, NonPositivePrior, ProblemFormatError, ZeroMass

log = logging.getLogger(__name__)

# Priors below this are rejected: -ln(min xi) drives every iteration schedule.
MIN_PRIOR = 1e-300
# Floor applied to softmax outputs that underflow, keeps x strictly positive.
_X_FLOOR = np.finfo(float).tiny
# Reference scales below this count as zero when resolving relative tolerances.
_ZERO_SCALE = 1e-12


def _as_csr(A, n: int | None = None) -> sp.csr_matrix:
    if sp.issparse(A):
        A = sp.csr_matrix(A, dtype=float)
    else:
        A = np.asarray(A, dtype=float)
        if A.ndim == 1:
            A = A[None, :]
        if A.size == 0 and n is not None:
            A = A.reshape(0, n)
        A = sp.csr_matrix(A)
    A.sum_duplicates()
    A.sort_indices()
    return A


@dataclass(frozen=True, eq=False)
class ElpProblem:
    """Sparse entropy-linear program ``min KL(x || xi)`` s.t. ``A x = b``.

    ``scale`` is the simplex mass of the original problem before
    normalization; solutions of the normalized problem times ``scale`` solve
    the original one.  ``offset`` is a constant added to reported objective
    values (the transport reduction uses it to report the transport objective
    rather than the KL form).
    """

    A: sp.csr_matrix
    b: np.ndarray
    xi: np.ndarray
    scale: float = 1.0
    offset: float = 0.0
    At: sp.csr_matrix = field(init=False, repr=False)
    log_xi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        xi = np.array(self.xi, dtype=float).ravel()
        A = _as_csr(self.A, n=xi.size)
        b = np.array(self.b, dtype=float).ravel()
        if A.shape != (b.size, xi.size):
            raise ProblemFormatError(
                f"A has shape {A.shape}, expected ({b.size}, {xi.size})")
        if not np.all(np.isfinite(xi)) or np.any(xi <= 0):
            raise NonPositivePrior("prior xi must be strictly positive")
        if np.any(xi < MIN_PRIOR):
            raise NonPositivePrior(f"prior entries below {MIN_PRIOR:g} are not supported")
        if not np.all(np.isfinite(A.data)) or not np.all(np.isfinite(b)):
            raise ProblemFormatError("A and b must be finite")
        empty = np.diff(A.indptr) == 0
        if np.any(empty & (A.shape[1] > 0)):
            rows = np.flatnonzero(empty).tolist()
            raise ProblemFormatError(f"all-zero constraint rows {rows}")
        if self.scale <= 0:
            raise ZeroMass("scale must be positive")
        xi.setflags(write=False)
        b.setflags(write=False)
        log_xi = np.log(xi)
        log_xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "At", A.T.tocsr())
        object.__setattr__(self, "log_xi", log_xi)

    @property
    def n(self) -> int:
        return self.xi.size

    @property
    def m(self) -> int:
        return self.b.size

    @property
    def s(self) -> int:
        """Maximum number of nonzeros in a row of A."""
        if self.m == 0:
            return 0
        return int(np.diff(self.A.indptr).max())

    @property
    def mass(self) -> float:
        return float(self.xi.sum())

    @property
    def is_normalized(self) -> bool:
        return abs(self.mass - 1.0) <= 1e-12

    @classmethod
    def from_triplets(cls, n, m, rows, cols, vals, b, xi, scale=1.0, offset=0.0):
        """Build from coordinate triplets; duplicate (row, col) pairs are summed."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=float)
        if rows.size and (rows.min() < 0 or rows.max() >= m or cols.min() < 0 or cols.max() >= n):
            raise ProblemFormatError("triplet index out of range")
        A = sp.coo_matrix((vals, (rows, cols)), shape=(m, n)).tocsr()
        A.eliminate_zeros()
        return cls(A, b, xi, scale=scale, offset=offset)


def normalize(problem: ElpProblem) -> ElpProblem:
    """Rescale to unit simplex mass: x/L, xi/L, b/L with L = sum(xi)."""
    xi = np.asarray(problem.xi)
    if np.any(xi <= 0):
        raise NonPositivePrior("prior xi must be strictly positive")
    mass = float(xi.sum())
    if mass <= 0:
        raise ZeroMass("prior mass must be positive")
    if mass == 1.0:
        return problem
    return replace(problem, xi=xi / mass, b=problem.b / mass,
                   scale=problem.scale * mass)


def _require_normalized(problem: ElpProblem):
    if not problem.is_normalized:
        raise ProblemFormatError("problem must be normalized (sum xi = 1)")


def entropy_objective(x, xi) -> float:
    """sum_i x_i ln(x_i/xi_i), with 0 ln 0 = 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x has negative entries")
    return float(np.sum(xlogy(x, x) - xlogy(x, xi)))


def objective(problem: ElpProblem, x) -> float:
    """Reported objective: the KL form plus ``problem.offset``."""
    return entropy_objective(x, problem.xi) + problem.offset


def _exponents(problem: ElpProblem, lam) -> np.ndarray:
    if problem.m == 0:
        return problem.log_xi.copy()
    return problem.log_xi + problem.At @ lam


def _softmax(z: np.ndarray) -> np.ndarray:
    w = np.exp(z - z.max())
    w /= w.sum()
    if w.min() <= 0.0:
        np.maximum(w, _X_FLOOR, out=w)
        w /= w.sum()
    return w


def _logsumexp(z: np.ndarray) -> float:
    zmax = z.max()
    return float(zmax + np.log(np.exp(z - zmax).sum()))


def dual_value(problem: ElpProblem, lam) -> float:
    lam = np.asarray(lam, dtype=float)
    return float(problem.b @ lam) - _logsumexp(_exponents(problem, lam))


def primal_from_dual(problem: ElpProblem, lam) -> np.ndarray:
    return _softmax(_exponents(problem, np.asarray(lam, dtype=float)))


def residual(problem: ElpProblem, x) -> np.ndarray:
    """b - A x."""
    if problem.m == 0:
        return np.zeros(0)
    return problem.b - problem.A @ x


def dual_gradient(problem: ElpProblem, lam) -> np.ndarray:
    """Gradient of the dual, b - A x(lam); O(n + s m) work."""
    return residual(problem, primal_from_dual(problem, lam))


def lipschitz_constant(A) -> float:
    """Largest squared Euclidean column norm of A."""
    A = A.tocoo() if sp.issparse(A) else sp.coo_matrix(np.atleast_2d(np.asarray(A, dtype=float)))
    if A.nnz == 0:
        return 0.0
    return float(np.bincount(A.col, weights=A.data ** 2, minlength=A.shape[1]).max())


def entropy_gap(problem: ElpProblem) -> float:
    """-ln(min xi): bound on the variation of the objective over the simplex."""
    _require_normalized(problem)
    return float(-np.log(problem.xi.min()))


@dataclass(frozen=True)
class ToleranceSpec:
    """Objective gap ``eps_f`` and residual bound ``eps``.

    In relative mode both are multiplied by the objective and residual norm
    at the starting point x0 = x(lam=0) when resolved against a problem.
    """

    eps_f: float
    eps: float
    mode: str = "absolute"

    def __post_init__(self):
        if not (self.eps_f > 0 and self.eps > 0):
            raise ValueError("tolerances must be positive")
        if self.mode not in ("absolute", "relative"):
            raise ValueError(f"unknown tolerance mode {self.mode!r}")

    @classmethod
    def relative(cls, rel: float, rel_f: float | None = None) -> "ToleranceSpec":
        return cls(eps_f=rel if rel_f is None else rel_f, eps=rel, mode="relative")

    def resolve(self, problem: ElpProblem) -> "ToleranceSpec":
        if self.mode == "absolute":
            return self
        x0 = primal_from_dual(problem, np.zeros(problem.m))
        f_scale = abs(objective(problem, x0))
        if f_scale <= _ZERO_SCALE:
            # the KL form is zero at x0; fall back to the objective's range
            f_scale = entropy_gap(problem) or 1.0
        r_scale = float(np.linalg.norm(residual(problem, x0)))
        if r_scale <= _ZERO_SCALE:
            r_scale = float(np.linalg.norm(problem.b)) or 1.0
        return ToleranceSpec(self.eps_f * f_scale, self.eps * r_scale, "absolute")


@dataclass(frozen=True)
class Certificate:
    """Computable optimality certificate at a dual point.

    If -<lam, grad> <= eps_f and ||grad|| <= eps then x(lam) is an
    (eps_f, eps)-solution, without knowing the optimal value.
    """

    grad_norm: float
    lambda_dot_grad: float
    satisfied: bool
    f_value: float
    residual_norm: float


def check_certificate(problem: ElpProblem, lam, tol: ToleranceSpec) -> Certificate:
    tol = tol.resolve(problem)
    lam = np.asarray(lam, dtype=float)
    x = primal_from_dual(problem, lam)
    g = residual(problem, x)
    gnorm = float(np.linalg.norm(g))
    ldg = float(lam @ g)
    ok = (-ldg <= tol.eps_f) and (gnorm <= tol.eps)
    return Certificate(grad_norm=gnorm, lambda_dot_grad=ldg, satisfied=bool(ok),
                       f_value=objective(problem, x), residual_norm=gnorm)
