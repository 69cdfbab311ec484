"""Shared instance generators and independent reference oracles."""

import numpy as np
import pytest

from entropy_lp.model import ElpProblem


def random_elp(seed, n=20, m=4, feasible=True):
    """A with entries in [-1, 1], b = A x_feas for an interior simplex point."""
    rng = np.random.default_rng(seed)
    A = rng.uniform(-1, 1, (m, n))
    xi = rng.dirichlet(np.ones(n))
    x_feas = rng.dirichlet(np.ones(n))
    return ElpProblem(A, A @ x_feas, xi)


def ehrenfest():
    """Two states, x1 - x2 = 0, uniform prior."""
    return ElpProblem(np.array([[1.0, -1.0]]), [0.0], [0.5, 0.5])


def _dense(p):
    return p.A.toarray()


def _softmax(z):
    w = np.exp(z - z.max())
    return w / w.sum()


def _phi_delta(A, b, log_xi, delta, lam):
    z = log_xi + A.T @ lam
    zmax = z.max()
    return b @ lam - (zmax + np.log(np.exp(z - zmax).sum())) - 0.5 * delta * lam @ lam


def newton_dual(p, delta=0.0, iters=200, tol=1e-15):
    """Damped Newton on phi_delta with dense algebra; independent of the FGM path.

    Returns (lam*, phi_delta*).
    """
    A, b, log_xi = _dense(p), p.b, np.log(p.xi)
    lam = np.zeros(p.m)
    f = _phi_delta(A, b, log_xi, delta, lam)
    for _ in range(iters):
        x = _softmax(log_xi + A.T @ lam)
        g = b - A @ x - delta * lam
        if np.linalg.norm(g) < tol:
            break
        H = A @ (np.diag(x) - np.outer(x, x)) @ A.T + delta * np.eye(p.m)
        step = np.linalg.solve(H, g)
        t = 1.0
        while t > 1e-12:
            f_new = _phi_delta(A, b, log_xi, delta, lam + t * step)
            if f_new >= f - 1e-15:
                break
            t /= 2
        lam = lam + t * step
        f = max(f, f_new)
    return lam, _phi_delta(A, b, log_xi, delta, lam)


def feasible_segment_min(A, b, xi, h=1e-3):
    """Brute-force min of sum x ln(x/xi) over {x in simplex, A x = b}, n = 3, m = 1.

    The feasible set is a segment; it is sampled exactly (every point satisfies
    the constraints) at spacing h in its arc length parameter.  Returns +inf
    when empty.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    M = np.vstack([np.ones(3), A])
    rhs = np.concatenate([[1.0], np.atleast_1d(b)])
    p0 = np.linalg.lstsq(M, rhs, rcond=None)[0]
    d = np.linalg.svd(M)[2][-1]
    # x = p0 + t d >= 0
    lo, hi = -np.inf, np.inf
    for pi, di in zip(p0, d):
        if abs(di) < 1e-15:
            if pi < 0:
                return np.inf
            continue
        t = -pi / di
        if di > 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
    if lo > hi:
        return np.inf
    ts = np.linspace(lo, hi, max(2, int(np.ceil((hi - lo) / h)) + 1))
    X = np.clip(p0[None, :] + ts[:, None] * d[None, :], 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        F = np.where(X > 0, X * np.log(X / xi), 0.0).sum(axis=1)
    return float(F.min())


def central_diff(f, lam, h=1e-6):
    g = np.zeros_like(lam)
    for i in range(lam.size):
        e = np.zeros_like(lam)
        e[i] = h
        g[i] = (f(lam + e) - f(lam - e)) / (2 * h)
    return g


@pytest.fixture
def ehrenfest_problem():
    return ehrenfest()


def soft_check(cond, message):
    """Qualitative trend checks: report a violation as xfail, never as a failure."""
    if not cond:
        pytest.xfail(f"soft trend violated: {message}")
