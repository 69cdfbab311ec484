"""Random correspondence-matrix instances and the three-way benchmark.

Instances: costs and both marginals are i.i.d. uniform on (0, 1), marginals
rescaled to unit mass.  The generator is numpy's PCG64 seeded through
``SeedSequence(seed)``; draws are taken in the fixed order c (row-major,
n'^2 values), then L (n'), then W (n').  A uniform draw is ``1 - U`` with
``U = Generator.random()`` in [0, 1), so every value lies in (0, 1].
"""

from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import fgm
from .balancing import TransportProblem, solve_balancing, theta, transport_to_elp
from .errors import BudgetExhausted, InfeasibleSuspected
from .io import fmt
from .model import ToleranceSpec

log = logging.getLogger(__name__)

METHODS = ("theorem1", "theorem2", "balancing", "theorem1_certificate")


@dataclass
class BenchmarkConfig:
    sizes: list = field(default_factory=lambda: [30])
    alphas: list = field(default_factory=lambda: [100.0])
    eps_rel: float = 0.01
    seed: int = 0
    methods: list = field(default_factory=lambda: ["theorem1", "theorem2", "balancing"])
    repetitions: int = 1

    def __post_init__(self):
        if not 0 < self.eps_rel < 1:
            raise ValueError("eps_rel must lie in (0, 1)")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ValueError(f"unknown methods {sorted(bad)}")


@dataclass
class BenchRecord:
    method: str
    n_prime: int
    alpha: float
    eps_rel: float
    iterations: int
    restarts: int
    seconds: float
    primal_residual: float
    f_value: float
    dual_value: float
    theta_log: float | None
    R_used: float
    delta_used: float


CSV_COLUMNS = [f.name for f in fields(BenchRecord)]


def generate_transport_instance(n_prime: int, alpha: float, seed) -> TransportProblem:
    if n_prime < 1:
        raise ValueError("n_prime must be >= 1")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    c = 1.0 - rng.random(n_prime * n_prime)
    L = 1.0 - rng.random(n_prime)
    W = 1.0 - rng.random(n_prime)
    return TransportProblem(c.reshape(n_prime, n_prime), L, W, alpha)


def instance_seed(seed: int, n_prime: int, repetition: int) -> list:
    """Per-cell seed: the same instance for every method and alpha."""
    return [seed, n_prime, repetition]


def run_method(method: str, tp: TransportProblem, tol: ToleranceSpec, elp=None):
    """Solve one instance; returns (SolveResult, seconds). Budget failures return the partial result."""
    elp = transport_to_elp(tp) if elp is None else elp
    t0 = time.perf_counter()
    try:
        if method == "theorem1":
            res = fgm.solve_theorem1(elp, tol, mode="fixed")
        elif method == "theorem1_certificate":
            res = fgm.solve_theorem1(elp, tol, mode="certificate")
        elif method == "theorem2":
            res = fgm.restart_solve(elp, tol)
        elif method == "balancing":
            res = solve_balancing(tp, tol, elp=elp)
        else:
            raise ValueError(f"unknown method {method!r}")
    except (BudgetExhausted, InfeasibleSuspected) as e:
        log.warning("%s on n'=%d alpha=%g: %s", method, tp.n_prime, tp.alpha, e)
        res = e.result
    return res, time.perf_counter() - t0


def run_benchmark(config: BenchmarkConfig) -> list[BenchRecord]:
    nan = float("nan")
    records = []
    for n in config.sizes:
        for alpha in config.alphas:
            for method in config.methods:
                for rep in range(config.repetitions):
                    tp = generate_transport_instance(n, alpha, instance_seed(config.seed, n, rep))
                    elp = transport_to_elp(tp)
                    tol = ToleranceSpec.relative(config.eps_rel).resolve(elp)
                    theta_log = theta(tp).log_theta if method == "balancing" else None
                    try:
                        res, secs = run_method(method, tp, tol, elp)
                    except Exception:  # one failed cell must not stop the sweep
                        log.exception("%s failed on n'=%d alpha=%g rep=%d", method, n, alpha, rep)
                        records.append(BenchRecord(method, n, float(alpha), config.eps_rel, 0, 0,
                                                   0.0, nan, nan, nan, theta_log, nan, nan))
                        continue
                    records.append(BenchRecord(
                        method=method, n_prime=n, alpha=float(alpha), eps_rel=config.eps_rel,
                        iterations=res.iterations, restarts=res.restarts, seconds=secs,
                        primal_residual=res.certificate.grad_norm, f_value=res.f_value,
                        dual_value=res.dual_value, theta_log=theta_log,
                        R_used=res.R_used, delta_used=res.delta_used))
    return records


def emit_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_csv(records, fh)


def write_csv(records, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        d = asdict(r)
        w.writerow([fmt(d[k]) for k in CSV_COLUMNS])


_INT_COLUMNS = {"n_prime", "iterations", "restarts"}


def read_csv(path) -> list[BenchRecord]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        rows = csv.DictReader(fh)
        for row in rows:
            kw = {}
            for k in CSV_COLUMNS:
                v = row[k]
                if k == "method":
                    kw[k] = v
                elif k in _INT_COLUMNS:
                    kw[k] = int(v)
                else:
                    kw[k] = None if v == "" else float(v)
            out.append(BenchRecord(**kw))
    return out


def write_trace_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "phi_delta", "grad_norm", "lambda_norm", "seconds"])
        for r in rows:
            w.writerow([r.k, fmt(r.phi_delta), fmt(r.grad_norm), fmt(r.lambda_norm), fmt(r.seconds)])


def records_equal_except_time(a: BenchRecord, b: BenchRecord) -> bool:
    da, db = asdict(a), asdict(b)
    da.pop("seconds"), db.pop("seconds")
    return all(
        (isinstance(x, float) and isinstance(y, float) and math.isnan(x) and math.isnan(y)) or x == y
        for x, y in zip(da.values(), db.values()))
