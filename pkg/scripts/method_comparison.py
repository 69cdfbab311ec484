"""Iteration counts of the three methods on one n'=30, alpha=100 instance.

    python3 scripts/method_comparison.py [--seed 0] [--n 30] [--alpha 100] [--csv out.csv]

Prints one line per method; the fixed-schedule run of the first method takes
a few hundred thousand steps (roughly ten seconds).
"""

import argparse
import logging

from entropy_lp.balancing import theta, transport_to_elp
from entropy_lp.bench import BenchRecord, emit_csv, generate_transport_instance, run_method
from entropy_lp.model import ToleranceSpec, entropy_gap, lipschitz_constant

METHODS = ("balancing", "theorem2", "theorem1_certificate", "theorem1")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, default=30)
    ap.add_argument("--alpha", type=float, default=100.0)
    ap.add_argument("--eps-rel", type=float, default=0.01)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()
    logging.basicConfig(level=logging.WARNING)

    tp = generate_transport_instance(args.n, args.alpha, args.seed)
    elp = transport_to_elp(tp)
    tol = ToleranceSpec.relative(args.eps_rel).resolve(elp)
    log_theta = theta(tp).log_theta
    print(f"n'={args.n} alpha={args.alpha:g} seed={args.seed}: eps={tol.eps:.3g} "
          f"eps_f={tol.eps_f:.3g} L={lipschitz_constant(elp.A):g} "
          f"gap={entropy_gap(elp):.4g} log(theta)={log_theta:.4g}")
    records = []
    for method in METHODS:
        res, secs = run_method(method, tp, tol, elp)
        print(f"{method:>22}: {res.iterations:>8d} iterations  {res.restarts} restarts  "
              f"{secs:8.3f}s  residual {res.certificate.grad_norm:.3g}  {res.status}")
        records.append(BenchRecord(method, args.n, args.alpha, args.eps_rel, res.iterations,
                                   res.restarts, secs, res.certificate.grad_norm, res.f_value,
                                   res.dual_value, log_theta if method == "balancing" else None,
                                   res.R_used, res.delta_used))
    if args.csv:
        emit_csv(records, args.csv)


if __name__ == "__main__":
    main()
