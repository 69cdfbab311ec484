"""Command line interface.

    entropy-lp solve problem.json [--method restart] [--eps 1e-3] [--relative]
    entropy-lp transport tp.json [--method balancing] [--out plan.csv]
    entropy-lp bench --sizes 10,20 --alphas 1,100 --methods balancing,theorem2
    entropy-lp check problem.json lambda.json

Exit status: 0 on a satisfied certificate, 2 when the certificate is not
satisfied or the budget ran out, 1 on bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import bench, fgm, io
from .balancing import solve_balancing, transport_to_elp
from .errors import BudgetExhausted, ElpError, InfeasibleSuspected
from .model import ToleranceSpec, check_certificate

EXIT_OK, EXIT_INPUT, EXIT_UNSATISFIED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _csv_list(kind):
    def parse(s):
        try:
            return [kind(v) for v in s.split(",") if v]
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e))
    return parse


def _add_tol(p):
    p.add_argument("--eps", type=float, default=1e-2, help="residual tolerance")
    p.add_argument("--eps-f", type=float, default=1e-2, help="objective-gap tolerance")
    p.add_argument("--relative", action="store_true",
                   help="scale tolerances by the objective and residual at x(0)")


def _tol(args) -> ToleranceSpec:
    return ToleranceSpec(args.eps_f, args.eps, "relative" if args.relative else "absolute")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="entropy-lp", description="Entropy-linear programming solvers.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve an ELP problem file")
    p.add_argument("problem")
    p.add_argument("--method", choices=["theorem1", "theorem2", "restart"], default="restart")
    _add_tol(p)
    p.add_argument("--R", type=float, default=None, help="dual-norm bound for theorem2")
    p.add_argument("--trace", default=None, help="write the iteration trace CSV here")

    p = sub.add_parser("transport", help="solve a correspondence-matrix problem")
    p.add_argument("problem")
    p.add_argument("--method", choices=["balancing", "fgm"], default="balancing")
    p.add_argument("--variant", choices=["jacobi", "gauss-seidel"], default="gauss-seidel")
    _add_tol(p)
    p.add_argument("--out", default=None, help="write the matrix CSV here")

    p = sub.add_parser("bench", help="run the method comparison")
    p.add_argument("--sizes", type=_csv_list(int), default=[30])
    p.add_argument("--alphas", type=_csv_list(float), default=[100.0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--methods", type=_csv_list(str), default=["theorem1", "theorem2", "balancing"])
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--eps-rel", type=float, default=0.01)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")

    p = sub.add_parser("check", help="evaluate the optimality certificate at a dual point")
    p.add_argument("problem")
    p.add_argument("lam", metavar="lambda")
    _add_tol(p)
    return ap


def _cert_dict(c):
    return {"satisfied": c.satisfied, "grad_norm": c.grad_norm,
            "lambda_dot_grad": c.lambda_dot_grad, "f_value": c.f_value,
            "residual_norm": c.residual_norm}


def _result_dict(res):
    return {"status": res.status, "x": res.x_original.tolist(), "lambda": res.lam.tolist(),
            "f": res.f_value, "dual_value": res.dual_value, "iterations": res.iterations,
            "restarts": res.restarts, "R_used": res.R_used, "delta_used": res.delta_used,
            "certificate": _cert_dict(res.certificate)}


def _print(doc):
    print(json.dumps(doc, indent=2, default=float))


def _solve_elp(problem, args, trace):
    tol = _tol(args)
    if args.method == "theorem1":
        return fgm.solve_theorem1(problem, tol, trace=trace)
    if args.method == "theorem2":
        if args.R is None:
            raise ElpError("--method theorem2 requires --R")
        return fgm.solve_theorem2(problem, tol, args.R, trace=trace)
    return fgm.restart_solve(problem, tol, trace=trace)


def cmd_solve(args) -> int:
    problem = io.load_problem(args.problem)
    rows = [] if args.trace else None
    try:
        res = _solve_elp(problem, args, rows.append if rows is not None else None)
    except (BudgetExhausted, InfeasibleSuspected) as e:
        print(f"entropy-lp: {e}", file=sys.stderr)
        res = e.result
    if rows is not None:
        bench.write_trace_csv(rows, args.trace)
    _print(_result_dict(res))
    return EXIT_OK if res.satisfied else EXIT_UNSATISFIED


def cmd_transport(args) -> int:
    tp = io.load_transport(args.problem)
    elp = transport_to_elp(tp)
    tol = _tol(args)
    try:
        if args.method == "balancing":
            res = solve_balancing(tp, tol, args.variant.replace("-", "_"), elp=elp)
        else:
            res = fgm.restart_solve(elp, tol)
    except (BudgetExhausted, InfeasibleSuspected) as e:
        print(f"entropy-lp: {e}", file=sys.stderr)
        res = e.result
    if args.out:
        io.write_matrix_csv(res.x, tp.n_prime, args.out)
    doc = _result_dict(res)
    doc["x"] = np.asarray(res.x).reshape(tp.n_prime, tp.n_prime).tolist()
    _print(doc)
    return EXIT_OK if res.satisfied else EXIT_UNSATISFIED


def cmd_bench(args) -> int:
    cfg = bench.BenchmarkConfig(sizes=args.sizes, alphas=args.alphas, eps_rel=args.eps_rel,
                                seed=args.seed, methods=args.methods, repetitions=args.reps)
    records = bench.run_benchmark(cfg)
    if args.out:
        bench.emit_csv(records, args.out)
    else:
        bench.write_csv(records, sys.stdout)
    return EXIT_OK


def cmd_check(args) -> int:
    problem = io.load_problem(args.problem)
    lam = io.load_lambda(args.lam)
    if lam.shape != (problem.m,):
        raise ElpError(f"lambda has length {lam.size}, problem has m={problem.m}")
    cert = check_certificate(problem, lam, _tol(args))
    _print(_cert_dict(cert))
    return EXIT_OK if cert.satisfied else EXIT_UNSATISFIED


COMMANDS = {"solve": cmd_solve, "transport": cmd_transport, "bench": cmd_bench, "check": cmd_check}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # usage errors and --help
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ElpError, ValueError, OSError) as e:
        print(f"entropy-lp: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
