"""Time and iterations of balancing and the restarted fast gradient method versus alpha.

    python3 scripts/alpha_sweep.py [--n 30] [--alphas 1,3,10,30,100] [--reps 3] [--csv sweep.csv]

Reports the median over repetitions (independent instances) per alpha.
"""

import argparse
import logging
import statistics

from entropy_lp.bench import BenchmarkConfig, emit_csv, run_benchmark


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=30)
    ap.add_argument("--alphas", default="1,3,10,30,100")
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()
    logging.basicConfig(level=logging.WARNING)

    alphas = [float(a) for a in args.alphas.split(",")]
    cfg = BenchmarkConfig(sizes=[args.n], alphas=alphas, methods=["balancing", "theorem2"],
                          seed=args.seed, repetitions=args.reps)
    records = run_benchmark(cfg)
    print(f"{'alpha':>8} {'method':>10} {'iterations':>11} {'seconds':>10}")
    for alpha in alphas:
        for method in cfg.methods:
            rows = [r for r in records if r.alpha == alpha and r.method == method]
            its = statistics.median(r.iterations for r in rows)
            secs = statistics.median(r.seconds for r in rows)
            print(f"{alpha:8g} {method:>10} {its:11g} {secs:10.4f}")
    if args.csv:
        emit_csv(records, args.csv)


if __name__ == "__main__":
    main()
