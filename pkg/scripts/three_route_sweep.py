"""Compare the rewriting engine, the crossing-weighted pairing sum and the
pair-removal recursion on every word up to a given length.

    python scripts/three_route_sweep.py --d 3 --max-order 8 --models 5 --seed 0
"""

import argparse
import random
import time
from fractions import Fraction

from qmoments import MomentEvaluator, gaussian_spec, q_wick_moment, scalar_recursion_moment
from qmoments.engine import all_queries


def random_rational_cov(rng, d):
    return [[Fraction(rng.randint(-9, 9), rng.randint(1, 6)) for _ in range(d)] for _ in range(d)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--max-order", type=int, default=8)
    ap.add_argument("--models", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    bad = 0
    for k in range(args.models):
        spec = gaussian_spec(random_rational_cov(rng, args.d))
        ev = MomentEvaluator(spec)
        t = {"engine": 0.0, "wick": 0.0, "recursion": 0.0}
        n = 0
        for query in all_queries(args.d, args.max_order):
            t0 = time.perf_counter()
            a = ev.moment(query)
            t1 = time.perf_counter()
            b = q_wick_moment(spec, query)
            t2 = time.perf_counter()
            c = scalar_recursion_moment(spec, query)
            t3 = time.perf_counter()
            t["engine"] += t1 - t0
            t["wick"] += t2 - t1
            t["recursion"] += t3 - t2
            n += 1
            if not a == b == c:
                bad += 1
                print("mismatch", query.sigma)
        times = "  ".join(f"{key} {v:.2f}s" for key, v in t.items())
        print(f"model {k}: {n} words  {times}")
    print("all agree" if not bad else f"{bad} mismatches")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
