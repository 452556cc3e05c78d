"""Print single-variable even moments with c = 1 and their q = 0 / q = 1 values.

    python scripts/touchard_riordan_table.py --max-n 7
"""

import argparse
from math import comb, prod

from qmoments import MomentEvaluator, gaussian_spec, poly_eval
from qmoments.exactmath import format_poly


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-n", type=int, default=6)
    args = ap.parse_args()
    ev = MomentEvaluator(gaussian_spec([[1]]))
    for n in range(1, args.max_n + 1):
        m = ev.moment((1,) * (2 * n))
        cat = comb(2 * n, n) // (n + 1)
        dfact = prod(range(2 * n - 1, 0, -2))
        print(f"2n={2 * n:2d}  q=0: {poly_eval(m, 0)} (Catalan {cat})  "
              f"q=1: {poly_eval(m, 1)} ((2n-1)!! {dfact})")
        print(f"      {format_poly(m)}")


if __name__ == "__main__":
    main()
