#!/usr/bin/env python3
"""Scan the two branches of the variant lower bound across rack sizes.

The lower-bound step count is the floor of min((1/4) n (log n - c), f(n,r,c)),
where f is finite only for r < n/2.  For small racks the f branch wins and the
walk needs far fewer steps to be distinguishable from uniform; near half
filling the (1/4) n log n branch takes over.  This scan prints both branches
for every r at a fixed n and marks which one is active; the handoff happens
in the vicinity of 2r = sqrt(n).

Usage: python3 scripts/crossover_scan.py [--n 400] [--c 1.0]
"""

import argparse
import math
import sys

from urnmix import bounds


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--c", type=float, default=1.0,
                    help="decay parameter, 0 <= c <= log n")
    args = ap.parse_args()
    n, c = args.n, args.c
    if n < 3:
        ap.error("--n must be at least 3")
    if not 0 <= c <= math.log(n):
        ap.error("--c must lie in [0, log n]")

    log_branch = 0.25 * n * (math.log(n) - c)
    print(f"# n={n}, c={c}, log branch = {log_branch:.2f}, "
          f"2r = sqrt(n) at r = {math.sqrt(n) / 2:.1f}", file=sys.stderr)
    print("r,f_branch,log_branch,k_threshold,active")
    for r in range(1, n // 2 + 1):
        f = bounds.crossover_f(n, r, c)
        rep = bounds.lower_bound(n, r, c)
        active = "f" if f < log_branch else "log"
        f_txt = f"{f:.4g}" if math.isfinite(f) else "inf"
        print(f"{r},{f_txt},{log_branch:.4g},{rep.k_threshold},{active}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
