#!/usr/bin/env python3
"""Exhaustive character-sum audit: worst |S|/bound per prime and degree.

The bound (n+1) deg(delta) sqrt(p) is an exact theorem for nondegenerate
families, so any ratio above 1 means a bug; ratios well below 1 show the
slack available to the equidistribution machinery.
"""

import argparse

from stlab.experiments import charsum_verify
from stlab.family import build_family


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--f", default="0,1")
    ap.add_argument("--g", default="0,1")
    ap.add_argument("--primes", default="101,211,401,1009")
    ap.add_argument("--n-max", type=int, default=5)
    ap.add_argument("--subgroup", action="store_true",
                    help="also audit the largest proper subgroup of F_p*")
    args = ap.parse_args()

    fam = build_family([int(c) for c in args.f.split(",")],
                       [int(c) for c in args.g.split(",")])
    print(f"{'p':>6}  {'set':>10}  {'n':>2}  {'max |S|':>10}  {'bound':>10}  {'ratio':>6}  {'s*':>6}")
    for p in (int(v) for v in args.primes.split(",")):
        jobs = [("full", None)]
        if args.subgroup:
            r = max(d for d in range(1, p - 1) if (p - 1) % d == 0)
            jobs.append((f"order {r}", r))
        for label, r in jobs:
            for rep in charsum_verify(fam, p, args.n_max, subgroup_r=r):
                print(f"{p:>6}  {label:>10}  {rep.n:>2}  {rep.max_abs:>10.3f}"
                      f"  {rep.bound:>10.3f}  {rep.max_abs / rep.bound:>6.3f}"
                      f"  {rep.worst_character_index:>6}")


if __name__ == "__main__":
    main()
