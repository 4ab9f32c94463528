"""Kac expected real-root counts over a log-spaced degree sweep.

Writes n, E(n), (2/pi) log n, their ratio, E(n) - (2/pi) log n and the
local slope dE/dlog n between consecutive degrees.
"""

import argparse
import csv
import math
import sys

import numpy as np

from riceband.ensembles import kac_expected_roots


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-exponent", type=int, default=4)
    p.add_argument("--per-decade", type=int, default=4)
    p.add_argument("--out", default="-")
    args = p.parse_args()

    ns = np.unique(np.round(np.logspace(1, args.max_exponent, args.per_decade * (args.max_exponent - 1) + 1)).astype(int))
    values = [kac_expected_roots(int(n), "R") for n in ns]
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "expected_roots", "asymptotic", "ratio", "offset", "local_slope"])
    prev = None
    for n, v in zip(ns, values):
        asym = 2 / math.pi * math.log(n)
        slope = "" if prev is None else repr((v - prev[1]) / (math.log(n) - math.log(prev[0])))
        w.writerow([int(n), repr(v), repr(asym), repr(v / asym), repr(v - asym), slope])
        prev = (n, v)
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
