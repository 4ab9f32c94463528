"""Discretization convergence for fixed fields.

``--study grid`` refines the marching-squares grid on a shifted circle;
``--study oscillatory`` increases the cutoff R of the oscillatory area
integral. Both report the error against the exact length.
"""

import argparse
import csv
import math
import sys

import numpy as np

from riceband.core import DomainBox, GridSpec, ScalarField
from riceband.kac_rice import area_deterministic
from riceband.montecarlo import McConfig, grid_refinement_study

RADIUS = 0.7
CENTER = np.array([0.013, -0.021])


def circle(radius, center):
    return ScalarField(lambda x: np.sum((x - center) ** 2, axis=-1) - radius**2, 2, lambda x: 2 * (x - center))


def grid_rows(levels):
    F = DomainBox.cube(-1.0, 1.0, 2)
    base = GridSpec.uniform(26, 2)
    exact = 2 * math.pi * RADIUS
    factors = [2**k for k in range(levels)]
    ests = grid_refinement_study(circle(RADIUS, CENTER), F, McConfig(1, base), factors)
    for f, e in zip(factors, ests):
        yield {"nodes_per_axis": base.refined(f).shape[0], "area": e.value, "exact": exact,
               "abs_error": abs(e.value - exact)}


def oscillatory_rows(Rs):
    F = DomainBox.cube(-1.0, 1.0, 2)
    g = ScalarField(lambda x: np.sum(x * x, axis=-1) - 0.25, 2, lambda x: 2 * x)
    for R in Rs:
        a = area_deterministic(g, F, R)
        yield {"R": R, "area": a, "exact": math.pi, "abs_error": abs(a - math.pi)}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--study", choices=["grid", "oscillatory"], default="grid")
    p.add_argument("--levels", type=int, default=5, help="grid refinement levels (factors 1, 2, 4, ...)")
    p.add_argument("--R", type=float, nargs="+", default=[10, 25, 50, 100, 250, 500])
    p.add_argument("--out", default="-")
    args = p.parse_args()

    rows = list(grid_rows(args.levels) if args.study == "grid" else oscillatory_rows(args.R))
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
