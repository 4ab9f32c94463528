"""Closed-form expected area against Monte Carlo for the builtin ensembles.

One row per ensemble: theory, MC mean, standard error and z-score.
"""

import argparse
import csv
import math
import sys
import time

from riceband.core import DomainBox, GridSpec
from riceband.ensembles import (
    LinearFieldModel,
    SpectralMeasure,
    algebraic_expected_area,
    homogeneous_expected_area,
    kac_expected_roots,
    kostlan_expected_area,
    trig_expected_area,
)
from riceband.montecarlo import McConfig, compare, mc_expected_area


def cases():
    line = DomainBox((-3.0,), (3.0,))
    square = DomainBox.cube(-1.0, 1.0, 2)
    torus = DomainBox.cube(0.0, math.pi, 2)
    nu = SpectralMeasure.symmetrized([[1.0, 0.0], [0.6, 0.8]], [0.25, 0.25])
    yield "kac n=5 d=1", LinearFieldModel("monomial-product", 1, 5), line, kac_expected_roots(5, line)
    yield "algebraic n=2 d=2", LinearFieldModel("monomial-product", 2, 2), square, algebraic_expected_area(2, 2, square)
    yield "kostlan n=2 d=2", LinearFieldModel("kostlan", 2, 2), square, kostlan_expected_area(2, 2, square)
    yield "trigonometric n=2 d=2", LinearFieldModel("trigonometric", 2, 2), torus, trig_expected_area(2, 2, torus)
    yield "homogeneous 4 atoms d=2", nu, torus, homogeneous_expected_area(nu, 0.0, torus)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--replicates", type=int, default=500)
    p.add_argument("--grid", type=int, default=201, help="nodes per axis for d=2 (d=1 uses 4096)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-")
    args = p.parse_args()

    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["ensemble", "theory", "mc", "stderr", "z_score", "passed", "seconds"])
    for name, model, F, theory in cases():
        grid = GridSpec((4096,)) if F.dim == 1 else GridSpec.uniform(args.grid, F.dim)
        t0 = time.perf_counter()
        est = mc_expected_area(model, F, McConfig(args.replicates, grid, base_seed=args.seed), workers=args.workers)
        rep = compare(theory, est)
        w.writerow([name, repr(theory), repr(est.value), repr(est.stderr), repr(rep.z_score),
                    str(rep.passed).lower(), f"{time.perf_counter() - t0:.2f}"])
        fh.flush()
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
