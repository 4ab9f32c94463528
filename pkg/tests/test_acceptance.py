"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line."""

import json
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from riceband.cli import cmd_coarea_check, identity_rows, kac_asymptotic_table
from riceband.config import parse_config
from riceband.core import DomainBox, GridSpec, ScalarField
from riceband.ensembles import (
    LinearFieldModel,
    SpectralMeasure,
    algebraic_expected_area,
    homogeneous_expected_area,
    kac_expected_roots,
    kostlan_expected_area,
    trig_expected_area,
)
from riceband.kac_rice import area_deterministic
from riceband.montecarlo import McConfig, compare, mc_expected_area, replicate_areas
from riceband.sphere import build_sphere_rule
from riceband.zeroset import favard_area

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
TWO_PI = 2 * math.pi
LINE = GridSpec((4096,))
PLANE = GridSpec.uniform(201, 2)


def test_criterion_01_kac_degree_one(report):
    t0 = time.perf_counter()
    value = kac_expected_roots(1, "R")
    elapsed = time.perf_counter() - t0
    report(1, f"kac_expected_roots(1, R) = {value!r} (|err| {abs(value - 1):.1e} <= 1e-9), {elapsed:.3f}s < 1s",
           abs(value - 1.0) <= 1e-9 and elapsed < 1.0)


def test_criterion_02_kostlan_sqrt_law(report):
    errs = [abs(kostlan_expected_area(n, 1, "R") - math.sqrt(n)) for n in (1, 4, 9, 100)]
    boxes = [DomainBox((-0.5,), (2.0,)), DomainBox.cube(-1.0, 1.0, 2), DomainBox((0.0, -0.3), (0.7, 1.2))]
    ratios = [kostlan_expected_area(4 * n, F.dim, F) / kostlan_expected_area(n, F.dim, F)
              for F in boxes for n in (1, 3, 25)]
    report(2, f"max |E - sqrt(n)| = {max(errs):.1e} <= 1e-9, value(4n)/value(n) in {sorted(set(ratios))}",
           max(errs) <= 1e-9 and all(r == 2.0 for r in ratios))


def test_criterion_03_qualls_line(report):
    F = DomainBox((0.0,), (TWO_PI,))
    value = trig_expected_area(1, 1, F)
    t0 = time.perf_counter()
    est = mc_expected_area(LinearFieldModel("trigonometric", 1, 1), F, McConfig(2000, LINE))
    elapsed = time.perf_counter() - t0
    rep = compare(value, est)
    report(3, f"theory {value!r} (|err| {abs(value - math.sqrt(2)):.1e} <= 1e-12), "
              f"MC {est.value:.4f} +- {est.stderr:.4f}, z = {rep.z_score:.2f}, {elapsed:.1f}s < 30s",
           abs(value - math.sqrt(2)) <= 1e-12 and rep.passed and elapsed < 30)


def test_criterion_04_rice_cosine(report):
    F = DomainBox((0.0,), (TWO_PI,))
    nu = SpectralMeasure(np.array([[1.0], [-1.0]]), np.array([0.5, 0.5]))
    zero = replicate_areas(nu, F, McConfig(2000, LINE))
    parts = [f"u=0: all {len(zero)} replicates count {set(zero.tolist())}"]
    ok = bool(np.all(zero == 2.0)) and homogeneous_expected_area(nu, 0.0, F) == pytest.approx(2.0, rel=1e-12)
    for u in (0.5, 1.0):
        theory = homogeneous_expected_area(nu, u, F)
        ok &= theory == pytest.approx(2 * math.exp(-u * u / 2), rel=1e-12)
        rep = compare(theory, mc_expected_area(nu, F, McConfig(2000, LINE, base_seed=11, level=u)))
        ok &= rep.passed
        parts.append(f"u={u}: theory {theory:.5f}, z = {rep.z_score:.2f}")
    report(4, "; ".join(parts), ok)


def test_criterion_05_favard_geometry(report):
    t0 = time.perf_counter()
    circle = ScalarField(lambda x: np.sum(x * x, axis=-1) - 1.0, 2, lambda x: 2 * x)
    a2 = favard_area(circle, DomainBox.cube(-2.0, 2.0, 2), build_sphere_rule(2, 64), 256, 256)
    sphere = ScalarField(lambda x: np.sum(x * x, axis=-1) - 1.0, 3, lambda x: 2 * x)
    a3 = favard_area(sphere, DomainBox.cube(-2.0, 2.0, 3), build_sphere_rule(3, 8), 96, 64)
    elapsed = time.perf_counter() - t0
    e2, e3 = abs(a2 / TWO_PI - 1), abs(a3 / (4 * math.pi) - 1)
    report(5, f"circle {a2:.5f} (rel {e2:.2e} <= 1%), sphere {a3:.5f} (rel {e3:.2e} <= 2%), {elapsed:.1f}s < 60s",
           e2 <= 0.01 and e3 <= 0.02 and elapsed < 60)


def test_criterion_06_coarea_cone(report):
    cfg = parse_config(json.loads((CONFIGS / "coarea_cone.json").read_text()))
    row = cmd_coarea_check(cfg).rows[0]
    report(6, f"lhs {row['lhs']:.5f}, rhs {row['rhs']:.5f}, gap {row['relative_gap']:.2e} <= 2%",
           row["relative_gap"] <= 0.02 and row["rhs"] == pytest.approx(4.0, rel=1e-9))


def test_criterion_07_oscillatory_convergence(report):
    g = ScalarField(lambda x: np.sum(x * x, axis=-1) - 0.25, 2, lambda x: 2 * x)
    F = DomainBox.cube(-1.0, 1.0, 2)
    errs = [abs(area_deterministic(g, F, R) - math.pi) / math.pi for R in (10, 50, 250)]
    report(7, f"relative errors at R=10,50,250: {', '.join(f'{e:.2e}' for e in errs)}",
           errs[0] > errs[1] > errs[2] and errs[2] <= 0.03)


CROSS_DIM = [
    ("Kac n=5 on [-3,3]", LinearFieldModel("monomial-product", 1, 5), DomainBox((-3.0,), (3.0,)), LINE,
     lambda F: kac_expected_roots(5, F)),
    ("algebraic n=2 on [-1,1]^2", LinearFieldModel("monomial-product", 2, 2), DomainBox.cube(-1.0, 1.0, 2), PLANE,
     lambda F: algebraic_expected_area(2, 2, F)),
    ("Kostlan n=2 on [-1,1]^2", LinearFieldModel("kostlan", 2, 2), DomainBox.cube(-1.0, 1.0, 2), PLANE,
     lambda F: kostlan_expected_area(2, 2, F)),
    ("trigonometric n=2 on [0,pi]^2", LinearFieldModel("trigonometric", 2, 2), DomainBox.cube(0.0, math.pi, 2), PLANE,
     lambda F: trig_expected_area(2, 2, F)),
]


def test_criterion_08_cross_dimensional_mc(report):
    parts, ok = [], True
    for name, model, F, grid, theory in CROSS_DIM:
        t0 = time.perf_counter()
        est = mc_expected_area(model, F, McConfig(1000, grid, base_seed=5))
        elapsed = time.perf_counter() - t0
        rep = compare(theory(F), est)
        ok &= rep.passed and elapsed < 300
        parts.append(f"{name}: z = {rep.z_score:.2f} ({elapsed:.1f}s)")
    report(8, "; ".join(parts), ok)


def test_criterion_09_kac_asymptotic(report):
    rows = kac_asymptotic_table([100, 1000, 10000])
    ratio, slope_ratio = rows[-1]["ratio"], rows[-1]["slope_ratio"]
    report(9, f"E(1e4)/((2/pi) log 1e4) = {ratio:.4f} in [1, 1.2], fitted slope / (2/pi) = {slope_ratio:.4f}",
           1.0 <= ratio <= 1.2 and abs(slope_ratio - 1) <= 0.1)


def test_criterion_10_identity_suite(report):
    rows = [r for d in (1, 2, 3) for r in identity_rows(d, seed=d)]
    failed = [f"{r['identity']} (d={r['d']})" for r in rows if not r["passed"]]
    sandwiches = sum(r["identity"].startswith("gamma_bounds") for r in rows if r["d"] == 2)
    report(10, f"{len(rows) - len(failed)}/{len(rows)} identity rows pass, {sandwiches} sandwich measures per dimension"
               + (f"; failed: {', '.join(failed)}" if failed else ""),
           not failed and sandwiches == 20)


def test_criterion_11_determinism(report, tmp_path):
    configs = sorted(CONFIGS.glob("*.json"))
    differing = []
    for path in configs:
        command = json.loads(path.read_text())["command"]
        outputs = []
        for k in range(2):
            out = tmp_path / f"{path.stem}.{k}"
            subprocess.run([sys.executable, "-m", "riceband.cli", command, "--config", str(path), "--out", str(out)],
                           check=True, cwd=tmp_path)
            outputs.append(out.read_bytes())
        if outputs[0] != outputs[1]:
            differing.append(path.name)
    report(11, f"{len(configs) - len(differing)}/{len(configs)} shipped configs byte-identical across two runs",
           bool(configs) and not differing)
