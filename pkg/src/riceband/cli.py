"""Command-line front end: ``riceband <command> --config <path>``.

Each command turns a validated :class:`~riceband.config.ExperimentConfig`
into a list of result rows, written as CSV (with header) or JSON. Floats
use the shortest round-trip decimal (``repr``), so identical configs give
byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from typing import Optional

import numpy as np

from .config import COMMANDS, ConfigError, ExperimentConfig, parse_config
from .core import DomainBox, GridSpec, ScalarField
from .ensembles import (
    SpectralMeasure,
    algebraic_expected_area,
    gamma_bounds,
    homogeneous_expected_area,
    kac_expected_roots,
    kostlan_expected_area,
    trig_expected_area,
)
from .kac_rice import area_deterministic, coarea_check
from .montecarlo import McConfig, compare, mc_expected_area
from .sphere import (
    abs_inner_integral_exact,
    build_sphere_rule,
    expected_norm_gaussian,
    integrate_sphere,
    sphere_area,
)
from .zeroset import favard_area

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
DEFAULT_GRID = {1: 4096, 2: 201, 3: 41}


@dataclasses.dataclass
class RunResult:
    rows: list
    passed: bool


# ---------------------------------------------------------------------------
# helpers


def _rule(d: int, cfg: ExperimentConfig, default: Optional[int] = None):
    res = cfg.sphere_resolution or default
    if res is None:
        return None
    return build_sphere_rule(d, res, seed=cfg.seed if d >= 4 else None)


def _theory(cfg: ExperimentConfig) -> float:
    spec = cfg.ensemble
    F = cfg.effective_domain
    rule = _rule(spec.d, cfg)
    if cfg.level != 0 and spec.kind != "homogeneous":
        raise ConfigError("level: nonzero levels are supported for homogeneous ensembles only")
    if spec.kind == "kac":
        return kac_expected_roots(spec.n, "R" if F is None else F)
    if spec.kind == "kostlan":
        return kostlan_expected_area(spec.n, spec.d, F, rule)
    if spec.kind == "algebraic":
        return algebraic_expected_area(spec.n, spec.d, F, rule)
    if spec.kind == "trigonometric":
        return trig_expected_area(spec.n, spec.d, F, rule)
    return homogeneous_expected_area(spec.build(), cfg.level, F, rule)


def _rownames(cfg: ExperimentConfig) -> dict:
    spec = cfg.ensemble
    dom = cfg.effective_domain
    return {
        "kind": spec.kind,
        "d": spec.d,
        "n": spec.n,
        "domain": "R" if dom is None else json.dumps(dom.to_json()),
        "level": float(cfg.level),
    }


# ---------------------------------------------------------------------------
# commands


def cmd_expected_area(cfg: ExperimentConfig, threads: int = 1) -> RunResult:
    value = _theory(cfg)
    ok = math.isfinite(value)
    return RunResult([{**_rownames(cfg), "expected_area": value, "passed": ok}], ok)


def cmd_mc_verify(cfg: ExperimentConfig, threads: int = 1) -> RunResult:
    F = cfg.effective_domain
    if F is None:
        raise ConfigError("domain: mc-verify needs a bounded domain")
    theory = _theory(cfg)
    d = F.dim
    if d not in DEFAULT_GRID:
        raise ConfigError("ensemble.d: Monte Carlo supports d in {1, 2, 3}")
    grid = cfg.grid or (DEFAULT_GRID[d],)
    spec = GridSpec(tuple(grid) * d if len(grid) == 1 else tuple(grid))
    if spec.dim != d:
        raise ConfigError("grid: dimension does not match the domain")
    mc_cfg = McConfig(cfg.replicates, spec, base_seed=cfg.seed, method=cfg.method, level=cfg.level,
                      sphere_resolution=cfg.sphere_resolution or 32,
                      lines_per_direction=cfg.lines or 128, samples_per_line=cfg.samples or 128)
    est = mc_expected_area(cfg.ensemble.build(), F, mc_cfg, workers=threads, csv_path=cfg.replicate_csv)
    rep = compare(theory, est)
    row = {**_rownames(cfg), "theory": theory, "mc": est.value, "stderr": est.stderr,
           "replicates": est.replicates, "z_score": rep.z_score, "passed": rep.passed}
    return RunResult([row], rep.passed)


def _coarea_function(name: str, d: int) -> ScalarField:
    if name == "cone":
        return ScalarField(lambda x: np.linalg.norm(x, axis=-1), d,
                           lambda x: x / np.maximum(np.linalg.norm(x, axis=-1, keepdims=True), 1e-300))
    if name == "linear":
        return ScalarField(lambda x: x[..., 0], d, lambda x: np.broadcast_to(np.eye(d)[0], x.shape).copy())
    return ScalarField(lambda x: np.sum(x * x, axis=-1), d, lambda x: 2 * x)


def cmd_coarea_check(cfg: ExperimentConfig, threads: int = 1) -> RunResult:
    d = cfg.d if cfg.domain is None else cfg.domain.dim
    F = cfg.domain or DomainBox.cube(-1.0, 1.0, d)
    g = _coarea_function(cfg.function, d)
    rule = _rule(d, cfg)
    lhs, rhs = coarea_check(g, F, level_nodes=cfg.level_nodes, rule=rule,
                            lines_per_direction=cfg.lines or 200, samples_per_line=cfg.samples or 200)
    gap = abs(lhs - rhs) / abs(rhs)
    tol = cfg.tolerance if cfg.tolerance is not None else 0.02
    ok = gap <= tol
    return RunResult([{"function": cfg.function, "d": d, "lhs": lhs, "rhs": rhs,
                       "relative_gap": gap, "tolerance": tol, "passed": ok}], ok)


def kac_asymptotic_table(sweep) -> list:
    """Rows ``(n, E(n), (2/pi) log n, ratio)`` plus the least-squares slope of E against log n."""
    ns = [int(n) for n in sweep]
    values = [kac_expected_roots(n, "R") for n in ns]
    logs = np.log(np.array(ns, dtype=float))
    if len(ns) >= 2 and np.ptp(logs) > 0:
        slope = float(np.polyfit(logs, values, 1)[0])
    else:
        slope = math.nan
    ref = 2.0 / math.pi
    rows = []
    for n, v, lg in zip(ns, values, logs):
        asym = ref * float(lg)
        rows.append({"n": n, "expected_roots": v, "asymptotic": asym,
                     "ratio": v / asym if asym > 0 else math.nan,
                     "fitted_slope": slope, "slope_ratio": slope / ref})
    return rows


def cmd_kac_asymptotic(cfg: ExperimentConfig, threads: int = 1) -> RunResult:
    return RunResult(kac_asymptotic_table(cfg.sweep), True)


def favard_shape(shape: str, d: Optional[int], radius: float, offset: float):
    """Field, default dimension and exact area of a builtin test shape."""
    if shape == "circle":
        d = 2
        exact = 2 * math.pi * radius
    elif shape == "sphere":
        d = 3
        exact = 4 * math.pi * radius**2
    else:
        d = d or 2
        exact = None
    if shape == "plane-slice":
        g = ScalarField(lambda x: x[..., 0] - offset, d,
                        lambda x: np.broadcast_to(np.eye(d)[0], x.shape).copy())
    else:
        g = ScalarField(lambda x: np.sum(x * x, axis=-1) - radius**2, d, lambda x: 2 * x)
    return g, d, exact


def cmd_favard_measure(cfg: ExperimentConfig, threads: int = 1) -> RunResult:
    d_hint = cfg.domain.dim if cfg.domain is not None else (cfg.raw.get("d"))
    g, d, exact = favard_shape(cfg.shape, d_hint, cfg.radius, cfg.offset)
    F = cfg.domain or DomainBox.cube(-2.0, 2.0, d)
    if F.dim != d:
        raise ConfigError(f"domain: {cfg.shape} needs a {d}-dimensional domain")
    if cfg.shape == "plane-slice":
        inside = F.lower[0] < cfg.offset < F.upper[0]
        exact = float(np.prod(F.sides[1:])) if inside else 0.0
    default_res, default_lines, default_samples = {2: (64, 256, 256), 3: (8, 96, 64)}.get(d, (None, 32, 32))
    rule = _rule(d, cfg, default_res if d <= 3 else 2000)
    area = favard_area(g, F, rule, cfg.lines or default_lines, cfg.samples or default_samples)
    tol = cfg.tolerance if cfg.tolerance is not None else (0.01 if d == 2 else 0.02)
    err = abs(area - exact) / exact if exact else abs(area)
    ok = err <= tol
    row = {"shape": cfg.shape, "d": d, "area": area, "exact": exact,
           "relative_error": err, "tolerance": tol, "passed": ok}
    if "R" in cfg.raw:
        # informational only: the truncated integral converges slowly in R, so it does not gate the exit code
        row["R"] = float(cfg.R)
        row["oscillatory_area"] = area_deterministic(g, F, cfg.R)
    return RunResult([row], ok)


def _random_rotation(rng, d):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def _random_atomic(rng, d, atoms):
    z = rng.normal(scale=rng.uniform(0.5, 3.0), size=(atoms, d))
    return SpectralMeasure.symmetrized(z, rng.uniform(0.1, 1.0, size=atoms))


def identity_rows(d: int, seed: int = 0, resolution: Optional[int] = None, draws: int = 100_000,
                  points: int = 5, measures: int = 20) -> list:
    """Pass/fail rows for sphere normalization, the absolute-inner-product and
    Gaussian-norm identities, rotation invariance and the radial-moment bounds."""
    rng = np.random.default_rng(seed)
    res = resolution or {1: 1, 2: 256, 3: 64}.get(d, 20000)
    rule = build_sphere_rule(d, res, seed=seed if d >= 4 else None)
    rows = []

    def add(name, value, reference, tol):
        rows.append({"identity": name, "d": d, "value": float(value), "reference": float(reference),
                     "lower": float(reference - tol), "upper": float(reference + tol),
                     "passed": bool(abs(value - reference) <= tol)})

    omega = sphere_area(d)
    add("normalization", integrate_sphere(rule, lambda S: np.ones(len(S))), omega,
        1e-12 * omega if not rule.stochastic else rule.rtol * omega)

    for k in range(points):
        x = rng.normal(size=d) * rng.uniform(0.2, 5.0)
        exact = abs_inner_integral_exact(x)
        quad = integrate_sphere(rule, lambda S: np.abs(S @ x))
        add(f"abs_inner[{k}]", quad, exact, rule.rtol * exact)
        if not rule.stochastic:
            Rx = _random_rotation(rng, d) @ x
            rot = integrate_sphere(rule, lambda S: np.abs(S @ Rx))
            add(f"rotation[{k}]", rot, quad, 2 * rule.rtol * exact)

    for k in range(points):
        A = rng.normal(size=(d, d))
        Sigma = A @ A.T
        quad = expected_norm_gaussian(Sigma, rule)
        xi = rng.multivariate_normal(np.zeros(d), Sigma, size=draws, method="cholesky")
        norms = np.linalg.norm(xi, axis=1)
        se = norms.std(ddof=1) / math.sqrt(draws)
        tol = 3 * se if not rule.stochastic else 3 * math.hypot(se, rule.rtol * quad)
        add(f"gaussian_norm[{k}]", quad, norms.mean(), tol)

    box = DomainBox.cube(0.0, 1.0, d)
    for k in range(measures):
        nu = _random_atomic(rng, d, int(rng.integers(1, 6)))
        u = float(rng.uniform(-2, 2))
        value = homogeneous_expected_area(nu, u, box, rule)
        lo, hi = gamma_bounds(nu, u, box)
        slack = rule.rtol * value + 1e-12
        rows.append({"identity": f"gamma_bounds[{k}]", "d": d, "value": value, "reference": None,
                     "lower": lo - slack, "upper": hi + slack,
                     "passed": bool(lo - slack <= value <= hi + slack)})
    return rows


def cmd_identities(cfg: ExperimentConfig, threads: int = 1) -> RunResult:
    rows = identity_rows(cfg.d, cfg.seed, cfg.sphere_resolution)
    return RunResult(rows, all(r["passed"] for r in rows))


COMMAND_TABLE = {
    "expected-area": cmd_expected_area,
    "mc-verify": cmd_mc_verify,
    "coarea-check": cmd_coarea_check,
    "kac-asymptotic": cmd_kac_asymptotic,
    "favard-measure": cmd_favard_measure,
    "identities": cmd_identities,
}


# ---------------------------------------------------------------------------
# output


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def format_rows(rows: list, fmt: str) -> str:
    """CSV with a header naming every column, or a JSON array of objects."""
    if fmt == "json":
        clean = [{k: (bool(v) if isinstance(v, np.bool_) else float(v) if isinstance(v, np.floating) else v)
                  for k, v in r.items()} for r in rows]
        return json.dumps(clean, indent=2, allow_nan=True) + "\n"
    columns = []
    for r in rows:
        columns.extend(k for k in r if k not in columns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(k)) for k in columns])
    return buf.getvalue()


def run(cfg: ExperimentConfig, threads: int = 1) -> RunResult:
    """Dispatch ``cfg.command``; raises :class:`ConfigError` for semantic config errors."""
    return COMMAND_TABLE[cfg.command](cfg, threads=max(1, int(threads)))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="riceband", description="Expected zero-set area experiments.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--out", help="output path (default: the config's 'output' key, else stdout)")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--threads", type=int, default=1, help="worker process cap")
    parser.add_argument("--seed", type=int, help="override the config seed")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        print(f"riceband: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.threads < 1:
        print("riceband: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(raw, command=args.command)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("seed: must be nonnegative")
            cfg = dataclasses.replace(cfg, seed=args.seed)
        result = run(cfg, threads=args.threads)
    except ConfigError as exc:
        print(f"riceband: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, NotImplementedError, np.linalg.LinAlgError) as exc:
        print(f"riceband: numeric failure: {exc}", file=sys.stderr)
        return EXIT_FAIL

    text = format_rows(result.rows, args.format or cfg.format)
    out = args.out or cfg.output
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not result.passed:
        print("riceband: one or more checks failed", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
