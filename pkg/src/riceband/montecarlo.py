"""Monte-Carlo estimates of expected zero-set area with counter-based seeding."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .core import DomainBox, Estimate, GridSpec, ScalarField, tensor_grid
from .ensembles import Ensemble, design_matrix, ensemble_dim, realize_field, sample_coefficients
from .sphere import build_sphere_rule
from .zeroset import count_zeros_batch, extract_zero_set, favard_area, mesh_area

AREA_METHODS = ("mesh", "favard", "crossings-1d")


def replicate_seed(base_seed: int, index: int) -> int:
    """Seed of replicate ``index``, a pure function of ``(base_seed, index)``."""
    ss = np.random.SeedSequence([int(base_seed), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class McConfig:
    replicates: int
    grid: GridSpec
    base_seed: int = 0
    method: str = "mesh"
    level: float = 0.0
    sphere_resolution: int = 32
    lines_per_direction: int = 128
    samples_per_line: int = 128

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be positive")
        if self.base_seed < 0:
            raise ValueError("base_seed must be nonnegative")
        if self.method not in AREA_METHODS:
            raise ValueError(f"unknown area method {self.method!r}")

    def with_grid(self, grid: GridSpec) -> "McConfig":
        return McConfig(self.replicates, grid, self.base_seed, self.method, self.level,
                        self.sphere_resolution, self.lines_per_direction, self.samples_per_line)


@dataclass(frozen=True)
class ComparisonReport:
    theory: float
    mc: Estimate
    z_score: float
    passed: bool


def compare(theory: float, mc: Estimate, threshold: float = 3.0) -> ComparisonReport:
    """z-score of ``mc`` against ``theory``; passes when ``|z| <= threshold``.

    A zero-spread estimate passes with ``z = 0`` if it equals ``theory``
    (relative 1e-9) and raises ``ValueError`` otherwise.
    """
    if mc.stderr == 0:
        if math.isclose(mc.value, theory, rel_tol=1e-9, abs_tol=1e-12):
            return ComparisonReport(theory, mc, 0.0, True)
        raise ValueError(f"degenerate comparison: zero stderr, mc={mc.value!r}, theory={theory!r}")
    z = (mc.value - theory) / mc.stderr
    return ComparisonReport(theory, mc, z, abs(z) <= threshold)


def _area_from_values(values, F: DomainBox, cfg: McConfig) -> float:
    if F.dim == 1:
        return float(count_zeros_batch(values))
    return mesh_area(extract_zero_set(values, F, cfg.grid))


class _Sampler:
    """Per-replicate area for one (ensemble, domain, config); picklable for worker processes."""

    def __init__(self, ensemble, F: DomainBox, cfg: McConfig):
        d = F.dim
        if d not in (1, 2, 3):
            raise NotImplementedError(f"Monte Carlo supports d in {{1, 2, 3}}, got d={d}")
        if cfg.grid.dim != d:
            raise ValueError("grid dimension does not match the domain")
        if not isinstance(ensemble, ScalarField) and ensemble_dim(ensemble) != d:
            raise ValueError("ensemble dimension does not match the domain")
        method = cfg.method
        if method == "crossings-1d" and d != 1:
            raise ValueError("crossings-1d needs a 1D domain")
        if method == "mesh" and d == 1:
            method = "crossings-1d"
        if method == "favard" and d == 1:
            raise ValueError("favard method needs d >= 2")
        self.ensemble, self.F, self.cfg, self.method = ensemble, F, cfg, method
        self._H = None

    def _design(self):
        if self._H is None:
            self._H = design_matrix(self.ensemble, tensor_grid(self.F, self.cfg.grid))[0]
        return self._H

    def field_for(self, index: int) -> ScalarField:
        if isinstance(self.ensemble, ScalarField):
            return self.ensemble
        xi = sample_coefficients(self.ensemble, replicate_seed(self.cfg.base_seed, index))
        return realize_field(self.ensemble, xi)

    def area(self, index: int) -> float:
        cfg, F = self.cfg, self.F
        if self.method == "favard":
            rule = build_sphere_rule(F.dim, cfg.sphere_resolution if F.dim == 2 else max(4, cfg.sphere_resolution // 4))
            g = self.field_for(index).shifted(cfg.level)
            return favard_area(g, F, rule, cfg.lines_per_direction, cfg.samples_per_line)
        if isinstance(self.ensemble, ScalarField):
            vals = self.ensemble.value(tensor_grid(F, cfg.grid))
        else:
            xi = sample_coefficients(self.ensemble, replicate_seed(cfg.base_seed, index))
            vals = self._design() @ np.ravel(xi)
        return _area_from_values(vals - cfg.level, F, cfg)

    def areas(self, indices) -> list:
        return [self.area(i) for i in indices]


def replicate_areas(ensemble, F: DomainBox, cfg: McConfig, workers: int = 1) -> np.ndarray:
    """Area of every replicate, in replicate order."""
    sampler = _Sampler(ensemble, F, cfg)
    n = cfg.replicates
    if isinstance(ensemble, ScalarField):
        return np.full(n, sampler.area(0))
    if workers <= 1 or n < 2:
        return np.array(sampler.areas(range(n)))
    blocks = np.array_split(np.arange(n), min(n, 4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(sampler.areas, [b.tolist() for b in blocks]))
    return np.array([a for part in parts for a in part])


def write_replicates_csv(path, areas, base_seed: int):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["replicate", "seed", "area"])
        for i, a in enumerate(areas):
            w.writerow([i, replicate_seed(base_seed, i), repr(float(a))])


def mc_expected_area(
    ensemble: Union[Ensemble, ScalarField],
    F: DomainBox,
    cfg: McConfig,
    workers: int = 1,
    csv_path: Optional[str] = None,
) -> Estimate:
    """Sample mean and standard error of the zero-set (or level-set) area.

    d=1 counts sign changes on the grid; d=2,3 sum the cells of the extracted
    mesh (``method="mesh"``) or use the Favard line estimator.
    ``cfg.level`` shifts the field, giving the level set ``{G = level}``.
    """
    areas = replicate_areas(ensemble, F, cfg, workers)
    if csv_path is not None:
        write_replicates_csv(csv_path, areas, cfg.base_seed)
    return Estimate.from_samples(areas)


def grid_refinement_study(
    ensemble, F: DomainBox, cfg: McConfig, factors: Sequence[int], workers: int = 1
) -> list:
    """One estimate per refinement factor; the same replicate seeds are reused at every level."""
    factors = list(factors)
    if any(b <= a for a, b in zip(factors, factors[1:])):
        raise ValueError("refinement factors must be increasing")
    return [mc_expected_area(ensemble, F, cfg.with_grid(cfg.grid.refined(f)), workers) for f in factors]


def successive_differences(estimates) -> np.ndarray:
    v = np.array([e.value for e in estimates])
    return np.diff(v)
