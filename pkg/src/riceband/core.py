"""Shared types: box domains, grids, scalar fields, quadrature rules, estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class DomainBox:
    """Axis-aligned compact box ``[lower_1, upper_1] x ... x [lower_d, upper_d]``."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lower) != len(upper) or not lower:
            raise ValueError("lower and upper must be non-empty and of equal length")
        if not all(math.isfinite(a) and math.isfinite(b) for a, b in zip(lower, upper)):
            raise ValueError("box bounds must be finite")
        if any(a >= b for a, b in zip(lower, upper)):
            raise ValueError(f"empty box: lower={lower}, upper={upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, a: float, b: float, d: int) -> "DomainBox":
        return cls((a,) * d, (b,) * d)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def sides(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    def volume(self) -> float:
        return float(np.prod(self.sides))

    def corners(self) -> np.ndarray:
        """All ``2**d`` corners, shape ``(2**d, d)``."""
        axes = [(a, b) for a, b in zip(self.lower, self.upper)]
        return np.array(np.meshgrid(*axes, indexing="ij")).reshape(self.dim, -1).T

    def contains(self, points, atol: float = 0.0) -> np.ndarray:
        p = np.asarray(points, dtype=float).reshape(-1, self.dim)
        lo = np.asarray(self.lower) - atol
        hi = np.asarray(self.upper) + atol
        return np.all((p >= lo) & (p <= hi), axis=1)

    def to_json(self) -> list:
        return [[a, b] for a, b in zip(self.lower, self.upper)]

    @classmethod
    def from_json(cls, obj) -> "DomainBox":
        pairs = [tuple(p) for p in obj]
        if any(len(p) != 2 for p in pairs):
            raise ValueError("domain must be a list of [lower, upper] pairs")
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))


def box_volume(F: DomainBox) -> float:
    return F.volume()


@dataclass(frozen=True)
class GridSpec:
    """Uniform tensor grid with both endpoints included on every axis."""

    points_per_axis: tuple

    def __post_init__(self):
        pts = tuple(int(p) for p in np.atleast_1d(self.points_per_axis))
        if not pts or any(p < 2 for p in pts):
            raise ValueError("each axis needs at least 2 grid points")
        object.__setattr__(self, "points_per_axis", pts)

    @classmethod
    def uniform(cls, points: int, d: int) -> "GridSpec":
        return cls((points,) * d)

    @property
    def dim(self) -> int:
        return len(self.points_per_axis)

    @property
    def shape(self) -> tuple:
        return self.points_per_axis

    def refined(self, factor: int) -> "GridSpec":
        return GridSpec(tuple((p - 1) * factor + 1 for p in self.points_per_axis))

    def axes(self, F: DomainBox) -> list:
        self._check(F)
        return [np.linspace(a, b, p) for a, b, p in zip(F.lower, F.upper, self.points_per_axis)]

    def cell_size(self, F: DomainBox) -> np.ndarray:
        self._check(F)
        return F.sides / (np.asarray(self.points_per_axis) - 1)

    def _check(self, F: DomainBox):
        if F.dim != self.dim:
            raise ValueError(f"grid has dimension {self.dim}, domain has {F.dim}")


def tensor_grid(F: DomainBox, spec: GridSpec) -> np.ndarray:
    """Grid nodes in row-major order (last axis fastest), shape ``(N, d)``."""
    axes = spec.axes(F)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def central_difference_gradient(func: Callable, scale: float = 1.0) -> Callable:
    """Gradient of a vectorized ``func`` by central differences with step ``1e-6*scale``."""
    h = 1e-6 * scale

    def grad(x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        for i in range(x.shape[-1]):
            e = np.zeros(x.shape[-1])
            e[i] = h
            out[..., i] = (func(x + e) - func(x - e)) / (2 * h)
        return out

    return grad


@dataclass(frozen=True)
class ScalarField:
    """A C^1 field ``x -> (value, gradient)``.

    ``func`` and ``grad`` are vectorized over points stored along the last axis:
    ``func(x)`` maps shape ``(..., d)`` to ``(...)`` and ``grad(x)``
    maps ``(..., d)`` to ``(..., d)``. When ``grad`` is omitted a central
    difference fallback is used.
    """

    func: Callable
    dim: int
    grad: Optional[Callable] = None
    scale: float = 1.0

    def __post_init__(self):
        if self.grad is None:
            object.__setattr__(self, "grad", central_difference_gradient(self.func, self.scale))

    def value(self, x) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)

    def gradient(self, x) -> np.ndarray:
        return np.asarray(self.grad(np.asarray(x, dtype=float)), dtype=float)

    def __call__(self, x):
        x = np.asarray(x, dtype=float).reshape(self.dim)
        return float(self.value(x)), self.gradient(x).reshape(self.dim)

    def shifted(self, u: float) -> "ScalarField":
        """The field ``g - u``."""
        f, g = self.func, self.grad
        return ScalarField(lambda x: f(x) - u, self.dim, g, self.scale)

    def negated(self) -> "ScalarField":
        f, g = self.func, self.grad
        return ScalarField(lambda x: -f(x), self.dim, lambda x: -g(x), self.scale)


@dataclass(frozen=True)
class QuadSpec:
    """Composite Gauss-Legendre sizes: ``panels`` per axis, ``nodes`` per panel."""

    nodes: int = 64
    panels: int = 1

    def __post_init__(self):
        if self.nodes < 1 or self.panels < 1:
            raise ValueError("quadrature sizes must be positive")


def default_quad(d: int) -> QuadSpec:
    return QuadSpec(nodes=64 if d <= 2 else 32)


def gauss_legendre(a: float, b: float, nodes: int, panels: int = 1):
    """Composite Gauss-Legendre rule on ``[a, b]``; returns ``(points, weights)``."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return pts, wts


def box_rule(F: DomainBox, quad: QuadSpec | Sequence[QuadSpec]):
    """Tensor Gauss-Legendre rule over ``F``; returns points ``(N, d)`` and weights ``(N,)``."""
    quads = [quad] * F.dim if isinstance(quad, QuadSpec) else list(quad)
    rules = [gauss_legendre(a, b, q.nodes, q.panels) for a, b, q in zip(F.lower, F.upper, quads)]
    mesh = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wmesh = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    wts = np.prod(np.stack([m.ravel() for m in wmesh], axis=-1), axis=-1)
    return pts, wts


def integrate_box(f: Callable, F: DomainBox, quad: QuadSpec, chunk: int = 1 << 18) -> float:
    """Integrate a vectorized ``f(points) -> values`` over ``F``."""
    pts, wts = box_rule(F, quad)
    total = 0.0
    for start in range(0, len(wts), chunk):
        sl = slice(start, start + chunk)
        total += float(np.dot(wts[sl], f(pts[sl])))
    return total


@dataclass(frozen=True)
class Estimate:
    """Sample mean with its standard error.

    ``degenerate`` marks a zero-spread estimate (single replicate or all
    replicates equal); ``stderr`` is then 0 rather than an infinite sentinel.
    """

    value: float
    stderr: float
    replicates: int
    degenerate: bool = False

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be positive")
        if not self.stderr >= 0 or math.isinf(self.stderr):
            raise ValueError("stderr must be finite and nonnegative")

    @classmethod
    def from_samples(cls, samples) -> "Estimate":
        a = np.asarray(samples, dtype=float)
        n = a.size
        if n == 0:
            raise ValueError("no samples")
        mean = float(a.mean())
        if n == 1:
            return cls(mean, 0.0, 1, degenerate=True)
        se = float(a.std(ddof=1) / math.sqrt(n))
        return cls(mean, se, n, degenerate=(se == 0.0))
