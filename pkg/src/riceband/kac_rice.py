"""Closed-form and oscillatory integral formulas for zero-set area.

``area_deterministic`` evaluates the truncated oscillatory integral for a
fixed field. The ``expected_area*`` family evaluates the expected area of
the zero set of a Gaussian field from its pointwise moments, packaged as a
:class:`MomentField`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln

from .core import DomainBox, GridSpec, QuadSpec, ScalarField, box_rule, default_quad, gauss_legendre, tensor_grid
from .sphere import PSD_TOL, SphereRule, area_constant, build_sphere_rule, clamp_psd, sqrt_quadform_integral
from .zeroset import cosine_kernel, count_zeros_batch, favard_area

CHUNK = 4096


@dataclass(frozen=True)
class MomentField:
    """Pointwise moments of a Gaussian field ``G`` on ``R^d``.

    All callables take points of shape ``(k, d)``. ``sigma`` returns the
    standard deviation ``(k,)``; ``Sigma`` the covariance of the gradient of
    ``G / sigma`` as ``(k, d, d)``; ``mean`` the mean of ``G`` (``None``
    means identically zero). ``ratio_grad`` is the gradient of
    ``mean / sigma``, which is the mean of that normalized gradient; ``None``
    treats it as zero, which is exact whenever ``mean / sigma`` is constant.
    """

    dim: int
    sigma: Callable
    Sigma: Callable
    mean: Optional[Callable] = None
    ratio_grad: Optional[Callable] = None

    @property
    def centered(self) -> bool:
        return self.mean is None


def sigma_from_moments(EGiGj, sigma: float, grad_sigma) -> np.ndarray:
    """Covariance of the gradient of ``G / sigma`` from raw second moments.

    ``(E G_i' G_j' - sigma_i' sigma_j') / sigma^2``, symmetrized and clamped
    to the PSD cone. Stacks of shape ``(..., d, d)`` are accepted.
    """
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0):
        raise ValueError("sigma must be positive")
    M = np.asarray(EGiGj, dtype=float)
    gs = np.asarray(grad_sigma, dtype=float)
    S = (M - gs[..., :, None] * gs[..., None, :]) / (sigma[..., None, None] ** 2)
    return clamp_psd(S, PSD_TOL)


def _quad_points(F: DomainBox, quad):
    return box_rule(F, quad if quad is not None else default_quad(F.dim))


def _sphere_integrand(model: MomentField, x, rule: SphereRule, with_mean: bool) -> np.ndarray:
    S = clamp_psd(model.Sigma(x), PSD_TOL)
    if with_mean and model.ratio_grad is not None:
        return sqrt_quadform_integral(S, rule, mean=model.ratio_grad(x))
    return sqrt_quadform_integral(S, rule)


def expected_area(model: MomentField, F: DomainBox, rule: SphereRule, quad: QuadSpec | None = None) -> float:
    """Expected area of ``{G = 0} ∩ F`` from the general (non-centered) formula.

    Integrates ``(2 pi)^{-1/2} exp(-m^2 / (2 sigma^2)) E||grad(G/sigma)||`` over
    ``F`` where the expected norm is computed on the sphere rule.
    """
    d = F.dim
    if rule.d != d or model.dim != d:
        raise ValueError("dimension mismatch between model, domain and sphere rule")
    pts, wts = _quad_points(F, quad)
    norm_const = math.exp(gammaln(0.5 * (d + 1)) - 0.5 * d * math.log(math.pi)) / math.sqrt(2)
    total = 0.0
    for i in range(0, len(wts), CHUNK):
        x = pts[i : i + CHUNK]
        sig = np.asarray(model.sigma(x), dtype=float)
        if np.any(sig <= 0):
            raise ValueError("sigma(x) <= 0 inside the domain")
        damp = 1.0 if model.mean is None else np.exp(-0.5 * (np.asarray(model.mean(x)) / sig) ** 2)
        enorm = norm_const * _sphere_integrand(model, x, rule, with_mean=True)
        total += float(np.dot(wts[i : i + CHUNK], damp * enorm))
    return total / math.sqrt(2 * math.pi)


def expected_area_centered(
    model: MomentField, F: DomainBox, rule: SphereRule, quad: QuadSpec | None = None
) -> float:
    """Expected area for a centered field: one sphere integral per point of ``F``."""
    if not model.centered:
        pts, _ = _quad_points(F, quad)
        if np.any(np.asarray(model.mean(pts)) != 0):
            raise ValueError("expected_area_centered requires a zero-mean field")
    if rule.d != F.dim or model.dim != F.dim:
        raise ValueError("dimension mismatch between model, domain and sphere rule")
    pts, wts = _quad_points(F, quad)
    total = 0.0
    for i in range(0, len(wts), CHUNK):
        x = pts[i : i + CHUNK]
        total += float(np.dot(wts[i : i + CHUNK], _sphere_integrand(model, x, rule, with_mean=False)))
    return area_constant(F.dim) * total


def expected_area_level(
    model: MomentField, u: float, F: DomainBox, rule: SphereRule, quad: QuadSpec | None = None
) -> float:
    """Expected area of the level set ``{G = u}`` for a unit-variance centered field."""
    pts, _ = _quad_points(F, quad)
    if np.any(np.abs(np.asarray(model.sigma(pts[:CHUNK])) - 1.0) > 1e-12):
        raise ValueError("expected_area_level requires sigma == 1")
    return math.exp(-0.5 * u * u) * expected_area_centered(model, F, rule, quad)


def area_deterministic(
    g: ScalarField,
    F: DomainBox,
    R: float,
    quad: QuadSpec | None = None,
    u_nodes_per_unit: int | None = None,
    chunk: int = 1 << 18,
) -> float:
    """Truncated oscillatory integral ``(1/2pi) int_{-R}^{R} du int_F cos(u g) ||grad g|| dx``.

    The inner u-integral is exact by default; pass ``u_nodes_per_unit`` to
    evaluate it with composite Gauss-Legendre instead. When ``quad`` is
    omitted each axis gets 8-node panels, enough for the phase ``R g`` to
    advance by at most ``2 pi`` per panel.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    d = F.dim
    if quad is None:
        probe = tensor_grid(F, GridSpec.uniform(33 if d <= 2 else 17, d))
        slope = float(np.max(np.linalg.norm(g.gradient(probe), axis=-1)))
        panels = [max(1, math.ceil(R * slope * side / (2 * math.pi))) for side in F.sides]
        quads = [QuadSpec(nodes=8, panels=p) for p in panels]
    else:
        quads = quad
    pts, wts = box_rule(F, quads)
    total = 0.0
    for i in range(0, len(wts), chunk):
        x = pts[i : i + chunk]
        val = g.value(x)
        gn = np.linalg.norm(g.gradient(x).reshape(len(x), d), axis=-1)
        total += float(np.dot(wts[i : i + chunk], cosine_kernel(val, R, u_nodes_per_unit) * gn))
    return total / (2 * math.pi)


def gradient_norm_integral(g: ScalarField, F: DomainBox, quad: QuadSpec | None = None) -> float:
    """``int_F ||grad g|| dx`` by tensor Gauss-Legendre."""
    pts, wts = _quad_points(F, quad)
    return float(np.dot(wts, np.linalg.norm(g.gradient(pts).reshape(len(pts), F.dim), axis=-1)))


def level_measure(
    g: ScalarField,
    u: float,
    F: DomainBox,
    rule: SphereRule | None = None,
    grid_points: int = 4096,
    lines_per_direction: int = 200,
    samples_per_line: int = 200,
) -> float:
    """Area of ``{g = u} ∩ F``: zero counting for d=1, Favard measure for d >= 2."""
    if F.dim == 1:
        t = np.linspace(F.lower[0], F.upper[0], grid_points)
        return float(count_zeros_batch(g.value(t[:, None]) - u))
    rule = rule if rule is not None else build_sphere_rule(F.dim, 48 if F.dim == 2 else 8)
    return favard_area(g.shifted(u), F, rule, lines_per_direction, samples_per_line)


def coarea_check(
    g: ScalarField,
    F: DomainBox,
    level_nodes: int = 32,
    quad: QuadSpec | None = None,
    rule: SphereRule | None = None,
    grid_points: int | None = None,
    lines_per_direction: int = 200,
    samples_per_line: int = 200,
    padding: float = 0.01,
):
    """Both sides of the coarea identity; returns ``(lhs, rhs)``.

    ``rhs`` is the integral of ``||grad g||`` over ``F``. ``lhs`` integrates
    the level-set area over ``u`` with Gauss-Legendre on the sampled range
    of ``g``, widened by ``padding`` of its span on each side. The padding
    strips get their own panels, since true extrema missed by the grid make
    the level measure jump near the ends of the sampled range.
    """
    d = F.dim
    rhs = gradient_norm_integral(g, F, quad)
    if grid_points is None:
        grid_points = 4096 if d == 1 else (201 if d == 2 else 41)
    vals = g.value(tensor_grid(F, GridSpec.uniform(grid_points, d)))
    lo, hi = float(vals.min()), float(vals.max())
    pad = padding * (hi - lo)
    us, ws = gauss_legendre(lo, hi, level_nodes)
    if pad > 0:
        side = max(4, level_nodes // 4)
        for a, b in ((lo - pad, lo), (hi, hi + pad)):
            u2, w2 = gauss_legendre(a, b, side)
            us, ws = np.concatenate([us, u2]), np.concatenate([ws, w2])
    lhs = 0.0
    for u, w in zip(us, ws):
        lhs += w * level_measure(
            g, u, F, rule, grid_points=grid_points if d == 1 else 4096,
            lines_per_direction=lines_per_direction, samples_per_line=samples_per_line,
        )
    return float(lhs), rhs
