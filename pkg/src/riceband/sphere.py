"""Quadrature on the unit sphere S^{d-1} and the two spherical identities
used throughout: the absolute-projection integral and the Gaussian-norm mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, ndtr

PSD_TOL = 1e-10


def sphere_area(d: int) -> float:
    """Surface measure of S^{d-1}: ``2 pi^{d/2} / Gamma(d/2)`` (2 for d=1)."""
    return float(2.0 * math.exp(0.5 * d * math.log(math.pi) - gammaln(0.5 * d)))


def favard_constant(d: int) -> float:
    """``Gamma((d+1)/2) / (2 pi^{(d-1)/2})``, the inverse of the projection integral for a unit vector."""
    return float(math.exp(gammaln(0.5 * (d + 1)) - 0.5 * (d - 1) * math.log(math.pi)) / 2.0)


def area_constant(d: int) -> float:
    """``Gamma((d+1)/2) / (2 pi^{(d+1)/2})``, the prefactor of the centered area formula."""
    return favard_constant(d) / math.pi


@dataclass(frozen=True)
class SphereRule:
    """Nodes and weights approximating the surface measure on S^{d-1}.

    ``rtol`` is the relative accuracy the rule guarantees on Lipschitz
    integrands of the form ``|<x, s>|``; smooth integrands do much better.
    Monte-Carlo rules (``stochastic=True``) have statistical error, and
    ``rtol`` is then a three-sigma bound.
    """

    d: int
    nodes: np.ndarray
    weights: np.ndarray
    rtol: float
    stochastic: bool = False

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float).reshape(-1, self.d)
        weights = np.asarray(self.weights, dtype=float).ravel()
        if len(nodes) != len(weights):
            raise ValueError("nodes and weights differ in length")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        if np.any(np.abs(np.linalg.norm(nodes, axis=1) - 1.0) > 1e-12):
            raise ValueError("sphere nodes must be unit vectors")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return len(self.weights)

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))


def build_sphere_rule(d: int, resolution: int = 64, seed: int | None = None) -> SphereRule:
    """Build a quadrature rule on S^{d-1}.

    d=1 gives the two signed points with unit weights (counting measure),
    d=2 an equispaced angular grid of ``resolution`` nodes, d=3 a product of
    Gauss-Legendre in the polar cosine (``resolution`` nodes) and an
    equispaced azimuth (``2*resolution`` nodes). For d >= 4 the rule is
    ``resolution`` seeded uniform random directions with equal weights.
    """
    if d < 1:
        raise ValueError("sphere dimension d must be >= 1")
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if d == 1:
        return SphereRule(1, np.array([[-1.0], [1.0]]), np.ones(2), rtol=1e-14)
    if d == 2:
        theta = 2 * np.pi * np.arange(resolution) / resolution
        nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        w = np.full(resolution, 2 * np.pi / resolution)
        return SphereRule(2, nodes, w, rtol=max(1e-14, (np.pi / resolution) ** 2))
    if d == 3:
        z, wz = np.polynomial.legendre.leggauss(resolution)
        nphi = 2 * resolution
        phi = 2 * np.pi * (np.arange(nphi) + 0.5) / nphi
        r = np.sqrt(1 - z**2)
        nodes = np.stack(
            [
                (r[:, None] * np.cos(phi)[None, :]).ravel(),
                (r[:, None] * np.sin(phi)[None, :]).ravel(),
                np.repeat(z, nphi),
            ],
            axis=1,
        )
        nodes /= np.linalg.norm(nodes, axis=1, keepdims=True)
        w = (wz[:, None] * np.full(nphi, 2 * np.pi / nphi)[None, :]).ravel()
        return SphereRule(3, nodes, w, rtol=max(1e-14, 4.0 / resolution**2))
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((resolution, d))
    nodes = g / np.linalg.norm(g, axis=1, keepdims=True)
    w = np.full(resolution, sphere_area(d) / resolution)
    return SphereRule(d, nodes, w, rtol=3.0 / math.sqrt(resolution), stochastic=True)


def integrate_sphere(rule: SphereRule, f) -> float:
    """``sum_k w_k f(s_k)``; ``f`` may be vectorized (nodes as rows) or scalar."""
    try:
        vals = np.asarray(f(rule.nodes), dtype=float)
        if vals.shape != (len(rule),):
            raise ValueError
    except (TypeError, ValueError, IndexError):
        vals = np.array([f(s) for s in rule.nodes], dtype=float)
    return float(np.dot(rule.weights, vals))


def abs_inner_integral_exact(x) -> float:
    """Closed form of the integral of ``|<x, s>|`` over S^{d-1}."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return float(np.linalg.norm(x) / favard_constant(x.size))


def clamp_psd(Sigma, tol: float = PSD_TOL) -> np.ndarray:
    """Symmetrize and clip negative eigenvalues to zero.

    Accepts a single matrix or a stack ``(..., d, d)``. Raises ``ValueError``
    when an eigenvalue is below ``-tol``.
    """
    S = np.asarray(Sigma, dtype=float)
    S = 0.5 * (S + np.swapaxes(S, -1, -2))
    vals, vecs = np.linalg.eigh(S)
    if np.any(vals < -tol):
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {vals.min():.3e})")
    if np.all(vals >= 0):
        return S
    vals = np.clip(vals, 0.0, None)
    return np.einsum("...ij,...j,...kj->...ik", vecs, vals, vecs)


def sqrt_quadform_integral(Sigma, rule: SphereRule, mean=None) -> np.ndarray:
    """Integral over S^{d-1} of ``E|<xi, s>|`` scaled back to ``sqrt(s^T Sigma s)`` units.

    With ``mean=None`` this is just the integral of ``sqrt(s^T Sigma s)``
    for every matrix in the stack ``Sigma`` of shape ``(..., d, d)``.
    With a mean vector ``a`` (shape ``(..., d)``) the integrand becomes
    ``sqrt(pi/2) * E|N(<a,s>, s^T Sigma s)|``, which reduces to the centered
    integrand at ``a = 0``.
    """
    S = np.asarray(Sigma, dtype=float)
    q = np.einsum("ni,...ij,nj->...n", rule.nodes, S, rule.nodes)
    q = np.clip(q, 0.0, None)
    if mean is None:
        return np.sqrt(q) @ rule.weights
    m = np.asarray(mean, dtype=float) @ rule.nodes.T
    sd = np.sqrt(q)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sd > 0, m / np.where(sd > 0, sd, 1.0), 0.0)
        folded = sd * math.sqrt(2 / math.pi) * np.exp(-0.5 * z**2) + m * (1 - 2 * ndtr(-z))
    folded = np.where(sd > 0, folded, np.abs(m))
    return (math.sqrt(math.pi / 2) * folded) @ rule.weights


def expected_norm_gaussian(Sigma, rule: SphereRule) -> float:
    """``E||xi||`` for a centered Gaussian ``xi`` with covariance ``Sigma``, via the sphere rule."""
    S = clamp_psd(np.asarray(Sigma, dtype=float).reshape(rule.d, rule.d))
    const = math.exp(gammaln(0.5 * (rule.d + 1)) - 0.5 * rule.d * math.log(math.pi)) / math.sqrt(2)
    return float(const * sqrt_quadform_integral(S, rule))


def orthonormal_complement(s) -> np.ndarray:
    """Rows spanning the hyperplane orthogonal to unit vector ``s``; shape ``(d-1, d)``."""
    s = np.asarray(s, dtype=float)
    d = s.size
    q, _ = np.linalg.qr(np.column_stack([s, np.eye(d)]))
    return q[:, 1:d].T.copy()
