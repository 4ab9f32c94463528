"""Catalog of Gaussian ensembles with known expected zero-set area.

Each ensemble gives three things: a :class:`~riceband.kac_rice.MomentField`
for the generic evaluators, a seeded coefficient sampler for Monte Carlo,
and a closed form where one exists.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import gammaln

from .core import DomainBox, QuadSpec, ScalarField, box_rule, default_quad, gauss_legendre
from .kac_rice import MomentField, expected_area_centered
from .sphere import SphereRule, area_constant, build_sphere_rule, integrate_sphere

BASIS_KINDS = ("monomial-product", "kostlan", "trigonometric", "custom")


# ---------------------------------------------------------------------------
# linear fields G(x) = <h(x), xi>


def multi_indices(kind: str, d: int, n: int) -> np.ndarray:
    """Exponent multi-indices of the basis, one row per basis function."""
    if kind in ("monomial-product", "trigonometric"):
        return np.array(list(itertools.product(range(n + 1), repeat=d)), dtype=np.int64).reshape(-1, d)
    if kind == "kostlan":
        rows = [a for a in itertools.product(range(n + 1), repeat=d) if sum(a) <= n]
        return np.array(rows, dtype=np.int64).reshape(-1, d)
    raise ValueError(f"no multi-indices for basis kind {kind!r}")


def multinomial(n: int, alpha) -> float:
    """``n! / (alpha_1! ... alpha_d! (n - |alpha|)!)``."""
    alpha = np.asarray(alpha)
    rest = n - int(alpha.sum())
    logc = gammaln(n + 1) - np.sum(gammaln(alpha + 1)) - gammaln(rest + 1)
    return float(np.round(np.exp(logc)))


@dataclass(frozen=True)
class LinearFieldModel:
    """``G(x) = <h(x), xi>`` with ``xi ~ N(0, diag(lam))``.

    ``kind`` selects the basis: ``monomial-product`` (all ``x^alpha`` with
    ``0 <= alpha_j <= n``), ``kostlan`` (``x^alpha`` with ``|alpha| <= n`` and
    multinomial variances), ``trigonometric`` (cos and sin of ``<alpha, x>``
    for ``0 <= alpha_j <= n``) or ``custom``, where ``basis`` is a callable
    ``x -> (h, dh)`` with shapes ``(k, N)`` and ``(k, N, d)``.
    """

    kind: str
    d: int
    n: int
    lam: Optional[tuple] = None
    basis: Optional[Callable] = field(default=None, compare=False)
    size: Optional[int] = None

    def __post_init__(self):
        if self.kind not in BASIS_KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.d < 1 or (self.kind != "custom" and self.n < 1):
            raise ValueError("need d >= 1 and n >= 1")
        if self.kind == "custom":
            if self.basis is None or self.size is None:
                raise ValueError("custom models need a basis callable and size")
        else:
            object.__setattr__(self, "size", self._size())
        lam = self.lam
        if lam is None and self.kind == "kostlan":
            lam = tuple(multinomial(self.n, a) for a in self.alphas)
        if lam is not None:
            lam = tuple(float(v) for v in lam)
            if len(lam) != self.size or any(v <= 0 for v in lam):
                raise ValueError(f"lambda must be {self.size} positive variances")
        object.__setattr__(self, "lam", lam)

    def _size(self) -> int:
        if self.kind == "monomial-product":
            return (self.n + 1) ** self.d
        if self.kind == "kostlan":
            return math.comb(self.n + self.d, self.d)
        return 2 * (self.n + 1) ** self.d

    @property
    def alphas(self) -> np.ndarray:
        return multi_indices(self.kind, self.d, self.n)

    @property
    def variances(self) -> np.ndarray:
        return np.ones(self.size) if self.lam is None else np.asarray(self.lam)

    def scaled(self, c: float) -> "LinearFieldModel":
        """Same basis with covariance ``c * Lambda``."""
        return LinearFieldModel(self.kind, self.d, self.n, tuple(c * self.variances), self.basis, self.size)

    def evaluate(self, x):
        """Basis values ``(k, N)`` and partial derivatives ``(k, N, d)`` at points ``(k, d)``."""
        x = np.asarray(x, dtype=float).reshape(-1, self.d)
        if self.kind == "custom":
            h, dh = self.basis(x)
            return np.asarray(h, dtype=float), np.asarray(dh, dtype=float)
        A = self.alphas
        if self.kind == "trigonometric":
            phase = x @ A.T
            c, s = np.cos(phase), np.sin(phase)
            h = np.concatenate([c, s], axis=1)
            dh = np.concatenate([-s[..., None] * A[None], c[..., None] * A[None]], axis=1)
            return h, dh
        # monomials: per-axis power tables, x_i^j for j = 0..n
        j = np.arange(self.n + 1)
        pw = x[..., None] ** j  # (k, d, n+1)
        dpw = np.zeros_like(pw)
        dpw[..., 1:] = j[1:] * x[..., None] ** (j[1:] - 1)
        axis = np.arange(self.d)
        terms = pw[:, axis, A]  # (k, N, d)
        dterms = dpw[:, axis, A]
        h = np.prod(terms, axis=-1)
        dh = np.empty(terms.shape)
        for i in range(self.d):
            t = terms.copy()
            t[..., i] = dterms[..., i]
            dh[..., i] = np.prod(t, axis=-1)
        return h, dh


def _weighted(model: LinearFieldModel, x):
    h, dh = model.evaluate(x)
    if model.lam is None:
        return h, dh
    r = np.sqrt(model.variances)
    return h * r, dh * r[None, :, None]


def sigma_kernel(model: LinearFieldModel, x) -> np.ndarray:
    """``(||h||^2 <h_i', h_j'> - <h, h_i'><h, h_j'>) / ||h||^4`` with ``h`` scaled by ``Lambda^{1/2}``."""
    h, dh = _weighted(model, x)
    hh = np.einsum("kn,kn->k", h, h)
    if np.any(hh <= 0):
        raise ValueError("degenerate basis: ||h(x)|| = 0")
    hd = np.einsum("kn,kni->ki", h, dh)
    dd = np.einsum("kni,knj->kij", dh, dh)
    return (hh[:, None, None] * dd - hd[:, :, None] * hd[:, None, :]) / hh[:, None, None] ** 2


def normalized_jacobian(model: LinearFieldModel, x) -> np.ndarray:
    """Jacobian ``(k, N, d)`` of ``h / ||h||`` with ``h`` scaled by ``Lambda^{1/2}``."""
    h, dh = _weighted(model, x)
    nrm = np.linalg.norm(h, axis=1)
    if np.any(nrm <= 0):
        raise ValueError("degenerate basis: ||h(x)|| = 0")
    u = h / nrm[:, None]
    proj = np.einsum("kn,kni->ki", u, dh)
    return (dh - u[:, :, None] * proj[:, None, :]) / nrm[:, None, None]


def sigma_jacobian(model: LinearFieldModel, x) -> np.ndarray:
    J = normalized_jacobian(model, x)
    return np.einsum("kni,knj->kij", J, J)


def moment_field_linear(model: LinearFieldModel) -> MomentField:
    """Moments of a linear Gaussian field: zero mean, ``sigma = ||Lambda^{1/2} h||``."""

    def sigma(x):
        h, _ = _weighted(model, x)
        s = np.linalg.norm(h, axis=1)
        if np.any(s <= 0):
            raise ValueError("degenerate basis: ||h(x)|| = 0")
        return s

    return MomentField(model.d, sigma, lambda x: sigma_kernel(model, x))


# ---------------------------------------------------------------------------
# Kac polynomials


def _kac_coefficients(n: int) -> np.ndarray:
    # A C - B^2 = sum_{m>=1} c_m t^{2(m-1)}, c_m = q(q+1)(q+2)/6 with q = min(m, 2n-m)
    m = np.arange(1, 2 * n + 1)
    q = np.minimum(m, 2 * n - m).astype(float)
    return q * (q + 1) * (q + 2) / 6.0


def kac_abc(t, n: int):
    """``A_n(t), B_n(t), C_n(t)`` by direct summation (reference path, may overflow)."""
    t = np.asarray(t, dtype=float)
    j = np.arange(n + 1)
    tp = t[..., None] ** (2 * j)
    A = tp.sum(-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        B = np.where(t[..., None] != 0, j * tp / np.where(t == 0, 1, t)[..., None], 0).sum(-1)
        C = np.where(j >= 1, j**2 * t[..., None] ** np.clip(2 * j - 2, 0, None), 0).sum(-1)
    return A, B, C


def kac_sigma(t, n: int) -> np.ndarray:
    """``(A_n C_n - B_n^2) / A_n^2``, the normalized-gradient variance of a Kac polynomial.

    The numerator is summed as a polynomial in ``t^2`` with positive
    coefficients, so there is no cancellation; ``|t| > 1`` is folded onto
    ``1/t`` using ``kac_sigma(t) = kac_sigma(1/t) / t^4``.
    """
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    big = a > 1
    r = np.where(big, 1.0 / np.where(big, a, 1.0), a)
    r2 = r * r
    num = np.polynomial.polynomial.polyval(r2, _kac_coefficients(n))
    den = np.polynomial.polynomial.polyval(r2, np.ones(n + 1))
    out = num / den**2
    return np.where(big, out * r2 * r2, out)


def kac_density(t, n: int):
    """Expected density of real roots of a degree-``n`` Kac polynomial."""
    if n < 1:
        raise ValueError("n must be >= 1")
    val = np.sqrt(kac_sigma(t, n)) / math.pi
    return float(val) if np.ndim(val) == 0 else val


def _unit_interval_breaks(n: int):
    # density has a peak of width ~1/n at t = 1; grade panels geometrically toward it
    k = max(1, math.ceil(math.log10(n))) + 4
    return [0.0, 0.5] + [1.0 - 10.0 ** (-j) for j in range(1, k + 1)] + [1.0]


def _density_on_unit(n: int, lo: float, hi: float, nodes: int = 48) -> float:
    """Integral of the density over ``[lo, hi] ⊂ [0, 1]`` by graded composite Gauss-Legendre."""
    if hi <= lo:
        return 0.0
    br = [lo] + [b for b in _unit_interval_breaks(n) if lo < b < hi] + [hi]
    total = 0.0
    for a, b in zip(br[:-1], br[1:]):
        t, w = gauss_legendre(a, b, nodes, 2)
        total += float(np.dot(w, kac_density(t, n)))
    return total


def _fold_interval(n: int, a: float, b: float) -> float:
    """Integral over ``[a, b] ⊂ [0, inf]``, mapping ``t > 1`` onto ``(0, 1)`` via ``t -> 1/t``."""
    total = _density_on_unit(n, a, min(b, 1.0))
    if b > 1.0:
        lo = max(a, 1.0)
        total += _density_on_unit(n, 0.0 if math.isinf(b) else 1.0 / b, 1.0 / lo)
    return total


def kac_expected_roots(n: int, F: Union[DomainBox, tuple, str, None] = "R") -> float:
    """Expected number of real roots of a Kac polynomial in ``F``.

    ``F`` is an interval (a 1D :class:`DomainBox` or ``(a, b)`` tuple, infinite
    ends allowed) or ``"R"``/``None`` for the whole real line.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if F is None or (isinstance(F, str) and F.upper() in ("R", "REAL")):
        a, b = -math.inf, math.inf
    elif isinstance(F, DomainBox):
        if F.dim != 1:
            raise ValueError("Kac polynomials live on the line")
        a, b = F.lower[0], F.upper[0]
    else:
        a, b = (float(v) for v in F)
    if a > b:
        raise ValueError("empty interval")
    # the density is even; split at 0
    total = 0.0
    if b > 0:
        total += _fold_interval(n, max(a, 0.0), b)
    if a < 0:
        total += _fold_interval(n, max(-b, 0.0), -a)
    return total


def kac_moment_field(n: int, d: int = 1) -> MomentField:
    """Closed-form moment field of the monomial-product ensemble (diagonal covariance)."""

    def Sigma(x):
        x = np.asarray(x, dtype=float).reshape(-1, d)
        diag = kac_sigma(x, n)
        out = np.zeros(x.shape + (d,))
        idx = np.arange(d)
        out[:, idx, idx] = diag
        return out

    def sigma(x):
        x = np.asarray(x, dtype=float).reshape(-1, d)
        return np.sqrt(np.prod(np.polynomial.polynomial.polyval(x * x, np.ones(n + 1)), axis=1))

    return MomentField(d, sigma, Sigma)


def algebraic_surface_integrand(x, s, n: int) -> float:
    """``(sum_i s_i^2 (A_n C_n - B_n^2)/A_n^2 at x_i)^{1/2}``."""
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    return float(np.sqrt(np.sum(s * s * kac_sigma(x, n))))


def algebraic_expected_area(
    n: int, d: int, F: DomainBox, rule: SphereRule | None = None, quad: QuadSpec | None = None
) -> float:
    """Expected area for the random algebraic surface with monomials ``0 <= alpha_j <= n``."""
    rule = rule if rule is not None else build_sphere_rule(d, _default_res(d))
    return expected_area_centered(kac_moment_field(n, d), F, rule, quad)


# ---------------------------------------------------------------------------
# Kostlan-Shub-Smale


def _default_res(d: int) -> int:
    return {1: 1, 2: 256, 3: 32}.get(d, 20000)


def kostlan_constant(d: int, F: Union[DomainBox, str, None], rule: SphereRule | None = None,
                     quad: QuadSpec | None = None) -> float:
    """``C_F`` in ``E area = C_F sqrt(n)`` for the Kostlan ensemble."""
    if d == 1:
        if F is None or isinstance(F, str):
            a, b = -math.inf, math.inf
        else:
            a, b = F.lower[0], F.upper[0]
        # x = tan(theta) makes dx / (1 + x^2) uniform
        return (math.atan(b) - math.atan(a)) / math.pi
    if not isinstance(F, DomainBox) or F.dim != d:
        raise ValueError("Kostlan constant for d >= 2 needs a bounded box of matching dimension")
    rule = rule if rule is not None else build_sphere_rule(d, _default_res(d))
    quad = quad if quad is not None else default_quad(d)
    pts, wts = box_rule(F, quad)
    r2 = np.sum(pts * pts, axis=1)
    inner = []
    for i in range(0, len(pts), 4096):
        x = pts[i : i + 4096]
        proj = x @ rule.nodes.T
        val = np.sqrt(np.clip((1 + r2[i : i + 4096])[:, None] - proj**2, 0, None))
        inner.append(val @ rule.weights)
    inner = np.concatenate(inner)
    return area_constant(d) * float(np.dot(wts, inner / (1 + r2)))


def kostlan_expected_area(n: int, d: int, F: Union[DomainBox, str, None] = None,
                          rule: SphereRule | None = None, quad: QuadSpec | None = None) -> float:
    """Expected zero-set area of the Kostlan-Shub-Smale ensemble: ``sqrt(n) * C_F``."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    return kostlan_constant(d, F, rule, quad) * math.sqrt(n)


def kostlan_kernel_closed_form(x, n: int) -> np.ndarray:
    """``||h||^2 <h_i', h_j'> - <h, h_i'><h, h_j'>`` for the Kostlan basis, analytic."""
    x = np.asarray(x, dtype=float).reshape(-1, np.shape(x)[-1])
    r2 = np.sum(x * x, axis=1)
    base = n * (1 + r2) ** (2 * n - 2)
    out = -base[:, None, None] * x[:, :, None] * x[:, None, :]
    d = x.shape[1]
    idx = np.arange(d)
    out[:, idx, idx] = base[:, None] * (1 + r2[:, None] - x * x)
    return out


# ---------------------------------------------------------------------------
# random trigonometric surfaces


def trig_sphere_integrand(s, n: int) -> np.ndarray:
    s = np.atleast_2d(s)
    return np.sqrt(np.sum(s, axis=1) ** 2 + (n + 2) / (3 * n))


def trig_expected_area(n: int, d: int, F: DomainBox, rule: SphereRule | None = None) -> float:
    """Closed form for ``sum_alpha xi cos<alpha,x> + eta sin<alpha,x>``, linear in ``|F|``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rule = rule if rule is not None else build_sphere_rule(d, _default_res(d))
    if rule.d != d:
        raise ValueError("sphere rule dimension mismatch")
    factor = n * area_constant(d) / 2.0
    return factor * F.volume() * integrate_sphere(rule, lambda S: trig_sphere_integrand(S, n))


def qualls_closed_form(n: int, volume: float) -> float:
    """d = 1 value ``|F| sqrt(n(2n+1)/6) / pi``."""
    return volume * math.sqrt(n * (2 * n + 1) / 6.0) / math.pi


# ---------------------------------------------------------------------------
# homogeneous fields with atomic spectral measure


@dataclass(frozen=True)
class SpectralMeasure:
    """Finite atomic spectral measure ``sum_k w_k delta_{z_k}``, symmetric under ``z -> -z``."""

    atoms: np.ndarray
    weights: np.ndarray
    unit_variance: bool = True

    def __post_init__(self):
        z = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        if len(z) != len(w) or not len(w):
            raise ValueError("atoms and weights must be non-empty and of equal length")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        z.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "atoms", z)
        object.__setattr__(self, "weights", w)
        if not self.is_symmetric():
            raise ValueError("spectral measure must be symmetric (atom -z for every z)")
        if self.unit_variance and abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"unit-variance measure needs total weight 1, got {w.sum()!r}")

    @classmethod
    def symmetrized(cls, atoms, weights, normalize: bool = True) -> "SpectralMeasure":
        """Build ``(1/2)(delta_z + delta_{-z})`` for each given atom."""
        z = np.atleast_2d(np.asarray(atoms, dtype=float))
        w = np.asarray(weights, dtype=float)
        if normalize:
            w = w / w.sum()
        return cls(np.concatenate([z, -z]), np.concatenate([w, w]) / 2.0)

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        for z, w in zip(self.atoms, self.weights):
            dist = np.max(np.abs(self.atoms + z), axis=1)
            match = (dist <= tol) & (np.abs(self.weights - w) <= tol)
            if not match.any():
                return False
        return True

    def pairs(self):
        """Frequencies and total weights of ``{z, -z}`` pairs, in first-seen order.

        A pair's weight is the sum over both atoms, so the field
        ``sum_j sqrt(W_j)(xi_j cos<z_j,x> + eta_j sin<z_j,x>)`` has covariance
        ``sum_k w_k exp(i<z_k, x - y>)``.
        """
        used = np.zeros(len(self.weights), dtype=bool)
        zs, ws = [], []
        for k, z in enumerate(self.atoms):
            if used[k]:
                continue
            used[k] = True
            total = self.weights[k]
            if np.any(z != 0):
                mate = np.nonzero(~used & (np.max(np.abs(self.atoms + z), axis=1) <= 1e-12))[0]
                if len(mate):
                    used[mate[0]] = True
                    total += self.weights[mate[0]]
            zs.append(z)
            ws.append(total)
        return np.array(zs), np.array(ws)

    def second_moment(self) -> np.ndarray:
        """``int z z^T nu(dz)``, the gradient covariance of the field."""
        return np.einsum("k,ki,kj->ij", self.weights, self.atoms, self.atoms)

    def gamma(self, k: int) -> float:
        return float(np.sum(self.weights * np.linalg.norm(self.atoms, axis=1) ** k) ** (1.0 / k))

    def variance(self) -> float:
        return float(self.weights.sum())

    def moment_field(self, level: float = 0.0) -> MomentField:
        d = self.dim
        S = self.second_moment() / self.variance()
        sd = math.sqrt(self.variance())
        mean = None if level == 0 else (lambda x: np.full(len(np.atleast_2d(x)), float(level)))
        return MomentField(
            d,
            lambda x: np.full(len(np.asarray(x).reshape(-1, d)), sd),
            lambda x: np.broadcast_to(S, (len(np.asarray(x).reshape(-1, d)), d, d)),
            mean,
        )


def _check_unit(nu: SpectralMeasure):
    if not nu.unit_variance or abs(nu.variance() - 1.0) > 1e-12:
        raise ValueError("spectral measure must have unit total weight")
    if not nu.is_symmetric():
        raise ValueError("spectral measure must be symmetric")


def homogeneous_expected_area(nu: SpectralMeasure, u: float, F: DomainBox, rule: SphereRule | None = None) -> float:
    """Expected area of the level set ``{G = u}`` of a unit-variance homogeneous field."""
    _check_unit(nu)
    d = nu.dim
    rule = rule if rule is not None else build_sphere_rule(d, _default_res(d))
    inner = lambda S: np.sqrt(np.einsum("k,nk->n", nu.weights, (S @ nu.atoms.T) ** 2))
    return area_constant(d) * F.volume() * math.exp(-0.5 * u * u) * integrate_sphere(rule, inner)


def gamma_bounds(nu: SpectralMeasure, u: float, F: DomainBox):
    """Lower and upper bounds on the expected level-set area from radial moments."""
    _check_unit(nu)
    d = nu.dim
    scale = math.exp(-0.5 * u * u) * F.volume()
    lower = nu.gamma(1) * scale / math.pi
    upper = math.exp(gammaln(0.5 * (d + 1)) - gammaln(0.5 * d)) / math.sqrt(math.pi) * nu.gamma(2) * scale
    return lower, upper


# ---------------------------------------------------------------------------
# sampling and realization

Ensemble = Union[LinearFieldModel, SpectralMeasure]


def ensemble_dim(ensemble: Ensemble) -> int:
    return ensemble.d if isinstance(ensemble, LinearFieldModel) else ensemble.dim


def coefficient_count(ensemble: Ensemble) -> int:
    if isinstance(ensemble, LinearFieldModel):
        return ensemble.size
    return 2 * len(ensemble.pairs()[1])


def sample_coefficients(ensemble: Ensemble, seed) -> np.ndarray:
    """Independent centered Gaussian coefficients, deterministic per ``seed``.

    Linear models return ``N`` coefficients with the model's variances.
    Spectral measures return a ``(P, 2)`` array of unit-variance amplitude
    pairs ``(xi_j, eta_j)``, one row per symmetric atom pair.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if isinstance(ensemble, LinearFieldModel):
        return rng.standard_normal(ensemble.size) * np.sqrt(ensemble.variances)
    P = len(ensemble.pairs()[1])
    return rng.standard_normal((P, 2))


def design_matrix(ensemble: Ensemble, x):
    """Values ``(k, N)`` and derivatives ``(k, N, d)`` of the features multiplying the coefficients."""
    if isinstance(ensemble, LinearFieldModel):
        return ensemble.evaluate(x)
    d = ensemble.dim
    x = np.asarray(x, dtype=float).reshape(-1, d)
    z, w = ensemble.pairs()
    amp = np.sqrt(w)
    phase = x @ z.T
    c, s = np.cos(phase) * amp, np.sin(phase) * amp
    h = np.stack([c, s], axis=-1).reshape(len(x), -1)
    dh = np.stack([-s[..., None] * z[None], c[..., None] * z[None]], axis=2).reshape(len(x), -1, d)
    return h, dh


def realize_field(ensemble: Ensemble, coefficients) -> ScalarField:
    """Deterministic field ``x -> <features(x), coefficients>`` with analytic gradient."""
    xi = np.asarray(coefficients, dtype=float).ravel()
    if xi.size != coefficient_count(ensemble):
        raise ValueError(f"expected {coefficient_count(ensemble)} coefficients, got {xi.size}")
    d = ensemble_dim(ensemble)

    def func(x):
        x = np.asarray(x, dtype=float)
        h, _ = design_matrix(ensemble, x.reshape(-1, d))
        return (h @ xi).reshape(x.shape[:-1])

    def grad(x):
        x = np.asarray(x, dtype=float)
        _, dh = design_matrix(ensemble, x.reshape(-1, d))
        return np.einsum("kni,n->ki", dh, xi).reshape(x.shape)

    return ScalarField(func, d, grad)


def moment_field(ensemble: Ensemble, level: float = 0.0) -> MomentField:
    if isinstance(ensemble, LinearFieldModel):
        if level != 0:
            raise ValueError("level sets are supported for homogeneous ensembles only")
        return moment_field_linear(ensemble)
    return ensemble.moment_field(level)


# ---------------------------------------------------------------------------
# JSON descriptors

ENSEMBLE_KINDS = ("kac", "algebraic", "kostlan", "trigonometric", "homogeneous")


@dataclass(frozen=True)
class EnsembleSpec:
    """Serializable ensemble descriptor: kind, dimension, degree, domain and seed.

    ``domain`` is a :class:`DomainBox` or ``None`` for the whole line (d=1
    Kac/Kostlan only). ``lam`` is a diagonal coefficient covariance;
    ``atoms`` a list of ``(z, w)`` for homogeneous fields.
    """

    kind: str
    d: int = 1
    n: int = 1
    domain: Optional[DomainBox] = None
    lam: Optional[tuple] = None
    atoms: Optional[tuple] = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.kind == "kac" and self.d != 1:
            raise ValueError("kac ensembles are one-dimensional; use 'algebraic' for d > 1")
        if self.domain is not None and self.domain.dim != self.d:
            raise ValueError("domain dimension does not match d")
        if self.domain is None and not (self.d == 1 and self.kind in ("kac", "kostlan")):
            raise ValueError(f"{self.kind} ensembles need a bounded domain")
        if self.kind == "homogeneous" and not self.atoms:
            raise ValueError("homogeneous ensembles need atoms")

    def build(self) -> Ensemble:
        if self.kind == "homogeneous":
            z = np.array([a[0] for a in self.atoms], dtype=float).reshape(-1, self.d)
            w = np.array([a[1] for a in self.atoms], dtype=float)
            return SpectralMeasure(z, w)
        basis = {"kac": "monomial-product", "algebraic": "monomial-product"}.get(self.kind, self.kind)
        return LinearFieldModel(basis, self.d, self.n, self.lam)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "d": self.d, "n": self.n,
               "domain": "R" if self.domain is None else self.domain.to_json(), "seed": self.seed}
        if self.lam is not None:
            out["lambda"] = list(self.lam)
        if self.atoms is not None:
            out["atoms"] = [{"z": list(z), "w": w} for z, w in self.atoms]
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "EnsembleSpec":
        dom = obj.get("domain", "R")
        domain = None if isinstance(dom, str) else DomainBox.from_json(dom)
        atoms = obj.get("atoms")
        if atoms is not None:
            atoms = tuple((tuple(float(v) for v in np.atleast_1d(a["z"])), float(a["w"])) for a in atoms)
        lam = obj.get("lambda")
        return cls(
            kind=obj["kind"], d=int(obj.get("d", 1)), n=int(obj.get("n", 1)), domain=domain,
            lam=None if lam is None else tuple(float(v) for v in lam), atoms=atoms, seed=int(obj.get("seed", 0)),
        )
