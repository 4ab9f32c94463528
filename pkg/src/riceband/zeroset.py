"""Area of an explicitly given zero set.

Three independent routes are provided: zero counting along sampled lines
(1D sign changes and the line-integral Favard formula), the oscillatory
Kac counting integral, and piecewise-linear mesh extraction (marching
squares / marching cubes) followed by summing cell sizes.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .core import DomainBox, GridSpec, ScalarField, gauss_legendre
from .sphere import SphereRule, favard_constant, orthonormal_complement

DEGENERATE_CELL = 1e-14


# ---------------------------------------------------------------------------
# 1D counting


def count_zeros_batch(values) -> np.ndarray:
    """Vectorized :func:`count_zeros_1d` over the last axis of ``values``.

    A strict sign change between neighbours counts 1. A maximal run of
    exact zeros counts 1 when interior and 1/2 per array end it touches.
    """
    v = np.asarray(values, dtype=float)
    if v.shape[-1] < 2:
        raise ValueError("need at least two samples")
    s = np.sign(v)
    changes = np.count_nonzero(s[..., 1:] * s[..., :-1] < 0, axis=-1).astype(float)
    zero = s == 0
    if not zero.any():
        return changes
    starts = zero.copy()
    starts[..., 1:] &= ~zero[..., :-1]
    runs = np.count_nonzero(starts, axis=-1).astype(float)
    # runs touching an end count 1/2 instead of 1
    runs -= 0.5 * zero[..., 0] + 0.5 * zero[..., -1]
    # a run spanning the whole array touches both ends: 1/2 + 1/2
    runs += np.all(zero, axis=-1)
    return changes + runs


def count_zeros_1d(samples) -> float:
    """Number of zeros of a sampled function of one variable.

    ``samples`` is a sequence of ``(t, f(t))`` pairs sorted by ``t``, or a
    plain sequence of values. Zeros exactly at an endpoint count 1/2.

    The count is exact only when the function has finitely many turning
    points and no two zeros fall between neighbouring samples; neither can
    be checked from samples, so refine the grid until the count is stable.
    """
    a = np.asarray(samples, dtype=float)
    if a.ndim == 2 and a.shape[1] == 2:
        t, v = a[:, 0], a[:, 1]
        if np.any(np.diff(t) < 0):
            raise ValueError("samples must be sorted by t")
    elif a.ndim == 1:
        v = a
    else:
        raise ValueError("samples must be (t, f(t)) pairs or a 1D array of values")
    if not np.all(np.isfinite(v)):
        raise ValueError("sample values must be finite")
    return float(count_zeros_batch(v))


def cosine_kernel(v, R: float, u_nodes_per_unit: int | None = None) -> np.ndarray:
    """``int_{-R}^{R} cos(u v) du`` for every entry of ``v``.

    ``u_nodes_per_unit=None`` uses the closed form ``2 sin(R v) / v``;
    otherwise composite Gauss-Legendre with one panel per unit length of u
    and the given number of nodes per panel.
    """
    v = np.asarray(v, dtype=float)
    if u_nodes_per_unit is None:
        return 2.0 * R * np.sinc(R * v / math.pi)
    panels = max(1, math.ceil(R))
    u, w = gauss_legendre(0.0, R, u_nodes_per_unit, panels)
    out = np.empty(v.shape)
    flat = v.ravel()
    res = out.reshape(-1)
    step = max(1, (1 << 22) // len(u))
    for i in range(0, flat.size, step):
        # integrand is even in u
        res[i : i + step] = 2.0 * (np.cos(np.outer(flat[i : i + step], u)) @ w)
    return out


def kac_counting_integral(
    f: ScalarField, F: DomainBox, R: float, u_nodes: int = 32, t_nodes: int = 16
) -> float:
    """Truncated Kac integral ``(1/2pi) int_{-R}^{R} du int_a^b cos(u f) |f'| dt``.

    Both integrals use composite Gauss-Legendre: ``u_nodes`` per unit length
    of ``u`` and ``t_nodes`` per panel in ``t``, with enough t-panels that
    the phase ``R f(t)`` advances by at most ``2 pi`` per panel.
    As ``R`` grows this tends to the zero count of ``f``, provided ``f'``
    vanishes at finitely many points of ``F``; the caller must ensure it.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    if u_nodes < 16 or t_nodes < 16:
        raise ValueError("node counts must be at least 16")
    if F.dim != 1:
        raise ValueError("kac_counting_integral needs a 1D interval")
    a, b = F.lower[0], F.upper[0]
    probe = np.linspace(a, b, 513)[:, None]
    slope = float(np.max(np.abs(f.gradient(probe))))
    panels = max(1, math.ceil(R * slope * (b - a) / (2 * math.pi)))
    t, wt = gauss_legendre(a, b, t_nodes, panels)
    x = t[:, None]
    vals = f.value(x).ravel()
    dabs = np.abs(f.gradient(x)).ravel()
    kern = cosine_kernel(vals, R, u_nodes)
    return float(np.dot(wt, kern * dabs) / (2 * math.pi))


# ---------------------------------------------------------------------------
# mesh extraction


@dataclass(frozen=True)
class ZeroSetMesh:
    """Piecewise-linear zero set: points (d=1), segments (d=2) or triangles (d=3)."""

    dim: int
    vertices: np.ndarray
    cells: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, self.dim)
        c = np.asarray(self.cells, dtype=np.int64).reshape(-1, self.dim)
        if c.size and (c.min() < 0 or c.max() >= len(v)):
            raise ValueError("cell index out of range")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "cells", c)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def cell_sizes(self) -> np.ndarray:
        if self.dim == 1:
            return np.ones(len(self.cells))
        p = self.vertices[self.cells]
        if self.dim == 2:
            return np.linalg.norm(p[:, 1] - p[:, 0], axis=1)
        return 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)

    def dump(self, fh):
        fh.write(f"{self.dim} {len(self.vertices)} {len(self.cells)}\n")
        for row in self.vertices:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")
        for row in self.cells:
            fh.write(" ".join(str(int(i)) for i in row) + "\n")

    def dumps(self) -> str:
        buf = io.StringIO()
        self.dump(buf)
        return buf.getvalue()

    @classmethod
    def load(cls, fh) -> "ZeroSetMesh":
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError("mesh header must be 'dim n_vertices n_cells'")
        dim, nv, nc = (int(x) for x in header)
        verts = [[float(x) for x in fh.readline().split()] for _ in range(nv)]
        cells = [[int(x) for x in fh.readline().split()] for _ in range(nc)]
        return cls(dim, np.array(verts).reshape(nv, dim), np.array(cells, dtype=np.int64).reshape(nc, dim))

    @classmethod
    def loads(cls, text: str) -> "ZeroSetMesh":
        return cls.load(io.StringIO(text))


def mesh_area(mesh: ZeroSetMesh) -> float:
    return float(np.sum(mesh.cell_sizes()))


def _drop_degenerate(dim, verts, cells) -> ZeroSetMesh:
    mesh = ZeroSetMesh(dim, verts, cells)
    if dim == 1 or not len(mesh.cells):
        return mesh
    keep = mesh.cell_sizes() > DEGENERATE_CELL
    return ZeroSetMesh(dim, mesh.vertices, mesh.cells[keep])


def _edge_points(a, b, va, vb):
    """Linear crossing between nodes ``a`` and ``b``, snapped exactly onto a node whose value is 0."""
    t = va / (va - vb)
    p = a + t[:, None] * (b - a)
    p = np.where((va == 0)[:, None], a, p)
    return np.where((vb == 0)[:, None], b, p)


def _merge_coincident(dim, verts, cells) -> ZeroSetMesh:
    """Identify bitwise-equal vertices (crossings snapped onto a zero node) and drop empty cells."""
    if not len(verts):
        return ZeroSetMesh(dim, verts, cells)
    verts, inverse = np.unique(verts, axis=0, return_inverse=True)
    cells = inverse.ravel()[cells]
    if dim == 1:
        return ZeroSetMesh(1, verts, np.unique(cells.ravel())[:, None])
    # a node value within rounding of 0 leaves near-coincident copies joined
    # by a vanishing segment; contract such segments so the curve stays connected
    tiny = ZeroSetMesh(dim, verts, cells).cell_sizes() <= DEGENERATE_CELL
    if tiny.any():
        sets = DisjointSet(np.unique(cells[tiny]).tolist())
        for a, b in cells[tiny]:
            sets.merge(int(a), int(b))
        root = np.arange(len(verts))
        for v in sets:
            root[v] = sets[v]
        cells = root[cells]
    return _drop_degenerate(dim, verts, cells)


def _extract_1d(v, x):
    pos = v >= 0
    idx = np.nonzero(pos[1:] != pos[:-1])[0]
    pts = _edge_points(x[idx, None], x[idx + 1, None], v[idx], v[idx + 1])
    return _merge_coincident(1, pts, np.arange(len(pts))[:, None])


# segments per marching-squares case, as pairs of local edge ids
# corners: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1); case bit k set when corner k >= 0
# edges: 0=c0-c1 (x-edge at j), 1=c1-c2 (y-edge at i+1), 2=c3-c2 (x-edge at j+1), 3=c0-c3 (y-edge at i)
_MS_TABLE = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 6: [(0, 2)], 7: [(3, 2)],
    8: [(2, 3)], 9: [(0, 2)], 11: [(1, 2)], 12: [(3, 1)], 13: [(0, 1)], 14: [(3, 0)],
}
# saddles, keyed by (case, center >= 0)
_MS_SADDLE = {
    (5, True): [(0, 1), (2, 3)], (5, False): [(3, 0), (1, 2)],
    (10, True): [(3, 0), (1, 2)], (10, False): [(0, 1), (2, 3)],
}


def _extract_2d(V, xs, ys):
    nx, ny = V.shape
    pos = V >= 0
    # crossing points on x-directed edges (i -> i+1 at fixed j) and y-directed edges
    ex = pos[1:, :] != pos[:-1, :]
    ey = pos[:, 1:] != pos[:, :-1]
    idx_x = -np.ones((nx - 1, ny), dtype=np.int64)
    idx_y = -np.ones((nx, ny - 1), dtype=np.int64)
    ix, jx = np.nonzero(ex)
    iy, jy = np.nonzero(ey)
    px = _edge_points(np.stack([xs[ix], ys[jx]], 1), np.stack([xs[ix + 1], ys[jx]], 1), V[ix, jx], V[ix + 1, jx])
    py = _edge_points(np.stack([xs[iy], ys[jy]], 1), np.stack([xs[iy], ys[jy + 1]], 1), V[iy, jy], V[iy, jy + 1])
    idx_x[ix, jx] = np.arange(len(ix))
    idx_y[iy, jy] = len(ix) + np.arange(len(iy))
    verts = np.concatenate([px, py]) if len(ix) + len(iy) else np.zeros((0, 2))

    c0, c1, c2, c3 = pos[:-1, :-1], pos[1:, :-1], pos[1:, 1:], pos[:-1, 1:]
    case = c0 * 1 + c1 * 2 + c2 * 4 + c3 * 8
    edge_ids = np.stack(
        [idx_x[:, :-1], idx_y[1:, :], idx_x[:, 1:], idx_y[:-1, :]], axis=-1
    )  # (nx-1, ny-1, 4)
    segs = []
    for k, pairs in _MS_TABLE.items():
        ci, cj = np.nonzero(case == k)
        if not len(ci):
            continue
        e = edge_ids[ci, cj]
        for a, b in pairs:
            segs.append(np.stack([e[:, a], e[:, b]], axis=1))
    for k in (5, 10):
        ci, cj = np.nonzero(case == k)
        if not len(ci):
            continue
        v00, v10 = V[ci, cj], V[ci + 1, cj]
        v11, v01 = V[ci + 1, cj + 1], V[ci, cj + 1]
        # bilinear saddle value (asymptotic decider)
        center = (v00 * v11 - v10 * v01) / (v00 + v11 - v10 - v01)
        e = edge_ids[ci, cj]
        for flag in (True, False):
            sel = (center >= 0) == flag
            for a, b in _MS_SADDLE[(k, flag)]:
                segs.append(np.stack([e[sel, a], e[sel, b]], axis=1))
    cells = np.concatenate(segs) if segs else np.zeros((0, 2), dtype=np.int64)
    return _merge_coincident(2, verts, cells)


def _extract_3d(V, F, spec):
    from skimage.measure import marching_cubes

    if V.min() >= 0 or V.max() < 0:
        return ZeroSetMesh(3, np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))
    # skimage classifies vertices with v > level; shift so exact zeros count as positive
    level = -np.finfo(float).tiny if V.min() < 0 else 0.0
    h = spec.cell_size(F)
    verts, faces, _, _ = marching_cubes(V, level=level, spacing=tuple(h), method="lewiner")
    verts = verts + np.asarray(F.lower)
    return _drop_degenerate(3, verts, faces)


def extract_zero_set(values, F: DomainBox, spec: GridSpec) -> ZeroSetMesh:
    """Piecewise-linear approximation of ``{g = 0}`` from grid samples.

    ``values`` are samples on :func:`~riceband.core.tensor_grid` (flat,
    row-major) or already shaped as ``spec.shape``. A sample exactly equal
    to 0 is treated as positive.
    """
    d = F.dim
    if d > 3:
        raise NotImplementedError(f"zero-set extraction supports d <= 3, got d={d}")
    V = np.asarray(values, dtype=float).reshape(spec.shape)
    if not np.all(np.isfinite(V)):
        raise ValueError("grid values must be finite")
    axes = spec.axes(F)
    if d == 1:
        return _extract_1d(V, axes[0])
    if d == 2:
        return _extract_2d(V, axes[0], axes[1])
    return _extract_3d(V, F, spec)


# ---------------------------------------------------------------------------
# Favard measure


def _clip_lines(base, s, F: DomainBox):
    """Parameter interval ``[t0, t1]`` of each line ``y + t s`` inside the box."""
    lo = np.asarray(F.lower)
    hi = np.asarray(F.upper)
    t0 = np.full(len(base), -np.inf)
    t1 = np.full(len(base), np.inf)
    for i in range(F.dim):
        if abs(s[i]) < 1e-15:
            inside = (base[:, i] >= lo[i]) & (base[:, i] <= hi[i])
            t0 = np.where(inside, t0, np.inf)
            continue
        a = (lo[i] - base[:, i]) / s[i]
        b = (hi[i] - base[:, i]) / s[i]
        t0 = np.maximum(t0, np.minimum(a, b))
        t1 = np.minimum(t1, np.maximum(a, b))
    return t0, t1


@dataclass(frozen=True)
class LineFamily:
    """Parallel lines ``y + t s`` with base points ``y`` on a grid in ``s^perp``."""

    direction: np.ndarray
    base_points: np.ndarray
    spacing: np.ndarray

    @property
    def cell_measure(self) -> float:
        return float(np.prod(self.spacing))


def line_family(s, F: DomainBox, lines_per_axis: int) -> LineFamily:
    """Midpoint grid on the projection of ``F`` onto ``s^perp``."""
    s = np.asarray(s, dtype=float)
    E = orthonormal_complement(s)
    proj = F.corners() @ E.T
    lo, hi = proj.min(axis=0), proj.max(axis=0)
    h = (hi - lo) / lines_per_axis
    axes = [lo[k] + h[k] * (np.arange(lines_per_axis) + 0.5) for k in range(len(lo))]
    coords = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=-1)
    return LineFamily(s, coords @ E, h)


def crossings_along_lines(g: ScalarField, F: DomainBox, family: LineFamily, samples: int) -> np.ndarray:
    """Zero count of ``t -> g(y + t s)`` on each line of the family, clipped to ``F``."""
    s = family.direction
    t0, t1 = _clip_lines(family.base_points, s, F)
    valid = t1 > t0
    counts = np.zeros(len(t0))
    if not valid.any():
        return counts
    base = family.base_points[valid]
    frac = np.linspace(0.0, 1.0, samples)
    t = t0[valid, None] + (t1 - t0)[valid, None] * frac[None, :]
    pts = base[:, None, :] + t[..., None] * s[None, None, :]
    vals = g.value(pts.reshape(-1, F.dim)).reshape(len(base), samples)
    counts[valid] = count_zeros_batch(vals)
    return counts


def favard_area(
    g: ScalarField,
    F: DomainBox,
    rule: SphereRule,
    lines_per_direction: int = 256,
    samples_per_line: int = 256,
) -> float:
    """Favard (Crofton) area of ``{g = 0} ∩ F`` from line intersection counts.

    For each direction ``s`` of ``rule`` the lines run parallel to ``s``
    through a ``lines_per_direction ** (d-1)`` midpoint grid on the
    projection of ``F`` onto ``s^perp``; each line is sampled at
    ``samples_per_line`` points.
    """
    d = F.dim
    if d < 2:
        raise ValueError("favard_area needs d >= 2; use count_zeros_1d for d = 1")
    if rule.d != d:
        raise ValueError("sphere rule dimension does not match the domain")
    total = 0.0
    for s, w in zip(rule.nodes, rule.weights):
        fam = line_family(s, F, lines_per_direction)
        n = len(fam.base_points)
        step = max(1, (1 << 21) // samples_per_line)
        acc = 0.0
        for i in range(0, n, step):
            sub = LineFamily(fam.direction, fam.base_points[i : i + step], fam.spacing)
            acc += float(crossings_along_lines(g, F, sub, samples_per_line).sum())
        total += w * acc * fam.cell_measure
    return favard_constant(d) * total
