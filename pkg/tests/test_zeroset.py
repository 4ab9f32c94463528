import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riceband.core import DomainBox, GridSpec, ScalarField, tensor_grid
from riceband.sphere import build_sphere_rule
from riceband.zeroset import (
    ZeroSetMesh,
    cosine_kernel,
    count_zeros_1d,
    count_zeros_batch,
    crossings_along_lines,
    extract_zero_set,
    favard_area,
    kac_counting_integral,
    line_family,
    mesh_area,
)


def quadric(center=(0.0, 0.0), radius=1.0):
    c = np.asarray(center)
    return ScalarField(lambda x: np.sum((x - c) ** 2, axis=-1) - radius**2, len(c), lambda x: 2 * (x - c))


def linear(coef, offset=0.0):
    coef = np.asarray(coef, dtype=float)
    return ScalarField(lambda x: x @ coef - offset, len(coef), lambda x: np.broadcast_to(coef, x.shape).copy())


def field_1d(f, df):
    return ScalarField(lambda x: f(x[..., 0]), 1, lambda x: df(x))


# ---------------------------------------------------------------------------
# counting


@pytest.mark.parametrize(
    "values,expected",
    [((1, -1, 1), 2), ((0, 1, 2), 0.5), ((1, 1, 1), 0), ((1, 0, -1), 1), ((2, 0, 0, 3), 1),
     ((0, 0, 0), 1), ((1, 2, 0), 0.5), ((0, -1, 0), 1)],
)
def test_count_zeros_examples(values, expected):
    assert count_zeros_1d(values) == expected


def test_count_zeros_pairs_and_errors():
    assert count_zeros_1d([(0.0, 1.0), (0.5, -1.0), (1.0, 1.0)]) == 2
    with pytest.raises(ValueError):
        count_zeros_1d([(1.0, 1.0), (0.0, -1.0)])
    with pytest.raises(ValueError):
        count_zeros_1d([1.0])
    with pytest.raises(ValueError):
        count_zeros_1d([1.0, np.nan])


@given(st.lists(st.sampled_from([-2.0, -0.5, 0.0, 0.5, 3.0]), min_size=2, max_size=30), st.floats(1e-3, 1e3))
def test_count_invariant_under_positive_scaling(values, c):
    assert count_zeros_1d(values) == count_zeros_1d([c * v for v in values])
    assert count_zeros_1d(values) == count_zeros_1d([-v for v in values])


@given(st.lists(st.lists(st.sampled_from([-1.0, 0.0, 1.0]), min_size=6, max_size=6), min_size=1, max_size=8))
def test_batch_matches_reference_counter(rows):
    def reference(v):
        # walk maximal runs of equal sign class, following the counting rules literally
        total, n, i = 0.0, len(v), 0
        while i < n:
            if v[i] == 0:
                j = i
                while j + 1 < n and v[j + 1] == 0:
                    j += 1
                if i == 0 and j == n - 1:
                    total += 1
                else:
                    total += (0.5 if i == 0 else 0.0) + (0.5 if j == n - 1 else 0.0)
                    total += 1.0 if (i > 0 and j < n - 1) else 0.0
                i = j + 1
            else:
                if i + 1 < n and v[i + 1] != 0 and v[i] * v[i + 1] < 0:
                    total += 1
                i += 1
        return total

    got = count_zeros_batch(np.array(rows))
    assert got.tolist() == [reference(r) for r in rows]


# ---------------------------------------------------------------------------
# truncated Kac integral


def test_cosine_kernel_closed_form_vs_quadrature():
    v = np.array([0.0, 1e-9, 0.3, -2.0, 17.5])
    np.testing.assert_allclose(cosine_kernel(v, 40.0), cosine_kernel(v, 40.0, 32), rtol=1e-10, atol=1e-10)
    assert cosine_kernel(np.array([0.0]), 5.0)[0] == 10.0


KAC_CORPUS = [
    ("t", lambda t: t, lambda x: np.ones_like(x), (-1.0, 1.0), 1),
    ("t^2-1/4", lambda t: t * t - 0.25, lambda x: 2 * x, (0.0, 1.0), 1),
    ("t^2+1", lambda t: t * t + 1, lambda x: 2 * x, (-1.0, 1.0), 0),
]


@pytest.mark.parametrize("name,f,df,interval,count", KAC_CORPUS, ids=[c[0] for c in KAC_CORPUS])
def test_kac_counting_integral_at_R200(name, f, df, interval, count):
    val = kac_counting_integral(field_1d(f, df), DomainBox(*[(v,) for v in interval]), 200.0)
    assert abs(val - count) <= 0.05


@pytest.mark.parametrize("name,f,df,interval,count", KAC_CORPUS[:2], ids=[c[0] for c in KAC_CORPUS[:2]])
def test_kac_counting_error_decreases_with_R(name, f, df, interval, count):
    F = DomainBox(*[(v,) for v in interval])
    errs = [abs(kac_counting_integral(field_1d(f, df), F, R) - count) for R in (10.0, 50.0, 250.0)]
    assert errs[2] < errs[1] < errs[0]


def test_kac_counting_rejects_bad_arguments():
    g = field_1d(lambda t: t, lambda x: np.ones_like(x))
    F = DomainBox((-1.0,), (1.0,))
    with pytest.raises(ValueError):
        kac_counting_integral(g, F, 0.0)
    with pytest.raises(ValueError):
        kac_counting_integral(g, F, 10.0, u_nodes=8)


# ---------------------------------------------------------------------------
# extraction and mesh area


def test_extract_1d_point():
    F = DomainBox((0.0,), (1.0,))
    spec = GridSpec((101,))
    mesh = extract_zero_set(tensor_grid(F, spec)[:, 0] - 0.5 - 1e-4, F, spec)
    assert mesh.n_cells == 1
    assert abs(mesh.vertices[0, 0] - 0.5001) < 1e-9
    assert mesh_area(mesh) == 1.0


def test_extract_line_length():
    F = DomainBox.cube(0.0, 1.0, 2)
    spec = GridSpec.uniform(51, 2)
    x = tensor_grid(F, spec)
    mesh = extract_zero_set(x[:, 1] - x[:, 0], F, spec)
    assert abs(mesh_area(mesh) - math.sqrt(2)) < 1e-6


def test_extract_circle_closed_and_accurate():
    F = DomainBox.cube(-1.0, 1.0, 2)
    spec = GridSpec.uniform(201, 2)
    mesh = extract_zero_set(quadric(radius=0.5).value(tensor_grid(F, spec)), F, spec)
    assert mesh_area(mesh) == pytest.approx(math.pi, rel=0.01)
    # closed polyline: every vertex has degree 2
    deg = np.bincount(mesh.cells.ravel(), minlength=len(mesh.vertices))
    assert np.all(deg[deg > 0] == 2)
    assert np.all(F.contains(mesh.vertices, atol=1e-9))


def test_extract_sphere_area():
    F = DomainBox.cube(-2.0, 2.0, 3)
    spec = GridSpec.uniform(61, 3)
    mesh = extract_zero_set(quadric((0.0, 0.0, 0.0)).value(tensor_grid(F, spec)), F, spec)
    assert mesh_area(mesh) == pytest.approx(4 * math.pi, rel=0.01)
    assert np.all(F.contains(mesh.vertices, atol=1e-9))


def test_extract_rejects_high_dimension():
    F = DomainBox.cube(0.0, 1.0, 4)
    with pytest.raises(NotImplementedError):
        extract_zero_set(np.zeros(16), F, GridSpec.uniform(2, 4))


@pytest.mark.parametrize("d,points", [(2, 41), (3, 17)])
def test_extract_symmetric_under_negation(d, points):
    F = DomainBox.cube(-1.0, 1.0, d)
    spec = GridSpec.uniform(points, d)
    g = quadric(tuple([0.13] * d), 0.71)
    vals = g.value(tensor_grid(F, spec))
    a, b = extract_zero_set(vals, F, spec), extract_zero_set(-vals, F, spec)
    assert mesh_area(a) == pytest.approx(mesh_area(b), rel=1e-12)
    key = lambda m: np.unique(np.round(m.vertices, 10), axis=0)
    np.testing.assert_allclose(key(a), key(b), atol=1e-9)


def test_marching_squares_saddle_resolved():
    # saddle cell with centre value of the same sign as the positive diagonal
    F = DomainBox.cube(0.0, 1.0, 2)
    spec = GridSpec.uniform(2, 2)
    vals = np.array([1.0, -1.0, -1.0, 2.0])
    mesh = extract_zero_set(vals, F, spec)
    assert mesh.n_cells == 2
    assert np.all(F.contains(mesh.vertices, atol=1e-12))


def test_mesh_area_examples():
    square = ZeroSetMesh(2, [[0, 0], [1, 0], [1, 1], [0, 1]], [[0, 1], [1, 2], [2, 3], [3, 0]])
    assert mesh_area(square) == 4.0
    assert mesh_area(ZeroSetMesh(1, [[0.2], [0.7]], [[0], [1]])) == 2.0
    assert mesh_area(ZeroSetMesh(2, np.zeros((0, 2)), np.zeros((0, 2)))) == 0.0
    with pytest.raises(ValueError):
        ZeroSetMesh(2, [[0, 0]], [[0, 1]])


def test_mesh_text_round_trip():
    F = DomainBox.cube(-1.0, 1.0, 2)
    spec = GridSpec.uniform(21, 2)
    mesh = extract_zero_set(quadric(radius=0.6).value(tensor_grid(F, spec)), F, spec)
    text = mesh.dumps()
    assert text.splitlines()[0] == f"2 {len(mesh.vertices)} {mesh.n_cells}"
    back = ZeroSetMesh.loads(text)
    np.testing.assert_array_equal(back.vertices, mesh.vertices)
    np.testing.assert_array_equal(back.cells, mesh.cells)
    with pytest.raises(ValueError):
        ZeroSetMesh.loads("2 3\n")


# ---------------------------------------------------------------------------
# Favard measure


@given(st.floats(0, 2 * math.pi))
def test_line_family_geometry(theta):
    s = np.array([math.cos(theta), math.sin(theta)])
    F = DomainBox.cube(-2.0, 2.0, 2)
    fam = line_family(s, F, 16)
    np.testing.assert_allclose(fam.base_points @ s, 0, atol=1e-12)
    extent = np.abs(F.corners() @ np.array([-s[1], s[0]])).max()
    assert fam.cell_measure * 16 == pytest.approx(2 * extent, rel=1e-9)


def test_crossings_along_axis_lines():
    F = DomainBox.cube(-2.0, 2.0, 2)
    fam = line_family(np.array([1.0, 0.0]), F, 8)
    counts = crossings_along_lines(quadric(), F, fam, 257)
    inside = np.abs(fam.base_points[:, 1]) < 1
    assert np.all(counts[inside] == 2) and np.all(counts[~inside] == 0)


def test_favard_circle():
    val = favard_area(quadric(), DomainBox.cube(-2.0, 2.0, 2), build_sphere_rule(2, 64))
    assert val == pytest.approx(2 * math.pi, rel=0.01)


def test_favard_segment():
    val = favard_area(linear([1.0, 0.0], 0.5), DomainBox.cube(0.0, 1.0, 2), build_sphere_rule(2, 64))
    assert val == pytest.approx(1.0, rel=0.01)


def test_favard_sphere():
    F = DomainBox.cube(-2.0, 2.0, 3)
    val = favard_area(quadric((0.0, 0.0, 0.0)), F, build_sphere_rule(3, 8), 96, 64)
    assert val == pytest.approx(4 * math.pi, rel=0.02)


def test_favard_empty_zero_set_and_errors():
    assert favard_area(quadric(radius=0.1), DomainBox.cube(1.0, 2.0, 2), build_sphere_rule(2, 16), 32, 32) == 0.0
    with pytest.raises(ValueError):
        favard_area(quadric((0.0,)), DomainBox((-1.0,), (1.0,)), build_sphere_rule(1))
    with pytest.raises(ValueError):
        favard_area(quadric(), DomainBox.cube(-1.0, 1.0, 2), build_sphere_rule(3, 4))


@pytest.mark.parametrize(
    "g,F",
    [
        (quadric((0.2, -0.1), 0.8), DomainBox.cube(-1.0, 1.0, 2)),
        (ScalarField(lambda x: np.sin(3 * x[..., 0]) + x[..., 1], 2,
                     lambda x: np.stack([3 * np.cos(3 * x[..., 0]), np.ones(x.shape[:-1])], -1)),
         DomainBox.cube(-1.0, 1.0, 2)),
    ],
    ids=["offset-circle", "sine-graph"],
)
def test_crofton_consistency_2d(g, F):
    spec = GridSpec.uniform(401, 2)
    mesh = mesh_area(extract_zero_set(g.value(tensor_grid(F, spec)), F, spec))
    fav = favard_area(g, F, build_sphere_rule(2, 64), 256, 256)
    assert fav == pytest.approx(mesh, rel=0.01)


def test_crofton_consistency_3d():
    g = quadric((0.1, 0.0, -0.2), 0.7)
    F = DomainBox.cube(-1.0, 1.0, 3)
    spec = GridSpec.uniform(61, 3)
    mesh = mesh_area(extract_zero_set(g.value(tensor_grid(F, spec)), F, spec))
    fav = favard_area(g, F, build_sphere_rule(3, 8), 64, 64)
    assert fav == pytest.approx(mesh, rel=0.02)
