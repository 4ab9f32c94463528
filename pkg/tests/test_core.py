import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from riceband.core import (
    DomainBox,
    Estimate,
    GridSpec,
    QuadSpec,
    ScalarField,
    box_rule,
    box_volume,
    central_difference_gradient,
    gauss_legendre,
    integrate_box,
    tensor_grid,
)


def test_box_basics():
    F = DomainBox((0, -1), (2, 1))
    assert F.dim == 2
    assert F.volume() == 4.0
    assert box_volume(F) == 4.0
    np.testing.assert_array_equal(F.sides, [2, 2])
    assert len(F.corners()) == 4
    assert F.contains([[1, 0], [3, 0]]).tolist() == [True, False]


@pytest.mark.parametrize("lo,hi", [((0,), (0,)), ((1,), (0,)), ((0, 0), (1,)), ((0,), (math.inf,))])
def test_box_rejects_bad_bounds(lo, hi):
    with pytest.raises(ValueError):
        DomainBox(lo, hi)


def test_box_json_round_trip():
    F = DomainBox.cube(-0.1, 0.3, 3)
    assert DomainBox.from_json(F.to_json()) == F
    with pytest.raises(ValueError):
        DomainBox.from_json([[0, 1, 2]])


def test_grid_points_and_refinement():
    F = DomainBox((0, 0), (1, 2))
    spec = GridSpec((3, 5))
    pts = tensor_grid(F, spec)
    assert pts.shape == (15, 2)
    # row-major: last axis fastest
    np.testing.assert_allclose(pts[:5, 1], np.linspace(0, 2, 5))
    np.testing.assert_allclose(spec.cell_size(F), [0.5, 0.5])
    assert spec.refined(2).shape == (5, 9)
    with pytest.raises(ValueError):
        GridSpec((1,))
    with pytest.raises(ValueError):
        spec.axes(DomainBox.cube(0, 1, 3))


def test_gauss_legendre_polynomial_exactness():
    # 8 nodes integrate degree 15 exactly
    x, w = gauss_legendre(-1.0, 3.0, 8, panels=3)
    assert math.isclose(np.dot(w, x**15), (3.0**16 - 1.0) / 16, rel_tol=1e-13)


def test_box_rule_and_integrate_box():
    F = DomainBox((0, 0), (1, 2))
    pts, wts = box_rule(F, QuadSpec(6))
    assert math.isclose(wts.sum(), 2.0, rel_tol=1e-14)
    val = integrate_box(lambda p: p[:, 0] ** 2 * p[:, 1], F, QuadSpec(6))
    assert math.isclose(val, 1 / 3 * 2.0, rel_tol=1e-13)
    mixed = box_rule(F, [QuadSpec(2), QuadSpec(3, panels=2)])
    assert len(mixed[1]) == 12


def test_scalar_field_call_and_transforms():
    g = ScalarField(lambda x: x[..., 0] ** 2 + x[..., 1], 2, lambda x: np.stack([2 * x[..., 0], np.ones(x.shape[:-1])], -1))
    v, dv = g([1.0, 2.0])
    assert v == 3.0
    np.testing.assert_allclose(dv, [2.0, 1.0])
    assert g.shifted(3.0)([1.0, 2.0])[0] == 0.0
    nv, ndv = g.negated()([1.0, 2.0])
    assert nv == -3.0 and ndv.tolist() == [-2.0, -1.0]


@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3))
def test_central_difference_matches_analytic(x):
    f = lambda p: np.sin(p[..., 0]) * np.exp(0.3 * p[..., 1]) + p[..., 2] ** 3
    exact = lambda p: np.stack(
        [np.cos(p[..., 0]) * np.exp(0.3 * p[..., 1]), 0.3 * np.sin(p[..., 0]) * np.exp(0.3 * p[..., 1]), 3 * p[..., 2] ** 2],
        -1,
    )
    x = np.array(x)
    np.testing.assert_allclose(central_difference_gradient(f)(x), exact(x), atol=1e-7)
    assert ScalarField(f, 3).gradient(x).shape == (3,)


def test_estimate_from_samples():
    e = Estimate.from_samples([1.0, 2.0, 3.0])
    assert e.value == 2.0 and e.replicates == 3
    assert math.isclose(e.stderr, 1 / math.sqrt(3))
    assert Estimate.from_samples([5.0]).degenerate
    flat = Estimate.from_samples([2.0] * 10)
    assert flat.degenerate and flat.stderr == 0.0
    with pytest.raises(ValueError):
        Estimate(1.0, -1.0, 3)
    with pytest.raises(ValueError):
        Estimate.from_samples([])
