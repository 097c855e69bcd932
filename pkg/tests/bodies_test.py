import pytest
import numpy as np

import orqi.bodies as bodies
import orqi.geometry as geometry
from orqi.functional import GridFunction
from orqi.util.grid import GridEvaluator

def test_named_body_lookup():
    for name in bodies.NAMES:
        body = bodies.named_body(name)
        assert body.dim == 2
        assert body.name == name
    with pytest.raises(ValueError):
        bodies.named_body("dodecahedron")

def test_membership():
    assert list(bodies.named_body("k0").oracle([[0, 1], [0, 0.9], [3, 3.2]])) == [True, False, True]
    assert list(bodies.named_body("k1").oracle([[0, 1], [-0.1, 2], [5, 1]])) == [True, False, True]
    assert list(bodies.named_body("k2").oracle([[-0.5, 1], [1, 1.5], [-2, 2]])) == [True, False, True]
    assert list(bodies.named_body("square").oracle([[0.5, -0.5], [1.5, 0]])) == [True, False]
    assert list(bodies.named_body("halfspace").oracle([[0.5, -7], [-0.5, 0]])) == [True, False]
    assert list(bodies.named_body("flower").oracle([[2, 0], [1, 0], [0, -3]])) == [True, False, True]

def test_profiles():
    x = np.array([-2.0, -0.5, 0.0, 1.5])
    np.testing.assert_allclose(bodies.k0_profile(x), np.sqrt(x * x + 1))
    np.testing.assert_allclose(bodies.k2_profile(x), [2, 1, 1, 2.5])
    assert list(bodies.k1_profile(x)) == [np.inf, np.inf, 1, 1]
    np.testing.assert_allclose(bodies.slab_profile(x), 1)

def test_grid_profile():
    f = bodies.named_body("k0").grid_profile((-2, 2), 41)
    assert f.dim == 1
    assert f.flat_values[20] == pytest.approx(1)
    assert f.flat_values[0] == pytest.approx(np.sqrt(5))
    with pytest.raises(ValueError):
        bodies.named_body("square").grid_profile()

def test_dual_polar_of_slab():
    TK = bodies.named_body("slab").dual_polar()
    assert list(TK([[0, 2], [0.1, 2], [0, 0.5]])) == [True, False, False]
    with pytest.raises(ValueError):
        bodies.named_body("halfspace").dual_polar()

def test_from_grid_function():
    f = GridFunction.from_callable(lambda p: np.sqrt(p[:, 0] ** 2 + 1), [(-2, 2)], 41)
    body = bodies.Body.from_grid_function("sampled", f)
    assert body.profile(0.0) == pytest.approx(1)
    slope = (f.flat_values[-1] - f.flat_values[-2]) / 0.1
    assert body.profile(3.0) == pytest.approx(np.sqrt(5) + slope)
    assert body.profile(-3.0) == pytest.approx(np.sqrt(5) + slope)
    assert list(body.oracle([[0, 1.01], [0, 0.99]])) == [True, False]
    assert body.generators.rays.shape == (3, 2)

def test_from_grid_function_rejects():
    f = GridFunction.from_callable(lambda p: p[:, 0] + p[:, 1], [(-1, 1), (-1, 1)], 5)
    with pytest.raises(ValueError):
        bodies.Body.from_grid_function("flat", f)
    f = GridFunction([(-1, 1)], 3, [1, 1, np.inf])
    with pytest.raises(ValueError):
        bodies.Body.from_grid_function("infinite", f)

def test_perturbed_k0():
    body = bodies.perturbed_k0(1.0)
    x = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(body.profile(x), bodies.k0_profile(x))
    with pytest.raises(ValueError):
        bodies.perturbed_k0(0)

def test_perturbed_k0_dual_polar():
    # The dual polar of the epigraph of sqrt(s^2 x^2 + 1) is the epigraph of sqrt(y^2 / s^2 + 1)
    TK = bodies.perturbed_k0(2.0).dual_polar()
    edge = np.sqrt(2)
    assert list(TK([[2, edge + 0.01], [2, edge - 0.01], [0, 1.01], [0, 0.99]])) == [True, False, True, False]


#####  Reuleaux triangle  #####

def test_reuleaux_generators_on_boundary():
    body = bodies.reuleaux(1.0)
    margins = body.oracle.margins(body.generators.points)
    assert np.all(margins > -1e-9)
    assert np.all(margins < 1e-9)
    assert body.oracle([[0, 0]])[0]

def test_reuleaux_has_constant_width():
    points = bodies.reuleaux(2.0).generators.points
    gaps = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
    assert np.max(gaps) <= 2 + 1e-9
    for u in geometry.PointSet([[1, 0], [0, 1], [0.6, 0.8]]).points:
        widths = points @ u
        assert np.max(widths) - np.min(widths) == pytest.approx(2, abs=1e-3)

def test_reuleaux_invariant_under_ball_intersection():
    body = bodies.named_body("reuleaux", epsilon=1.0)
    evaluator = GridEvaluator([(-0.7, 0.7), (-0.7, 0.7)], 141)
    report = evaluator.agreement(body.oracle, geometry.ball_intersection(body.generators, 1.0))
    assert report.agreement >= 0.995
