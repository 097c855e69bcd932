import pytest
import hypothesis
import hypothesis.strategies as strat
import numpy as np

import orqi.geometry as geometry
import orqi.algebra as algebra
from orqi.util.grid import GridEvaluator

@pytest.fixture
def evaluator():
    return GridEvaluator([(-2, 2), (-2, 2)], 101)

@pytest.fixture
def square():
    return geometry.PointSet([[1, 1], [1, -1], [-1, 1], [-1, -1]])

def ball(radius, centre=(0.0, 0.0)):
    centre = np.asarray(centre, dtype=float)
    return geometry.MembershipOracle(2, margin=lambda p: radius - np.linalg.norm(p - centre, axis=1))

def rotation(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])

@strat.composite
def planar_points(draw, max_size=6):
    n = draw(strat.integers(min_value=1, max_value=max_size))
    coord = strat.floats(min_value=-3, max_value=3, allow_nan=False)
    return np.array([[draw(coord), draw(coord)] for _ in range(n)])


#####  PointSet and HalfspaceSet  #####

def test_PointSet_construct():
    P = geometry.PointSet([[1, 2], [3, 4]], rays=[[0, 1]])
    assert P.dim == 2
    assert len(P) == 2
    assert P.rays.shape == (1, 2)

    with pytest.raises(ValueError):
        geometry.PointSet([])
    assert len(geometry.PointSet([], dim=3)) == 0
    with pytest.raises(ValueError):
        geometry.PointSet([[1, np.inf]])
    with pytest.raises(ValueError):
        geometry.PointSet([[1, 1]], rays=[[0, 0]])

def test_PointSet_support():
    P = geometry.PointSet([[1, 0], [0, 2]], rays=[[0, 1]])
    h = P.support([[1, 0], [0, 1], [0, -1]])
    assert h[0] == pytest.approx(1)
    assert h[1] == np.inf
    assert h[2] == pytest.approx(0)
    assert geometry.PointSet([], dim=2).support([[1, 0]])[0] == -np.inf

def test_PointSet_dict():
    P = geometry.PointSet([[1, 2]], rays=[[0, 1]])
    Q = geometry.PointSet.from_dict(P.to_dict())
    np.testing.assert_array_equal(Q.points, P.points)
    np.testing.assert_array_equal(Q.rays, P.rays)
    with pytest.raises(ValueError):
        geometry.PointSet.from_dict({"rays": []})

def test_HalfspaceSet_zero_normals():
    H = geometry.HalfspaceSet([[0, 0], [1, 0]], [1, 2], "<=")
    assert len(H) == 1
    assert not H.infeasible
    H = geometry.HalfspaceSet([[0, 0]], [1], ">=")
    assert H.infeasible
    assert not np.any(H([[0, 0], [5, 5]]))

def test_HalfspaceSet_membership():
    H = geometry.HalfspaceSet([[1, 0], [0, 1]], [1, 1], ["<=", ">="])
    np.testing.assert_array_equal(H([[0, 1], [1, 1], [2, 1], [0, 0]]), [True, True, False, False])
    np.testing.assert_allclose(H.margins([[0, 3], [0, 0]]), [1, -1])
    everything = geometry.HalfspaceSet([], [], dim=2)
    assert np.all(everything([[1e6, -1e6]]))

def test_HalfspaceSet_bad():
    with pytest.raises(ValueError):
        geometry.HalfspaceSet([[1, 0]], [1, 2])
    with pytest.raises(ValueError):
        geometry.HalfspaceSet([[1, 0]], [1], "<")
    with pytest.raises(ValueError):
        geometry.HalfspaceSet([], [])

def test_HalfspaceSet_dict():
    H = geometry.HalfspaceSet([[1, 2], [3, 4]], [1, 0], ["<=", ">="])
    G = geometry.HalfspaceSet.from_dict(H.to_dict())
    np.testing.assert_array_equal(G.normals, H.normals)
    assert G.senses == ["<=", ">="]

def test_MembershipOracle_combinators():
    a = ball(1)
    b = ball(1, (1, 0))
    pts = np.array([[0.5, 0], [-0.5, 0], [1.5, 0], [3, 0]])
    np.testing.assert_array_equal(a.intersect(b)(pts), [True, False, False, False])
    np.testing.assert_array_equal(a.union(b)(pts), [True, True, True, False])
    np.testing.assert_array_equal(a.complement()(pts), [False, False, True, True])
    np.testing.assert_array_equal(b.reflect(0)(pts), [False, True, False, False])
    assert a.intersect(b).margins(pts) is not None

    with pytest.raises(ValueError):
        geometry.MembershipOracle(2)
    with pytest.raises(ValueError):
        geometry.MembershipOracle(2, margin=lambda p: p[:, 0], bounding_box=[(0, 1)])


#####  Polarity type transforms  #####

def test_polar_of_square(square, evaluator):
    cross = geometry.MembershipOracle(2, margin=lambda p: 1 - np.abs(p).sum(axis=1))
    report = evaluator.agreement(geometry.polar(square), cross)
    assert report.agreement >= 0.999

def test_polar_scaling(square):
    for alpha in [0.5, 2, 3]:
        A = geometry.polar(square.scaled(alpha))
        B = geometry.polar(square).scaled(1 / alpha)
        np.testing.assert_allclose(A.normals, B.normals)
        np.testing.assert_allclose(A.offsets, B.offsets)

def test_dual_polar_edge_cases():
    everything = geometry.dual_polar(geometry.PointSet([], dim=2))
    assert np.all(everything([[0, 0], [5, -3]]))
    nothing = geometry.dual_polar(geometry.PointSet([[0, 0]]))
    assert nothing.infeasible
    assert isinstance(geometry.subclass_of(nothing), geometry.Degenerate)
    assert geometry.subclass_of(everything).reason == "whole space"

@pytest.mark.parametrize("a", [0.5, 2.0])
@pytest.mark.parametrize("angle", [0.0, 0.7])
def test_dual_polar_moves_subclass(a, angle):
    R = rotation(angle)
    points = np.array([[0, a], [1, a + 1], [-1, a + 1]]) @ R.T
    rays = np.array([[0, 1], [1, 1], [-1, 1]]) @ R.T
    K = geometry.dual_polar(geometry.PointSet(points, rays))
    found = geometry.subclass_of(K)
    assert found
    np.testing.assert_allclose(found.u, R @ [0, 1], atol=1e-6)
    assert found.a == pytest.approx(1 / a, abs=1e-6)

def test_subclass_of_oracle():
    found = geometry.subclass_of(geometry.k0_oracle())
    np.testing.assert_allclose(found.u, [0, 1], atol=1e-9)
    assert found.a == pytest.approx(1, abs=1e-9)
    assert geometry.subclass_of(ball(1)).reason == "contains origin"
    nowhere = geometry.MembershipOracle(2, predicate=lambda p: np.zeros(p.shape[0], dtype=bool))
    assert geometry.subclass_of(nowhere).reason == "empty"

def test_subclass_of_degenerate():
    H = geometry.HalfspaceSet([[1, 0], [1, 0]], [1, -1], [">=", "<="])
    assert geometry.subclass_of(H).reason == "empty"
    assert geometry.subclass_of(geometry.polar(geometry.PointSet([[1, 1]]))).reason == "contains origin"

def test_reciprocal_and_slabs(evaluator):
    rng = np.random.default_rng(3)
    for _ in range(3):
        pts = rng.uniform(-1.5, 1.5, size=(5, 2))
        P = geometry.PointSet(np.concatenate([pts, -pts]))
        report = evaluator.agreement(geometry.reciprocal(P), geometry.slab_polar_intersection(P))
        assert report.agreement >= 0.999

def test_reciprocal_unbounded():
    P = geometry.PointSet([[1, 0]], rays=[[0, 1]])
    H = geometry.reciprocal(P)
    assert not np.any(H([[0, 0.5]]))
    assert H([[0, -0.5]])[0]

def test_reciprocal_type_endpoints(square, evaluator):
    assert evaluator.agreement(geometry.reciprocal_type(square, 1), geometry.polar(square)).agreement >= 0.999
    pts = np.array([[0.7, 0], [0.71, 0]])
    np.testing.assert_array_equal(geometry.reciprocal_type(square, 0)(pts), [True, False])
    with pytest.raises(ValueError):
        geometry.reciprocal_type(square, 1.5)

def test_projection_product_sup():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(300, 2))
    y = rng.normal(size=(300, 2))
    found = geometry.projection_product_sup(x, y)
    expected = ((x * y).sum(axis=1) + np.linalg.norm(x, axis=1) * np.linalg.norm(y, axis=1)) / 2
    scale = np.linalg.norm(x, axis=1) * np.linalg.norm(y, axis=1)
    assert np.all(found <= expected + 1e-12)
    assert np.all(expected - found <= 1e-4 * scale)

def test_unconditional_dual():
    cross = geometry.unconditional_dual(geometry.PointSet([[1, 1]]))
    np.testing.assert_array_equal(cross([[0.5, 0.5], [-0.5, 0.5], [0.6, 0.5]]), [True, True, False])
    axes = geometry.PointSet([[1, 0], [0, 1], [-1, 0], [0, -1]])
    box = geometry.unconditional_dual(axes)
    np.testing.assert_array_equal(box([[1, 1], [-1, 0.5], [1.01, 0]]), [True, True, False])

def test_restricted_polar():
    K = geometry.restricted_polar(geometry.PointSet([[1, 0]]), 2)
    np.testing.assert_array_equal(K([[-1.9, 0], [-2.1, 0], [1.1, 0], [0.5, 1.5]]), [True, False, False, True])
    with pytest.raises(ValueError):
        geometry.restricted_polar(geometry.PointSet([[1, 0]]), 0)


#####  Metric transforms  #####

def test_neighborhood_complement():
    P = geometry.PointSet([[0, 0], [3, 0]])
    T = geometry.neighborhood_complement(P, 1)
    np.testing.assert_array_equal(T([[1, 0], [0.5, 0], [1.5, 0], [3, 2]]), [True, False, True, True])
    assert not np.any(geometry.x_zero_sample(lambda Q: geometry.neighborhood_complement(Q, 1), P.points))

def test_neighborhood_complement_twice():
    P = geometry.PointSet([[-1.5, 0], [1.5, 0]])
    grid = GridEvaluator([(-3, 3), (-3, 3)], 121)
    TP = geometry.neighborhood_complement(P, 1)
    TTP = geometry.neighborhood_complement(geometry.PointSet(grid.members(TP)), 1)
    assert np.all(TTP(P.points))
    assert not np.any(TTP([[-1, 0], [1.5, 0.5], [0, 0]]))

def test_neighborhood_complement_metric():
    P = geometry.PointSet([[0, 0]])
    T = geometry.neighborhood_complement(P, 1, metric="cityblock")
    np.testing.assert_array_equal(T([[0.6, 0.6], [0.4, 0.4]]), [True, False])
    with pytest.raises(ValueError):
        geometry.neighborhood_complement(P, 0)

def test_ball_intersection(evaluator):
    angles = 2 * np.pi * np.arange(720) / 720
    circle = geometry.PointSet(0.5 * np.column_stack([np.cos(angles), np.sin(angles)]))
    T = geometry.ball_intersection(circle, 1)
    assert evaluator.agreement(T, ball(0.5)).agreement >= 0.995

def test_ball_intersection_diameter():
    rng = np.random.default_rng(8)
    grid = GridEvaluator([(-3, 3), (-3, 3)], 61)
    for _ in range(5):
        P = geometry.PointSet(rng.uniform(-1, 1, size=(4, 2)))
        members = grid.members(geometry.ball_intersection(P, 1.5))
        if len(members) > 1:
            gaps = np.linalg.norm(members[:, None, :] - members[None, :, :], axis=2)
            assert gaps.max() <= 3 + 1e-9

def test_balls_transform():
    T = geometry.balls_transform(geometry.PointSet([[1, 0], [0, 2]]))
    np.testing.assert_array_equal(T([[0.5, 0], [0, 0.51]]), [True, False])
    assert np.all(geometry.balls_transform(geometry.PointSet([[0, 0]]))([[100, 100]]))


#####  Flowers  #####

def test_flower_single_point():
    x = np.array([2.0, 0.0])
    T = geometry.flower_dual(geometry.PointSet([x]))
    z = x / x.dot(x)
    rng = np.random.default_rng(2)
    pts = rng.uniform(-2, 2, size=(2000, 2))
    outside = np.linalg.norm(pts - z, axis=1) > np.linalg.norm(z)
    np.testing.assert_array_equal(T(pts), outside)

def test_flower_of_origin_is_empty():
    T = geometry.flower_dual(geometry.PointSet([[0, 0], [1, 0]]))
    assert not np.any(T(np.random.default_rng(0).normal(size=(100, 2))))

def test_flower_invariant(evaluator):
    angles = 2 * np.pi * np.arange(720) / 720
    circle = geometry.PointSet(np.sqrt(2) * np.column_stack([np.cos(angles), np.sin(angles)]))
    A = geometry.MembershipOracle(2, margin=lambda p: np.linalg.norm(p, axis=1) - np.sqrt(2))
    assert evaluator.agreement(geometry.flower_dual(circle), A).agreement >= 0.995


#####  Star duality and radial scans  #####

def test_star_dual_involution():
    dirs = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
    g = geometry.RadialFunction(dirs, [1, 2, np.inf, 3])
    assert geometry.star_dual(geometry.star_dual(g)) == g
    np.testing.assert_allclose(geometry.star_dual(g).values, [1, 0.5, 0, 1 / 3])
    with pytest.raises(ValueError):
        geometry.RadialFunction(dirs, [1, 0, 1, 1])

def test_gauge_of_ball():
    g = geometry.gauge_of(ball(2))
    np.testing.assert_allclose(g.values, 0.5, rtol=1e-9)
    small = geometry.star_dual(g).body()
    np.testing.assert_array_equal(small([[0.49, 0], [0, 0.51], [0, 0]]), [True, False, True])

def test_radial_profile():
    r = geometry.radial_profile(ball(1, (0, 3)), [[0, 1], [1, 0]], r_max=10)
    assert r[0] == pytest.approx(2, abs=1e-9)
    assert np.isnan(r[1])
    r = geometry.radial_profile(ball(1.5), [[0, 1]], r_max=10, mode="exit")
    assert r[0] == pytest.approx(1.5, abs=1e-9)
    with pytest.raises(ValueError):
        geometry.radial_profile(ball(1), mode="middle")

def test_boundary_generators_of_k0():
    P = geometry.boundary_generators(geometry.k0_oracle(), [[0, 1], [0.6, 0.8], [1, 0]])
    assert len(P) == 2
    np.testing.assert_allclose(P.points, [[0, 1], np.array([0.6, 0.8]) / np.sqrt(0.28)], atol=1e-9)
    np.testing.assert_allclose(P.rays, [[0, 1], [0.6, 0.8]])

def test_dual_polar_contains_original():
    rng = np.random.default_rng(9)
    for _ in range(3):
        pts = rng.uniform(-1, 1, size=(6, 2)) + [0, 2]
        P = geometry.PointSet(pts)
        TP = geometry.dual_polar(P)
        TTP = geometry.sampled_dual_polar(TP)
        assert np.all(TTP(pts))

def test_cone_like_check():
    samples = GridEvaluator([(-3, 3), (-3, 3)], 41).points()
    K = geometry.dual_polar(geometry.PointSet([[0, 1], [1, 2]]))
    assert geometry.cone_like_check(K, samples)
    verdict = geometry.cone_like_check(ball(1, (0, 2)), samples)
    assert verdict.kind == "scaling"
    assert not verdict.exhaustive
    assert geometry.cone_like_check(ball(1), samples).kind == "origin"
    with pytest.raises(ValueError):
        geometry.cone_like_check(K, samples, lambdas=[0.5])


#####  J transform  #####

def test_j_point_map():
    pts = np.array([[1, 2], [-3, 0.5], [0, -1]])
    np.testing.assert_allclose(geometry.j_point_map(geometry.j_point_map(pts)), pts)
    np.testing.assert_allclose(geometry.j_jacobian(pts), np.abs(pts[:, 1]) ** -3)

def test_tilde_j_of_k0():
    evaluator = GridEvaluator([(-2, 2), (-2, 2)], 100)
    unit = geometry.MembershipOracle(2, margin=lambda p: 1 - np.linalg.norm(p, axis=1))
    J = geometry.tilde_j(geometry.k0_oracle())
    assert evaluator.agreement(J, unit).agreement >= 0.999
    assert not J([[0.5, 0]])[0]

def test_j_polarity_check():
    reports = geometry.j_polarity_check(seed=0, bodies=2, resolution=100)
    assert len(reports) == 2
    assert all(r.agreement >= 0.995 for r in reports)


#####  Invariant sets of dual polarity  #####

@pytest.mark.parametrize("which,threshold", [("K0", 0.995), ("K1", 0.999), ("K2", 0.999)])
def test_named_invariants(which, threshold):
    oracle, report = geometry.dual_polarity_invariants_2d(which)
    assert report.agreement >= threshold
    assert not oracle([[0, 0]])[0]

@pytest.mark.parametrize("oracle,generators", [
    (geometry.k0_oracle(), geometry.k0_generators()),
    (geometry.k1_oracle(), geometry.k1_generators()),
    (geometry.k2_oracle(), geometry.k2_generators()),
])
def test_named_generators_span_boundary(oracle, generators):
    assert generators.dim == 2
    np.testing.assert_allclose(oracle.margins(generators.points), 0, atol=1e-9)
    for ray in generators.rays:
        assert np.all(oracle.margins(generators.points + 5 * ray) >= -1e-9)

def test_k0_generators_count():
    P = geometry.k0_generators(count=11, span=2.0)
    assert len(P) == 11
    np.testing.assert_allclose(P.points[5], [0, 1])
    np.testing.assert_allclose(P.points[-1, 0], np.sinh(2.0))

def test_construct_invariant():
    u = np.linspace(0, 6, 301)
    x = np.sinh(u)
    K = geometry.PointSet(np.column_stack([x, np.sqrt(x * x + 1)]), rays=[[1, 1], [0, 1]])
    oracle, report = geometry.dual_polarity_invariants_2d("construct", K)
    assert report.agreement >= 0.99
    grid = GridEvaluator([(-2, 2), (0, 4)], 81)
    assert grid.agreement(oracle, geometry.k0_oracle()).agreement >= 0.99

def test_construct_precondition():
    with pytest.raises(algebra.PreconditionFailed):
        geometry.construct_invariant(geometry.PointSet([[-1, 2], [0, 1]]))
    with pytest.raises(algebra.PreconditionFailed):
        geometry.construct_invariant(geometry.PointSet([[0, 2], [1, 2]]))
    with pytest.raises(ValueError):
        geometry.dual_polarity_invariants_2d("K9")


#####  Laws, sampled  #####

@hypothesis.given(planar_points())
@hypothesis.settings(max_examples=20, deadline=None)
def test_polar_contains_generators_dual(pts):
    P = geometry.PointSet(pts)
    # x in T(T(P)) for the polar: every x satisfies <x, y> <= 1 for y in polar(P)
    samples = GridEvaluator([(-3, 3), (-3, 3)], 31).members(geometry.polar(P))
    if len(samples) > 0:
        assert np.all(geometry.polar(geometry.PointSet(samples))(pts))
