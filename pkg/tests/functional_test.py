import pytest
import hypothesis
import hypothesis.strategies as strat
import numpy as np

import orqi.functional as functional
import orqi.geometry as geometry

BOX = [(-3, 3)]

def dot(x, y):
    return (x * y).sum(axis=-1)

@pytest.fixture
def quadratic():
    return functional.GridFunction.from_callable(lambda p: (p ** 2).sum(axis=1) / 2, BOX, 201)

@pytest.fixture
def k0_profile():
    return functional.GridFunction.from_callable(lambda p: np.sqrt(p[:, 0] ** 2 + 1), BOX, 301)

@pytest.fixture
def k1_profile():
    return functional.GridFunction.from_callable(lambda p: np.where(p[:, 0] >= -1e-12, 1.0, np.inf), BOX, 301)

def random_convex(rng, nodes=61):
    """Maximum of a few random affine functions, on [-3, 3], with slopes on
    a 0.01 grid."""
    slopes = rng.integers(-20, 21, size=4) / 10
    offsets = rng.uniform(-1, 1, size=4)
    return functional.GridFunction.from_callable(
        lambda p: np.max(p[:, :1] * slopes[None, :] + offsets[None, :], axis=1), BOX, nodes)

@strat.composite
def grid_functions(draw, nodes=21):
    values = draw(strat.lists(strat.floats(min_value=-5, max_value=5, allow_nan=False),
        min_size=nodes, max_size=nodes))
    return functional.GridFunction([(-2, 2)], nodes, values)


#####  GridFunction  #####

def test_GridFunction_construct():
    f = functional.GridFunction([(0, 1), (0, 2)], [3, 5], np.arange(15))
    assert f.dim == 2
    assert f.values.shape == (3, 5)
    assert f.nodes.shape == (15, 2)
    np.testing.assert_allclose(f.nodes[1], [0, 0.5])
    assert f.node_index([0.5, 1]) == 7
    assert f.node_index([0.25, 1]) is None

    with pytest.raises(ValueError):
        functional.GridFunction([(0, 1)], 3, [1, 2])
    with pytest.raises(ValueError):
        functional.GridFunction([(0, 1)], 3, [1, np.nan, 2])

def test_GridFunction_interpolate():
    f = functional.GridFunction([(0, 2)], 3, [0, 2, np.inf])
    np.testing.assert_allclose(f([[0.4], [0.6], [5]]), [0, 2, np.inf])
    np.testing.assert_allclose(f([[0.5], [1.5], [-1]], method="linear"), [1, np.inf, np.inf])
    assert f([[-1]], fill=-np.inf)[0] == -np.inf
    with pytest.raises(ValueError):
        f([[0]], method="cubic")

def test_GridFunction_dict():
    f = functional.GridFunction([(0, 2)], 3, [0, 2, np.inf])
    data = f.to_dict()
    assert data["values"] == [0.0, 2.0, "inf"]
    g = functional.GridFunction.from_dict(data)
    np.testing.assert_array_equal(g.values, f.values)
    with pytest.raises(ValueError):
        functional.GridFunction.from_dict({"box": [[0, 1]]})

def test_EpigraphOracle():
    f = functional.GridFunction([(0, 2)], 3, [0, 2, np.inf])
    epi = functional.EpigraphOracle(f)
    hypo = functional.EpigraphOracle(f, "hypo")
    pts = np.array([[0, 1], [1, 1], [2, 100], [3, 0]])
    np.testing.assert_array_equal(epi(pts), [True, False, False, False])
    np.testing.assert_array_equal(hypo(pts), [False, True, True, False])
    assert epi.dim == 2
    with pytest.raises(ValueError):
        functional.EpigraphOracle(f, "graph")


#####  Legendre  #####

def test_legendre_quadratic(quadratic):
    L = functional.legendre(quadratic)
    y = L.nodes[:, 0]
    bound = quadratic.spacing * np.max(np.abs(y))
    assert np.max(np.abs(L.flat_values - y ** 2 / 2)) <= bound

def test_legendre_of_zero():
    zero = functional.GridFunction(BOX, 31, np.zeros(31))
    L = functional.legendre(zero)
    np.testing.assert_allclose(L.flat_values, 3 * np.abs(L.nodes[:, 0]))

def test_legendre_of_infinity(caplog):
    top = functional.GridFunction(BOX, 11, np.full(11, np.inf))
    L = functional.legendre(top)
    assert np.all(L.flat_values == -np.inf)
    assert "identically" in caplog.text

def test_legendre_dual_box(quadratic):
    L = functional.legendre(quadratic, box=[(-1, 1)], resolution=11)
    assert L.resolution == (11,)
    np.testing.assert_allclose(L.flat_values, L.nodes[:, 0] ** 2 / 2, atol=1e-3)

def test_legendre_laws():
    rng = np.random.default_rng(11)
    for _ in range(20):
        phi = random_convex(rng)
        L = functional.legendre(phi)
        LL = functional.legendre(L)
        LLL = functional.legendre(LL)
        assert np.all(LL.flat_values <= phi.flat_values + 1e-9)
        np.testing.assert_allclose(LLL.flat_values, L.flat_values, atol=1e-9)

def test_legendre_recovers_convex():
    rng = np.random.default_rng(12)
    for _ in range(5):
        phi = random_convex(rng)
        LL = functional.legendre(functional.legendre(phi, box=[(-10, 10)], resolution=2001), box=BOX, resolution=61)
        np.testing.assert_allclose(LL.flat_values, phi.flat_values, atol=1e-9)

def test_legendre_quadratic_form():
    box = [(-2, 2), (-2, 2)]
    A = np.array([[2.0, 0.5], [0.5, 1.0]])
    inv = np.linalg.inv(A)
    phi = functional.GridFunction.from_callable(lambda p: np.einsum("ni,ij,nj->n", p, A, p) / 2, box, 81)
    L = functional.legendre(phi, box=[(-1, 1), (-1, 1)], resolution=21)
    expected = np.einsum("ni,ij,nj->n", L.nodes, inv, L.nodes) / 2
    assert np.max(np.abs(L.flat_values - expected)) <= phi.spacing * 2


#####  A transform  #####

def test_a_transform_matches_legendre(quadratic):
    A = functional.a_transform(quadratic)
    L = functional.legendre(quadratic)
    y = A.nodes[:, 0]
    use = np.abs(y) >= 2 / 3
    bound = quadratic.spacing * 3
    assert np.max(np.abs(A.flat_values[use] - L.flat_values[use])) <= bound
    assert A.flat_values[A.node_index([0])] == 0
    assert np.all(A.flat_values >= 0)

def test_a_transform_indicator():
    values = np.full(21, np.inf)
    values[10] = 0
    phi = functional.GridFunction(BOX, 21, values)
    assert np.all(functional.a_transform(phi).flat_values == 0)

def test_a_transform_quasi_involution(quadratic):
    A = functional.a_transform(quadratic)
    AA = functional.a_transform(A)
    assert np.all(AA.flat_values <= quadratic.flat_values + 1e-9)

def test_a_transform_rejects():
    with pytest.raises(functional.ClassViolation) as ex:
        functional.a_transform(functional.GridFunction(BOX, 7, [1, 1, 1, 0, -1, 1, 1]))
    assert ex.value.witness["value"] == -1
    with pytest.raises(functional.ClassViolation):
        functional.a_transform(functional.GridFunction(BOX, 7, [3, 2, 1, 0.5, 1, 2, 3]))
    with pytest.raises(functional.ClassViolation) as ex:
        functional.a_transform(functional.GridFunction(BOX, 7, [3, 2, 3, 0, 1, 2, 3]))
    assert ex.value.witness["node"] == [-1.0]

def test_a_transform_boundary_check():
    assert functional.a_transform_boundary_check()


#####  c transform and the hypograph bridge  #####

def test_c_transform_dot_is_legendre():
    rng = np.random.default_rng(4)
    psi = functional.GridFunction(BOX, 31, rng.uniform(-1, 1, 31))
    found = functional.c_transform(psi, dot)
    L = functional.legendre(psi.like(-psi.flat_values))
    np.testing.assert_allclose(found.flat_values, -L.flat_values[::-1], atol=1e-12)

def test_c_transform_zero():
    zero = functional.GridFunction(BOX, 11, np.zeros(11))
    out = functional.c_transform(zero, lambda x, y: np.zeros(np.broadcast_shapes(x.shape, y.shape)[:-1]))
    assert np.all(out.flat_values == 0)

def test_c_transform_laws():
    rng = np.random.default_rng(5)
    cost = lambda x, y: np.abs(x - y).sum(axis=-1) - dot(x, y)
    for _ in range(10):
        psi = functional.GridFunction(BOX, 25, rng.uniform(-2, 2, 25))
        c = functional.c_transform(psi, cost)
        cc = functional.c_transform(c, cost)
        ccc = functional.c_transform(cc, cost)
        assert np.all(cc.flat_values >= psi.flat_values - 1e-12)
        np.testing.assert_allclose(ccc.flat_values, c.flat_values, atol=1e-12)

def test_c_transform_order_reversing():
    rng = np.random.default_rng(6)
    small = functional.GridFunction(BOX, 25, rng.uniform(-2, 0, 25))
    big = small.like(small.flat_values + rng.uniform(0, 1, 25))
    assert np.all(functional.c_transform(small, dot).flat_values >= functional.c_transform(big, dot).flat_values)

def test_c_transform_infinite_cost():
    psi = functional.GridFunction(BOX, 3, [0, np.inf, 0])
    cost = lambda x, y: np.where(np.abs(x - y).sum(axis=-1) > 0, np.inf, 1.0)
    np.testing.assert_array_equal(functional.c_transform(psi, cost).flat_values, [1, -np.inf, 1])

def test_c_transform_rejects():
    psi = functional.GridFunction(BOX, 5, np.zeros(5))
    with pytest.raises(ValueError):
        functional.c_transform(psi, lambda x, y: x[..., 0] - 2 * y[..., 0])
    with pytest.raises(ValueError):
        functional.c_transform(psi, lambda x, y: np.full(np.broadcast_shapes(x.shape, y.shape)[:-1], -np.inf))

def test_hypograph_bridge_zero():
    zero = functional.GridFunction(BOX, 11, np.zeros(11))
    lifted = functional.hypograph_cost_bridge(lambda x, y: np.zeros(np.broadcast_shapes(x.shape, y.shape)[:-1]))
    assert lifted(np.array([1.0, -1.0]), np.array([2.0, 0.5])) == pytest.approx(0.5)
    T = functional.hypograph_dual(zero, lambda x, y: np.zeros(np.broadcast_shapes(x.shape, y.shape)[:-1]))
    np.testing.assert_array_equal(T([[0, 0], [1, -1], [1, 0.1]]), [True, True, False])

def test_hypograph_bridge_agrees():
    rng = np.random.default_rng(7)
    psi = functional.GridFunction(BOX, 31, rng.uniform(-1, 1, 31))
    T = functional.hypograph_dual(psi, dot)
    hypo = functional.EpigraphOracle(functional.c_transform(psi, dot), "hypo")
    y = np.repeat(psi.nodes, 20, axis=0)
    s = rng.uniform(-12, 12, size=(y.shape[0], 1))
    pts = np.column_stack([y, s])
    np.testing.assert_array_equal(T(pts), hypo(pts))

def test_hypograph_bridge_order_reversing():
    rng = np.random.default_rng(8)
    small = functional.GridFunction(BOX, 21, rng.uniform(-1, 0, 21))
    big = small.like(small.flat_values + 0.5)
    pts = np.column_stack([rng.uniform(-3, 3, 500), rng.uniform(-10, 10, 500)])
    assert np.all(functional.hypograph_dual(small, dot)(pts) >= functional.hypograph_dual(big, dot)(pts))


#####  Dual polarity, Rotem and sharp  #####

def test_dual_polar_fixes_k0(k0_profile):
    T = functional.dual_polar_functional(k0_profile)
    np.testing.assert_allclose(T.flat_values, k0_profile.flat_values, atol=2e-2)
    assert functional.dual_polar_class_check(T)

def test_dual_polar_fixes_k1(k1_profile):
    T = functional.dual_polar_functional(k1_profile)
    np.testing.assert_allclose(T.flat_values, k1_profile.flat_values, atol=2e-2)

def test_dual_polar_truncated_k1(k1_profile):
    T = functional.dual_polar_functional(k1_profile, recession=False)
    assert np.all(np.isfinite(T.flat_values))

def test_dual_polar_triple(k0_profile):
    T1 = functional.dual_polar_functional(k0_profile, recession=False)
    T2 = functional.dual_polar_functional(T1, recession=False, check=False)
    T3 = functional.dual_polar_functional(T2, recession=False, check=False)
    np.testing.assert_allclose(T3.flat_values, T1.flat_values, atol=1e-9)
    assert np.all(T2.flat_values <= k0_profile.flat_values + 1e-9)

def test_dual_polar_epigraph():
    profile = functional.GridFunction.from_callable(
        lambda p: np.maximum(np.sqrt(0.49 * p[:, 0] ** 2 + 1), 1 + 0.6 * p[:, 0]), BOX, 61)
    T = functional.dual_polar_functional(profile, recession=False)
    gens = geometry.PointSet(np.column_stack([profile.nodes, profile.flat_values]), rays=[[0, 1]])
    dual = geometry.dual_polar(gens)
    rng = np.random.default_rng(2)
    y = np.repeat(profile.nodes, 30, axis=0)
    pts = np.column_stack([y, rng.uniform(0, 6, size=y.shape[0])])
    np.testing.assert_array_equal(functional.EpigraphOracle(T)(pts), dual(pts))

def test_dual_polar_class_violation():
    shifted = functional.GridFunction.from_callable(lambda p: 2 + p[:, 0] ** 2, BOX, 31)
    with pytest.raises(functional.ClassViolation) as ex:
        functional.dual_polar_functional(shifted)
    assert ex.value.witness["node"][0] == pytest.approx(0, abs=1e-12)
    low = functional.GridFunction.from_callable(lambda p: 1 + p[:, 0] ** 2 - 0.5 * (np.abs(p[:, 0]) < 0.5), BOX, 31)
    assert functional.dual_polar_class_check(low).kind == "minimum"
    steep = functional.GridFunction.from_callable(lambda p: 1 + p[:, 0] ** 2, BOX, 31)
    assert functional.dual_polar_class_check(steep).kind == "legendre-range"

def test_rotem_fixes_v(k0_profile):
    T = functional.rotem_transform(k0_profile)
    np.testing.assert_allclose(T.flat_values, k0_profile.flat_values, atol=2e-2)
    with pytest.raises(ValueError):
        functional.rotem_transform(k0_profile.like(k0_profile.flat_values - 1))

def test_rotem_order_reversing(k0_profile):
    bigger = k0_profile.like(k0_profile.flat_values + np.abs(k0_profile.nodes[:, 0]))
    assert np.all(functional.rotem_transform(k0_profile).flat_values
        >= functional.rotem_transform(bigger).flat_values - 1e-12)

def test_rotem_profile_decreasing_at_end(caplog):
    # Convex and positive, but still falling at the right edge of the box
    phi = functional.GridFunction.from_callable(lambda p: (p[:, 0] - 3) ** 2 + 1, [(-2, 2)], 41)
    T = functional.rotem_transform(phi)
    assert np.all(np.isfinite(T.flat_values))
    assert "right end" in caplog.text
    assert "left end" not in caplog.text
    nodes_only = functional.rotem_transform(phi, recession=False)
    assert np.all(T.flat_values >= nodes_only.flat_values)

def test_sharp_relation(k0_profile):
    T = functional.dual_polar_functional(k0_profile, recession=False)
    sharp = functional.sharp_transform(k0_profile.like(1 / k0_profile.flat_values))
    np.testing.assert_allclose(sharp.flat_values[::-1], 1 / T.flat_values, rtol=1e-12)
    with pytest.raises(ValueError):
        functional.sharp_transform(k0_profile, beta=0)


#####  Laws over random grids  #####

@hypothesis.given(grid_functions())
@hypothesis.settings(max_examples=30, deadline=None)
def test_legendre_idempotent(phi):
    L = functional.legendre(phi)
    LLL = functional.legendre(functional.legendre(L))
    np.testing.assert_allclose(LLL.flat_values, L.flat_values, atol=1e-9)
    assert np.all(functional.legendre(L).flat_values <= phi.flat_values + 1e-9)
