import pytest
import numpy as np

import orqi.measure as measure
import orqi.geometry as geometry
import orqi.bodies as bodies
from orqi.algebra import PreconditionFailed

SAMPLES = 2 * 10 ** 5

def ball(radius, centre=(0.0, 0.0)):
    centre = np.asarray(centre, dtype=float)
    return geometry.MembershipOracle(len(centre), margin=lambda p: radius - np.linalg.norm(p - centre, axis=1))

@pytest.fixture
def k0():
    return geometry.k0_oracle(2)


#####  McEstimate  #####

def test_McEstimate():
    e = measure.McEstimate.from_hits(5, 10, 7)
    assert e.mean == pytest.approx(0.5)
    assert e.stderr == pytest.approx(np.sqrt(0.025))
    assert e.to_dict() == {"mean": 0.5, "stderr": e.stderr, "n_samples": 10, "seed": 7}
    assert e.agrees(0.6)
    assert not e.agrees(1.0, band=2)
    assert e.agrees(measure.McEstimate(0.9, 0.1, 10, 0))
    with pytest.raises(ValueError):
        measure.McEstimate(0.5, 0.1, 0, 0)


#####  Gaussian measure  #####

def test_gaussian_measure_of_everything():
    everything = geometry.MembershipOracle(3, predicate=lambda p: np.ones(p.shape[0], dtype=bool))
    e = measure.gaussian_measure(everything, samples=measure.MIN_SAMPLES, seed=3)
    assert e.mean == 1
    assert e.stderr == 0
    assert e.n_samples == measure.MIN_SAMPLES

def test_gaussian_measure_of_halfspace():
    e = measure.gaussian_measure(bodies.named_body("halfspace").oracle, samples=SAMPLES, seed=1)
    assert e.agrees(0.5)

def test_gaussian_measure_arguments(k0):
    with pytest.raises(ValueError):
        measure.gaussian_measure(k0, samples=measure.MIN_SAMPLES - 1)
    with pytest.raises(ValueError):
        measure.gaussian_measure(k0, n=3, samples=measure.MIN_SAMPLES)

def test_gaussian_measure_reproducible(k0):
    samples = 3 * measure.BLOCK_SIZE + 17
    first = measure.gaussian_measure(k0, samples=samples, seed=5)
    second = measure.gaussian_measure(k0, samples=samples, seed=5)
    threaded = measure.gaussian_measure(k0, samples=samples, seed=5, workers=3)
    assert first.to_dict() == second.to_dict()
    assert first.to_dict() == threaded.to_dict()
    assert measure.gaussian_measure(k0, samples=samples, seed=6).mean != first.mean

def test_gaussian_measure_monotone():
    small = measure.gaussian_measure(ball(1.0), samples=SAMPLES, seed=2)
    large = measure.gaussian_measure(ball(1.5), samples=SAMPLES, seed=2)
    assert small.mean <= large.mean
    # gamma_2(r B) = 1 - exp(-r^2 / 2)
    assert small.agrees(1 - np.exp(-0.5))

def test_gamma_k0_reference(k0):
    reference = measure.gamma_k0_reference(2)
    assert 0 < reference < 0.5
    assert measure.gaussian_measure(k0, samples=SAMPLES, seed=11).agrees(reference)
    reference3 = measure.gamma_k0_reference(3)
    assert reference3 < reference
    assert measure.gaussian_measure(geometry.k0_oracle(3), samples=SAMPLES, seed=12).agrees(reference3)
    with pytest.raises(ValueError):
        measure.gamma_k0_reference(1)


#####  The measure nu  #####

def test_nu_density():
    d = measure.nu_density([[0, 1], [0, -1], [0, 0], [1, 2]])
    assert d[0] == pytest.approx(np.exp(-0.5) / (2 * np.pi))
    assert d[1] == 0
    assert d[2] == 0
    assert d[3] == pytest.approx(np.exp(-2 / 8) / (2 * np.pi) / 8)

def test_nu_of_upper_half_space():
    upper = geometry.MembershipOracle(2, margin=lambda p: p[:, 1])
    assert measure.nu_measure(upper, samples=SAMPLES, seed=4).agrees(0.5)

def test_nu_of_J_k0(k0):
    JK0 = geometry.j_transform(k0)
    gamma = measure.gaussian_measure(k0, samples=SAMPLES, seed=8)
    nu = measure.nu_measure(JK0, samples=SAMPLES, seed=8)
    assert nu.mean == pytest.approx(gamma.mean, abs=1e-4)
    assert measure.nu_measure(JK0, samples=SAMPLES, seed=9).agrees(gamma)

def test_nu_importance_sampler(k0):
    # J(K0) is the upper half of the unit disc
    half_disc = ball(1.0).intersect(geometry.MembershipOracle(2, margin=lambda p: p[:, 1]))
    importance = measure.nu_measure_importance(half_disc, [(-1, 1), (0, 1)], samples=SAMPLES, seed=13)
    pushforward = measure.nu_measure(geometry.j_transform(k0), samples=SAMPLES, seed=14)
    assert importance.agrees(pushforward)
    assert importance.agrees(measure.gamma_k0_reference(2))

def test_nu_importance_arguments():
    with pytest.raises(ValueError):
        measure.nu_measure_importance(ball(1.0), [(-1, 1), (-1, 1)], samples=measure.MIN_SAMPLES)
    with pytest.raises(ValueError):
        measure.nu_measure_importance(ball(1.0), [(-1, 1)], samples=measure.MIN_SAMPLES)

@pytest.mark.parametrize("seed", range(5))
def test_J_preserves_measure(seed):
    rng = np.random.default_rng(seed)
    radius = rng.uniform(0.5, 1.5)
    centre = (rng.uniform(-1, 1), radius + rng.uniform(0.1, 1))
    K = ball(radius, centre)
    gamma = measure.gaussian_measure(K, samples=SAMPLES, seed=seed)
    JK = geometry.j_transform(K)
    assert measure.nu_measure(JK, samples=SAMPLES, seed=seed).mean == pytest.approx(gamma.mean, abs=1e-4)
    assert measure.nu_measure(JK, samples=SAMPLES, seed=seed + 100).agrees(gamma, band=4)


#####  Essential symmetry and the product inequality  #####

def test_essential_symmetry(k0):
    assert measure.essential_symmetry_check(k0) == 1.0
    assert measure.essential_symmetry_check(bodies.named_body("k1").oracle, u=[0, 1]) < 0.9
    bowl = geometry.MembershipOracle(2, margin=lambda p: p[:, 1] - np.sqrt(p[:, 0] ** 2 + 1) - 0.1 * p[:, 0] ** 2)
    assert measure.essential_symmetry_check(bowl, seed=3) == 1.0

def test_essential_symmetry_needs_subclass():
    with pytest.raises(PreconditionFailed):
        measure.essential_symmetry_check(bodies.named_body("halfspace").oracle)

def test_bs_experiment_equality_case():
    report = measure.bs_experiment(bodies.named_body("k0"), samples=SAMPLES, seed=1)
    assert report["holds"]
    assert abs(report["margin_sigma"]) <= measure.SIGMA_BAND
    assert report["gamma_K"]["mean"] == report["gamma_K0"]["mean"]
    assert report["product"] == pytest.approx(report["gamma_K0_sq"], rel=1e-2)
    assert report["samples"] == SAMPLES
    assert report["seed"] == 1
    assert "exploratory" not in report

@pytest.mark.parametrize("s", [0.5, 0.75, 1.5, 2.0, 3.0])
def test_bs_experiment_perturbed(s):
    report = measure.bs_experiment(bodies.perturbed_k0(s), samples=SAMPLES, seed=2)
    assert report["holds"]
    assert report["product"] < report["gamma_K0_sq"]

def test_bs_experiment_slab():
    report = measure.bs_experiment(bodies.named_body("slab"), samples=SAMPLES, seed=3)
    assert report["gamma_TK"]["mean"] == 0
    assert report["product"] == 0
    assert report["holds"]

def test_bs_experiment_asymmetric():
    with pytest.raises(measure.SymmetryFailed) as info:
        measure.bs_experiment(bodies.named_body("k1"), samples=measure.MIN_SAMPLES)
    assert info.value.witness["body"] == "k1"
    report = measure.bs_experiment(bodies.named_body("k1"), samples=measure.MIN_SAMPLES, exploratory=True)
    assert report["exploratory"]


#####  Prekopa-Leindler condition  #####

def test_hull_set():
    H = measure.hull_set([[1, 1], [1, -1], [-1, 1], [-1, -1], [0, 0]])
    assert len(H) == 4
    assert list(H([[0.5, 0.5], [1.5, 0], [1, 1]])) == [True, False, True]

def test_prekopa_ball():
    disc = bodies.named_body("ball").oracle
    rows = measure.prekopa_table(disc, polar_set=disc, samples=10 ** 4)
    assert len(rows) == 100
    for row in rows:
        if row["s"] == row["t"]:
            assert row["lhs"] == pytest.approx(row["rhs"])
    assert measure.prekopa_condition_check(disc, polar_set=disc, samples=10 ** 4)

def test_prekopa_square():
    square = geometry.PointSet([[1, 1], [1, -1], [-1, 1], [-1, -1]])
    verdict = measure.prekopa_condition_check(square, samples=10 ** 5, seed=1)
    assert verdict
    assert not verdict.exhaustive

@pytest.mark.parametrize("seed", range(3))
def test_prekopa_random_symmetric(seed):
    rng = np.random.default_rng(seed)
    v = np.column_stack([rng.uniform(0, 2, 4), rng.uniform(0, 1, 4)])
    vertices = np.concatenate([v, v * [-1, 1], v * [1, -1], -v, [[0, 1], [0, -1]]])
    s = np.linspace(0.1, 1, 10)
    assert measure.prekopa_condition_check(geometry.PointSet(vertices), s, s, samples=10 ** 5, seed=seed)

def test_prekopa_arguments():
    with pytest.raises(ValueError):
        measure.prekopa_table(bodies.named_body("ball").oracle)
    square = geometry.PointSet([[1, 1], [1, -1], [-1, 1], [-1, -1]])
    with pytest.raises(ValueError):
        measure.prekopa_table(square, s_values=[0.5, 1.5])
    with pytest.raises(ValueError):
        measure.prekopa_table(square, s_values=[0.0, 0.5])
