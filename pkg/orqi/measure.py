"""
measure
~~~~~~~

Monte Carlo estimates of Gaussian measure, and the experiments built on
them: the product inequality `gamma(K) gamma(TK) <= gamma(K0)^2` for `T`
dual polarity and `K` essentially symmetric, the measure `nu` which the J
transform pushes the Gaussian measure onto, and the pointwise condition
used with the Prekopa-Leindler inequality.

Sampling is split into blocks of fixed size, each with its own generator
spawned from the seed, so estimates do not depend on the number of worker
threads.
"""

import logging as _logging
import numpy as _np
import scipy.integrate as _integrate
import scipy.spatial as _spatial
import scipy.stats as _stats

from . import geometry as _geometry
from .relation import Verdict
from .util.grid import run_jobs

_logger = _logging.getLogger(__name__)

#: Default number of samples for the planar experiments.
DEFAULT_SAMPLES = 10 ** 6
#: Smallest number of samples accepted by :func:`gaussian_measure`.
MIN_SAMPLES = 10 ** 4
#: Width, in combined standard errors, of every acceptance band.
SIGMA_BAND = 3
#: Samples drawn per generator.
BLOCK_SIZE = 1 << 16
#: Members closer than this to the boundary are ignored by the symmetry check.
BOUNDARY_BAND = 1e-9
#: Largest shortfall from 1 accepted as essentially symmetric.
SYMMETRY_BAND = 1e-3


class SymmetryFailed(ValueError):
    """A body given to :func:`bs_experiment` is not essentially symmetric.
    The witness holds the measured fraction and the direction."""
    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class McEstimate():
    """A Monte Carlo estimate.

    :param mean: The estimate.
    :param stderr: Its standard error.
    :param n_samples: Number of samples, positive.
    :param seed: The seed which reproduces it.
    """
    def __init__(self, mean, stderr, n_samples, seed):
        if n_samples <= 0:
            raise ValueError("Should be a positive number of samples")
        self.mean = float(mean)
        self.stderr = float(stderr)
        self.n_samples = int(n_samples)
        self.seed = seed

    @staticmethod
    def from_hits(hits, n_samples, seed):
        """The estimate of an indicator integral, `hits` out of `n_samples`."""
        p = hits / n_samples
        return McEstimate(p, _np.sqrt(p * (1 - p) / n_samples), n_samples, seed)

    def agrees(self, other, band=SIGMA_BAND):
        """Do the two estimates differ by at most `band` combined standard
        errors?  `other` may be a plain number."""
        if isinstance(other, McEstimate):
            mean, sigma = other.mean, _np.hypot(self.stderr, other.stderr)
        else:
            mean, sigma = float(other), self.stderr
        return abs(self.mean - mean) <= band * sigma

    def to_dict(self):
        return {"mean": self.mean, "stderr": self.stderr, "n_samples": self.n_samples, "seed": self.seed}

    def __repr__(self):
        return "McEstimate({} +/- {}, n={})".format(self.mean, self.stderr, self.n_samples)


def _block_sizes(samples):
    full, rest = divmod(samples, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])

def _blocks(dim, samples, seed, func, workers=1):
    """Apply `func` to standard normal blocks of shape `(size, dim)` and
    return the list of results, in block order."""
    sizes = _block_sizes(samples)
    children = _np.random.SeedSequence(seed).spawn(len(sizes))
    def job(i):
        rng = _np.random.default_rng(children[i])
        return func(rng.standard_normal((sizes[i], dim)))
    return run_jobs(range(len(sizes)), job, workers)

def _check_samples(samples):
    samples = int(samples)
    if samples < MIN_SAMPLES:
        raise ValueError("Should be at least {} samples".format(MIN_SAMPLES))
    return samples


#####  Gaussian measure  #####

def gaussian_measure(K, n=None, samples=DEFAULT_SAMPLES, seed=0, workers=1):
    """Estimate the standard Gaussian measure of `K`.

    :param K: Oracle.
    :param n: The dimension, if given must equal `K.dim`.
    :param workers: Threads used for the blocks; the result does not depend
      on it.

    :return: :class:`McEstimate`
    """
    n = K.dim if n is None else int(n)
    if n != K.dim:
        raise ValueError("Should be a set in dimension {}".format(n))
    samples = _check_samples(samples)
    _logger.debug("Sampling %s points in dimension %s", samples, n)
    hits = _blocks(n, samples, seed, lambda p: int(_np.count_nonzero(K(p))), workers)
    return McEstimate.from_hits(sum(hits), samples, seed)

def gamma_k0_reference(n=2):
    """The Gaussian measure of `K0 = { (x, t) : t >= sqrt(|x|^2 + 1) }` by
    quadrature: in the plane the integral over `x` of `P(t >= sqrt(x^2 + 1))`,
    in general the same integral over the `chi` distribution of `|x|`."""
    if n < 2:
        raise ValueError("Should be n >= 2")
    if n == 2:
        integrand = lambda x: _stats.norm.sf(_np.sqrt(x * x + 1)) * _stats.norm.pdf(x)
        value, _ = _integrate.quad(integrand, -_np.inf, _np.inf)
    else:
        integrand = lambda r: _stats.norm.sf(_np.sqrt(r * r + 1)) * _stats.chi.pdf(r, n - 1)
        value, _ = _integrate.quad(integrand, 0, _np.inf)
    return value


#####  The measure nu  #####

def nu_density(points):
    """Density of `nu` on `R^(n-1) x (0, inf)`,

        (2 pi)^(-n/2) exp(-(|x|^2 + 1) / 2z^2) z^-(n+1),

    and zero for `z <= 0`."""
    points = _np.atleast_2d(_np.asarray(points, dtype=float))
    n = points.shape[1]
    z = points[:, -1]
    out = _np.zeros(points.shape[0])
    up = z > 0
    if _np.any(up):
        zu = z[up]
        r2 = _np.sum(points[up, :-1] ** 2, axis=1)
        out[up] = (2 * _np.pi) ** (-n / 2) * _np.exp(-(r2 + 1) / (2 * zu * zu)) * _geometry.j_jacobian(points[up])
    return out

def nu_measure(L, samples=DEFAULT_SAMPLES, seed=0, workers=1):
    """Estimate `nu(L)` as the Gaussian measure of `F(L)`, `F` the point map
    of the J transform (its own inverse).  Points of `L` with `z <= 0` carry
    no mass."""
    return gaussian_measure(_geometry.j_transform(L), samples=samples, seed=seed, workers=workers)

def nu_measure_importance(L, box, samples=DEFAULT_SAMPLES, seed=0):
    """Estimate `nu(L)` for `L` inside `box` by integrating the density
    against uniform samples of the box.

    :param box: Sequence of `(low, high)` pairs; the last axis should lie in
      `z >= 0`.
    """
    samples = _check_samples(samples)
    box = _np.asarray(box, dtype=float)
    if box.ndim != 2 or box.shape != (L.dim, 2) or _np.any(box[:, 1] <= box[:, 0]):
        raise ValueError("Should be one (low, high) pair per axis")
    if box[-1, 0] < 0:
        raise ValueError("Should be a box in the upper half space")
    volume = float(_np.prod(box[:, 1] - box[:, 0]))
    rng = _np.random.default_rng(seed)
    total, total_sq = 0.0, 0.0
    for size in _block_sizes(samples):
        p = box[:, 0] + rng.random((size, L.dim)) * (box[:, 1] - box[:, 0])
        w = _np.where(L(p), nu_density(p), 0.0) * volume
        total += w.sum()
        total_sq += (w * w).sum()
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return McEstimate(mean, _np.sqrt(var / samples), samples, seed)


#####  Essential symmetry and the product inequality  #####

def _reflect(points, u):
    """Reflect `(x, t)`, `t` the component along `u`, to `(-x, t)`."""
    return 2 * (points @ u)[:, None] * u[None, :] - points

def essential_symmetry_check(K, u=None, samples=MIN_SAMPLES, seed=0):
    """The fraction of sampled members `x + t u` of `K` for which `-x + t u`
    is also a member.  Members within :data:`BOUNDARY_BAND` of the boundary,
    when the oracle knows margins, are skipped.

    :param u: Unit direction; found by :func:`geometry.subclass_of` if
      omitted.

    :raises PreconditionFailed: If `K` is not in any subclass.
    :raises ValueError: If no members were found.
    """
    from .algebra import PreconditionFailed
    sub = _geometry.subclass_of(K)
    if not sub:
        raise PreconditionFailed("Should be a set in some subclass", {"reason": sub.reason})
    if u is None:
        u = sub.u
    u = _np.asarray(u, dtype=float)
    u = u / _np.linalg.norm(u)
    rng = _np.random.default_rng(seed)
    points = 2 * sub.a * u + 3 * rng.standard_normal((int(samples), K.dim))
    inside = K(points)
    margins = K.margins(points)
    if margins is not None:
        inside &= margins > BOUNDARY_BAND
    members = points[inside]
    if members.shape[0] == 0:
        raise ValueError("Should be a set with members near its closest point")
    fraction = float(_np.mean(K(_reflect(members, u))))
    _logger.debug("Essential symmetry along %s: %s of %s members", u, fraction, members.shape[0])
    return fraction

def bs_experiment(body, samples=DEFAULT_SAMPLES, seed=0, workers=1, exploratory=False):
    """Estimate `gamma(K)`, `gamma(TK)` and `gamma(K0)` in the plane, with
    `T` dual polarity computed from the generators of `body`, and test

        gamma(K) gamma(TK) <= gamma(K0)^2.

    The three estimates share one sample stream.  The inequality "holds" if
    the product exceeds `gamma(K0)^2` by at most :data:`SIGMA_BAND` combined
    standard errors.

    :param body: A :class:`bodies.Body` with generators.
    :param exploratory: Run asymmetric bodies anyway; the report says so.

    :raises SymmetryFailed: If `body` is not essentially symmetric (unless
      exploratory).

    :return: Report dictionary.
    """
    samples = _check_samples(samples)
    symmetry = essential_symmetry_check(body.oracle, seed=seed)
    if symmetry < 1 - SYMMETRY_BAND:
        if not exploratory:
            raise SymmetryFailed("Should be an essentially symmetric body",
                {"body": body.name, "fraction": symmetry})
        _logger.warning("Body %s is not essentially symmetric (%s); exploratory run", body.name, symmetry)
    TK = body.dual_polar()
    K0 = _geometry.k0_oracle(body.dim)
    oracles = [body.oracle, TK, K0]
    counts = _blocks(body.dim, samples, seed,
        lambda p: [int(_np.count_nonzero(K(p))) for K in oracles], workers)
    gK, gTK, gK0 = [McEstimate.from_hits(sum(c[i] for c in counts), samples, seed) for i in range(3)]
    product = gK.mean * gTK.mean
    reference = gK0.mean ** 2
    sigma = _np.sqrt((gTK.mean * gK.stderr) ** 2 + (gK.mean * gTK.stderr) ** 2 + (2 * gK0.mean * gK0.stderr) ** 2)
    excess = product - reference
    margin = excess / sigma if sigma > 0 else (0.0 if excess <= 0 else _np.inf)
    report = {
        "body": body.name,
        "gamma_K": gK.to_dict(),
        "gamma_TK": gTK.to_dict(),
        "gamma_K0": gK0.to_dict(),
        "product": product,
        "gamma_K0_sq": reference,
        "margin_sigma": float(margin),
        "symmetry": symmetry,
        "seed": seed,
        "samples": samples,
        "holds": bool(margin <= SIGMA_BAND),
    }
    if exploratory:
        report["exploratory"] = True
    _logger.info("Product %s against %s (%s sigma)", product, reference, margin)
    return report


#####  The pointwise condition for Prekopa-Leindler  #####

def hull_set(vertices):
    """The convex hull of `vertices` as a :class:`geometry.HalfspaceSet`."""
    vertices = _np.asarray(vertices, dtype=float)
    hull = _spatial.ConvexHull(vertices)
    # Facets are normal . x + offset <= 0
    return _geometry.HalfspaceSet(hull.equations[:, :-1], -hull.equations[:, -1], "<=")

def _section_measure(L, heights, section_points):
    """`gamma_(n-1)({ y : (h y, h) in L })` for each height `h`, with
    standard errors, from one fixed sample of `R^(n-1)`."""
    N = section_points.shape[0]
    means = []
    for h in heights:
        p = _np.column_stack([h * section_points, _np.full(N, h)])
        means.append(_np.count_nonzero(L(p)) / N)
    means = _np.array(means)
    return means, _np.sqrt(means * (1 - means) / N)

def _weight(s):
    s = _np.asarray(s, dtype=float)
    return _np.exp(-1 / (2 * s * s)) / (s * s)

def prekopa_table(L, s_values=None, t_values=None, samples=10 ** 5, seed=0, polar_set=None):
    """Evaluate both sides of `f(s) g(t) <= h(sqrt(st))^2`, where

        f(s) = exp(-1/2s^2) s^-2 gamma_(n-1)({ x : (sx, s) in L }),

    `g` is the same with the polar of `L`, and `h` the same with the unit
    ball.  Sections are estimated from one sample of `samples` points.

    :param L: :class:`geometry.PointSet` of the vertices of a centrally
      symmetric polytope, or an oracle (then `polar_set` is needed).
    :param s_values: Values in `(0, 1]`, default ten equally spaced from 0.1.

    :return: List of rows `{s, t, lhs, rhs, sigma}`.
    """
    if isinstance(L, _geometry.PointSet):
        polar_set = _geometry.polar(L) if polar_set is None else polar_set
        L = hull_set(L.points)
    elif polar_set is None:
        raise ValueError("Should give the polar set of an oracle")
    s_values = _np.linspace(0.1, 1.0, 10) if s_values is None else _np.asarray(s_values, dtype=float)
    t_values = s_values if t_values is None else _np.asarray(t_values, dtype=float)
    if _np.any(s_values <= 0) or _np.any(s_values > 1) or _np.any(t_values <= 0) or _np.any(t_values > 1):
        raise ValueError("Should be s, t in (0, 1]")
    n = L.dim
    section_points = _np.random.default_rng(seed).standard_normal((int(samples), n - 1))
    ball = _geometry.MembershipOracle(n, margin=lambda p: 1 - _np.linalg.norm(p, axis=1))
    fm, fs = _section_measure(L, s_values, section_points)
    gm, gs = _section_measure(polar_set, t_values, section_points)
    f, f_err = _weight(s_values) * fm, _weight(s_values) * fs
    g, g_err = _weight(t_values) * gm, _weight(t_values) * gs
    rows = []
    for i, s in enumerate(s_values):
        r = _np.sqrt(s * t_values)
        hm, hs = _section_measure(ball, r, section_points)
        h, h_err = _weight(r) * hm, _weight(r) * hs
        for j, t in enumerate(t_values):
            sigma = _np.sqrt((g[j] * f_err[i]) ** 2 + (f[i] * g_err[j]) ** 2 + (2 * h[j] * h_err[j]) ** 2)
            rows.append({"s": float(s), "t": float(t), "lhs": float(f[i] * g[j]),
                "rhs": float(h[j] ** 2), "sigma": float(sigma)})
    return rows

def prekopa_condition_check(L, s_values=None, t_values=None, samples=10 ** 5, seed=0, polar_set=None):
    """Check `f(s) g(t) <= h(sqrt(st))^2`, within :data:`SIGMA_BAND` standard
    errors, at every pair; see :func:`prekopa_table`.

    :return: :class:`Verdict` (not exhaustive), with the first failing row as
      witness.
    """
    return prekopa_verdict(prekopa_table(L, s_values, t_values, samples, seed, polar_set))

def prekopa_verdict(rows):
    """The verdict for rows of :func:`prekopa_table`."""
    for row in rows:
        if row["lhs"] > row["rhs"] + SIGMA_BAND * row["sigma"]:
            return Verdict.violation("prekopa", row, exhaustive=False)
    return Verdict.passed(exhaustive=False)
