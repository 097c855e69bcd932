"""
bodies
~~~~~~

Built-in named sets in the plane, so that experiments can be run without
data files.  Each :class:`Body` has a membership oracle and, where it makes
sense, generators (for transforms of point sets) and a profile (when the set
is the epigraph of a function of `x`, with points written `(x, t)`).
"""

import logging as _logging
import numpy as _np

from . import geometry as _geometry
from .functional import GridFunction

_logger = _logging.getLogger(__name__)

#: Points per arc / circle when sampling boundaries.
BOUNDARY_SAMPLES = 720


class Body():
    """A named set.

    :param name: Name, for reports.
    :param oracle: Membership oracle.
    :param generators: Optional :class:`PointSet` generating the set (for a
      bounded set, its boundary is enough).
    :param profile: Optional callable `phi` of an `(N,)` array, when the set
      is `{ (x, t) : t >= phi(x) }`.
    """
    def __init__(self, name, oracle, generators=None, profile=None):
        self.name = name
        self.oracle = oracle
        self.generators = generators
        self.profile = profile

    @property
    def dim(self):
        return self.oracle.dim

    def __repr__(self):
        return "Body({!r})".format(self.name)

    def dual_polar(self):
        """The dual polar, from the generators."""
        if self.generators is None:
            raise ValueError("Body '{}' has no generators".format(self.name))
        return _geometry.dual_polar(self.generators)

    def grid_profile(self, box=(-3.0, 3.0), resolution=301):
        """The profile sampled as a one dimensional :class:`GridFunction`."""
        if self.profile is None:
            raise ValueError("Body '{}' is not an epigraph".format(self.name))
        return GridFunction.from_callable(lambda p: self.profile(p[:, 0]), [box], resolution)

    @staticmethod
    def from_profile(name, phi, span=8.0, nodes=801):
        """The epigraph of a convex function `phi` of one variable with
        `phi(0) = 1` and at most linear growth.  Generators are graph points at
        `x = sinh(u)`, `|u| <= span`, with the vertical ray and the rays along
        the secants at the two ends.
        """
        x = _np.sinh(_np.linspace(-span, span, nodes))
        t = phi(x)
        right = (t[-1] - t[-2]) / (x[-1] - x[-2])
        left = (t[0] - t[1]) / (x[1] - x[0])
        rays = [[0.0, 1.0], [1.0, right], [-1.0, left]]
        oracle = _geometry.MembershipOracle(2, margin=lambda p: p[:, 1] - phi(p[:, 0]))
        return Body(name, oracle, _geometry.PointSet(_np.column_stack([x, t]), rays), phi)

    @staticmethod
    def from_grid_function(name, f):
        """The epigraph of a sampled profile, continued linearly past the box
        along the secants at its ends.

        :param f: One dimensional :class:`GridFunction`, finite everywhere.
        """
        if f.dim != 1:
            raise ValueError("Should be a profile of one variable")
        x = f.nodes[:, 0]
        t = f.flat_values
        if not _np.all(_np.isfinite(t)) or len(x) < 2:
            raise ValueError("Should be a finite profile with at least two nodes")
        right = (t[-1] - t[-2]) / (x[-1] - x[-2])
        left = (t[0] - t[1]) / (x[1] - x[0])
        def phi(s):
            s = _np.asarray(s, dtype=float)
            inside = _np.interp(s, x, t)
            return _np.where(s > x[-1], t[-1] + right * (s - x[-1]),
                _np.where(s < x[0], t[0] + left * (x[0] - s), inside))
        rays = [[0.0, 1.0], [1.0, right], [-1.0, left]]
        oracle = _geometry.MembershipOracle(2, margin=lambda p: p[:, 1] - phi(p[:, 0]))
        return Body(name, oracle, _geometry.PointSet(_np.column_stack([x, t]), rays), phi)


def _circle(radius, count=BOUNDARY_SAMPLES, centre=(0.0, 0.0)):
    angles = 2 * _np.pi * _np.arange(count) / count
    return _np.column_stack([_np.cos(angles), _np.sin(angles)]) * radius + centre

def _ball_oracle(radius, centre=(0.0, 0.0)):
    centre = _np.asarray(centre, dtype=float)
    return _geometry.MembershipOracle(2, margin=lambda p: radius - _np.linalg.norm(p - centre, axis=1),
        bounding_box=[(centre[0] - radius, centre[0] + radius), (centre[1] - radius, centre[1] + radius)])

def k0_profile(x):
    return _np.sqrt(_np.asarray(x, dtype=float) ** 2 + 1)

def k1_profile(x):
    return _np.where(_np.asarray(x, dtype=float) >= 0, 1.0, _np.inf)

def k2_profile(x):
    x = _np.asarray(x, dtype=float)
    return _np.maximum(_np.maximum(1.0, 1 + x), -x)

def slab_profile(x):
    return _np.ones_like(_np.asarray(x, dtype=float))

def perturbed_k0(s):
    """The epigraph of `sqrt(s^2 x^2 + 1)`: essentially symmetric, with closest
    point `(0, 1)`, and equal to `K0` at `s = 1`."""
    if s <= 0:
        raise ValueError("Should be s > 0")
    return Body.from_profile("perturbed-{}".format(s), lambda x: _np.sqrt(s * s * x * x + 1))

def reuleaux_vertices(epsilon=1.0):
    angles = _np.pi / 2 + 2 * _np.pi * _np.arange(3) / 3
    return _np.column_stack([_np.cos(angles), _np.sin(angles)]) * epsilon / _np.sqrt(3)

def reuleaux(epsilon=1.0, count=BOUNDARY_SAMPLES):
    """The Reuleaux triangle of width `epsilon`: the intersection of three
    discs of radius `epsilon` centred at the vertices of an equilateral
    triangle with side `epsilon`.  Generators sample the three arcs."""
    vertices = reuleaux_vertices(epsilon)
    oracle = _ball_oracle(epsilon, vertices[0])
    for v in vertices[1:]:
        oracle = oracle.intersect(_ball_oracle(epsilon, v))
    arcs = []
    per_arc = max(2, count // 3)
    for k, v in enumerate(vertices):
        a, b = vertices[(k + 1) % 3] - v, vertices[(k + 2) % 3] - v
        start, stop = _np.arctan2(a[1], a[0]), _np.arctan2(b[1], b[0])
        if stop < start:
            stop += 2 * _np.pi
        angles = _np.linspace(start, stop, per_arc)
        arcs.append(v + epsilon * _np.column_stack([_np.cos(angles), _np.sin(angles)]))
    return Body("reuleaux", oracle, _geometry.PointSet(_np.concatenate(arcs)))


def _named():
    square_oracle = _geometry.MembershipOracle(2, margin=lambda p: 1 - _np.max(_np.abs(p), axis=1),
        bounding_box=[(-1, 1), (-1, 1)])
    root2 = _np.sqrt(2)
    return {
        "k0": lambda: Body("k0", _geometry.k0_oracle(2), _geometry.k0_generators(), k0_profile),
        "k1": lambda: Body("k1", _geometry.k1_oracle(), _geometry.k1_generators(), k1_profile),
        "k2": lambda: Body("k2", _geometry.k2_oracle(), _geometry.k2_generators(), k2_profile),
        "slab": lambda: Body("slab", _geometry.MembershipOracle(2, margin=lambda p: p[:, 1] - 1),
            _geometry.PointSet([[0.0, 1.0]], rays=[[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]]), slab_profile),
        "square": lambda: Body("square", square_oracle, _geometry.PointSet([[1, 1], [1, -1], [-1, 1], [-1, -1]])),
        "ball": lambda: Body("ball", _ball_oracle(1.0), _geometry.PointSet(_circle(1.0))),
        "halfspace": lambda: Body("halfspace", _geometry.MembershipOracle(2, margin=lambda p: p[:, 0])),
        "flower": lambda: Body("flower", _geometry.MembershipOracle(2, margin=lambda p: _np.linalg.norm(p, axis=1) - root2),
            _geometry.PointSet(_circle(root2))),
        "reuleaux": reuleaux,
    }

#: Names accepted by :func:`named_body`.
NAMES = ("k0", "k1", "k2", "slab", "square", "ball", "halfspace", "flower", "reuleaux")

def named_body(name, epsilon=None):
    """Look up a built-in body by name.

    :param epsilon: Width, for `"reuleaux"` only.

    :raises ValueError: For an unknown name.
    """
    table = _named()
    if name not in table:
        raise ValueError("Should be one of {}, not {!r}".format(", ".join(NAMES), name))
    if name == "reuleaux" and epsilon is not None:
        return reuleaux(epsilon)
    return table[name]()
