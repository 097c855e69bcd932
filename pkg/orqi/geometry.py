"""
geometry
~~~~~~~~

Order reversing quasi involutions on subsets of `R^n`.  Sets come in three
forms:

  - :class:`PointSet`, generators (points and, optionally, recession rays),
    the input of every transform here;
  - :class:`HalfspaceSet`, finite intersections of closed halfspaces, which is
    what polarity-type transforms of a point set are;
  - :class:`MembershipOracle`, a vectorised predicate, for everything else.

Every transform `T` here is of the form

    T(A) = { y : c(x,y) >= 0 for all x in A }

for some symmetric cost `c`, so is computed generator by generator.  The
oracles also report a signed "margin" (positive inside) so that grid
comparisons can leave out nodes which sit on a boundary.
"""

import logging as _logging
import numpy as _np
import scipy.optimize as _optimize
import scipy.spatial.distance as _distance

from .relation import Verdict
from .util import util as _util
from .util.grid import GridEvaluator

_logger = _logging.getLogger(__name__)

#: Tolerance for the closest point solver.
CLOSEST_POINT_TOL = 1e-9
#: Iteration limit (full sweeps) for the closest point solver.
CLOSEST_POINT_MAX_ITER = 10 ** 4
#: Absolute tolerance when testing halfspace membership.
MEMBERSHIP_TOL = 1e-12
#: Rough number of matrix entries to evaluate at once.
_CHUNK_ENTRIES = 1 << 22


def _as_points(points, dim=None):
    points = _np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[None, :] if dim is None or points.shape[0] == dim else points[:, None]
    if points.ndim != 2:
        raise ValueError("Should be an array of points, of shape (N, dim)")
    if dim is not None and points.shape[1] != dim and points.shape[0] > 0:
        raise ValueError("Should be points of dimension {}, got {}".format(dim, points.shape[1]))
    return points

def _chunked(points, width, func):
    """Apply `func` to blocks of rows of `points`, so that about
    `_CHUNK_ENTRIES` entries of an `(rows, width)` matrix are live at once."""
    size = max(1, _CHUNK_ENTRIES // max(1, width))
    if points.shape[0] <= size:
        return func(points)
    return _np.concatenate([func(points[i:i+size]) for i in range(0, points.shape[0], size)])


class PointSet():
    """A finite set of points in `R^n`, optionally with recession rays: the
    set generated is the points together with every point plus a
    non-negative combination of rays.

    :param points: Array of shape `(N, dim)`; may be empty if `dim` is given.
    :param rays: Optional array of shape `(M, dim)` of nonzero directions.
    :param dim: The dimension, needed only when there are no points.
    """
    def __init__(self, points, rays=None, dim=None):
        points = _np.asarray(points, dtype=float)
        if points.size == 0:
            if dim is None:
                raise ValueError("Should give the dimension of an empty point set")
            points = points.reshape(0, dim)
        points = _as_points(points)
        if dim is None:
            dim = points.shape[1]
        if points.shape[1] != dim:
            raise ValueError("Should be points of dimension {}".format(dim))
        if not _np.all(_np.isfinite(points)):
            raise ValueError("Should be finite coordinates")
        if rays is None or _np.asarray(rays).size == 0:
            rays = _np.empty((0, dim))
        rays = _as_points(rays, dim)
        if rays.shape[0] > 0 and (not _np.all(_np.isfinite(rays)) or _np.any(_np.all(rays == 0, axis=1))):
            raise ValueError("Should be finite, nonzero rays")
        self._points = points
        self._rays = rays
        self._dim = int(dim)

    @property
    def dim(self):
        return self._dim

    @property
    def points(self):
        return self._points

    @property
    def rays(self):
        return self._rays

    def __len__(self):
        return self._points.shape[0]

    def __repr__(self):
        return "PointSet(dim={}, points={}, rays={})".format(self._dim, len(self), self._rays.shape[0])

    def scaled(self, alpha):
        return PointSet(self._points * alpha, self._rays, dim=self._dim)

    def union(self, other):
        if other.dim != self._dim:
            raise ValueError("Should be point sets of the same dimension")
        return PointSet(_np.concatenate([self._points, other.points]),
            _np.concatenate([self._rays, other.rays]), dim=self._dim)

    def support(self, directions):
        """The support function `h(theta) = sup <x, theta>` over the set; `+inf`
        if some ray has positive inner product, `-inf` for the empty set."""
        directions = _as_points(directions, self._dim)
        if len(self) == 0:
            h = _np.full(directions.shape[0], -_np.inf)
        else:
            h = _np.max(directions @ self._points.T, axis=1)
        if self._rays.shape[0] > 0:
            unbounded = _np.any(directions @ self._rays.T > 0, axis=1)
            h = _np.where(unbounded, _np.inf, h)
        return h

    def to_dict(self):
        return {"dim": self._dim, "points": self._points.tolist(), "rays": self._rays.tolist()}

    @staticmethod
    def from_dict(data):
        try:
            return PointSet(data["points"], data.get("rays"), dim=data.get("dim"))
        except (KeyError, TypeError):
            raise ValueError("Should be an object with key 'points'")

    @staticmethod
    def from_csv(path):
        return PointSet(_util.read_points_csv(path))


class SetOracle():
    """Interface for sets in `R^n` given by membership.

    Subclasses implement :attr:`dim` and :meth:`__call__`, and may implement
    :meth:`margins`.
    """
    @property
    def dim(self):
        raise NotImplementedError()

    def __call__(self, points):
        """Membership of each point.

        :param points: Array of shape `(N, dim)`.

        :return: Boolean array of shape `(N,)`.
        """
        raise NotImplementedError()

    def margins(self, points):
        """Signed slack of each point (positive inside, negative outside, near
        zero close to the boundary), or `None` if not known."""
        return None

    def intersect(self, other):
        return _combine(self, other, _np.logical_and, _np.minimum)

    def union(self, other):
        return _combine(self, other, _np.logical_or, _np.maximum)

    def complement(self):
        inner = self
        margin = None
        if self.margins(_np.zeros((1, self.dim))) is not None:
            margin = lambda p: -inner.margins(p)
        return MembershipOracle(self.dim, predicate=lambda p: ~inner(p), margin=margin)

    def transformed(self, func):
        """The set `{ y : func(y) in self }`, for a map `func` of point arrays."""
        inner = self
        margin = None
        if self.margins(_np.zeros((1, self.dim))) is not None:
            margin = lambda p: inner.margins(func(p))
        return MembershipOracle(self.dim, predicate=lambda p: inner(func(p)), margin=margin)

    def reflect(self, axis=None):
        """Reflect in the hyperplane orthogonal to coordinate `axis` (default
        the last), or through the origin if `axis` is `"origin"`."""
        if axis == "origin":
            return self.transformed(lambda p: -p)
        axis = self.dim - 1 if axis is None else axis
        def flip(p):
            p = _np.array(p, dtype=float)
            p[:, axis] = -p[:, axis]
            return p
        return self.transformed(flip)


def _combine(first, second, join, join_margin):
    if first.dim != second.dim:
        raise ValueError("Should be sets of the same dimension")
    zero = _np.zeros((1, first.dim))
    margin = None
    if first.margins(zero) is not None and second.margins(zero) is not None:
        margin = lambda p: join_margin(first.margins(p), second.margins(p))
    return MembershipOracle(first.dim, predicate=lambda p: join(first(p), second(p)), margin=margin)


class MembershipOracle(SetOracle):
    """A set given by a vectorised predicate, or by a margin function.

    :param dim: The dimension.
    :param predicate: Callable taking an `(N, dim)` array, returning `(N,)`
      booleans.  If omitted, membership is `margin >= 0` (or `> 0` if
      `strict`).
    :param margin: Optional callable returning `(N,)` signed slack.
    :param bounding_box: Optional box, `(low, high)` per axis, which contains
      the set; `None` or infinite entries for unbounded axes.
    :param strict: Use strict inequality when membership comes from the
      margin.
    """
    def __init__(self, dim, predicate=None, margin=None, bounding_box=None, strict=False):
        if predicate is None and margin is None:
            raise ValueError("Should give a predicate or a margin")
        self._dim = int(dim)
        self._predicate = predicate
        self._margin = margin
        self._strict = strict
        self.bounding_box = bounding_box

    @property
    def dim(self):
        return self._dim

    @property
    def strict(self):
        return self._strict

    @property
    def bounding_box(self):
        """The box, a tuple of `(low, high)` pairs, or `None`."""
        return self._bounding_box

    @bounding_box.setter
    def bounding_box(self, v):
        if v is None:
            self._bounding_box = None
            return
        try:
            v = tuple((float(lo), float(hi)) for (lo, hi) in v)
            assert len(v) == self._dim
            assert all(lo <= hi for lo, hi in v)
            self._bounding_box = v
        except:
            raise ValueError("Should be one (low, high) pair per axis")

    def __call__(self, points):
        points = _as_points(points, self._dim)
        if self._predicate is not None:
            return _np.asarray(self._predicate(points), dtype=bool)
        m = self._margin(points)
        return m > 0 if self._strict else m >= 0

    def margins(self, points):
        if self._margin is None:
            return None
        return _np.asarray(self._margin(_as_points(points, self._dim)), dtype=float)

    def __repr__(self):
        return "MembershipOracle(dim={})".format(self._dim)


class HalfspaceSet(SetOracle):
    """The intersection of closed halfspaces `<n, y> <= b` or `<n, y> >= b`.

    Constraints with a zero normal are dropped if they hold everywhere, and
    make the set empty otherwise.

    :param normals: Array of shape `(M, dim)`.
    :param offsets: Array of shape `(M,)`.
    :param senses: Sequence of `"<="` or `">="`, or a single such string.
    :param dim: Needed if there are no constraints.
    """
    def __init__(self, normals, offsets, senses="<=", dim=None):
        normals = _np.asarray(normals, dtype=float)
        if normals.size == 0:
            if dim is None:
                raise ValueError("Should give the dimension when there are no constraints")
            normals = normals.reshape(0, dim)
        normals = _as_points(normals)
        dim = normals.shape[1] if dim is None else int(dim)
        offsets = _np.asarray(offsets, dtype=float).reshape(-1)
        if isinstance(senses, str):
            senses = [senses] * normals.shape[0]
        senses = list(senses)
        if not (normals.shape[0] == offsets.shape[0] == len(senses)):
            raise ValueError("Should be as many offsets and senses as normals")
        if any(s not in ("<=", ">=") for s in senses):
            raise ValueError("Senses should be '<=' or '>='")
        if not (_np.all(_np.isfinite(normals)) and _np.all(_np.isfinite(offsets))):
            raise ValueError("Should be finite constraints")
        sign = _np.array([1.0 if s == "<=" else -1.0 for s in senses])
        zero = _np.all(normals == 0, axis=1)
        # A zero normal gives 0 <= b (or 0 >= b)
        self._infeasible = bool(_np.any(zero & (sign * offsets < 0)))
        keep = ~zero
        self._dim = dim
        self._normals = normals[keep]
        self._offsets = offsets[keep]
        self._senses = [s for s, k in zip(senses, keep) if k]
        self._sign = sign[keep]
        self.tol = MEMBERSHIP_TOL

    @property
    def dim(self):
        return self._dim

    @property
    def normals(self):
        return self._normals

    @property
    def offsets(self):
        return self._offsets

    @property
    def senses(self):
        return list(self._senses)

    @property
    def infeasible(self):
        """True if some constraint can never hold (so the set is empty)."""
        return self._infeasible

    def __len__(self):
        return self._normals.shape[0]

    def __repr__(self):
        return "HalfspaceSet(dim={}, constraints={})".format(self._dim, len(self))

    def as_upper_bounds(self):
        """The constraints as `A y <= b`.

        :return: Pair `(A, b)`.
        """
        return self._normals * self._sign[:, None], self._offsets * self._sign

    def _slack(self, points):
        A, b = self.as_upper_bounds()
        return b[None, :] - points @ A.T

    def __call__(self, points):
        points = _as_points(points, self._dim)
        if self._infeasible:
            return _np.zeros(points.shape[0], dtype=bool)
        if len(self) == 0:
            return _np.ones(points.shape[0], dtype=bool)
        tol = self.tol * (1 + _np.abs(self._offsets))
        return _chunked(points, len(self), lambda p: _np.all(self._slack(p) >= -tol[None, :], axis=1))

    def margins(self, points):
        """Smallest slack over the constraints, in units of distance."""
        points = _as_points(points, self._dim)
        if self._infeasible:
            return _np.full(points.shape[0], -_np.inf)
        if len(self) == 0:
            return _np.full(points.shape[0], _np.inf)
        norms = _np.linalg.norm(self._normals, axis=1)
        return _chunked(points, len(self), lambda p: _np.min(self._slack(p) / norms[None, :], axis=1))

    def scaled(self, alpha):
        """The set `alpha * self`, for `alpha > 0`."""
        return HalfspaceSet(self._normals / alpha, self._offsets, self._senses, dim=self._dim)

    def intersect(self, other):
        if isinstance(other, HalfspaceSet):
            if other.dim != self._dim:
                raise ValueError("Should be sets of the same dimension")
            out = HalfspaceSet(_np.concatenate([self._normals, other.normals]),
                _np.concatenate([self._offsets, other.offsets]), self._senses + other.senses, dim=self._dim)
            out._infeasible = self._infeasible or other.infeasible
            return out
        return super().intersect(other)

    def to_dict(self):
        constraints = [{"normal": n.tolist(), "offset": float(b), "sense": s}
            for n, b, s in zip(self._normals, self._offsets, self._senses)]
        return {"dim": self._dim, "constraints": constraints, "infeasible": self._infeasible}

    @staticmethod
    def from_dict(data):
        try:
            cons = data["constraints"]
            dim = data.get("dim")
            out = HalfspaceSet([c["normal"] for c in cons], [c["offset"] for c in cons],
                [c["sense"] for c in cons], dim=dim)
        except (KeyError, TypeError):
            raise ValueError("Should be an object with a list of 'constraints'")
        out._infeasible = out.infeasible or bool(data.get("infeasible", False))
        return out


class RadialFunction():
    """Values of a gauge function `g` on a grid of unit directions.  The
    star-shaped set it describes is `{ x : |x| g(x/|x|) <= 1 }`.

    The reciprocal `1/g` is held lazily, so that taking it twice gives back
    exactly the same object.

    :param directions: Array `(D, dim)` of unit vectors.
    :param values: Array `(D,)` of values in `(0, inf]`.
    :param reciprocal: If true, this function is `1/values`.
    """
    def __init__(self, directions, values, reciprocal=False):
        directions = _as_points(directions)
        values = _np.asarray(values, dtype=float).reshape(-1)
        if values.shape[0] != directions.shape[0]:
            raise ValueError("Should be one value per direction")
        if _np.any(_np.isnan(values)) or _np.any(values <= 0):
            raise ValueError("Should be values in (0, inf]")
        self._directions = directions
        self._raw = values
        self._reciprocal = bool(reciprocal)

    @property
    def dim(self):
        return self._directions.shape[1]

    @property
    def directions(self):
        return self._directions

    @property
    def values(self):
        if self._reciprocal:
            with _np.errstate(divide="ignore"):
                return 1.0 / self._raw
        return self._raw

    def __eq__(self, other):
        if not isinstance(other, RadialFunction):
            return NotImplemented
        return (self._reciprocal == other._reciprocal and _np.array_equal(self._raw, other._raw)
            and _np.array_equal(self._directions, other._directions))

    def reciprocal(self):
        return RadialFunction(self._directions, self._raw, not self._reciprocal)

    def _nearest(self, points):
        return _np.argmax(points @ self._directions.T, axis=1)

    def body(self):
        """The star-shaped set, as an oracle; each point uses the value at the
        nearest grid direction."""
        def margin(points):
            norms = _np.linalg.norm(points, axis=1)
            g = self.values[_chunked(points, len(self._raw), self._nearest)]
            with _np.errstate(invalid="ignore"):
                scaled = norms * g
            scaled = _np.where(norms == 0, 0.0, scaled)
            return 1 - scaled
        return MembershipOracle(self.dim, margin=margin)


class Subclass():
    """The closest point of a set to the origin is `a * u`."""
    def __init__(self, u, a):
        self.u = _np.asarray(u, dtype=float)
        self.a = float(a)

    def __bool__(self):
        return True

    def __repr__(self):
        return "Subclass(u={}, a={})".format(self.u.tolist(), self.a)

    def to_dict(self):
        return {"u": self.u.tolist(), "a": self.a}


class Degenerate():
    """No closest point direction: the set is empty, or contains the origin
    (for example, is all of `R^n`)."""
    def __init__(self, reason):
        self.reason = reason

    def __bool__(self):
        return False

    def __repr__(self):
        return "Degenerate({!r})".format(self.reason)

    def to_dict(self):
        return {"degenerate": self.reason}


#####  Polarity type transforms of point sets  #####

def polar(P):
    """`{ y : <x, y> <= 1 for all x in P }`; each ray `d` gives `<d, y> <= 0`."""
    normals = _np.concatenate([P.points, P.rays])
    offsets = _np.concatenate([_np.ones(len(P)), _np.zeros(P.rays.shape[0])])
    return HalfspaceSet(normals, offsets, "<=", dim=P.dim)

def dual_polar(P):
    """`{ y : <x, y> >= 1 for all x in P }`; each ray `d` gives `<d, y> >= 0`.
    The empty set gives all of `R^n`, and the origin gives the empty set."""
    normals = _np.concatenate([P.points, P.rays])
    offsets = _np.concatenate([_np.ones(len(P)), _np.zeros(P.rays.shape[0])])
    return HalfspaceSet(normals, offsets, ">=", dim=P.dim)

def reciprocal(P, directions=None):
    """The reciprocal body `{ y : h(theta) <y, theta> <= 1 for all theta }`,
    with `h` the support function of `P`, over a grid of directions.  Directions
    with `h <= 0` give no constraint; directions with `h = inf` give
    `<y, theta> <= 0`.
    """
    directions = _util.direction_grid(P.dim) if directions is None else _as_points(directions, P.dim)
    h = P.support(directions)
    finite = _np.isfinite(h) & (h > 0)
    unbounded = _np.isinf(h) & (h > 0)
    normals = _np.concatenate([directions[finite] * h[finite, None], directions[unbounded]])
    offsets = _np.concatenate([_np.ones(int(finite.sum())), _np.zeros(int(unbounded.sum()))])
    return HalfspaceSet(normals, offsets, "<=", dim=P.dim)

def slab_polar_intersection(P, directions=None):
    """The intersection over `theta` of the polars of the projections of `P`
    onto the lines through `theta`.  The projection is the segment
    `[lo, hi] theta`, whose polar is `{ y : hi <y,theta> <= 1, lo <y,theta> <= 1 }`.
    """
    if P.rays.shape[0] > 0:
        raise ValueError("Should be a point set without rays")
    directions = _util.direction_grid(P.dim) if directions is None else _as_points(directions, P.dim)
    if len(P) == 0:
        return HalfspaceSet([], [], dim=P.dim)
    proj = P.points @ directions.T
    hi, lo = proj.max(axis=0), proj.min(axis=0)
    normals = _np.concatenate([directions * hi[:, None], directions * lo[:, None]])
    return HalfspaceSet(normals, _np.ones(normals.shape[0]), "<=", dim=P.dim)

def restricted_polar(P, R):
    """The polar restricted to a ball: `polar(P) & R B`."""
    if R <= 0:
        raise ValueError("Should be a radius > 0")
    ball = MembershipOracle(P.dim, margin=lambda y: R - _np.linalg.norm(y, axis=1))
    return polar(P).intersect(ball)

def unconditional_dual(P):
    """`{ y : sum_i |x_i| |y_i| <= 1 for all x in P }`, an unconditional set."""
    gens = _np.abs(P.points)
    def margin(y):
        if gens.shape[0] == 0:
            return _np.full(y.shape[0], _np.inf)
        return _chunked(y, gens.shape[0], lambda p: 1 - _np.max(_np.abs(p) @ gens.T, axis=1))
    return MembershipOracle(P.dim, margin=margin)


#####  Metric transforms  #####

def _distances(P, metric):
    def dist(y):
        return _distance.cdist(y, P.points, metric=metric)
    return dist

def neighborhood_complement(P, epsilon, metric="euclidean"):
    """`{ y : d(x, y) >= epsilon for all x in P }`.

    :param metric: Any metric `scipy.spatial.distance.cdist` accepts,
      including a callable of two points.
    """
    if epsilon <= 0:
        raise ValueError("Should be epsilon > 0")
    dist = _distances(P, metric)
    def margin(y):
        if len(P) == 0:
            return _np.full(y.shape[0], _np.inf)
        return _chunked(y, len(P), lambda p: _np.min(dist(p), axis=1)) - epsilon
    return MembershipOracle(P.dim, margin=margin)

def ball_intersection(P, epsilon):
    """The intersection of the balls `B(x, epsilon)` over `x` in `P`."""
    if epsilon <= 0:
        raise ValueError("Should be epsilon > 0")
    dist = _distances(P, "euclidean")
    def margin(y):
        if len(P) == 0:
            return _np.full(y.shape[0], _np.inf)
        return epsilon - _chunked(y, len(P), lambda p: _np.max(dist(p), axis=1))
    return MembershipOracle(P.dim, margin=margin)

def balls_transform(P):
    """The cost `1 - |x| |y|`: the image is the ball of radius `1/R`, with `R`
    the largest norm in `P` (everything if `R` is 0)."""
    R = _np.max(_np.linalg.norm(P.points, axis=1)) if len(P) > 0 else 0.0
    return MembershipOracle(P.dim, margin=lambda y: 1 - R * _np.linalg.norm(y, axis=1))

def reciprocal_type(P, lam):
    """`{ y : (1 - lam) |x| |y| + lam <x, y> <= 1 for all x in P }`.  At
    `lam = 1` this is the polar, at `lam = 0` the balls transform, and at
    `lam = 1/2` it agrees with the reciprocal body."""
    lam = float(lam)
    if not 0 <= lam <= 1:
        raise ValueError("Should be lam in [0, 1]")
    if lam == 0:
        return balls_transform(P)
    gens = P.points
    norms = _np.linalg.norm(gens, axis=1)
    def margin(y):
        if len(P) == 0:
            return _np.full(y.shape[0], _np.inf)
        def chunk(p):
            cost = (1 - lam) * _np.linalg.norm(p, axis=1)[:, None] * norms[None, :] + lam * (p @ gens.T)
            return 1 - _np.max(cost, axis=1)
        return _chunked(y, len(P), chunk)
    return MembershipOracle(P.dim, margin=margin)

def projection_product_sup(x, y, directions=None, block=64):
    """`sup_theta <x, theta> <theta, y>` over a direction grid, for paired rows
    of `x` and `y`.  Over the whole sphere this is `(<x,y> + |x||y|) / 2`."""
    x, y = _as_points(x), _as_points(y)
    directions = _util.direction_grid(x.shape[1]) if directions is None else _as_points(directions)
    out = []
    for i in range(0, x.shape[0], block):
        a = x[i:i+block] @ directions.T
        b = y[i:i+block] @ directions.T
        out.append(_np.max(a * b, axis=1))
    return _np.concatenate(out) if len(out) > 0 else _np.empty(0)

def flower_dual(P):
    """`{ y : <x, y> < |x|^2 |y|^2 / 2 for all x in P }`, strict inequality.
    A single point `x` gives the complement of the closed ball
    `B(z, |z|)`, `z = x / |x|^2`; the origin gives the empty set."""
    gens = P.points
    sq = _np.sum(gens * gens, axis=1)
    def margin(y):
        if len(P) == 0:
            return _np.full(y.shape[0], _np.inf)
        ysq = _np.sum(y * y, axis=1)
        return _chunked(_np.column_stack([y, ysq]), len(P),
            lambda p: _np.min(0.5 * p[:, -1:] * sq[None, :] - p[:, :-1] @ gens.T, axis=1))
    return MembershipOracle(P.dim, margin=margin, strict=True)

def star_dual(g):
    """Star duality: the gauge `g` goes to `1/g`.  An exact involution."""
    return g.reciprocal()

def x_zero_sample(transform, points):
    """Sampled analogue of `X0` for a point set transform: which `x` lie in
    `T({x})`.

    :param transform: Callable taking a :class:`PointSet` and returning an
      oracle.

    :return: Boolean array, one entry per point.
    """
    points = _as_points(points)
    return _np.array([bool(transform(PointSet(p[None, :]))(p[None, :])[0]) for p in points], dtype=bool)


#####  Oracles: cone-like sets, radial scans and closest points  #####

def cone_like_check(oracle, samples, lambdas=(1.0, 1.5, 2.0, 4.0, 10.0)):
    """Check, on sampled members, that `lam K <= K` for each `lam >= 1`, and
    that the origin is not a member.

    :param samples: :class:`PointSet` or array of points to test.

    :return: :class:`Verdict` (not exhaustive).
    """
    lambdas = [float(l) for l in lambdas]
    if any(l < 1 for l in lambdas):
        raise ValueError("Should be scalings >= 1")
    points = samples.points if isinstance(samples, PointSet) else _as_points(samples, oracle.dim)
    if oracle(_np.zeros((1, oracle.dim)))[0]:
        return Verdict.violation("origin", {"point": [0.0] * oracle.dim}, exhaustive=False)
    members = points[oracle(points)]
    for lam in lambdas:
        inside = oracle(lam * members)
        if not _np.all(inside):
            bad = members[_np.argmin(inside)]
            return Verdict.violation("scaling", {"point": bad.tolist(), "lambda": lam}, exhaustive=False)
    return Verdict.passed(exhaustive=False)

def radial_profile(oracle, directions=None, r_max=20.0, mode="entry", coarse=400, steps=60):
    """Distance along each direction at which a ray from the origin meets
    the boundary of the set.

      - `mode="entry"`: the first member point (for sets not containing the
        origin); `nan` if the ray misses the set within `r_max`.
      - `mode="exit"`: the last member point before the first non-member
        (for star-shaped sets containing the origin); `inf` if the ray never
        leaves within `r_max`.

    A coarse scan of `coarse` steps is refined by `steps` rounds of
    bisection.  Returned distances are always on the member side.
    """
    directions = _util.direction_grid(oracle.dim) if directions is None else _as_points(directions, oracle.dim)
    D = directions.shape[0]
    ts = _np.linspace(0, r_max, coarse + 1)[1:]
    pts = (ts[None, :, None] * directions[:, None, :]).reshape(-1, oracle.dim)
    inside = oracle(pts).reshape(D, coarse)
    if mode == "entry":
        found = _np.any(inside, axis=1)
        first = _np.argmax(inside, axis=1)
        hi = ts[first]
        lo = _np.where(first > 0, ts[_np.maximum(first - 1, 0)], 0.0)
        member_is_hi = True
    elif mode == "exit":
        outside = ~inside
        found = _np.any(outside, axis=1)
        first = _np.argmax(outside, axis=1)
        hi = ts[first]
        lo = _np.where(first > 0, ts[_np.maximum(first - 1, 0)], 0.0)
        member_is_hi = False
    else:
        raise ValueError("Should be mode 'entry' or 'exit', not {!r}".format(mode))
    for _ in range(steps):
        mid = (lo + hi) / 2
        m = oracle(mid[:, None] * directions)
        hi_side = m if member_is_hi else ~m
        hi = _np.where(hi_side, mid, hi)
        lo = _np.where(hi_side, lo, mid)
    if mode == "entry":
        return _np.where(found, hi, _np.nan)
    return _np.where(found, lo, _np.inf)

def boundary_generators(oracle, directions=None, r_max=20.0, coarse=400):
    """Generators of a cone-like set from an oracle: the entry points along
    each direction which meets the set, and those directions as rays.

    :return: :class:`PointSet`.
    """
    directions = _util.direction_grid(oracle.dim) if directions is None else _as_points(directions, oracle.dim)
    r = radial_profile(oracle, directions, r_max, "entry", coarse)
    hit = _np.isfinite(r)
    return PointSet(r[hit, None] * directions[hit], directions[hit], dim=oracle.dim)

def sampled_dual_polar(oracle, directions=None, r_max=20.0):
    """Dual polarity applied to a cone-like oracle, through
    :func:`boundary_generators`."""
    return dual_polar(boundary_generators(oracle, directions, r_max))

def gauge_of(oracle, directions=None, r_max=20.0):
    """The gauge of a star-shaped oracle containing the origin, on a direction
    grid.  Radii are capped at `r_max`."""
    directions = _util.direction_grid(oracle.dim) if directions is None else _as_points(directions, oracle.dim)
    r = _np.minimum(radial_profile(oracle, directions, r_max, "exit"), r_max)
    if _np.any(r <= 0):
        raise ValueError("Should be a star-shaped set with the origin in its interior")
    return RadialFunction(directions, 1.0 / r)

def _dykstra(A, b, tol, max_iter):
    """Project the origin onto `{ y : A y <= b }` by Dykstra's algorithm."""
    m, d = A.shape
    norms = _np.sum(A * A, axis=1)
    x = _np.zeros(d)
    increments = _np.zeros((m, d))
    for it in range(max_iter):
        start = x.copy()
        for i in range(m):
            y = x + increments[i]
            violation = A[i] @ y - b[i]
            x = y - (max(violation, 0.0) / norms[i]) * A[i]
            increments[i] = y - x
        worst = _np.max(A @ x - b)
        if _np.linalg.norm(x - start) <= tol * (1 + _np.linalg.norm(x)) and worst <= tol * (1 + _np.max(_np.abs(b))):
            return x, it + 1
    _logger.warning("Closest point solve stopped after %s sweeps", max_iter)
    return x, max_iter

def subclass_of(K, directions=None, r_max=20.0, tol=CLOSEST_POINT_TOL, max_iter=CLOSEST_POINT_MAX_ITER):
    """The closest point `a u` of a closed convex set to the origin.

    For a :class:`HalfspaceSet` the origin is projected onto the set by
    Dykstra's alternating projections, after a linear programming check for
    emptiness.  For any other oracle the entry distance is scanned over a
    direction grid and the smallest taken.

    :return: :class:`Subclass`, or :class:`Degenerate` if the set is empty,
      is everything, or contains the origin.
    """
    origin = _np.zeros((1, K.dim))
    if isinstance(K, HalfspaceSet):
        if K.infeasible:
            return Degenerate("empty")
        if len(K) == 0:
            return Degenerate("whole space")
        if K(origin)[0]:
            return Degenerate("contains origin")
        A, b = K.as_upper_bounds()
        result = _optimize.linprog(_np.zeros(K.dim), A_ub=A, b_ub=b,
            bounds=[(None, None)] * K.dim, method="highs")
        if result.status == 2:
            return Degenerate("empty")
        x, sweeps = _dykstra(A, b, tol, max_iter)
        _logger.debug("Closest point found in %s sweeps", sweeps)
        a = _np.linalg.norm(x)
        return Subclass(x / a, a)
    if K(origin)[0]:
        return Degenerate("contains origin")
    directions = _util.direction_grid(K.dim) if directions is None else _as_points(directions, K.dim)
    r = radial_profile(K, directions, r_max, "entry")
    if not _np.any(_np.isfinite(r)):
        return Degenerate("empty")
    best = int(_np.nanargmin(r))
    return Subclass(directions[best], r[best])


#####  The J transform  #####

def j_point_map(points):
    """`F(x, t) = (x / t, 1 / t)`, an involution of `{ t != 0 }`."""
    points = _as_points(points)
    t = points[:, -1:]
    with _np.errstate(divide="ignore", invalid="ignore"):
        return _np.concatenate([points[:, :-1] / t, 1 / t], axis=1)

def j_jacobian(points):
    """`|det DF| = |t|^-(n+1)` at each point."""
    points = _as_points(points)
    n = points.shape[1]
    with _np.errstate(divide="ignore"):
        return _np.abs(points[:, -1]) ** (-(n + 1))

def j_transform(K):
    """`JK = { y : y_n > 0, F(y) in K }` for a set `K` in the upper half space."""
    def member(y):
        out = _np.zeros(y.shape[0], dtype=bool)
        up = y[:, -1] > 0
        if _np.any(up):
            out[up] = K(j_point_map(y[up]))
        return out
    def margin(y):
        out = _np.full(y.shape[0], -_np.inf)
        up = y[:, -1] > 0
        if _np.any(up):
            out[up] = K.margins(j_point_map(y[up]))
        return out
    has_margin = K.margins(_np.array([[0.0] * (K.dim - 1) + [1.0]])) is not None
    return MembershipOracle(K.dim, predicate=member, margin=margin if has_margin else None)

def tilde_j(K):
    """`JK` together with its reflection in `{ y_n = 0 }`.  Points with
    `y_n = 0` are outside."""
    J = j_transform(K)
    return J.union(J.reflect())

def j_polarity_check(seed, bodies=5, resolution=200, box=2.0, nodes=401, span=4.0):
    """Compare `-J~(K)°` with `J~(TK)`, `T` dual polarity, on a grid, for
    random planar `K = epi(phi)` with

        phi(x) = max( sqrt(s^2 x^2 + 1), 1 + a x, 1 + b x ),

    `s` in `[0.3, 1]` and `a, b` in `[-1, 1]`, so that `K` has closest point
    `(0, 1)`.  Both sides are built from the same generators of `K`.

    :return: List of :class:`GridReport`, one per body.
    """
    rng = _np.random.default_rng(seed)
    evaluator = GridEvaluator([(-box, box), (-box, box)], resolution)
    xs = _np.linspace(-span, span, nodes)
    reports = []
    for _ in range(bodies):
        s = rng.uniform(0.3, 1.0)
        a, b = rng.uniform(-1, 1, size=2)
        phi = _np.maximum.reduce([_np.sqrt(s * s * xs * xs + 1), 1 + a * xs, 1 + b * xs])
        K = PointSet(_np.column_stack([xs, phi]), rays=[[0.0, 1.0]])
        images = j_point_map(K.points)
        J_gens = PointSet(_np.concatenate([images, images * [1.0, -1.0]]))
        lhs = polar(J_gens).reflect("origin")
        rhs = tilde_j(dual_polar(K))
        reports.append(evaluator.agreement(lhs, rhs))
    return reports


#####  Invariant sets of dual polarity in the plane  #####

def k0_oracle(dim=2):
    """`K0 = { (x, t) : t >= sqrt(|x|^2 + 1) }`."""
    return MembershipOracle(dim, margin=lambda p: p[:, -1] - _np.sqrt(_np.sum(p[:, :-1] ** 2, axis=1) + 1))

def k1_oracle():
    """`K1 = { (x, t) : x >= 0, t >= 1 }`."""
    return MembershipOracle(2, margin=lambda p: _np.minimum(p[:, 0], p[:, 1] - 1))

def k2_oracle():
    """`K2 = conv{(-1,1), (0,1)} + cone{(1,1), (-1,1)}`, that is
    `t >= max(1, 1 + x, -x)`."""
    return MembershipOracle(2, margin=lambda p: p[:, 1] - _np.maximum.reduce([_np.ones(p.shape[0]), 1 + p[:, 0], -p[:, 0]]))

def k0_generators(count=801, span=8.0):
    """Points of the hyperbola `t = sqrt(x^2 + 1)`, spaced evenly in
    `asinh x` over `[-span, span]`, with the asymptotic rays of `K0`."""
    u = _np.linspace(-span, span, count)
    x = _np.sinh(u)
    points = _np.column_stack([x, _np.sqrt(x * x + 1)])
    return PointSet(points, rays=[[1.0, 1.0], [-1.0, 1.0], [0.0, 1.0]])

def k1_generators():
    """`(0, 1)` with rays `(1, 0)` and `(0, 1)`."""
    return PointSet([[0.0, 1.0]], rays=[[1.0, 0.0], [0.0, 1.0]])

def k2_generators():
    return PointSet([[-1.0, 1.0], [0.0, 1.0]], rays=[[1.0, 1.0], [-1.0, 1.0]])

_NAMED_2D = {
    "K0": (lambda: k0_oracle(2), k0_generators),
    "K1": (k1_oracle, k1_generators),
    "K2": (k2_oracle, k2_generators),
}

def construct_invariant(K, directions=None, r_max=20.0):
    """From `K` in the positive quadrant with closest point `(0, 1)`, the set

        L = (TK & { x < 0, t >= 0 }) | (TTK & { x >= 0, t >= 0 }),

    with `T` dual polarity, which is invariant.  `TTK` is computed from
    sampled generators of `TK`.

    :param K: :class:`PointSet` of generators.

    :raises PreconditionFailed: If `K` leaves the quadrant, or `(0, 1)` is not
      its closest point.
    """
    from .algebra import PreconditionFailed
    if K.dim != 2:
        raise ValueError("Should be a planar point set")
    if _np.any(K.points < -1e-12) or _np.any(K.rays < -1e-12):
        raise PreconditionFailed("Should lie in the positive quadrant", {"points": K.points.tolist()})
    near = _np.linalg.norm(K.points - [0.0, 1.0], axis=1) <= 1e-9
    if not _np.any(near) or _np.any(K.points[:, 1] < 1 - 1e-12):
        raise PreconditionFailed("Closest point should be (0, 1)", {"points": K.points.tolist()})
    TK = dual_polar(K)
    TTK = sampled_dual_polar(TK, directions, r_max)
    left = MembershipOracle(2, margin=lambda p: _np.minimum(-p[:, 0], p[:, 1]), strict=True)
    right = MembershipOracle(2, margin=lambda p: _np.minimum(p[:, 0], p[:, 1]))
    return TK.intersect(left).union(TTK.intersect(right))

def dual_polarity_invariants_2d(which="K0", K=None, resolution=201, box=((-3.0, 3.0), (-1.0, 5.0)), directions=None):
    """One of the named invariant sets of dual polarity in the plane, with a
    report comparing it with its own dual polar on a grid.

    :param which: `"K0"`, `"K1"`, `"K2"` or `"construct"` (then `K` is needed,
      see :func:`construct_invariant`).

    :return: Pair `(oracle, GridReport)`.
    """
    evaluator = GridEvaluator(box, resolution)
    if which in _NAMED_2D:
        make_oracle, make_generators = _NAMED_2D[which]
        oracle = make_oracle()
        dual = dual_polar(make_generators())
    elif which == "construct":
        if K is None:
            raise ValueError("Should give K to construct from")
        oracle = construct_invariant(K, directions)
        dual = sampled_dual_polar(oracle, directions)
    else:
        raise ValueError("Should be one of K0, K1, K2 or construct, not {!r}".format(which))
    return oracle, evaluator.agreement(oracle, dual)
