"""
functional
~~~~~~~~~~

Conjugate-type transforms of functions sampled on a uniform grid.  Each
transform is a brute force supremum (or infimum) over the grid nodes, so on
a fixed grid it is an order reversing quasi involution of the finite node set
and identities such as `LLL = L` hold up to rounding.

Functions take extended real values; `+inf` is allowed everywhere, `-inf`
only where a transform says so.  Conventions: a `+inf` cost makes its term
`+inf`; a term with `phi = +inf` in a denominator is `0`.
"""

import logging as _logging
import numpy as _np
import scipy.interpolate as _interpolate

from . import geometry as _geometry
from .relation import Verdict
from .util import util as _util
from .util.grid import GridWindow

_logger = _logging.getLogger(__name__)

#: Relative tolerance used by the class checks.
CLASS_TOL = 1e-9
#: Number of node pairs sampled when checking a cost is symmetric.
SYMMETRY_SAMPLES = 200
_CHUNK_ENTRIES = 1 << 22


class ClassViolation(ValueError):
    """A function is outside the class a transform is defined on.  The
    witness names the offending node and value."""
    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class GridFunction():
    """Values of a function at the nodes of a uniform grid.

    :param box: Sequence of `(low, high)` pairs.
    :param resolution: Nodes per axis, an integer or a sequence.
    :param values: Array of shape `resolution` (or anything with that many
      entries); `+inf` and `-inf` are allowed, `NaN` is not.
    """
    def __init__(self, box, resolution, values):
        self._window = GridWindow(box, resolution)
        values = _np.asarray(values, dtype=float)
        if values.size != self._window.size:
            raise ValueError("Should be {} values, got {}".format(self._window.size, values.size))
        if _np.any(_np.isnan(values)):
            raise ValueError("Should be no NaN values")
        self._values = values.reshape(self._window.resolution)

    @staticmethod
    def from_callable(func, box, resolution):
        """Sample `func`, which takes an `(N, dim)` array of points."""
        window = GridWindow(box, resolution)
        return GridFunction(box, resolution, func(window.points()))

    def like(self, values):
        """A function on the same grid with new values."""
        return GridFunction(self.box, self.resolution, values)

    @property
    def window(self):
        return self._window

    @property
    def dim(self):
        return self._window.dim

    @property
    def box(self):
        return self._window.box

    @property
    def resolution(self):
        return self._window.resolution

    @property
    def values(self):
        return self._values

    @property
    def flat_values(self):
        return self._values.ravel()

    @property
    def nodes(self):
        """All nodes, shape `(size, dim)`, in the order of :attr:`flat_values`."""
        return self._window.points()

    @property
    def spacing(self):
        return max(self._window.spacing)

    def node_index(self, point):
        """Flat index of the node at `point`, or `None` if it is not a node."""
        point = _np.asarray(point, dtype=float)
        index = []
        for axis, x, h in zip(self._window.axes, point, self._window.spacing):
            i = int(_np.argmin(_np.abs(axis - x)))
            if abs(axis[i] - x) > 1e-9 * max(1.0, h):
                return None
            index.append(i)
        return int(_np.ravel_multi_index(index, self.resolution))

    def __call__(self, points, method="nearest", fill=_np.inf):
        """Interpolate at arbitrary points; points outside the box get `fill`.

        :param method: `"nearest"` or `"linear"`.  Linear interpolation is
          `+inf` wherever an infinite node has positive weight.
        """
        points = _np.atleast_2d(_np.asarray(points, dtype=float))
        if method not in ("nearest", "linear"):
            raise ValueError("Should be method 'nearest' or 'linear'")
        axes = self._window.axes
        if any(len(a) < 2 for a in axes) or method == "nearest":
            out = self._nearest(points)
        else:
            def interp(v):
                return _interpolate.RegularGridInterpolator(axes, v, method="linear",
                    bounds_error=False, fill_value=0.0)(points)
            out = interp(_np.where(_np.isinf(self._values), 0.0, self._values))
            out = _np.where(interp(_np.isneginf(self._values).astype(float)) > 0, -_np.inf, out)
            out = _np.where(interp(_np.isposinf(self._values).astype(float)) > 0, _np.inf, out)
        inside = _np.all([(points[:, i] >= lo - 1e-12) & (points[:, i] <= hi + 1e-12)
            for i, (lo, hi) in enumerate(self.box)], axis=0)
        return _np.where(inside, out, fill)

    def _nearest(self, points):
        index = []
        for i, axis in enumerate(self._window.axes):
            if len(axis) == 1:
                index.append(_np.zeros(points.shape[0], dtype=int))
                continue
            h = axis[1] - axis[0]
            index.append(_np.clip(_np.rint((points[:, i] - axis[0]) / h), 0, len(axis) - 1).astype(int))
        return self._values[tuple(index)]

    def to_dict(self):
        return {"box": [list(b) for b in self.box], "resolution": list(self.resolution),
            "values": _util.encode_extended(self.flat_values)}

    @staticmethod
    def from_dict(data):
        try:
            return GridFunction(data["box"], data["resolution"], _util.decode_extended(data["values"]))
        except (KeyError, TypeError):
            raise ValueError("Should be an object with keys 'box', 'resolution' and 'values'")

    def write_csv(self, path=None):
        header = ["x{}".format(i + 1) for i in range(self.dim)] + ["value"]
        rows = [list(p) + [v] for p, v in zip(self.nodes.tolist(), self.flat_values.tolist())]
        _util.write_csv(header, rows, path)

    def __repr__(self):
        return "GridFunction(box={}, resolution={})".format(self.box, self.resolution)


class EpigraphOracle(_geometry.SetOracle):
    """The epigraph `{(x,t) : t >= f(x)}` or hypograph `{(x,t) : t <= f(x)}`
    of a :class:`GridFunction`, as a set in one more dimension.  Outside the
    box the epigraph is empty and the hypograph is everything below `+inf`,
    that is, empty too.

    :param side: `"epi"` or `"hypo"`.
    :param method: Interpolation, see :meth:`GridFunction.__call__`.
    """
    def __init__(self, function, side="epi", method="nearest"):
        if side not in ("epi", "hypo"):
            raise ValueError("Should be side 'epi' or 'hypo'")
        self.function = function
        self.side = side
        self.method = method

    @property
    def dim(self):
        return self.function.dim + 1

    def margins(self, points):
        points = _np.atleast_2d(_np.asarray(points, dtype=float))
        if self.side == "epi":
            f = self.function(points[:, :-1], self.method, fill=_np.inf)
            with _np.errstate(invalid="ignore"):
                return points[:, -1] - f
        f = self.function(points[:, :-1], self.method, fill=-_np.inf)
        with _np.errstate(invalid="ignore"):
            return f - points[:, -1]

    def __call__(self, points):
        return self.margins(points) >= 0


#####  Helpers  #####

def _reduce_over_nodes(out_nodes, width, func, reduce):
    size = max(1, _CHUNK_ENTRIES // max(1, width))
    parts = [reduce(func(out_nodes[i:i+size]), axis=1) for i in range(0, out_nodes.shape[0], size)]
    return _np.concatenate(parts) if len(parts) > 0 else _np.empty(0)

def _target(phi, box, resolution):
    box = phi.box if box is None else box
    resolution = phi.resolution if resolution is None else resolution
    return GridWindow(box, resolution)

def _node_witness(phi, flat_index, value=None):
    node = phi.nodes[flat_index].tolist()
    value = float(phi.flat_values[flat_index]) if value is None else value
    return {"node": node, "value": _util.encode_extended(value)}

def convexity_violation(phi, tol=CLASS_TOL):
    """Check the midpoint inequality `phi(a) + phi(c) >= 2 phi(b)` for every
    three consecutive nodes along each axis.  A node with value `+inf` must
    have a neighbour with value `+inf`.

    :return: Flat index of a middle node where it fails, or `None`.
    """
    values = phi.values
    for axis in range(phi.dim):
        if values.shape[axis] < 3:
            continue
        a = _np.take(values, range(0, values.shape[axis] - 2), axis=axis)
        b = _np.take(values, range(1, values.shape[axis] - 1), axis=axis)
        c = _np.take(values, range(2, values.shape[axis]), axis=axis)
        with _np.errstate(invalid="ignore"):
            finite = _np.isfinite(a) & _np.isfinite(b) & _np.isfinite(c)
            bad = finite & (a + c < 2 * b - tol * (1 + _np.abs(b)))
        bad |= _np.isposinf(b) & _np.isfinite(a) & _np.isfinite(c)
        if _np.any(bad):
            where = list(_np.argwhere(bad)[0])
            where[axis] += 1
            return int(_np.ravel_multi_index(where, phi.resolution))
    return None

def _origin_value(phi):
    index = phi.node_index(_np.zeros(phi.dim))
    if index is None:
        raise ValueError("Should be a grid with the origin as a node")
    return index, phi.flat_values[index]

def _end_slopes(phi):
    """One dimensional secant slopes at the two ends, each measured going
    outwards, or `None` where the end value is not finite."""
    v = phi.flat_values
    h = phi.spacing
    if len(v) < 2:
        return None, None
    left = (v[0] - v[1]) / h if _np.isfinite(v[0]) and _np.isfinite(v[1]) else None
    right = (v[-1] - v[-2]) / h if _np.isfinite(v[-1]) and _np.isfinite(v[-2]) else None
    return left, right

def _ray_limit(numerator_slope, slope):
    """Limit along a ray of `(a + numerator_slope s) / (b + slope s)` as
    `s -> inf`, with `slope >= 0`, or `None` for no ray."""
    if slope is None:
        return -_np.inf
    if slope > 0:
        return numerator_slope / slope
    return _np.inf if numerator_slope > 0 else -_np.inf

def _recession_slope(slope, end):
    """The outward slope used to continue a profile past one end, or `None`
    where it decreases there: its continuation would reach zero."""
    if slope is not None and slope < 0:
        _logger.warning("Profile decreases at the %s end of the box; no recession term there", end)
        return None
    return slope


#####  Legendre, A and c transforms  #####

def legendre(phi, box=None, resolution=None):
    """`L phi(y) = sup_x <x, y> - phi(x)` over the nodes.

    :param box: Box of the dual grid; defaults to the primal box.
    :param resolution: Resolution of the dual grid; defaults to the primal.

    :return: :class:`GridFunction`; all `-inf` (with a warning) if `phi` is
      identically `+inf`.
    """
    target = _target(phi, box, resolution)
    finite = _np.isfinite(phi.flat_values)
    if not _np.any(finite):
        _logger.warning("Legendre transform of an identically +inf function is identically -inf")
        return GridFunction(target.box, target.resolution, _np.full(target.size, -_np.inf))
    X = phi.nodes[finite]
    f = phi.flat_values[finite]
    out = _reduce_over_nodes(target.points(), X.shape[0], lambda Y: Y @ X.T - f[None, :], _np.max)
    return GridFunction(target.box, target.resolution, out)

def a_transform(phi, box=None, resolution=None, check=True):
    """`A phi(y) = sup_x (<x, y> - 1)_+ / phi(x)`, the transform with cost
    `st + 1 - <x, y>` on epigraphs.  Conventions: `0/0 = 0`, positive over
    zero is `+inf`, and the supremum over no terms is `0`.

    :param check: Require `phi >= 0`, `phi(0) = 0` and convex samples.

    :raises ClassViolation: If the check fails.
    """
    if check:
        values = phi.flat_values
        if _np.any(values < 0):
            i = int(_np.argmax(values < 0))
            raise ClassViolation("Should be a nonnegative function", _node_witness(phi, i))
        index, value = _origin_value(phi)
        if abs(value) > CLASS_TOL:
            raise ClassViolation("Should be zero at the origin", _node_witness(phi, index))
        bad = convexity_violation(phi)
        if bad is not None:
            raise ClassViolation("Should be a convex function", _node_witness(phi, bad))
    target = _target(phi, box, resolution)
    X = phi.nodes
    f = phi.flat_values
    def terms(Y):
        num = Y @ X.T - 1
        with _np.errstate(divide="ignore", invalid="ignore"):
            t = num / f[None, :]
        t = _np.where(num > 0, t, 0.0)
        return _np.where((num > 0) & (f[None, :] == 0), _np.inf, t)
    out = _reduce_over_nodes(target.points(), X.shape[0], terms, _np.max)
    return GridFunction(target.box, target.resolution, out)

def _vectorised_cost(cost, X, Y):
    c = _np.asarray(cost(X[:, None, :], Y[None, :, :]), dtype=float)
    return _np.broadcast_to(c, (X.shape[0], Y.shape[0]))

def check_cost(cost, nodes, samples=SYMMETRY_SAMPLES, seed=0):
    """Sampled check that a cost is symmetric and never `-inf` or `NaN`.

    :raises ValueError: If not.
    """
    rng = _np.random.default_rng(seed)
    i = rng.integers(0, nodes.shape[0], size=samples)
    j = rng.integers(0, nodes.shape[0], size=samples)
    a = _vectorised_cost(cost, nodes[i], nodes[j]).diagonal()
    b = _vectorised_cost(cost, nodes[j], nodes[i]).diagonal()
    if _np.any(_np.isnan(a)) or _np.any(a == -_np.inf):
        raise ValueError("Cost should be finite or +inf")
    same = (a == b) | _np.isclose(a, b, rtol=1e-12, atol=1e-12)
    if not _np.all(same):
        k = int(_np.argmin(same))
        raise ValueError("Cost should be symmetric; differs at {} and {}".format(nodes[i[k]].tolist(), nodes[j[k]].tolist()))

def c_transform(psi, cost, box=None, resolution=None, check=True):
    """`psi^c(x) = inf_y c(x, y) - psi(y)` over the nodes.

    :param cost: Callable `cost(x, y)` taking broadcastable arrays whose last
      axis is the coordinate, for example `lambda x, y: (x * y).sum(axis=-1)`.
    :param check: Sample the cost for symmetry and `-inf` values first.

    :return: :class:`GridFunction`, possibly with `-inf` values.
    """
    target = _target(psi, box, resolution)
    Y = psi.nodes
    if check:
        check_cost(cost, _np.concatenate([Y, target.points()]))
    p = psi.flat_values
    def terms(X):
        c = _vectorised_cost(cost, X, Y)
        if _np.any(c == -_np.inf):
            raise ValueError("Cost should be finite or +inf")
        with _np.errstate(invalid="ignore"):
            t = c - p[None, :]
        return _np.where(_np.isposinf(c), _np.inf, t)
    out = _reduce_over_nodes(target.points(), Y.shape[0], terms, _np.min)
    return GridFunction(target.box, target.resolution, out)

def hypograph_cost_bridge(cost):
    """Lift a cost on `X` to the cost `c(x, y) - s - t` between points `(x, t)`
    and `(y, s)` of `X x R`."""
    def lifted(p, q):
        p = _np.asarray(p, dtype=float)
        q = _np.asarray(q, dtype=float)
        return cost(p[..., :-1], q[..., :-1]) - p[..., -1] - q[..., -1]
    return lifted

def hypograph_dual(psi, cost):
    """The set transform of the lifted cost applied to the hypograph of
    `psi`, computed from the graph points `(x, psi(x))` (for each `x` the
    constraint from `t = psi(x)` implies the others).  Agrees with the
    hypograph of `c_transform(psi, cost)`.

    :return: Oracle in one more dimension.
    """
    lifted = hypograph_cost_bridge(cost)
    keep = ~_np.isneginf(psi.flat_values)
    graph = _np.column_stack([psi.nodes[keep], psi.flat_values[keep]])
    def margin(points):
        if graph.shape[0] == 0:
            return _np.full(points.shape[0], _np.inf)
        return _reduce_over_nodes(points, graph.shape[0],
            lambda q: lifted(graph[None, :, :], q[:, None, :]), _np.min)
    return _geometry.MembershipOracle(psi.dim + 1, margin=margin)


#####  Dual polarity, Rotem's transform and sharp  #####

def dual_polar_class_check(phi, tol=CLASS_TOL):
    """Check `phi` is in the class fixed by the functional dual polarity:
    `phi >= 1`, `phi(0) = 1`, convex samples, and `-1 <= L phi <= 0` on the
    dual nodes whose supremum is attained at an interior primal node.

    :return: :class:`Verdict` with witness `{"node", "value"}`.
    """
    values = phi.flat_values
    if _np.any(values < 1 - tol):
        i = int(_np.argmax(values < 1 - tol))
        return Verdict.violation("minimum", _node_witness(phi, i), exhaustive=False)
    try:
        index, value = _origin_value(phi)
    except ValueError:
        return Verdict.violation("origin", {"node": None, "value": None}, exhaustive=False)
    if abs(value - 1) > tol:
        return Verdict.violation("origin", _node_witness(phi, index), exhaustive=False)
    bad = convexity_violation(phi, tol)
    if bad is not None:
        return Verdict.violation("convexity", _node_witness(phi, bad), exhaustive=False)
    finite = _np.isfinite(values)
    X = phi.nodes[finite]
    f = values[finite]
    Y = phi.nodes
    interior = _np.all([(X[:, i] > lo) & (X[:, i] < hi) for i, (lo, hi) in enumerate(phi.box)], axis=0)
    best = _reduce_over_nodes(Y, X.shape[0], lambda y: y @ X.T - f[None, :], _np.argmax)
    L = _np.sum(Y * X[best], axis=1) - f[best]
    in_dom = interior[best]
    bad = in_dom & ((L < -1 - tol) | (L > tol))
    if _np.any(bad):
        i = int(_np.argmax(bad))
        return Verdict.violation("legendre-range", {"node": Y[i].tolist(), "value": float(L[i])}, exhaustive=False)
    return Verdict.passed(exhaustive=False)

def _ratio_sup(phi, target, sign, recession):
    X = phi.nodes
    f = phi.flat_values
    def terms(Y):
        num = 1 + sign * (Y @ X.T)
        with _np.errstate(divide="ignore", invalid="ignore"):
            t = num / f[None, :]
        t = _np.where(_np.isposinf(f)[None, :], 0.0, t)
        return _np.where(num >= 0, t, -_np.inf)
    Y = target.points()
    out = _reduce_over_nodes(Y, X.shape[0], terms, _np.max)
    if recession and phi.dim == 1:
        left, right = [_recession_slope(s, end) for s, end in zip(_end_slopes(phi), ("left", "right"))]
        # x -> +inf gives (1 + sign x y) / (phi(b) + right (x - b))
        limits = [_np.array([_ray_limit(sign * y, right) for y in Y[:, 0]]),
            _np.array([_ray_limit(-sign * y, left) for y in Y[:, 0]])]
        out = _np.maximum.reduce([out] + limits)
    return GridFunction(target.box, target.resolution, out)

def dual_polar_functional(phi, box=None, resolution=None, check=True, recession=True):
    """`T phi(y) = sup_x (1 - <x, y>) / phi(x)`, over nodes with `<x, y> <= 1`;
    the epigraph of `T phi` is the dual polar of the epigraph of `phi`.

    In one dimension the profile is continued linearly past the box with the
    secant slopes at its ends, and the limits along those rays are included
    (a truncated end with an infinite value adds nothing).

    :param check: Run :func:`dual_polar_class_check` first.

    :raises ClassViolation: If the check fails; the witness names the node.
    """
    if check:
        verdict = dual_polar_class_check(phi)
        if not verdict:
            raise ClassViolation("Should be in the class with minimum phi(0) = 1 ({})".format(verdict.kind),
                verdict.witness)
    return _ratio_sup(phi, _target(phi, box, resolution), -1, recession)

def rotem_transform(phi, box=None, resolution=None, recession=True):
    """`T_R phi(y) = sup_x (1 + <x, y>) / phi(x)`, over nodes with
    `1 + <x, y> >= 0`.  Recession terms as for :func:`dual_polar_functional`.

    :raises ValueError: Unless `phi > 0`.
    """
    if _np.any(phi.flat_values <= 0):
        raise ValueError("Should be a positive function")
    return _ratio_sup(phi, _target(phi, box, resolution), 1, recession)

def sharp_transform(f, beta=1.0, box=None, resolution=None):
    """`f#(x) = 1 / sup_y f(y) (1 + <x, y> / beta)_+^beta`, so that
    `(1/phi)#(-x) = 1 / T phi(x)` at `beta = 1`.

    :raises ValueError: Unless `f >= 0` and `beta > 0`.
    """
    if beta <= 0:
        raise ValueError("Should be beta > 0")
    if _np.any(f.flat_values < 0):
        raise ValueError("Should be a nonnegative function")
    target = _target(f, box, resolution)
    Y = f.nodes
    g = f.flat_values
    def terms(X):
        base = _np.maximum(1 + (X @ Y.T) / beta, 0.0)
        with _np.errstate(invalid="ignore"):
            t = g[None, :] * base ** beta
        return _np.where(base > 0, t, 0.0)
    sup = _reduce_over_nodes(target.points(), Y.shape[0], terms, _np.max)
    with _np.errstate(divide="ignore"):
        return GridFunction(target.box, target.resolution, 1.0 / sup)


#####  Invariant boundary of the A transform  #####

def a_transform_boundary_check(x_max=4.0, nodes=101, tol=1e-12):
    """On the curve `t = sqrt(x^2 - 1)`, `x >= 1`, the lifted cost
    `st + 1 - xy` of the A transform is `<= 0`, with equality exactly when
    `x = y`; points `(y, s)` below the curve make it negative against
    `(y, sqrt(y^2 - 1))`.

    :return: :class:`Verdict`, checked on all pairs of `nodes` points.
    """
    x = _np.linspace(1.0, x_max, nodes)
    t = _np.sqrt(x * x - 1)
    cost = t[:, None] * t[None, :] + 1 - x[:, None] * x[None, :]
    scale = 1 + x[:, None] * x[None, :]
    if _np.any(cost > tol * scale):
        i, j = _np.unravel_index(int(_np.argmax(cost)), cost.shape)
        return Verdict.violation("positive", {"x": float(x[i]), "y": float(x[j])})
    equal = _np.abs(cost) <= tol * scale
    off = equal & ~_np.eye(nodes, dtype=bool)
    if _np.any(off):
        i, j = _np.argwhere(off)[0]
        return Verdict.violation("equality", {"x": float(x[i]), "y": float(x[j])})
    below = 0.5 * t
    inner = below * t + 1 - x * x
    if _np.any(inner[1:] >= 0):
        i = int(_np.argmax(inner[1:] >= 0)) + 1
        return Verdict.violation("below", {"y": float(x[i]), "s": float(below[i])})
    return Verdict.passed()
