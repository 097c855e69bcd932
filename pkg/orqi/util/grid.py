"""
grid
~~~~

Handles evaluating membership oracles over large uniform grids, a "tile" of
rows at a time, optionally using a pool of worker threads.  Tiles have fixed
positions in the output, so the result never depends on the schedule.
"""

import math as _math
import threading as _threading
import queue
import logging as _logging
import numpy as _np

#: Relative width of the band around a boundary inside which grid nodes are
#: left out of agreement statistics.
BOUNDARY_BAND = 1e-9


class GridWindow():
    """Stores details of a uniform grid over an axis-aligned box:

      - :attr:`box` the box, one `(low, high)` pair per axis.
      - :attr:`resolution` the number of nodes along each axis.
      - :attr:`band` the relative width of the boundary band.
      - :attr:`tile_rows` how many rows (slices along the first axis) make up
        one tile of work.

    Nodes are ordered as `numpy` does for `indexing="ij"`, so the first axis
    varies slowest.

    :param box: Sequence of `(low, high)` pairs.
    :param resolution: Number of nodes per axis, either one integer for all
      axes or a sequence.
    :param **kwargs: Set any properties by keyword.
    """
    def __init__(self, box, resolution, **kwargs):
        self.box = box
        self.resolution = resolution
        self.band = BOUNDARY_BAND
        self.tile_rows = 16

        for key, value in kwargs.items():
            try:
                if not hasattr(self, key):
                    raise Exception()
                setattr(self, key, value)
            except ValueError:
                raise
            except:
                raise ValueError("Have no property of name '{}'".format(key))

    @property
    def box(self):
        """The box, a tuple of `(low, high)` pairs of floats."""
        return self._box

    @box.setter
    def box(self, v):
        try:
            v = tuple((float(lo), float(hi)) for (lo, hi) in v)
            assert len(v) > 0
            for lo, hi in v:
                assert _math.isfinite(lo) and _math.isfinite(hi)
                assert lo <= hi
            self._box = v
        except:
            raise ValueError("Should be a sequence of finite (low, high) pairs.")

    @property
    def resolution(self):
        """Nodes per axis, a tuple with one entry per axis of the box."""
        r = self._resolution
        if len(r) == 1 and self.dim > 1:
            r = r * self.dim
        if len(r) != self.dim:
            raise ValueError("Resolution has {} entries but the box has {} axes".format(len(r), self.dim))
        return r

    @resolution.setter
    def resolution(self, v):
        try:
            if isinstance(v, (int, _np.integer)):
                v = (v,)
            v = tuple(int(x) for x in v)
            assert len(v) > 0
            assert all(x >= 1 for x in v)
            self._resolution = v
        except:
            raise ValueError("Should be a positive integer, or a sequence of them.")

    @property
    def band(self):
        """Boundary band, relative to :attr:`scale`.  Nodes where an oracle's
        margin is within `band * scale` of zero count as boundary nodes."""
        return self._band

    @band.setter
    def band(self, v):
        try:
            v = float(v)
            assert v >= 0
            self._band = v
        except:
            raise ValueError("Should be a float >= 0")

    @property
    def tile_rows(self):
        """Number of rows, along the first axis, in each tile of work."""
        return self._tile_rows

    @tile_rows.setter
    def tile_rows(self, v):
        try:
            v = int(v)
            assert v > 0
            self._tile_rows = v
        except:
            raise ValueError("Should be an integer >= 1")

    @property
    def dim(self):
        return len(self.box)

    @property
    def axes(self):
        """List of the node coordinates along each axis."""
        return [_np.linspace(lo, hi, n) for (lo, hi), n in zip(self.box, self.resolution)]

    @property
    def spacing(self):
        """Grid spacing along each axis (0 for an axis with a single node)."""
        return tuple((hi - lo) / (n - 1) if n > 1 else 0.0
            for (lo, hi), n in zip(self.box, self.resolution))

    @property
    def scale(self):
        """The size of the window, at least 1: the largest absolute coordinate."""
        return max([1.0] + [max(abs(lo), abs(hi)) for lo, hi in self.box])

    @property
    def size(self):
        """Total number of nodes."""
        return int(_np.prod(self.resolution))

    @property
    def row_size(self):
        """Number of nodes in one row (slice along the first axis)."""
        return int(_np.prod(self.resolution[1:]))

    @property
    def tiles(self):
        """The tiles, as a list of `(start, stop)` ranges of flat node index."""
        step = self.tile_rows * self.row_size
        return [(start, min(start + step, self.size)) for start in range(0, self.size, step)]

    def points(self, start=0, stop=None):
        """Node coordinates for flat indices `start` to `stop`.

        :return: Array of shape `(stop - start, dim)`.
        """
        if stop is None:
            stop = self.size
        index = _np.unravel_index(_np.arange(start, stop), self.resolution)
        return _np.stack([axis[i] for axis, i in zip(self.axes, index)], axis=1)


class GridEvaluator(GridWindow):
    """Evaluates membership oracles over the grid, one tile at a time.

    An oracle here is any callable taking an array of points of shape
    `(N, dim)` and returning a boolean array of shape `(N,)`.  If it also has
    a `margins` method returning signed slack (positive inside), nodes close
    to its boundary are excluded from :meth:`agreement`.

    :param workers: Number of worker threads; `1` evaluates on the calling
      thread.
    """
    def __init__(self, box, resolution, workers=1, **kwargs):
        super().__init__(box, resolution, **kwargs)
        self.workers = workers

    @property
    def workers(self):
        """Number of worker threads used for evaluation."""
        return self._workers

    @workers.setter
    def workers(self, v):
        try:
            v = int(v)
            assert v > 0
            self._workers = v
        except:
            raise ValueError("Should be an integer >= 1")

    def _map_tiles(self, func):
        return run_jobs(self.tiles, lambda tile: func(self.points(*tile)), self.workers)

    def evaluate(self, oracle):
        """Membership of every node.

        :return: Boolean array of shape :attr:`resolution`.
        """
        parts = self._map_tiles(lambda pts: _np.asarray(oracle(pts), dtype=bool))
        return _np.concatenate(parts).reshape(self.resolution)

    def margins(self, oracle):
        """Margins of every node, or `None` if the oracle has none."""
        if getattr(oracle, "margins", None) is None:
            return None
        parts = self._map_tiles(oracle.margins)
        if any(p is None for p in parts):
            return None
        return _np.concatenate(parts).reshape(self.resolution)

    def members(self, oracle):
        """The nodes which are members.

        :return: Array of shape `(M, dim)`.
        """
        inside = self.evaluate(oracle).ravel()
        return self.points()[inside]

    def boundary(self, *oracles):
        """Boolean array, true at nodes within the boundary band of any of
        the oracles."""
        near = _np.zeros(self.resolution, dtype=bool)
        width = self.band * self.scale
        for oracle in oracles:
            m = self.margins(oracle)
            if m is not None:
                near |= _np.abs(m) <= width
        return near

    def agreement(self, first, second):
        """Compare two oracles node by node, leaving out boundary nodes.

        :return: Instance of :class:`GridReport`.
        """
        a = self.evaluate(first)
        b = self.evaluate(second)
        excluded = self.boundary(first, second)
        differ = (a != b) & ~excluded
        return GridReport(compared=int(self.size - excluded.sum()),
            disagreements=int(differ.sum()), excluded=int(excluded.sum()),
            box=self.box, resolution=self.resolution)


class GridReport():
    """Agreement statistics of two oracles over a grid.

    :param compared: Number of nodes compared.
    :param disagreements: Number of compared nodes where the oracles differ.
    :param excluded: Number of boundary nodes left out.
    """
    def __init__(self, compared, disagreements, excluded, box, resolution):
        self.compared = compared
        self.disagreements = disagreements
        self.excluded = excluded
        self.box = box
        self.resolution = resolution

    @property
    def agreement(self):
        """Fraction of compared nodes where the oracles agree."""
        if self.compared == 0:
            return 1.0
        return 1.0 - self.disagreements / self.compared

    def to_dict(self):
        return {"agreement": self.agreement, "compared": self.compared,
            "disagreements": self.disagreements, "excluded": self.excluded,
            "box": [list(b) for b in self.box], "resolution": list(self.resolution)}

    def __repr__(self):
        return "GridReport(agreement={:.6f}, compared={}, excluded={})".format(
            self.agreement, self.compared, self.excluded)


def run_jobs(jobs, func, workers=1):
    """Run `func` on each job, returning results in the order of `jobs`.

    With more than one worker the jobs are shared out to a pool of
    :class:`Pooler` threads.  An exception in any job is logged and re-raised
    here once the pool has stopped.

    :param jobs: Sequence of hashable job descriptions.
    :param func: Callable taking one job.
    :param workers: Number of threads.
    """
    jobs = list(jobs)
    if workers <= 1 or len(jobs) <= 1:
        return [func(job) for job in jobs]
    marsher = _TileJobMarsher(jobs)
    pool = [Pooler(marsher, func) for _ in range(min(workers, len(jobs)))]
    for p in pool:
        p.start()
    for p in pool:
        p.join()
    if marsher.failure is not None:
        raise marsher.failure
    return [marsher.result(job) for job in jobs]


class _TileJobMarsher():
    """Pulled out functionality to think hard about synchronization."""
    def __init__(self, jobs):
        self._jobs = list(reversed(jobs))
        self._results = dict()
        self._failure = None
        self._lock = _threading.RLock()

    def get(self):
        """Get the next job, or raise :class:`queue.Empty` if there are none
        left (or a job has failed)."""
        with self._lock:
            if self._failure is not None or len(self._jobs) == 0:
                raise queue.Empty()
            return self._jobs.pop()

    def put(self, job, result):
        with self._lock:
            self._results[job] = result

    def fail(self, exception):
        with self._lock:
            if self._failure is None:
                self._failure = exception

    @property
    def failure(self):
        """The first exception raised by a job, or `None`."""
        return self._failure

    def result(self, job):
        return self._results[job]


class Pooler(_threading.Thread):
    """Worker thread, pulling jobs from a :class:`_TileJobMarsher` until
    there are none left."""
    def __init__(self, marsher, func):
        super().__init__(daemon=True)
        self._marsher = marsher
        self._func = func
        self._logger = _logging.getLogger(__name__)

    def run(self):
        while True:
            try:
                job = self._marsher.get()
            except queue.Empty:
                return
            try:
                self._marsher.put(job, self._func(job))
            except Exception as ex:
                self._logger.exception("From job {}...".format(job))
                self._marsher.fail(ex)
                return
