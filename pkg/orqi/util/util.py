"""
util
~~~~

Some basic utilities: reading and writing reports, the "inf" sentinel used
for extended real values in JSON, and deterministic direction grids on the
sphere.
"""

import csv as _csv
import json as _json
import math as _math
import sys as _sys
import numpy as _np

#: Size of the default direction grid on the circle.
CIRCLE_DIRECTIONS = 720
#: Size of the default (Fibonacci) direction grid on the 2-sphere.
SPHERE_DIRECTIONS = 2000


def encode_extended(values):
    """Convert an array of extended reals into nested lists suitable for JSON,
    with `+inf` written as the string `"inf"` and `-inf` as `"-inf"`.

    :param values: Array-like of floats, any shape.

    :return: Nested lists of floats and sentinel strings.
    """
    values = _np.asarray(values, dtype=float)
    if values.ndim == 0:
        return _encode_scalar(float(values))
    return [encode_extended(v) for v in values]

def _encode_scalar(v):
    if _math.isnan(v):
        raise ValueError("NaN is not an extended real")
    if v == _math.inf:
        return "inf"
    if v == -_math.inf:
        return "-inf"
    return v

def decode_extended(obj):
    """Inverse of :func:`encode_extended`.

    :return: `numpy` array of floats.
    """
    def conv(x):
        if isinstance(x, list):
            return [conv(y) for y in x]
        if x == "inf":
            return _math.inf
        if x == "-inf":
            return -_math.inf
        if isinstance(x, (int, float)) and not isinstance(x, bool):
            return float(x)
        raise ValueError("Should be a number, 'inf' or '-inf', not {!r}".format(x))
    values = _np.asarray(conv(obj), dtype=float)
    if _np.any(_np.isnan(values)):
        raise ValueError("NaN is not an extended real")
    return values

def read_json(path):
    """Load JSON from a file path, or from stdin if `path` is `"-"`."""
    if path == "-":
        return _json.load(_sys.stdin)
    with open(path, "r", encoding="utf-8") as f:
        return _json.load(f)

def dumps(obj):
    """Canonical JSON text: sorted keys, two space indent, trailing newline.
    Same input always gives byte-identical output."""
    return _json.dumps(obj, sort_keys=True, indent=2) + "\n"

def write_json(obj, path=None):
    """Write `obj` as canonical JSON to `path`, or stdout if `None`."""
    text = dumps(obj)
    if path is None:
        _sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)

def write_csv(header, rows, path=None):
    """Write a table as CSV.

    :param header: Sequence of column names.
    :param rows: Iterable of sequences, one per row.  Floats are written with
      `repr` precision; infinities as `inf`.
    :param path: File path, or `None` for stdout.
    """
    def run(f):
        writer = _csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(x) for x in row])
    if path is None:
        run(_sys.stdout)
    else:
        with open(path, "w", encoding="utf-8", newline="") as f:
            run(f)

def _format_cell(x):
    if isinstance(x, (bool, _np.bool_)):
        return int(x)
    if isinstance(x, (float, _np.floating)):
        return repr(float(x))
    return x

def read_points_csv(path):
    """Read one point per row from a CSV file (no header, or a header line of
    non-numeric names which is skipped).

    :return: Array of shape `(N, dim)`.
    """
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        for row in _csv.reader(f):
            if len(row) == 0:
                continue
            try:
                rows.append([float(x) for x in row])
            except ValueError:
                if len(rows) > 0:
                    raise ValueError("Should be numeric rows, got {!r}".format(row))
    if len(rows) == 0:
        raise ValueError("No points in '{}'".format(path))
    if len(set(len(r) for r in rows)) != 1:
        raise ValueError("Rows should all have the same length")
    return _np.asarray(rows, dtype=float)

def direction_grid(dim, count=None):
    """A deterministic grid of unit vectors.

      - `dim == 1`: the two directions `-1, +1`.
      - `dim == 2`: `count` equally spaced angles (default 720), starting at
        angle 0, so the axis directions are included when `count` is a
        multiple of 4.
      - `dim == 3`: the Fibonacci sphere with `count` points (default 2000).
      - otherwise: `count` (default 2000) normalised Gaussian vectors drawn
        from a generator seeded with 0.

    :return: Array of shape `(count, dim)`.
    """
    dim = int(dim)
    if dim < 1:
        raise ValueError("Should be a dimension >= 1")
    if dim == 1:
        return _np.array([[-1.0], [1.0]])
    if dim == 2:
        count = CIRCLE_DIRECTIONS if count is None else int(count)
        if count < 1:
            raise ValueError("Should be a positive count")
        angles = 2 * _np.pi * _np.arange(count) / count
        return _np.stack([_np.cos(angles), _np.sin(angles)], axis=1)
    count = SPHERE_DIRECTIONS if count is None else int(count)
    if count < 1:
        raise ValueError("Should be a positive count")
    if dim == 3:
        i = _np.arange(count) + 0.5
        z = 1 - 2 * i / count
        r = _np.sqrt(1 - z * z)
        phi = _np.pi * (1 + 5 ** 0.5) * i
        return _np.stack([r * _np.cos(phi), r * _np.sin(phi), z], axis=1)
    rng = _np.random.default_rng(0)
    v = rng.standard_normal((count, dim))
    return v / _np.linalg.norm(v, axis=1)[:, None]
