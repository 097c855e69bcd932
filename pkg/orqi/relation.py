"""
relation
~~~~~~~~

The exact finite engine.  A finite ground set `X`, subsets of it held as
bitmasks, symmetric "cost relations" `S` on `X`, and the transform

    K  |->  { y : (x,y) in S for all x in K }

which is the order reversing quasi involution (ORQI) determined by `S`.  Every
ORQI on the subsets of a finite set arises this way, and
:func:`induced_relation` recovers the relation from a materialised
:class:`TransformTable`.

All objects here are immutable, so can be shared freely between threads.
"""

import json as _json
import logging as _logging
import numpy as _np

_logger = _logging.getLogger(__name__)

#: Largest ground set for which a :class:`TransformTable` may be built.
TABLE_CAP = 16
#: Largest ground set for a :class:`CostRelation`.
RELATION_CAP = 64
#: Largest ground set for which :func:`is_orqi` checks every pair of subsets.
EXHAUSTIVE_ORQI_CAP = 8
#: Default number of sampled pairs for :func:`is_orqi` on large ground sets.
ORQI_SAMPLES = 100000
#: Default limit on the size of an image class.
IMAGE_CLASS_LIMIT = 2 ** 16


class GroundSetMismatch(ValueError):
    """Raised when objects over different ground sets are combined."""
    def __init__(self, first, second):
        super().__init__("Ground sets differ: {} and {}".format(first, second))
        self.witness = (first, second)


class NotAnOrqi(ValueError):
    """Raised when a transform which should be an ORQI is not.

    :param witness: Dictionary describing the failure.
    """
    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class GroundSet():
    """An ordered finite set of distinctly named elements.  Elements are
    addressed by index `0..n-1` or by label.

    :param labels: Sequence of labels, converted to strings.
    """
    def __init__(self, labels):
        labels = tuple(str(x) for x in labels)
        if len(set(labels)) != len(labels):
            raise ValueError("Should be distinct labels, got {}".format(list(labels)))
        self._labels = labels
        self._index = {label: i for i, label in enumerate(labels)}

    @staticmethod
    def of_size(n):
        """Ground set with labels `"1"` to `"n"`."""
        return GroundSet(str(i + 1) for i in range(n))

    @property
    def labels(self):
        return self._labels

    @property
    def full_bits(self):
        return (1 << len(self._labels)) - 1

    def __len__(self):
        return len(self._labels)

    def __eq__(self, other):
        if not isinstance(other, GroundSet):
            return NotImplemented
        return self is other or self._labels == other._labels

    def __hash__(self):
        return hash(self._labels)

    def __repr__(self):
        return "GroundSet({})".format(list(self._labels))

    def index(self, element):
        """Index of an element given by index or label.

        :raises IndexError: If there is no such element.
        """
        if isinstance(element, (int, _np.integer)) and not isinstance(element, bool):
            if 0 <= element < len(self._labels):
                return int(element)
            raise IndexError("No element with index {} in a ground set of size {}".format(element, len(self)))
        try:
            return self._index[str(element)]
        except KeyError:
            raise IndexError("No element labelled '{}'".format(element))

    def mask(self, elements=()):
        """The subset of the given elements (indices or labels)."""
        bits = 0
        for e in elements:
            bits |= 1 << self.index(e)
        return SubsetMask(self, bits)

    @property
    def empty(self):
        return SubsetMask(self, 0)

    @property
    def full(self):
        return SubsetMask(self, self.full_bits)

    def subsets(self):
        """Iterate over all `2^n` subsets, in order of bitmask."""
        for bits in range(1 << len(self)):
            yield SubsetMask(self, bits)

    def check_same(self, other):
        if self != other:
            raise GroundSetMismatch(self, other)


def _bits_of(bits):
    """Indices of set bits, ascending."""
    out = []
    index = 0
    while bits:
        if bits & 1:
            out.append(index)
        bits >>= 1
        index += 1
    return out


class SubsetMask():
    """A subset of a :class:`GroundSet`, stored as an integer bitmask (bit `i`
    set means element `i` is a member).  Immutable and hashable.

    Supports `&`, `|`, `-` (difference), `<=` / `<` (inclusion), `len`,
    iteration over member indices, and `in` for indices.
    """
    def __init__(self, ground, bits):
        bits = int(bits)
        if bits < 0 or bits > ground.full_bits:
            raise ValueError("Should be a bitmask over {} elements".format(len(ground)))
        self._ground = ground
        self._bits = bits

    @property
    def ground(self):
        return self._ground

    @property
    def bits(self):
        return self._bits

    @property
    def labels(self):
        """Member labels, in ground set order."""
        return [self._ground.labels[i] for i in self]

    def _other_bits(self, other):
        self._ground.check_same(other.ground)
        return other.bits

    def __and__(self, other):
        return SubsetMask(self._ground, self._bits & self._other_bits(other))

    def __or__(self, other):
        return SubsetMask(self._ground, self._bits | self._other_bits(other))

    def __sub__(self, other):
        return SubsetMask(self._ground, self._bits & ~self._other_bits(other))

    def complement(self):
        return SubsetMask(self._ground, self._ground.full_bits & ~self._bits)

    def __le__(self, other):
        return self._bits & ~self._other_bits(other) == 0

    def __lt__(self, other):
        return self <= other and self._bits != other.bits

    def __ge__(self, other):
        return other <= self

    def __gt__(self, other):
        return other < self

    def __eq__(self, other):
        if not isinstance(other, SubsetMask):
            return NotImplemented
        return self._bits == other._bits and self._ground == other._ground

    def __hash__(self):
        return hash((self._ground, self._bits))

    def __len__(self):
        return bin(self._bits).count("1")

    def __iter__(self):
        return iter(_bits_of(self._bits))

    def __contains__(self, element):
        return (self._bits >> self._ground.index(element)) & 1 == 1

    def sort_key(self):
        """Key ordering subsets by cardinality, then by bitmask."""
        return (len(self), self._bits)

    def __repr__(self):
        return "SubsetMask({})".format(self.labels)


def sort_family(family):
    """Deduplicate and sort subsets by :meth:`SubsetMask.sort_key`."""
    return sorted(set(family), key=SubsetMask.sort_key)


class CostRelation():
    """A symmetric relation `S` on a ground set: `rel[x][y]` true means the
    cost `c(x,y)` is `+1`, false means `-1`.  Stored as one bitmask per row.

    :param ground: The :class:`GroundSet`.
    :param rel: Square matrix of booleans (nested lists or `numpy` array).

    :raises ValueError: If the matrix is not square or not symmetric.
    """
    def __init__(self, ground, rel):
        n = len(ground)
        if n > RELATION_CAP:
            raise ValueError("Should be at most {} elements, got {}".format(RELATION_CAP, n))
        rel = _np.asarray(rel, dtype=bool)
        if rel.shape != (n, n):
            raise ValueError("Should be a {}x{} matrix, got shape {}".format(n, n, rel.shape))
        rows = []
        for x in range(n):
            bits = 0
            for y in _np.flatnonzero(rel[x]):
                bits |= 1 << int(y)
            rows.append(bits)
        self._init(ground, rows)

    def _init(self, ground, rows):
        self._ground = ground
        self._rows = tuple(rows)
        for x in range(len(ground)):
            for y in range(x + 1, len(ground)):
                if ((rows[x] >> y) & 1) != ((rows[y] >> x) & 1):
                    raise ValueError("Should be symmetric, but rel[{0}][{1}] != rel[{1}][{0}]".format(
                        ground.labels[x], ground.labels[y]))

    @staticmethod
    def from_rows(ground, rows):
        """Construct from one bitmask per element."""
        if len(rows) != len(ground):
            raise ValueError("Should be one row per element")
        if len(ground) > RELATION_CAP:
            raise ValueError("Should be at most {} elements, got {}".format(RELATION_CAP, len(ground)))
        relation = CostRelation.__new__(CostRelation)
        relation._init(ground, [int(r) for r in rows])
        return relation

    @staticmethod
    def all_true(ground):
        return CostRelation.from_rows(ground, [ground.full_bits] * len(ground))

    @staticmethod
    def all_false(ground):
        return CostRelation.from_rows(ground, [0] * len(ground))

    @staticmethod
    def identity(ground):
        """The diagonal relation, `rel[x][y]` true iff `x == y`."""
        return CostRelation.from_rows(ground, [1 << x for x in range(len(ground))])

    @staticmethod
    def from_pairs(ground, pairs):
        """The smallest symmetric relation containing the given pairs of
        elements (indices or labels)."""
        rows = [0] * len(ground)
        for a, b in pairs:
            x, y = ground.index(a), ground.index(b)
            rows[x] |= 1 << y
            rows[y] |= 1 << x
        return CostRelation.from_rows(ground, rows)

    @staticmethod
    def random(ground, rng, p=0.5):
        """Random symmetric relation, each unordered pair (diagonal included)
        related independently with probability `p`.

        :param rng: A :class:`numpy.random.Generator`.
        """
        n = len(ground)
        upper = _np.triu(rng.random((n, n)) < p)
        return CostRelation(ground, upper | upper.T)

    @staticmethod
    def all_symmetric(ground):
        """Generate every symmetric relation on the ground set: there are
        `2^(n(n+1)/2)` of them."""
        n = len(ground)
        pairs = [(x, y) for x in range(n) for y in range(x, n)]
        for code in range(1 << len(pairs)):
            rows = [0] * n
            for i, (x, y) in enumerate(pairs):
                if (code >> i) & 1:
                    rows[x] |= 1 << y
                    rows[y] |= 1 << x
            yield CostRelation.from_rows(ground, rows)

    @property
    def ground(self):
        return self._ground

    @property
    def rows(self):
        """Tuple of row bitmasks."""
        return self._rows

    @property
    def matrix(self):
        """The relation as an `n x n` boolean `numpy` array."""
        n = len(self._ground)
        return _np.array([[(row >> y) & 1 == 1 for y in range(n)] for row in self._rows], dtype=bool).reshape(n, n)

    def related(self, x, y):
        x, y = self._ground.index(x), self._ground.index(y)
        return (self._rows[x] >> y) & 1 == 1

    def __eq__(self, other):
        if not isinstance(other, CostRelation):
            return NotImplemented
        return self._ground == other._ground and self._rows == other._rows

    def __hash__(self):
        return hash((self._ground, self._rows))

    def __repr__(self):
        pairs = [(self._ground.labels[x], self._ground.labels[y])
            for x in range(len(self._ground)) for y in _bits_of(self._rows[x]) if x <= y]
        return "CostRelation({}, pairs={})".format(list(self._ground.labels), pairs)

    def to_dict(self):
        return {"labels": list(self._ground.labels), "rel": self.matrix.tolist()}

    @staticmethod
    def from_dict(data):
        """Inverse of :meth:`to_dict`; the ground set must be nonempty."""
        try:
            labels, rel = data["labels"], data["rel"]
        except (KeyError, TypeError):
            raise ValueError("Should be an object with keys 'labels' and 'rel'")
        if len(labels) == 0:
            raise ValueError("Should be a nonempty ground set")
        for row in rel:
            if len(row) != len(labels) or not all(isinstance(v, bool) for v in row):
                raise ValueError("Should be rows of {} booleans".format(len(labels)))
        return CostRelation(GroundSet(labels), rel)


class TransformTable():
    """An arbitrary map from subsets of a ground set to subsets, materialised
    as a table indexed by bitmask.  Limited to :data:`TABLE_CAP` elements.

    :param ground: The :class:`GroundSet`.
    :param images: Sequence of `2^n` image bitmasks, entry `K` being the image
      of the subset with bitmask `K`.
    """
    def __init__(self, ground, images):
        if len(ground) > TABLE_CAP:
            raise ValueError("Should be at most {} elements for a table, got {}".format(TABLE_CAP, len(ground)))
        images = tuple(int(b) for b in images)
        if len(images) != 1 << len(ground):
            raise ValueError("Should be {} images, got {}".format(1 << len(ground), len(images)))
        if any(b < 0 or b > ground.full_bits for b in images):
            raise ValueError("Images should be bitmasks over {} elements".format(len(ground)))
        self._ground = ground
        self._images = images

    @staticmethod
    def from_fibers(ground, fibers):
        """The "one sided dual" `K -> intersection of fibers[x] for x in K`.
        Any fibers are allowed; the result is an ORQI exactly when the fibers
        form a symmetric relation.

        :param fibers: One :class:`SubsetMask` or bitmask per element.
        """
        fibers = [f.bits if isinstance(f, SubsetMask) else int(f) for f in fibers]
        if len(fibers) != len(ground):
            raise ValueError("Should be one fiber per element")
        images = [ground.full_bits] * (1 << len(ground))
        for bits in range(1, 1 << len(ground)):
            low = bits & -bits
            images[bits] = images[bits ^ low] & fibers[low.bit_length() - 1]
        return TransformTable(ground, images)

    @staticmethod
    def from_relation(relation):
        """Table of :func:`c_dual` for the relation."""
        return TransformTable.from_fibers(relation.ground, relation.rows)

    @staticmethod
    def from_function(ground, func):
        """Tabulate a function taking a :class:`SubsetMask` and returning a
        :class:`SubsetMask` or an iterable of elements."""
        images = []
        for K in ground.subsets():
            image = func(K)
            if not isinstance(image, SubsetMask):
                image = ground.mask(image)
            ground.check_same(image.ground)
            images.append(image.bits)
        return TransformTable(ground, images)

    @property
    def ground(self):
        return self._ground

    @property
    def images(self):
        """Tuple of image bitmasks, indexed by bitmask."""
        return self._images

    def __call__(self, K):
        self._ground.check_same(K.ground)
        return SubsetMask(self._ground, self._images[K.bits])

    def __eq__(self, other):
        if not isinstance(other, TransformTable):
            return NotImplemented
        return self._ground == other._ground and self._images == other._images

    def __hash__(self):
        return hash((self._ground, self._images))

    def __repr__(self):
        return "TransformTable({}, {} subsets)".format(list(self._ground.labels), len(self._images))

    def to_dict(self):
        """JSON form; map keys are the JSON text of the member label list, in
        ground set order."""
        mapping = {}
        for K in self._ground.subsets():
            mapping[_json.dumps(K.labels)] = self(K).labels
        return {"labels": list(self._ground.labels), "map": mapping}

    @staticmethod
    def from_dict(data):
        try:
            labels, mapping = data["labels"], data["map"]
        except (KeyError, TypeError):
            raise ValueError("Should be an object with keys 'labels' and 'map'")
        if len(labels) == 0:
            raise ValueError("Should be a nonempty ground set")
        ground = GroundSet(labels)
        images = [None] * (1 << len(ground))
        for key, value in mapping.items():
            try:
                members = _json.loads(key)
            except ValueError:
                raise ValueError("Map key {!r} should be a JSON list of labels".format(key))
            images[ground.mask(members).bits] = ground.mask(value).bits
        missing = [i for i, v in enumerate(images) if v is None]
        if len(missing) > 0:
            raise ValueError("Map is not total, missing {}".format(SubsetMask(ground, missing[0]).labels))
        return TransformTable(ground, images)


def _jsonable(value):
    if isinstance(value, SubsetMask):
        return value.labels
    if isinstance(value, GroundSet):
        return list(value.labels)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, _np.generic):
        return value.item()
    return value


class Verdict():
    """Outcome of a law check: either ok, or a violation of some `kind` with
    a `witness` (a dictionary naming the offending subsets).  Truthy iff ok.

    :param exhaustive: False if the check sampled its cases, so an ok verdict
      is not a proof.
    """
    def __init__(self, ok, kind=None, witness=None, exhaustive=True):
        self.ok = bool(ok)
        self.kind = kind
        self.witness = witness
        self.exhaustive = exhaustive

    @staticmethod
    def passed(exhaustive=True):
        return Verdict(True, exhaustive=exhaustive)

    @staticmethod
    def violation(kind, witness, exhaustive=True):
        return Verdict(False, kind, witness, exhaustive)

    def __bool__(self):
        return self.ok

    def __repr__(self):
        if self.ok:
            return "Verdict(ok, exhaustive={})".format(self.exhaustive)
        return "Verdict(violation={!r}, witness={!r})".format(self.kind, self.witness)

    def to_dict(self):
        out = {"ok": self.ok, "exhaustive": self.exhaustive}
        if not self.ok:
            out["violation"] = {"kind": self.kind, "witness": _jsonable(self.witness)}
        return out


def c_dual(S, K):
    """The c-dual `{ y : rel[x][y] for all x in K }`; the full set when `K` is
    empty.

    :param S: :class:`CostRelation`
    :param K: :class:`SubsetMask` over the same ground set.
    """
    S.ground.check_same(K.ground)
    bits = K.ground.full_bits
    rows = S.rows
    k = K.bits
    while k:
        low = k & -k
        bits &= rows[low.bit_length() - 1]
        k ^= low
    return SubsetMask(K.ground, bits)

def fiber(S, x):
    """Row `x` of the relation, the c-dual of `{x}`.

    :param x: Element index or label.
    """
    return SubsetMask(S.ground, S.rows[S.ground.index(x)])

def envelope(S, K):
    """`TTK`, the smallest c-closed set containing `K`."""
    return c_dual(S, c_dual(S, K))

def image_class(S, limit=IMAGE_CLASS_LIMIT):
    """The image `{ c_dual(K) : K subset of X }`, sorted by cardinality then
    bitmask.  Computed as all intersections of fibers, together with `X`.

    :param limit: Raise `ValueError` once the class has more members.
    """
    ground = S.ground
    family = {ground.full_bits}
    for row in S.rows:
        family |= {b & row for b in family}
        if len(family) > limit:
            raise ValueError("Image class has more than {} members".format(limit))
    return sort_family(SubsetMask(ground, b) for b in family)

def lattice_law_check(S, family):
    """Check `T(union of family) == intersection of T(members)`.  The empty
    family has union the empty set and meet `X`."""
    ground = S.ground
    union = ground.empty
    meet = ground.full
    for K in family:
        union = union | K
        meet = meet & c_dual(S, K)
    lhs = c_dual(S, union)
    if lhs == meet:
        return Verdict.passed()
    return Verdict.violation("lattice", {"union": union, "T_union": lhs, "meet_of_T": meet})

def induced_relation(T):
    """The relation `S = {(x,y) : y in T({x})}` of an ORQI table.

    :raises NotAnOrqi: If the fibers are not symmetric (witness the pair) or
      the c-dual of the relation does not reproduce `T` (witness the subset).
    """
    ground = T.ground
    rows = [T.images[1 << x] for x in range(len(ground))]
    for x in range(len(ground)):
        for y in range(x + 1, len(ground)):
            if ((rows[x] >> y) & 1) != ((rows[y] >> x) & 1):
                raise NotAnOrqi("Fibers are not symmetric", {"pair": [ground.labels[x], ground.labels[y]]})
    relation = CostRelation.from_rows(ground, rows)
    rebuilt = TransformTable.from_relation(relation)
    for bits, (a, b) in enumerate(zip(rebuilt.images, T.images)):
        if a != b:
            K = SubsetMask(ground, bits)
            raise NotAnOrqi("Transform is not the c-dual of its fibers",
                {"K": K, "TK": T(K), "c_dual": rebuilt(K)})
    return relation

def _submasks_ascending(bits):
    sub = 0
    while True:
        yield sub
        if sub == bits:
            return
        sub = (sub - bits) & bits

def order_check(T, reverse=True, exhaustive=False, samples=ORQI_SAMPLES, seed=0):
    """Check that `L <= K` implies `TK <= TL` (or, with `reverse=False`, that
    `TL <= TK`).

    For ground sets of at most :data:`EXHAUSTIVE_ORQI_CAP` elements every pair
    is checked.  For larger ground sets pairs are sampled, unless `exhaustive`
    is set, in which case every pair `K - {x}`, `K` is checked (enough, by
    transitivity).

    :return: :class:`Verdict` of kind "order-reversion" or
      "order-preservation", the witness naming `L` and `K`.
    """
    ground = T.ground
    images = T.images
    n = len(ground)
    kind = "order-reversion" if reverse else "order-preservation"

    def fails(l, k):
        if reverse:
            return images[k] & ~images[l]
        return images[l] & ~images[k]

    def witness(l, k, full_check):
        L, K = SubsetMask(ground, l), SubsetMask(ground, k)
        return Verdict.violation(kind, {"L": L, "K": K, "TL": T(L), "TK": T(K)}, exhaustive=full_check)

    if n <= EXHAUSTIVE_ORQI_CAP:
        for k in range(ground.full_bits, -1, -1):
            for l in _submasks_ascending(k):
                if fails(l, k):
                    return witness(l, k, True)
        return Verdict.passed()
    if exhaustive:
        _logger.info("Checking %s over %s covering pairs", kind, n << n)
        for k in range(1 << n):
            for x in _bits_of(k):
                l = k & ~(1 << x)
                if fails(l, k):
                    return witness(l, k, True)
        return Verdict.passed()
    _logger.warning("Checking %s on %s elements by sampling %s pairs", kind, n, samples)
    rng = _np.random.default_rng(seed)
    ks = rng.integers(0, 1 << n, size=samples)
    ls = ks & rng.integers(0, 1 << n, size=samples)
    for k, l in zip(ks.tolist(), ls.tolist()):
        if fails(l, k):
            return witness(l, k, False)
    return Verdict.passed(exhaustive=False)

def is_orqi(T, exhaustive=False, samples=ORQI_SAMPLES, seed=0):
    """Check the two ORQI laws: `K <= TTK` for every `K`, and `L <= K`
    implies `TK <= TL`.  The first law is always checked for every subset,
    the second as in :func:`order_check`.

    :return: :class:`Verdict`; the witness names the subsets `K` (and `L`).
    """
    ground = T.ground
    images = T.images
    for bits in range(1 << len(ground)):
        if bits & ~images[images[bits]]:
            K = SubsetMask(ground, bits)
            return Verdict.violation("quasi-involution", {"K": K, "TK": T(K), "TTK": T(T(K))})
    return order_check(T, True, exhaustive, samples, seed)
