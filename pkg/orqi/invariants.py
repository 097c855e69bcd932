"""
invariants
~~~~~~~~~~

Invariant sets `K = TK` of the finite ORQI given by a cost relation.  Every
invariant set lies inside

    X0 = { x : c(x,x) = +1 },

the diagonal of the relation, and comparing `T(X0)` with `X0` sorts
relations into three cases:

  - `T(X0) == X0`: then `X0` is the only invariant set.
  - `T(X0)` not inside `X0`: there is no invariant set.
  - `T(X0)` strictly inside `X0`: anything can happen, so we enumerate.

Whatever the case, any set `K0` with `K0 <= T(K0)` extends to a maximal such
set `K`, and then `T(K) & X0 == K`.
"""

import logging as _logging

from .relation import CostRelation, GroundSet, SubsetMask, c_dual, sort_family
from .util.grid import run_jobs

_logger = _logging.getLogger(__name__)

#: Largest `X0` for which invariant sets are enumerated.
INVARIANT_CAP = 20

UNIQUE = "UniqueX0"
NONE_EXISTS = "NoneExists"
AMBIGUOUS = "Ambiguous"


class NotAClique(ValueError):
    """Raised when the seed of :func:`maximal_almost_invariant` does not
    satisfy `K0 <= T(K0)`.  The witness is a pair of labels `(x, y)` in `K0`
    which are not related (possibly `x == y`)."""
    def __init__(self, x, y):
        super().__init__("Elements '{}' and '{}' are not related".format(x, y))
        self.witness = (x, y)


class InvariantClassification():
    """Result of :func:`classify`.

    :param x_zero: The diagonal `X0`.
    :param kind: One of "UniqueX0", "NoneExists" or "Ambiguous".
    :param invariant_sets: Every invariant set, sorted.
    :param case: How `T(X0)` compares with `X0`: "equal", "not-contained" or
      "strictly-contained".
    """
    def __init__(self, x_zero, kind, invariant_sets, case):
        self.x_zero = x_zero
        self.kind = kind
        self.invariant_sets = invariant_sets
        self.case = case

    def __repr__(self):
        return "InvariantClassification(kind={}, case={}, sets={})".format(self.kind,
            self.case, [K.labels for K in self.invariant_sets])

    def to_dict(self):
        return {"x_zero": self.x_zero.labels, "kind": self.kind, "case": self.case,
            "invariant_sets": [K.labels for K in self.invariant_sets]}


def x_zero(S):
    """The diagonal `{ x : rel[x][x] }`."""
    bits = 0
    for x, row in enumerate(S.rows):
        if (row >> x) & 1:
            bits |= 1 << x
    return SubsetMask(S.ground, bits)

def classify(S, cap=INVARIANT_CAP, workers=1):
    """Classify the invariant sets of `S`.

      - "UniqueX0" iff `T(X0) == X0`; then `X0` is the only invariant set.
      - "NoneExists" iff there is no invariant set: always when `T(X0)` is
        not inside `X0`, and sometimes when it is strictly inside.
      - "Ambiguous" iff `T(X0)` is strictly inside `X0` and there are
        invariant sets; they are all listed.

    :param cap: Enumeration limit on `|X0|`, see
      :func:`enumerate_invariant_sets`.

    :return: :class:`InvariantClassification`.
    """
    X0 = x_zero(S)
    TX0 = c_dual(S, X0)
    if TX0 == X0:
        return InvariantClassification(X0, UNIQUE, [X0], "equal")
    if not TX0 <= X0:
        return InvariantClassification(X0, NONE_EXISTS, [], "not-contained")
    found = enumerate_invariant_sets(S, cap, workers)
    kind = AMBIGUOUS if len(found) > 0 else NONE_EXISTS
    return InvariantClassification(X0, kind, found, "strictly-contained")

def _invariant_with_prefix(rows, full, free, prefix):
    found = []
    sub = 0
    while True:
        k = sub | prefix
        dual = full
        rest = k
        while rest:
            low = rest & -rest
            dual &= rows[low.bit_length() - 1]
            rest ^= low
        if dual == k:
            found.append(k)
        if sub == free:
            return found
        sub = (sub - free) & free

def enumerate_invariant_sets(S, cap=INVARIANT_CAP, workers=1):
    """Every `K` inside `X0` with `c_dual(K) == K`, by brute force over the
    subsets of `X0`.  The search is split by which of the first few elements
    of `X0` are in `K`; the pieces may run on a pool of threads.

    :param cap: Raise `ValueError` if `|X0|` is larger than this.

    :return: List of :class:`SubsetMask`, sorted by cardinality then bitmask.
    """
    X0 = x_zero(S)
    if len(X0) > cap:
        raise ValueError("X0 has {} elements, more than the cap of {}".format(len(X0), cap))
    members = list(X0)
    split = members[:min(4, len(members))]
    free = 0
    for x in members[len(split):]:
        free |= 1 << x
    prefixes = []
    for choice in range(1 << len(split)):
        prefixes.append(sum(1 << x for i, x in enumerate(split) if (choice >> i) & 1))
    _logger.debug("Enumerating %s subsets of X0 in %s pieces", 1 << len(members), len(prefixes))
    full = S.ground.full_bits
    pieces = run_jobs(prefixes, lambda p: _invariant_with_prefix(S.rows, full, free, p), workers)
    return sort_family(SubsetMask(S.ground, k) for piece in pieces for k in piece)

def maximal_almost_invariant(S, K0, order=None):
    """Extend `K0` (which must satisfy `K0 <= c_dual(K0)`, that is, all pairs
    in `K0` are related) greedily to a maximal `K` with `K <= c_dual(K)`, by
    adding each element `z` of `X0`, in turn, which is related to everything
    so far.  Then `c_dual(K) & X0 == K`, and if `X0` is everything, `K` is
    invariant.

    :param order: Sequence of elements giving the order to try them in;
      default is ground set order.  Different orders can give different
      maximal sets.

    :raises NotAClique: If some pair in `K0` is not related.
    """
    ground = S.ground
    ground.check_same(K0.ground)
    for x in K0:
        for y in K0:
            if not (S.rows[x] >> y) & 1:
                raise NotAClique(ground.labels[x], ground.labels[y])
    if order is None:
        order = range(len(ground))
    else:
        order = [ground.index(z) for z in order]
    bits = K0.bits
    dual = c_dual(S, K0).bits
    for z in order:
        if (bits >> z) & 1 or not (S.rows[z] >> z) & 1:
            continue
        if (dual >> z) & 1:
            bits |= 1 << z
            dual &= S.rows[z]
    K = SubsetMask(ground, bits)
    X0 = x_zero(S)
    assert c_dual(S, K) & X0 == K
    if X0 == ground.full:
        assert c_dual(S, K) == K
    return K

def no_invariant_extension(S, label="z"):
    """Add a new element `z` with `c(z,z) = -1` and `c(x,z) = +1` for every
    other `x`.  The result has no invariant set: a set containing `z` does not
    contain `z` in its dual, and a set without `z` does."""
    ground = GroundSet(list(S.ground.labels) + [label])
    z = len(S.ground)
    rows = [row | (1 << z) for row in S.rows]
    rows.append(S.ground.full_bits)
    return CostRelation.from_rows(ground, rows)

def three_point_example():
    """`X = {1,2,3}` with fibers `1 -> {1,3}`, `2 -> {2}`, `3 -> {1}`.  The only
    invariant set is `{2}`."""
    ground = GroundSet(["1", "2", "3"])
    return CostRelation.from_pairs(ground, [("1", "1"), ("2", "2"), ("1", "3")])

def four_point_example():
    """The three point example with a fourth point related only to `2`.  No
    invariant set exists."""
    ground = GroundSet(["1", "2", "3", "4"])
    return CostRelation.from_pairs(ground, [("1", "1"), ("2", "2"), ("1", "3"), ("2", "4")])
