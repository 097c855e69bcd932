"""
algebra
~~~~~~~

Constructions of new order reversing quasi involutions from old ones on a
finite ground set: the dual ORQI, intersections, complement conjugation,
"sandwiches", composition and conjugation, restriction to a subset; and the
extension theory of transforms defined only on a sub-family of the subsets.
Also a catalogue of the simplest ORQIs, those with images of at most four
sets.
"""

import itertools as _itertools
import json as _json
import logging as _logging

from .relation import (GroundSet, SubsetMask, CostRelation, TransformTable,
    Verdict, c_dual, envelope, image_class, sort_family, order_check, is_orqi)

_logger = _logging.getLogger(__name__)

#: Largest domain for which every sub-collection is tried as a cover.
COVER_CAP = 12


class PreconditionFailed(ValueError):
    """Raised when an input does not satisfy the hypotheses of a
    construction.

    :param witness: :class:`Verdict` or dictionary describing the failure.
    """
    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class NotExtendable():
    """Returned, not raised, when a sub-family transform has no extension to
    an ORQI on all subsets.

    :param verdict: The failed :class:`Verdict` of
      :func:`respects_inclusions`.
    """
    def __init__(self, verdict):
        self.verdict = verdict

    @property
    def witness(self):
        return self.verdict.witness

    def __bool__(self):
        return False

    def __repr__(self):
        return "NotExtendable({!r})".format(self.verdict)

    def to_dict(self):
        return {"not_extendable": {"witness": self.verdict.to_dict()["violation"]["witness"]}}


class SubFamilyTransform():
    """A transform defined on an explicit family `C` of subsets, mapping it
    into itself.

    :param ground: The :class:`GroundSet`.
    :param domain: Sequence of distinct :class:`SubsetMask`, in a fixed order.
    :param mapping: Either a dictionary from domain members to images, a
      callable, or a sequence of images parallel to `domain`.

    :raises ValueError: If some image is not in the domain.
    """
    def __init__(self, ground, domain, mapping):
        domain = tuple(domain)
        for K in domain:
            ground.check_same(K.ground)
        if len(set(domain)) != len(domain):
            raise ValueError("Should be a domain of distinct subsets")
        if callable(mapping):
            images = [mapping(K) for K in domain]
        elif isinstance(mapping, dict):
            try:
                images = [mapping[K] for K in domain]
            except KeyError as ex:
                raise ValueError("Map is not defined on {}".format(ex.args[0]))
        else:
            images = list(mapping)
        if len(images) != len(domain):
            raise ValueError("Should be one image per domain member")
        members = set(domain)
        for K, image in zip(domain, images):
            if image not in members:
                raise ValueError("Image of {} is {}, which is not in the domain".format(K.labels, image.labels))
        self._ground = ground
        self._domain = domain
        self._images = tuple(images)
        self._lookup = dict(zip(domain, images))

    @staticmethod
    def from_table(T, domain=None):
        """Restrict a :class:`TransformTable` to a family (default: all
        subsets)."""
        if domain is None:
            domain = list(T.ground.subsets())
        return SubFamilyTransform(T.ground, domain, T)

    @property
    def ground(self):
        return self._ground

    @property
    def domain(self):
        return self._domain

    @property
    def images(self):
        return self._images

    def __call__(self, K):
        try:
            return self._lookup[K]
        except KeyError:
            raise ValueError("{} is not in the domain".format(K.labels))

    def __repr__(self):
        return "SubFamilyTransform({}, {} members)".format(list(self._ground.labels), len(self._domain))

    def to_dict(self):
        return {"labels": list(self._ground.labels),
            "domain": [K.labels for K in self._domain],
            "map": {_json.dumps(K.labels): TK.labels for K, TK in zip(self._domain, self._images)}}

    @staticmethod
    def from_dict(data):
        try:
            labels, domain, mapping = data["labels"], data["domain"], data["map"]
        except (KeyError, TypeError):
            raise ValueError("Should be an object with keys 'labels', 'domain' and 'map'")
        if len(labels) == 0:
            raise ValueError("Should be a nonempty ground set")
        ground = GroundSet(labels)
        domain = [ground.mask(K) for K in domain]
        images = {}
        for key, value in mapping.items():
            try:
                members = _json.loads(key)
            except ValueError:
                raise ValueError("Map key {!r} should be a JSON list of labels".format(key))
            images[ground.mask(members)] = ground.mask(value)
        return SubFamilyTransform(ground, domain, images)


#####  New relations from old  #####

def dual_orqi(S):
    """The dual ORQI: every entry of the relation negated.  (On a finite set
    the closure of the complement is the complement.)"""
    full = S.ground.full_bits
    return CostRelation.from_rows(S.ground, [full & ~row for row in S.rows])

def intersect_orqis(relations):
    """Entrywise "and" of relations; its c-dual is the intersection of the
    individual c-duals.

    :param relations: Nonempty sequence of :class:`CostRelation` over one
      ground set.
    """
    relations = list(relations)
    if len(relations) == 0:
        raise ValueError("Should be at least one relation")
    ground = relations[0].ground
    rows = list(relations[0].rows)
    for S in relations[1:]:
        ground.check_same(S.ground)
        rows = [a & b for a, b in zip(rows, S.rows)]
    return CostRelation.from_rows(ground, rows)

def restrict_to_set(S, M0):
    """Restrict the relation to `M0 x M0`, over the ground set of the labels
    of `M0` (in their original order).  For `K` inside `M0` the new c-dual is
    the old c-dual intersected with `M0`.  An empty `M0` gives the empty
    ground set."""
    S.ground.check_same(M0.ground)
    indices = list(M0)
    ground = GroundSet(S.ground.labels[i] for i in indices)
    rows = []
    for i in indices:
        bits = 0
        for j, k in enumerate(indices):
            if (S.rows[i] >> k) & 1:
                bits |= 1 << j
        rows.append(bits)
    return CostRelation.from_rows(ground, rows)

def lift(K, ground):
    """The subset of `ground` with the same labels as `K` (which lives on a
    restricted ground set)."""
    return ground.mask(K.labels)


#####  Transforms on all subsets  #####

def complement_conjugate(T):
    """The transform `K -> X - T(X - K)`.  For an ORQI `T` the result is a
    complemented ORQI: order reversing with `SSK <= K`."""
    full = T.ground.full_bits
    return TransformTable(T.ground, [full & ~T.images[full & ~bits] for bits in range(1 << len(T.ground))])

def is_complemented(T):
    """Check `SSK <= K` for every `K`, and order reversion."""
    images = T.images
    for bits in range(1 << len(T.ground)):
        if images[images[bits]] & ~bits:
            K = SubsetMask(T.ground, bits)
            return Verdict.violation("complemented", {"K": K, "TK": T(K), "TTK": T(T(K))})
    return order_check(T, reverse=True)

def compose(T, R):
    """The transform `K -> T(R(K))`."""
    T.ground.check_same(R.ground)
    return TransformTable(T.ground, [T.images[r] for r in R.images])

def is_order_preserving(T):
    """Check `L <= K` implies `TL <= TK`."""
    return order_check(T, reverse=False)

def sandwich(T, R, pattern="TRT"):
    """The transform `TRT` (an ORQI) or `RTR` (a complemented ORQI), for an
    ORQI `T` and a complemented ORQI `R`.

    :raises PreconditionFailed: With the failed verdict as witness.
    """
    T.ground.check_same(R.ground)
    if pattern not in ("TRT", "RTR"):
        raise ValueError("Should be 'TRT' or 'RTR', not {!r}".format(pattern))
    verdict = is_orqi(T)
    if not verdict:
        raise PreconditionFailed("T is not an ORQI", verdict)
    verdict = is_complemented(R)
    if not verdict:
        raise PreconditionFailed("R is not a complemented ORQI", verdict)
    if pattern == "TRT":
        return compose(T, compose(R, T))
    return compose(R, compose(T, R))

def _is_order_isomorphism(R):
    domain = R.domain
    if len(set(R.images)) != len(domain):
        return False
    for K, L in _itertools.product(domain, repeat=2):
        if (K <= L) != (R(K) <= R(L)):
            return False
    return True

def conjugate(T, R):
    """The transform `K -> R^{-1}(T(R(K)))` on the image class of `T`, for an
    order preserving bijection `R` of the image class.  The result is an order
    reversing involution on the image class.

    :param T: An ORQI :class:`TransformTable`.
    :param R: :class:`SubFamilyTransform` whose domain is the image class
      of `T`.

    :return: :class:`SubFamilyTransform` on the image class.

    :raises PreconditionFailed: If `R` is not an order isomorphism of the
      image class.
    """
    T.ground.check_same(R.ground)
    image = sort_family(T(K) for K in T.ground.subsets())
    if sort_family(R.domain) != image:
        raise PreconditionFailed("R should be defined exactly on the image class",
            {"image": image, "domain": list(R.domain)})
    if not _is_order_isomorphism(R):
        raise PreconditionFailed("R should be an order preserving bijection of the image class", {"R": R.to_dict()})
    inverse = {R(K): K for K in R.domain}
    return SubFamilyTransform(T.ground, image, lambda K: inverse[T(R(K))])


#####  Sub-families: subclass structure and extension  #####

class SubclassReport():
    """Result of :func:`subclass_structure`.

    :param status: `"verified"`, `"mismatch"` or `"hypothesis unmet"` (when
      `Y` is not c-closed; the two families are still computed).
    :param c_y: The image class of the restricted relation, as subsets of `X`.
    :param formula: `{ B & Y : c_dual(Y) <= B in C_X }`.
    :param fact_holds: Every member `A` of `c_y` is `envelope(A) & Y`.
    """
    def __init__(self, status, c_y, formula, fact_holds):
        self.status = status
        self.c_y = c_y
        self.formula = formula
        self.fact_holds = fact_holds

    @property
    def sides_equal(self):
        return self.c_y == self.formula

    def to_dict(self):
        return {"status": self.status, "c_y": [K.labels for K in self.c_y],
            "formula": [K.labels for K in self.formula], "fact_holds": self.fact_holds}

def subclass_structure(S, Y):
    """Compare the image class of `S` restricted to `Y` with the family
    `{ B & Y : c_dual(Y) <= B, B in the image class of S }`.  The two agree
    when `Y` is c-closed; otherwise the report is labelled "hypothesis unmet".

    :return: :class:`SubclassReport`.
    """
    ground = S.ground
    ground.check_same(Y.ground)
    c_y = sort_family(lift(A, ground) for A in image_class(restrict_to_set(S, Y)))
    dual_y = c_dual(S, Y)
    formula = sort_family(B & Y for B in image_class(S) if dual_y <= B)
    fact_holds = all(envelope(S, A) & Y == A for A in c_y)
    if envelope(S, Y) != Y:
        status = "hypothesis unmet"
    elif c_y == formula:
        status = "verified"
    else:
        status = "mismatch"
    return SubclassReport(status, c_y, formula, fact_holds)

def is_orqi_on(T):
    """Check the ORQI laws for a :class:`SubFamilyTransform` on its domain."""
    for K in T.domain:
        if not K <= T(T(K)):
            return Verdict.violation("quasi-involution", {"K": K, "TK": T(K), "TTK": T(T(K))})
    for K in T.domain:
        for L in T.domain:
            if L <= K and not T(K) <= T(L):
                return Verdict.violation("order-reversion", {"L": L, "K": K, "TL": T(L), "TK": T(K)})
    return Verdict.passed()

def _cover_table(domain):
    """Unions of every sub-collection of the domain, keyed by the bitmask of
    member indices, and those bitmasks ordered by size then lexicographically."""
    unions = [0] * (1 << len(domain))
    for c in range(1, len(unions)):
        low = c & -c
        unions[c] = unions[c ^ low] | domain[low.bit_length() - 1].bits
    order = [sum(1 << i for i in cover) for size in range(len(domain) + 1)
        for cover in _itertools.combinations(range(len(domain)), size)]
    return order, unions

def _all_covers(domain, K, table):
    order, unions = table
    for c in order:
        if K.bits & ~unions[c] == 0:
            yield tuple(i for i in range(len(domain)) if (c >> i) & 1)

def _irredundant_covers(domain, K):
    """Covers built by repeatedly covering the lowest uncovered element; every
    irredundant cover is among them."""
    found = set()
    def search(chosen, union):
        remaining = K - union
        if len(remaining) == 0:
            cover = tuple(sorted(chosen))
            if cover not in found:
                found.add(cover)
            return
        element = next(iter(remaining))
        for i, member in enumerate(domain):
            if element in member and i not in chosen:
                search(chosen | {i}, union | member)
    search(frozenset(), K.ground.empty)
    return sorted(found, key=lambda c: (len(c), c))

def respects_inclusions(T):
    """Check that `K <= union of K_i` implies `TK >= intersection of T(K_i)`,
    for every `K` in the domain and every cover of it by domain members (the
    empty cover included).  Domains of up to :data:`COVER_CAP` members try
    every sub-collection; larger domains try the irredundant covers, which
    suffices as a violated cover contains a violated irredundant one.

    :return: :class:`Verdict`, witness `{"K": K, "cover": [...], ...}` for the
      first failure, taking `K` in domain order and covers by size and then
      lexicographically.

    :raises PreconditionFailed: If `T` is not an ORQI on its domain.
    """
    verdict = is_orqi_on(T)
    if not verdict:
        raise PreconditionFailed("Not an ORQI on its domain", verdict)
    domain = T.domain
    if len(domain) <= COVER_CAP:
        table = _cover_table(domain)
        covers = lambda K: _all_covers(domain, K, table)
    else:
        _logger.info("Domain of %s members; checking irredundant covers only", len(domain))
        covers = lambda K: _irredundant_covers(domain, K)
    for K in domain:
        TK = T(K)
        for cover in covers(K):
            meet = T.ground.full
            for i in cover:
                meet = meet & T(domain[i])
            if not meet <= TK:
                return Verdict.violation("respects-inclusions", {"K": K,
                    "cover": [domain[i] for i in cover], "TK": TK, "meet": meet})
    return Verdict.passed()

def extend_from_subclass(T):
    """Extend an ORQI on a sub-family to an ORQI on all subsets, if possible.
    The relation is `S = union of TK x TTK` over the domain; its c-dual agrees
    with `T` on the domain.

    :return: :class:`CostRelation`, or :class:`NotExtendable` carrying the
      :func:`respects_inclusions` verdict.
    """
    verdict = respects_inclusions(T)
    if not verdict:
        return NotExtendable(verdict)
    rows = [0] * len(T.ground)
    for K in T.domain:
        TK, TTK = T(K), T(T(K))
        for x in TK:
            rows[x] |= TTK.bits
    relation = CostRelation.from_rows(T.ground, rows)
    for K in T.domain:
        if c_dual(relation, K) != T(K):
            return NotExtendable(Verdict.violation("restriction",
                {"K": K, "TK": T(K), "c_dual": c_dual(relation, K)}))
    return relation

def hull_extension(T):
    """The extension `K -> T(intersection of { L in C : K <= L })` of an ORQI
    on an intersection closed family `C` containing `X`.

    :return: :class:`TransformTable`.

    :raises PreconditionFailed: If the domain is not intersection closed, or
      does not contain `X`.
    """
    ground = T.ground
    domain = set(T.domain)
    if ground.full not in domain:
        raise PreconditionFailed("Domain should contain the whole ground set", {"domain": list(T.domain)})
    for A, B in _itertools.combinations(T.domain, 2):
        if (A & B) not in domain:
            raise PreconditionFailed("Domain should be closed under intersection", {"A": A, "B": B})
    def extension(K):
        hull = ground.full
        for L in T.domain:
            if K <= L:
                hull = hull & L
        return T(hull)
    return TransformTable.from_function(ground, extension)

def extensions_agree(first, second):
    """Compare two transform tables subset by subset.  Two ORQIs extending
    the same sub-family transform, with the same image class, always agree.

    :return: :class:`Verdict`, witness the first subset where they differ.
    """
    first.ground.check_same(second.ground)
    for K in first.ground.subsets():
        if first(K) != second(K):
            return Verdict.violation("disagree", {"K": K, "first": first(K), "second": second(K)})
    return Verdict.passed()


#####  Simple ORQIs  #####

def simple_orqi_catalog(kind, ground, sets=()):
    """The ORQIs with the smallest images.

      1. Everything maps to `X`.  No sets.
      2. One set `K < X`: subsets of `K` map to `X`, all else to `K`.
      3. Sets `K1 < K2 < X`: subsets of `K1` map to `X`, other subsets of
         `K2` to `K2` (a fixed point), all else to `K1`.
      4. Sets `K0 < K1 < K2 < X`: subsets of `K0` map to `X`, other subsets of
         `K1` to `K2`, other subsets of `K2` to `K1`, all else to `K0`.

    :param kind: 1, 2, 3 or 4.
    :param sets: The strictly nested :class:`SubsetMask` the kind requires,
      smallest first.

    :return: :class:`TransformTable`.
    """
    if kind not in (1, 2, 3, 4):
        raise ValueError("Should be kind 1, 2, 3 or 4, not {!r}".format(kind))
    sets = list(sets)
    if len(sets) != kind - 1:
        raise ValueError("Kind {} needs {} nested sets, got {}".format(kind, kind - 1, len(sets)))
    for K in sets:
        ground.check_same(K.ground)
    chain = sets + [ground.full]
    for small, big in zip(chain, chain[1:]):
        if not small < big:
            raise ValueError("Should be strictly nested, but {} is not strictly inside {}".format(small.labels, big.labels))
    # Images of the bands, from the innermost outwards
    targets = list(reversed(chain))
    def transform(L):
        for K, target in zip(chain, targets):
            if L <= K:
                return target
    return TransformTable.from_function(ground, transform)
