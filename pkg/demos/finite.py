# Invariant sets and extensions on small finite ground sets

import os, sys
sys.path.insert(0, os.path.abspath(os.path.join("..")))

import orqi
import orqi.algebra as algebra
import orqi.invariants as invariants

for name in ["three_point.json", "four_point.json"]:
    S = orqi.CostRelation.from_dict(orqi.util.read_json(os.path.join("data", name)))
    result = invariants.classify(S)
    print("{}: X0 = {}, {} ({})".format(name, result.x_zero.labels, result.kind, result.case))
    for K in result.invariant_sets:
        print("    invariant set {}".format(K.labels))
    print("    image class: {}".format([K.labels for K in orqi.image_class(S)]))

T = algebra.SubFamilyTransform.from_dict(orqi.util.read_json(os.path.join("data", "not_extendable.json")))
print("Sub-family transform is an ORQI on its domain:", bool(algebra.is_orqi_on(T)))
result = algebra.extend_from_subclass(T)
if result:
    print("Extends to", result.to_dict())
else:
    print("Does not extend:", result.to_dict())
