# Polar, dual polar and flower transforms of a hexagon, and invariant bodies

import os, sys
sys.path.insert(0, os.path.abspath(os.path.join("..")))

import orqi
import orqi.bodies as bodies
import orqi.geometry as geometry

evaluator = orqi.GridEvaluator([(-3, 3), (-3, 3)], 301, workers=4)

hexagon = orqi.PointSet.from_csv(os.path.join("data", "hexagon.csv"))
polar = geometry.polar(hexagon)
print("Polar of the hexagon: {} constraints, {} grid members".format(
    len(polar), int(evaluator.evaluate(polar).sum())))

for name, transform in [("k0", geometry.dual_polar), ("flower", geometry.flower_dual)]:
    body = bodies.named_body(name)
    report = evaluator.agreement(transform(body.generators), body.oracle)
    print("{} is invariant: {}".format(name, report))

body = bodies.reuleaux(1.0)
small = orqi.GridEvaluator([(-1, 1), (-1, 1)], 201)
print("Reuleaux triangle under ball intersection:",
    small.agreement(geometry.ball_intersection(body.generators, 1.0), body.oracle))
