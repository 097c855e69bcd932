# The product of Gaussian measures of a set and its dual polar, for a family
# of perturbations of the hyperbola epigraph

import os, sys
sys.path.insert(0, os.path.abspath(os.path.join("..")))

import logging
logging.basicConfig(level=logging.INFO)

import orqi
import orqi.bodies as bodies
import orqi.measure as measure

print("gamma(K0) =", measure.gamma_k0_reference(2))
for s in [0.5, 1.0, 2.0]:
    report = measure.bs_experiment(bodies.perturbed_k0(s), samples=10**6, seed=1, workers=4)
    print("s = {}: product {:.6f}, bound {:.6f}, {:+.2f} sigma".format(
        s, report["product"], report["gamma_K0_sq"], report["margin_sigma"]))

square = orqi.PointSet([[1, 1], [1, -1], [-1, 1], [-1, -1]])
print("Prekopa-Leindler condition for the square:", measure.prekopa_condition_check(square, samples=10**5))
