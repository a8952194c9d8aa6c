"""
Generalized curvature tensors
=============================

Projective, concircular, conharmonic, conformal and M-projective tensors on
the unit 3-sphere, then their submersion relations on a generic example.
"""

import numpy as np

from subcurv import Kind, build_example, curvature, eval_generalized, generalized_tensor

s3 = build_example("hopf").spec.total
x = s3.sample(np.random.default_rng(4), 1)[0]
c = curvature(s3, x)
g = c.metric
X = np.array([1.0, 0, 0]) / np.sqrt(g[0, 0])
Y = np.array([0, 1.0, 0]) / np.sqrt(g[1, 1])
for kind in Kind:
    print(f"{kind.value}(X,Y,Y,X) on S^3 = {generalized_tensor(kind, c, X, Y, Y, X).value:+.12f}")

kk = build_example("kaluza_klein_generic").spec
x = kk.sample(np.random.default_rng(5), 1)[0]
for kind in Kind:
    for case in ("HHHH", "HVHV"):
        rec = eval_generalized(kind, case, kk, x, seed=1)
        print(f"{kind.value} {case}: {rec.verdict.value}")
