"""
O'Neill tensors of three submersions
====================================

T measures how the fibres bend, A how far the horizontal distribution is
from integrable, and N is the trace of T over the fibre.
"""

import numpy as np

from subcurv import Probe, build_example

rng = np.random.default_rng(1)

# Hopf fibration: geodesic fibres, non-integrable horizontal distribution
hopf = build_example("hopf").spec
x = hopf.sample(rng, 1)[0]
p = Probe(hopf, x, frame_seed=0)
X, Y = p.Xs
U = p.Us[0]
a = p.A(X, Y)
print("hopf |T_U U| =", np.sqrt(p.g(p.T(U, U), p.T(U, U))))
print("hopf |A_X Y| =", np.sqrt(p.g(a, a)))                           # 1 for orthonormal X, Y
print("hopf |A|^2 block / full =", p.norms.normA2, p.norms.normA2_full)

# warped product dt^2 + e^{2t} dtheta^2: bent fibres, |N| = |f'|/f = 1
warped = build_example("warped_interval_s1").spec
x = warped.sample(rng, 1)[0]
p = Probe(warped, x)
print("warped N =", p.N, " |N| =", np.sqrt(p.g(p.N, p.N)))

# a generic example where T, A and N are all nonzero
kk = build_example("kaluza_klein_generic").spec
x = kk.sample(rng, 1)[0]
p = Probe(kk, x)
print("generic |T|^2, |A|^2, |N|^2 =", p.norms.normT2, p.norms.normA2, p.norms.normN2)
