"""
Curvature of a charted manifold
===============================

Metrics are written in a small expression language and differentiated with
nested dual numbers, so Christoffel symbols and curvature come out exact up
to roundoff.  Central differences serve only as a cross-check.
"""

import numpy as np

from subcurv import christoffel, christoffel_fd, curvature, parse_metric_expression

# the round sphere of radius 1/2
sphere = parse_metric_expression("""
coords = (theta, phi)
domain = ((0, pi), (0, 2*pi))
g = [[0.25, 0], [0, 0.25*sin(theta)^2]]
""")

x = np.array([np.pi / 4, 0.3])
gam = christoffel(sphere, x)
print("Gamma^phi_{theta phi} at theta = pi/4:", gam[1, 0, 1])        # cot(pi/4) = 1
print("autodiff vs finite differences:", np.abs(gam - christoffel_fd(sphere, x)).max())

c = curvature(sphere, x)
print("scalar curvature:", c.scalar)                                  # 2K = 8
print("Gaussian curvature:", c.sectional(np.array([1.0, 0]), np.array([0, 1.0])))

# the unit 3-sphere: constant sectional curvature +1 fixes the sign convention
s3 = parse_metric_expression("""
coords = (a, b, c)
domain = ((0, pi), (0, pi), (0, 2*pi))
g = [[1, 0, 0], [0, sin(a)^2, 0], [0, 0, sin(a)^2*sin(b)^2]]
""")
rng = np.random.default_rng(0)
for x in s3.sample(rng, 3):
    c = curvature(s3, x)
    X, Y = rng.standard_normal((2, 3))
    print(f"S^3 at {np.round(x, 3)}: r = {c.scalar:.12f}, K(X,Y) = {c.sectional(X, Y):.12f}")
