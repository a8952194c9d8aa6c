"""Pointwise building blocks shared by all identity evaluators.

A :class:`Probe` bundles the local geometry at one point of the total space
with a seeded compatible frame and exposes every quantity that appears on
either side of the curvature relations: total, base and fibre curvature,
the O'Neill tensors and their derivatives, ``N`` and ``∇N``, frame sums and
the three Ricci brackets.
"""

from functools import cached_property

import numpy as np

from .submersion import LocalGeometry, compatible_frame, norms


class Probe:
    def __init__(self, spec, x, frame_seed=0, geometry=None):
        self.spec = spec
        self.x = np.asarray(x, dtype=float)
        self.geo = geometry or LocalGeometry(spec, self.x)
        self.frame = compatible_frame(spec, self.x, frame_seed)
        self.frame_seed = frame_seed
        self.n = spec.total.dim
        self.Xs = list(self.frame.X)
        self.Us = list(self.frame.U)

    # metric and curvature ---------------------------------------------------

    def g(self, a, b):
        return float(a @ self.geo.g @ b)

    @property
    def curv(self):
        return self.geo.curv

    def R(self, X, Y, Z, H):
        return self.curv.R(X, Y, Z, H)

    def S(self, X, Y):
        return self.curv.S(X, Y)

    @property
    def r(self):
        return self.curv.scalar

    def RG(self, X, Y, Z, H):
        """Base curvature at π(p) on the pushed-forward vectors."""
        J = self.geo.J
        return self.geo.base_curv.R(J @ X, J @ Y, J @ Z, J @ H)

    def SG(self, X, Y):
        J = self.geo.J
        return self.geo.base_curv.S(J @ X, J @ Y)

    @property
    def rG(self):
        return self.geo.base_curv.scalar

    def Rhat(self, U, V, W, F):
        f = self.geo.fibre_part
        return self.geo.fibre_curv.R(f(U), f(V), f(W), f(F))

    def Shat(self, U, V):
        f = self.geo.fibre_part
        return self.geo.fibre_curv.S(f(U), f(V))

    @property
    def rhat(self):
        return self.geo.fibre_curv.scalar

    # O'Neill tensors ---------------------------------------------------------

    def T(self, E, F):
        return self.geo.t(E, F)

    def A(self, E, F):
        return self.geo.a(E, F)

    def dT(self, E, F, G):
        """``(∇_E T)_F G``."""
        return self.geo.dt(E, F, G)

    def dA(self, E, F, G):
        """``(∇_E A)_F G``."""
        return self.geo.da(E, F, G)

    @property
    def N(self):
        return self.geo.N

    def dN(self, E):
        return self.geo.dn(E)

    @cached_property
    def norms(self):
        return norms(self.spec, self.x, self.frame, self.geo)

    @cached_property
    def divN(self):
        """``Σ_i g(∇_{X_i} N, X_i)``."""
        return sum(self.g(self.dN(Xi), Xi) for Xi in self.Xs)

    def scalar_rhs(self, convention="block", with_N=True):
        T2, A2 = self.norms.convention(convention)
        out = self.rhat + self.rG - A2 - T2
        if with_N:
            out += -self.norms.normN2 + 2 * self.divN
        return out

    # Ricci brackets as they appear inside the relations -------------------

    def ric_hh(self, X, Y, with_N=True):
        g, A, T = self.g, self.A, self.T
        out = (self.SG(X, Y)
               - 2 * sum(g(A(X, Xi), A(Y, Xi)) for Xi in self.Xs)
               - sum(g(T(Uj, X), T(Uj, Y)) for Uj in self.Us))
        if with_N:
            out += 0.5 * (g(self.dN(X), Y) + g(self.dN(Y), X))
        return out

    def ric_vv(self, U, V, with_N=True):
        g, A = self.g, self.A
        out = self.Shat(U, V) + sum(g(self.dT(Xi, U, V), Xi) + g(A(Xi, U), A(Xi, V))
                                    for Xi in self.Xs)
        if with_N:
            out -= g(self.N, self.T(U, V))
        return out

    def ric_vh(self, U, X, with_N=True, frame_sign=-1.0):
        """Mixed bracket; ``frame_sign`` multiplies the ``Σ_j (∇_{U_j}T)`` sum."""
        g = self.g
        out = (frame_sign * sum(g(self.dT(Uj, Uj, U), X) for Uj in self.Us)
               + sum(g(self.dA(Xi, Xi, X), U) - 2 * g(self.A(X, Xi), self.T(U, Xi))
                     for Xi in self.Xs))
        if with_N:
            out += g(self.dN(U), X)
        return out

    def ric_vh_swapped(self, X, V, with_N=True):
        """The mixed bracket with the roles of the two arguments exchanged."""
        g = self.g
        out = (-sum(g(self.dT(Uj, Uj, X), V) for Uj in self.Us)
               + sum(g(self.dA(Xi, Xi, X), V) - 2 * g(self.A(V, Xi), self.T(X, Xi))
                     for Xi in self.Xs))
        if with_N:
            out += g(self.dN(X), V)
        return out

    # typed random vectors ---------------------------------------------------

    def draw(self, rng, pattern):
        """One vector per letter of ``pattern`` (H = horizontal, V = vertical)."""
        out = []
        for letter in pattern:
            legs = self.Xs if letter == "H" else self.Us
            coeffs = rng.uniform(-1.0, 1.0, len(legs))
            out.append(sum((c * leg for c, leg in zip(coeffs, legs)), np.zeros(self.n)))
        return out
