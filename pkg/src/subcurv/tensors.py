"""Generalized curvature tensors of the total space and the Ricci operator.

All tensors are evaluated fully lowered, ``T(X, Y, Z, H) = g(T(X, Y)Z, H)``,
with ``n`` the dimension of the manifold whose curvature is supplied.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError


class Kind(enum.Enum):
    P = "P*"   # Weyl projective
    C = "C*"   # concircular
    L = "L*"   # conharmonic
    V = "V*"   # conformal
    W = "W*"   # M-projective

    @classmethod
    def parse(cls, text):
        for k in cls:
            if text in (k.value, k.name, k.name.lower()):
                return k
        raise ValueError(f"unknown tensor kind {text!r}")


LONG_NAMES = {
    Kind.P: "Weyl projective",
    Kind.C: "concircular",
    Kind.L: "conharmonic",
    Kind.V: "conformal",
    Kind.W: "M-projective",
}

# smallest dimension for which each coefficient is finite
MIN_DIM = {Kind.P: 2, Kind.C: 2, Kind.L: 3, Kind.V: 3, Kind.W: 2}


def check_dimension(kind, n):
    if n < MIN_DIM[kind]:
        raise DimensionError(f"{kind.value} needs dim >= {MIN_DIM[kind]}, got {n}")


def ricci_operator(curv, X):
    """``QX`` with ``g(QX, Y) = S(X, Y)``."""
    return curv.inverse_metric @ curv.ricci @ np.asarray(X, dtype=float)


@dataclass(frozen=True)
class TensorEvaluation:
    kind: Kind
    value: float
    n_used: int


def _wedge(a, b):
    """``a(X,H) b(Y,Z) - a(Y,H) b(X,Z)`` as a 4-array in slots (X, Y, Z, H)."""
    t = np.einsum("il,jk->ijkl", a, b)
    return t - np.transpose(t, (1, 0, 2, 3))


def generalized_array(kind, curv):
    """Component array ``T[i, j, k, l] = T(∂_i, ∂_j, ∂_k, ∂_l)``."""
    g, S, r = curv.metric, curv.ricci, curv.scalar
    n = g.shape[0]
    check_dimension(kind, n)
    R = curv.riemann_lowered
    if kind is Kind.P:
        return R - _wedge(g, S) / (n - 1)
    if kind is Kind.C:
        return R - r / (n * (n - 1)) * _wedge(g, g)
    four = _wedge(g, S) + _wedge(S, g)
    if kind is Kind.L:
        return R - four / (n - 2)
    if kind is Kind.V:
        return R - four / (n - 2) + r / ((n - 1) * (n - 2)) * _wedge(g, g)
    return R - four / (2 * (n - 1))


def generalized_tensor(kind, curv, X, Y, Z, H):
    """Lowered value ``g(K(X,Y)Z, H)`` for ``kind`` from the definitions."""
    if isinstance(kind, str):
        kind = Kind.parse(kind)
    g, S, r = curv.metric, curv.ricci, curv.scalar
    n = g.shape[0]
    check_dimension(kind, n)
    gp = lambda a, b: float(a @ g @ b)
    Sp = lambda a, b: float(a @ S @ b)
    R = curv.R(X, Y, Z, H)
    if kind is Kind.P:
        value = R - (Sp(Y, Z) * gp(X, H) - Sp(X, Z) * gp(Y, H)) / (n - 1)
    elif kind is Kind.C:
        value = R - r / (n * (n - 1)) * (gp(X, H) * gp(Y, Z) - gp(Y, H) * gp(X, Z))
    else:
        four = (gp(Y, Z) * Sp(X, H) - gp(X, Z) * Sp(Y, H)
                + gp(X, H) * Sp(Y, Z) - gp(Y, H) * Sp(X, Z))
        if kind is Kind.L:
            value = R - four / (n - 2)
        elif kind is Kind.V:
            value = (R - four / (n - 2)
                     + r / ((n - 1) * (n - 2)) * (gp(X, H) * gp(Y, Z) - gp(Y, H) * gp(X, Z)))
        else:
            # the Q-terms: g(Y,Z) g(QX,H) = g(Y,Z) S(X,H)
            QX, QY = ricci_operator(curv, X), ricci_operator(curv, Y)
            value = R - (Sp(Y, Z) * gp(X, H) - Sp(X, Z) * gp(Y, H)
                         + gp(Y, Z) * gp(QX, H) - gp(X, Z) * gp(QY, H)) / (2 * (n - 1))
    return TensorEvaluation(kind, float(value), n)
