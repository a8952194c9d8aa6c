"""Nested forward-mode dual numbers.

A :class:`Dual` carries a primal part ``re`` and a tangent part ``du`` tagged
with the perturbation that created it.  Both parts may be floats, numpy
arrays, or Duals with a *smaller* tag, so derivatives nest without
perturbation confusion: every call to :func:`jvp` draws a fresh, larger tag
and extracts only its own tangent.

Arithmetic is elementwise with numpy broadcasting.  Matrix-level operations
(:func:`einsum`, :func:`matmul`, :func:`inv`, :func:`stack`) act on whole
arrays at once so a metric of dimension n costs a handful of numpy calls per
nesting level instead of n**2 scalar operations.
"""

import itertools
import math

import numpy as np

__all__ = [
    "Dual", "jvp", "derivative_tensors", "primal",
    "einsum", "matmul", "inv", "stack", "asarray", "transpose", "dsum",
    "sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh",
]

_tags = itertools.count(1)


class Dual:
    __slots__ = ("re", "du", "tag")
    # numpy must defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, re, du, tag):
        self.re = re
        self.du = du
        self.tag = tag

    def __repr__(self):
        return f"Dual({self.re!r}, {self.du!r}, tag={self.tag})"

    @property
    def shape(self):
        return np.shape(primal(self))

    @property
    def ndim(self):
        return len(self.shape)

    def __len__(self):
        return self.shape[0]

    def __getitem__(self, idx):
        return _make(self.re[idx], self.du[idx], self.tag)

    @property
    def T(self):
        return transpose(self)

    def __neg__(self):
        return Dual(-self.re, -self.du, self.tag)

    def __pos__(self):
        return self

    def __add__(self, other):
        t = _top(self, other)
        ar, ad = _parts(self, t)
        br, bd = _parts(other, t)
        return _make(ar + br, _addd(ad, bd), t)

    __radd__ = __add__

    def __sub__(self, other):
        t = _top(self, other)
        ar, ad = _parts(self, t)
        br, bd = _parts(other, t)
        return _make(ar - br, _addd(ad, None if bd is None else -bd), t)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        t = _top(self, other)
        ar, ad = _parts(self, t)
        br, bd = _parts(other, t)
        du = _addd(None if ad is None else ad * br,
                   None if bd is None else ar * bd)
        return _make(ar * br, du, t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        t = _top(self, other)
        ar, ad = _parts(self, t)
        br, bd = _parts(other, t)
        q = ar / br
        du = _addd(None if ad is None else ad / br,
                   None if bd is None else -(q * bd) / br)
        return _make(q, du, t)

    def __rtruediv__(self, other):
        t = self.tag
        br, bd = self.re, self.du
        q = other / br
        return _make(q, -(q * bd) / br, t)

    def __pow__(self, p):
        if isinstance(p, Dual):
            return exp(p * log(self))
        if p == 0:
            return _zeros_like(self) + 1.0
        if p == 1:
            return self
        if p == 2:
            return self * self
        return _make(self.re ** p, p * self.re ** (p - 1) * self.du, self.tag)

    def __rpow__(self, base):
        return exp(self * math.log(base))

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)


def _top(*xs):
    t = 0
    for x in xs:
        if isinstance(x, Dual) and x.tag > t:
            t = x.tag
    return t


def _parts(x, tag):
    if isinstance(x, Dual) and x.tag == tag:
        return x.re, x.du
    return x, None


def _addd(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def _make(re, du, tag):
    if du is None:
        return re
    return Dual(re, du, tag)


def primal(x):
    """Innermost real value of a (possibly nested) dual."""
    while isinstance(x, Dual):
        x = x.re
    return x


def _zeros_like(x):
    return np.zeros(np.shape(primal(x)))


def _tangent(y, tag):
    if isinstance(y, Dual) and y.tag == tag:
        return y.re, y.du
    return y, _zeros_like(y)


def jvp(f, x, v):
    """Return ``(f(x), Df(x)[v])`` using one fresh perturbation tag.

    ``x`` and ``v`` may themselves be duals of outer perturbations.  If ``f``
    returns a tuple, both results are tuples.
    """
    tag = next(_tags)
    y = f(Dual(x, v, tag))
    if isinstance(y, tuple):
        pairs = [_tangent(item, tag) for item in y]
        return tuple(p[0] for p in pairs), tuple(p[1] for p in pairs)
    return _tangent(y, tag)


def derivative_tensors(f, x, order):
    """All partial derivatives of ``f`` at ``x`` up to ``order`` (<= 3).

    Returns a list ``[f(x), D1, D2, ...]`` where ``Dk`` has ``k`` leading
    derivative axes followed by the shape of ``f(x)``.  Mixed partials come
    from nested duals, one nesting level per derivative order.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    eye = np.eye(n)
    f0 = np.asarray(f(x), dtype=float)
    out = [f0]
    if order >= 1:
        out.append(np.stack([np.asarray(jvp(f, x, eye[i])[1], dtype=float)
                             for i in range(n)]))
    if order >= 2:
        d2 = np.zeros((n, n) + f0.shape)
        for i in range(n):
            for j in range(i, n):
                def fj(y, j=j):
                    return jvp(f, y, eye[j])[1]
                d2[i, j] = d2[j, i] = jvp(fj, x, eye[i])[1]
        out.append(d2)
    if order >= 3:
        d3 = np.zeros((n, n, n) + f0.shape)
        for i in range(n):
            for j in range(i, n):
                for k in range(j, n):
                    def fk(y, k=k):
                        return jvp(f, y, eye[k])[1]

                    def fjk(y, j=j, fk=fk):
                        return jvp(fk, y, eye[j])[1]
                    val = jvp(fjk, x, eye[i])[1]
                    for a, b, c in set(itertools.permutations((i, j, k))):
                        d3[a, b, c] = val
        out.append(d3)
    if order > 3:
        raise ValueError("derivative_tensors supports order <= 3")
    return out


# ---------------------------------------------------------------------------
# elementary functions


def _unary(npf, deriv):
    def f(x):
        if isinstance(x, Dual):
            return _make(f(x.re), deriv(x.re) * x.du, x.tag)
        return npf(x)
    f.__name__ = npf.__name__
    return f


sin = _unary(np.sin, lambda r: cos(r))
cos = _unary(np.cos, lambda r: -sin(r))
exp = _unary(np.exp, lambda r: exp(r))
log = _unary(np.log, lambda r: 1.0 / r)
sqrt = _unary(np.sqrt, lambda r: 0.5 / sqrt(r))
sinh = _unary(np.sinh, lambda r: cosh(r))
cosh = _unary(np.cosh, lambda r: sinh(r))
tan = _unary(np.tan, lambda r: 1.0 + tan(r) * tan(r))


# ---------------------------------------------------------------------------
# array-level operations


def einsum(spec, *ops):
    t = _top(*ops)
    if t == 0:
        return np.einsum(spec, *ops)
    parts = [_parts(o, t) for o in ops]
    res = [p[0] for p in parts]
    re = einsum(spec, *res)
    du = None
    for k, (_, d) in enumerate(parts):
        if d is None:
            continue
        args = list(res)
        args[k] = d
        du = _addd(du, einsum(spec, *args))
    return _make(re, du, t)


def matmul(a, b):
    t = _top(a, b)
    if t == 0:
        return np.matmul(a, b)
    ar, ad = _parts(a, t)
    br, bd = _parts(b, t)
    du = _addd(None if ad is None else matmul(ad, br),
               None if bd is None else matmul(ar, bd))
    return _make(matmul(ar, br), du, t)


def inv(m):
    if not isinstance(m, Dual):
        return np.linalg.inv(m)
    r = inv(m.re)
    return Dual(r, -matmul(matmul(r, m.du), r), m.tag)


def transpose(x, axes=None):
    if isinstance(x, Dual):
        return Dual(transpose(x.re, axes), transpose(x.du, axes), x.tag)
    return np.transpose(x, axes)


def dsum(x, axis=None):
    if isinstance(x, Dual):
        return Dual(dsum(x.re, axis), dsum(x.du, axis), x.tag)
    return np.sum(x, axis=axis)


def stack(items, axis=0):
    """``np.stack`` for sequences mixing plain values and duals."""
    t = _top(*items)
    if t == 0:
        return np.stack([np.asarray(i, dtype=float) for i in items], axis=axis)
    parts = [_parts(i, t) for i in items]
    shape = np.broadcast_shapes(*(np.shape(primal(p[0])) for p in parts))
    re = stack([_broadcast(p[0], shape) for p in parts], axis)
    du = stack([_broadcast(np.zeros(shape) if p[1] is None else p[1], shape)
                for p in parts], axis)
    return Dual(re, du, t)


def _broadcast(x, shape):
    if isinstance(x, Dual):
        return Dual(_broadcast(x.re, shape), _broadcast(x.du, shape), x.tag)
    return np.broadcast_to(np.asarray(x, dtype=float), shape)


def asarray(nested):
    """Build an array (or array-valued dual) from nested lists of scalars."""
    if isinstance(nested, (list, tuple)):
        return stack([asarray(n) for n in nested])
    return nested
