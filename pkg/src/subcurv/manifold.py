"""Single-chart Riemannian manifolds and their curvature.

Conventions used throughout the package:

* ``dg[l, i, j] = d_l g_ij`` and ``ddg[l, m, i, j] = d_l d_m g_ij``.
* ``christoffel[k, i, j] = Γ^k_ij``.
* ``R(X, Y)Z = ∇_X ∇_Y Z - ∇_Y ∇_X Z - ∇_[X,Y] Z`` and the lowered tensor is
  ``R(X, Y, Z, H) = g(R(X, Y)Z, H)``, stored as ``riemann_lowered[i, j, k, h]``.
  With this sign the unit sphere has sectional curvature +1.
* ``ricci[j, k] = S(∂_j, ∂_k)`` is the trace of ``X -> R(X, ∂_j)∂_k``.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import dual
from .errors import ArityError, DegenerateMetric, DomainError
from .expr import MetricFunction, check_square, constant_value, parse_document

SAMPLE_MARGIN = 0.05
PD_RATIO = 1e-10
UNBOUNDED_BOX = (-1.0, 1.0)


@dataclass(frozen=True, eq=False)
class ChartedManifold:
    """A Riemannian manifold covered by one coordinate chart.

    ``metric`` maps a coordinate array (floats or duals) to the ``dim x dim``
    matrix of metric components.  ``domain`` holds open ``(lo, hi)`` bounds
    per coordinate; infinite bounds are allowed.
    """
    dim: int
    metric: Callable
    domain: tuple
    name: str = "manifold"
    coords: tuple = ()
    source: Optional[str] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ArityError("dimension must be positive")
        if len(self.domain) != self.dim:
            raise ArityError(f"domain has {len(self.domain)} intervals, dim is {self.dim}")
        if not self.coords:
            object.__setattr__(self, "coords", tuple(f"x{i}" for i in range(self.dim)))

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            return False
        return all(lo < xi < hi for xi, (lo, hi) in zip(x, self.domain))

    def sample_box(self, margin=SAMPLE_MARGIN):
        box = []
        for lo, hi in self.domain:
            if np.isfinite(lo) and np.isfinite(hi):
                pad = margin * (hi - lo)
                box.append((lo + pad, hi - pad))
            else:
                box.append((max(lo, UNBOUNDED_BOX[0]), min(hi, UNBOUNDED_BOX[1])))
        return np.array(box, dtype=float)

    def sample(self, rng, count, accept=None, max_tries=10000):
        """Uniform rejection sampling inside the margin-shrunk domain box."""
        box = self.sample_box()
        out = []
        tries = 0
        while len(out) < count:
            tries += 1
            if tries > max_tries:
                raise DomainError(f"could not sample {count} points on {self.name}")
            x = rng.uniform(box[:, 0], box[:, 1])
            if accept is None or accept(x):
                out.append(x)
        return np.array(out)

    def point(self, coords):
        return Point(np.asarray(coords, dtype=float), self)


@dataclass(frozen=True, eq=False)
class Point:
    coords: np.ndarray
    manifold: ChartedManifold

    def __post_init__(self):
        if not self.manifold.contains(self.coords):
            raise DomainError(f"{self.coords} is outside the domain of {self.manifold.name}")


VERTICAL, HORIZONTAL, MIXED, UNCLASSIFIED = "vertical", "horizontal", "mixed", "unclassified"


@dataclass(frozen=True, eq=False)
class TangentVector:
    at: Point
    components: np.ndarray
    kind: str = UNCLASSIFIED

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)


@dataclass(frozen=True)
class CurvatureData:
    metric: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray          # R(∂_i,∂_j)∂_k = riemann[i,j,k,l] ∂_l
    riemann_lowered: np.ndarray
    ricci: np.ndarray
    scalar: float
    inverse_metric: np.ndarray = field(repr=False, default=None)

    def R(self, X, Y, Z, H):
        return float(np.einsum("ijkh,i,j,k,h->", self.riemann_lowered, X, Y, Z, H))

    def S(self, X, Y):
        return float(X @ self.ricci @ Y)

    def sectional(self, X, Y):
        g = self.metric
        area = (X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2
        return self.R(X, Y, Y, X) / area


def _coords(p):
    if isinstance(p, Point):
        return p.manifold, p.coords
    return None, np.asarray(p, dtype=float)


def check_positive_definite(g, name="metric"):
    g = np.asarray(g, dtype=float)
    if not np.allclose(g, g.T, rtol=1e-12, atol=1e-14):
        raise DegenerateMetric(f"{name} is not symmetric")
    ev = np.linalg.eigvalsh(g)
    if not np.all(np.isfinite(ev)) or ev[-1] <= 0 or ev[0] <= PD_RATIO * ev[-1]:
        raise DegenerateMetric(f"{name} is not positive definite (eigenvalues {ev})")
    return g


def eval_metric(m, p):
    """Metric matrix at ``p``; checks domain membership and definiteness."""
    x = p.coords if isinstance(p, Point) else np.asarray(p, dtype=float)
    if not m.contains(x):
        raise DomainError(f"{x} is outside the domain of {m.name}")
    return check_positive_definite(m.metric(x), f"metric of {m.name} at {x}")


def metric_jets(m, x, order=2):
    """``[g, dg, ddg]`` at ``x`` from nested dual evaluation of the metric."""
    return dual.derivative_tensors(m.metric, x, order)


def christoffel_symbols(ginv, dg):
    """Γ^k_ij from the inverse metric and first derivatives (dual-aware)."""
    low = 0.5 * (dual.einsum("ijl->lij", dg) + dual.einsum("jil->lij", dg) - dg)
    gam = dual.einsum("kl,lij->kij", ginv, low)
    # exact symmetry even when g is symmetric only to roundoff
    return 0.5 * (gam + dual.transpose(gam, (0, 2, 1)))


def curvature_from_jets(g, dg, ddg):
    ginv = np.linalg.inv(g)
    gam = christoffel_symbols(ginv, dg)
    low = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    dlow = 0.5 * (np.einsum("mijl->mlij", ddg) + np.einsum("mjil->mlij", ddg) - ddg)
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    dgam = np.einsum("mkl,lij->mkij", dginv, low) + np.einsum("kl,mlij->mkij", ginv, dlow)
    riem = (np.einsum("iljk->ijkl", dgam) - np.einsum("jlik->ijkl", dgam)
            + np.einsum("lim,mjk->ijkl", gam, gam) - np.einsum("ljm,mik->ijkl", gam, gam))
    lowered = np.einsum("ijkl,lh->ijkh", riem, g)
    ricci = np.einsum("ijki->jk", riem)
    scalar = float(np.einsum("jk,jk->", ginv, ricci))
    return CurvatureData(g, gam, riem, lowered, ricci, scalar, ginv)


def christoffel(m, p):
    """Christoffel symbols at ``p`` (first derivatives by dual numbers)."""
    x = p.coords if isinstance(p, Point) else np.asarray(p, dtype=float)
    g = eval_metric(m, x)
    _, dg = metric_jets(m, x, order=1)
    return christoffel_symbols(np.linalg.inv(g), dg)


def curvature(m, p):
    """Riemann, Ricci and scalar curvature at ``p``."""
    x = p.coords if isinstance(p, Point) else np.asarray(p, dtype=float)
    eval_metric(m, x)
    g, dg, ddg = metric_jets(m, x, order=2)
    return curvature_from_jets(g, dg, ddg)


def covariant_derivative(m, field, direction):
    """``∇_dir field`` for a vector field given as component functions.

    ``field`` maps coordinates (floats or duals) to a length-``dim`` array.
    """
    at = direction.at
    x = at.coords
    v = np.asarray(direction.components, dtype=float)
    gam = christoffel(m, x)
    y, dy = dual.jvp(field, x, v)
    comp = np.asarray(dy) + np.einsum("kij,i,j->k", gam, v, np.asarray(y))
    return TangentVector(at, comp)


# ---------------------------------------------------------------------------
# finite-difference oracles (independent of the dual-number path)


def metric_jets_fd(m, x, h=1e-4):
    x = np.asarray(x, dtype=float)
    n = m.dim
    f = lambda y: np.asarray(m.metric(y), dtype=float)
    e = np.eye(n) * h
    g = f(x)
    dg = np.stack([(f(x + e[l]) - f(x - e[l])) / (2 * h) for l in range(n)])
    ddg = np.zeros((n, n, n, n))
    for l in range(n):
        for k in range(n):
            if l == k:
                ddg[l, k] = (f(x + e[l]) - 2 * g + f(x - e[l])) / h**2
            else:
                ddg[l, k] = (f(x + e[l] + e[k]) - f(x + e[l] - e[k])
                             - f(x - e[l] + e[k]) + f(x - e[l] - e[k])) / (4 * h * h)
    return g, dg, ddg


def christoffel_fd(m, x, h=1e-4):
    g, dg, _ = metric_jets_fd(m, x, h)
    return christoffel_symbols(np.linalg.inv(g), dg)


def curvature_fd(m, x, h=1e-3):
    return curvature_from_jets(*metric_jets_fd(m, x, h))


# ---------------------------------------------------------------------------
# parsing


def domain_from_statement(intervals, dim):
    if intervals is None:
        return tuple((-np.inf, np.inf) for _ in range(dim))
    if len(intervals) != dim:
        raise ArityError(f"domain has {len(intervals)} intervals, dim is {dim}")
    out = []
    for lo, hi in intervals:
        lo, hi = constant_value(lo), constant_value(hi)
        if not lo < hi:
            raise ArityError(f"empty domain interval ({lo}, {hi})")
        out.append((lo, hi))
    return tuple(out)


def manifold_from_body(body, name="manifold", source=None, validate=True):
    stmts = body["stmts"]
    if "g" not in stmts:
        raise ArityError("metric definition needs a 'g = [[...]]' statement")
    entries = stmts["g"][1]
    dim = stmts["dim"][1] if "dim" in stmts else None
    n = check_square(entries, dim)
    coords = stmts["coords"][1] if "coords" in stmts else [f"x{i}" for i in range(n)]
    if len(coords) != n:
        raise ArityError(f"{len(coords)} coordinates declared for a {n}x{n} metric")
    if len(set(coords)) != n:
        raise ArityError("coordinate names must be distinct")
    domain = domain_from_statement(stmts["domain"][1] if "domain" in stmts else None, n)
    if "name" in stmts:
        name = stmts["name"][1]
    m = ChartedManifold(n, MetricFunction(entries, coords), domain, name, tuple(coords), source)
    if validate:
        validate_manifold(m)
    return m


def validate_manifold(m, points=8, seed=0):
    """Symmetry and definiteness of the metric at seeded sample points."""
    rng = np.random.default_rng(seed)
    for x in m.sample(rng, points):
        g = np.asarray(m.metric(x), dtype=float)
        if not np.allclose(g, g.T, rtol=1e-12, atol=1e-14):
            raise ArityError(f"metric of {m.name} is not symmetric at {x}")
        check_positive_definite(g, f"metric of {m.name} at {x}")
    return m


def parse_metric_expression(text, validate=True):
    """Build a :class:`ChartedManifold` from metric-expression source."""
    doc = parse_document(text)
    if doc["blocks"] or "pi" in doc["stmts"]:
        raise ArityError("submersion blocks found; use parse_submersion instead")
    return manifold_from_body(doc, source=text, validate=validate)
