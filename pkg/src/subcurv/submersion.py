"""Riemannian submersions in adapted coordinates and their O'Neill tensors.

Two evaluation routes are provided and cross-checked by the tests:

* :class:`LocalGeometry` computes full component arrays of ``T``, ``A``,
  ``∇T``, ``∇A``, ``N`` and ``∇N`` at a point.  The metric and the projection
  are replaced by their Taylor polynomials at the point (quadratic for the
  metric, cubic for the projection, coefficients from nested duals); every
  derivative that enters the tensors at the point is reproduced exactly.
* :func:`oneill_T`, :func:`oneill_A`, :func:`nabla_T`, :func:`nabla_A` act on
  individual vectors, differentiate the actual metric and projection along
  dual-perturbed points, and accept an explicit (possibly non-constant)
  extension of the vector argument.

Tensor storage: ``T[k, i, j]`` is the k-th component of ``T_{∂_i} ∂_j``;
``nablaT[l, k, i, j]`` is that of ``(∇_{∂_l} T)_{∂_i} ∂_j``; ``nablaN[l, k]``
is that of ``∇_{∂_l} N``.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from . import dual
from .errors import ArityError, DomainError, FrameDegenerate, RankError
from .manifold import (
    HORIZONTAL, MIXED, VERTICAL, ChartedManifold, CurvatureData, Point, TangentVector,
    check_positive_definite, christoffel_symbols, curvature, curvature_from_jets,
    eval_metric, manifold_from_body, metric_jets,
)
from .expr import MapFunction, parse_document

RANK_TOL = 1e-10
PIVOT_TOL = 1e-8
FRAME_ATTEMPTS = 8
ADAPTED_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SubmersionSpec:
    """Projection ``pi`` from ``total`` onto ``base``.

    ``pi`` maps total coordinates (floats or duals) to base coordinates.  The
    coordinates must be adapted: ``ker dπ`` is spanned by a fixed subset of
    coordinate directions (:attr:`fibre_index`).
    """
    total: ChartedManifold
    base: ChartedManifold
    pi: Callable
    name: str = "submersion"
    source: Optional[str] = None

    def __post_init__(self):
        if not self.base.dim < self.total.dim:
            raise ArityError("base dimension must be smaller than total dimension")

    @property
    def fibre_dim(self):
        return self.total.dim - self.base.dim

    def project(self, x):
        return np.asarray(self.pi(np.asarray(x, dtype=float)), dtype=float)

    def accepts(self, x):
        return self.total.contains(x) and self.base.contains(self.project(x))

    def sample(self, rng, count):
        return self.total.sample(rng, count, accept=self.accepts)

    @cached_property
    def fibre_index(self):
        """Coordinate indices spanning the fibres (adaptedness contract)."""
        pts = self.sample(np.random.default_rng(12345), 6)
        zero = np.ones(self.total.dim, dtype=bool)
        for x in pts:
            J = jacobian(self.pi, x)
            zero &= np.all(np.abs(J) <= ADAPTED_TOL * max(1.0, np.abs(J).max()), axis=0)
        idx = tuple(int(i) for i in np.flatnonzero(zero))
        if len(idx) != self.fibre_dim:
            raise RankError(
                f"{self.name}: coordinates are not adapted "
                f"(found {len(idx)} fibre directions, expected {self.fibre_dim})")
        return idx

    @property
    def base_index(self):
        return tuple(i for i in range(self.total.dim) if i not in self.fibre_index)

    def fibre_through(self, x):
        """The fibre through ``x`` as a charted manifold in the fibre coordinates."""
        x = np.asarray(x, dtype=float)
        fib = list(self.fibre_index)
        n = self.total.dim
        metric = self.total.metric

        def embed(y):
            slots = {f: k for k, f in enumerate(fib)}
            return dual.stack([y[slots[i]] if i in slots else x[i] for i in range(n)])

        def fibre_metric(y):
            G = metric(embed(y))
            return G[np.ix_(fib, fib)]

        domain = tuple(self.total.domain[i] for i in fib)
        coords = tuple(self.total.coords[i] for i in fib)
        return ChartedManifold(len(fib), fibre_metric, domain,
                               f"fibre of {self.name}", coords)


def jacobian(f, x):
    """``J[a, l] = d_l f^a`` by one dual evaluation per direction."""
    n = len(x)
    eye = np.eye(n)
    cols = [dual.jvp(f, x, eye[l])[1] for l in range(n)]
    return dual.stack(cols, axis=-1)


def projectors(G, J, Ginv=None):
    """g-orthogonal projectors ``(Pv, Ph)`` onto ``ker J`` and its complement."""
    if Ginv is None:
        Ginv = dual.inv(G)
    GJt = dual.matmul(Ginv, dual.transpose(J))
    Ph = dual.matmul(dual.matmul(GJt, dual.inv(dual.matmul(J, GJt))), J)
    Pv = np.eye(np.shape(dual.primal(G))[0]) - Ph
    return Pv, Ph


def _transport(P, dP, Q, gam):
    """``[∇_{Q e_i} (P e_j)]^a`` for the chart-constant field ``e_j``."""
    return (dual.einsum("li,laj->aij", Q, dP)
            + dual.einsum("li,alm,mj->aij", Q, gam, P))


def oneill_arrays(Pv, Ph, dPh, gam):
    """Component arrays ``(T, A)`` from projectors, their derivatives and Γ."""
    dPv = -dPh
    T = (dual.einsum("ka,aij->kij", Pv, _transport(Ph, dPh, Pv, gam))
         + dual.einsum("ka,aij->kij", Ph, _transport(Pv, dPv, Pv, gam)))
    A = (dual.einsum("ka,aij->kij", Pv, _transport(Ph, dPh, Ph, gam))
         + dual.einsum("ka,aij->kij", Ph, _transport(Pv, dPv, Ph, gam)))
    return T, A


def _covariant_12(dX, X, gam):
    """Covariant derivative array of a (1,2)-tensor from its partials."""
    return (dX + np.einsum("klm,mij->lkij", gam, X)
            - np.einsum("mli,kmj->lkij", gam, X)
            - np.einsum("mlj,kim->lkij", gam, X))


class LocalGeometry:
    """All pointwise quantities of a submersion at one point of the total space."""

    def __init__(self, spec, x):
        x = np.asarray(x, dtype=float)
        if not spec.accepts(x):
            raise DomainError(f"{x} is outside the domain of {spec.name}")
        self.spec = spec
        self.x = x
        n = spec.total.dim
        self.n = n
        g0, g1, g2 = metric_jets(spec.total, x, order=2)
        check_positive_definite(g0, f"metric of {spec.total.name} at {x}")
        p0, p1, p2, p3 = dual.derivative_tensors(spec.pi, x, 3)
        self.curv = curvature_from_jets(g0, g1, g2)
        self.g = g0
        self.ginv = self.curv.inverse_metric
        self.gamma = self.curv.christoffel
        self.J = p1.T
        if np.linalg.matrix_rank(self.J, tol=RANK_TOL * max(1.0, np.abs(self.J).max())) < spec.base.dim:
            raise RankError(f"dπ drops rank at {x}")
        self.base_point = p0

        def metric_loc(y):
            d = y - x
            return g0 + dual.einsum("l,lij->ij", d, g1) + 0.5 * dual.einsum("l,m,lmij->ij", d, d, g2)

        def dmetric_loc(y):
            return g1 + dual.einsum("m,lmij->lij", y - x, g2)

        def jac_loc(y):
            d = y - x
            J = p1 + dual.einsum("m,lma->la", d, p2) + 0.5 * dual.einsum("m,k,lmka->la", d, d, p3)
            return dual.transpose(J)

        eye = np.eye(n)

        def proj_h(y):
            return projectors(metric_loc(y), jac_loc(y))[1]

        def fields(y):
            G = metric_loc(y)
            Ginv = dual.inv(G)
            gam = christoffel_symbols(Ginv, dmetric_loc(y))
            Pv, Ph = projectors(G, jac_loc(y), Ginv)
            dPh = dual.stack([dual.jvp(proj_h, y, eye[l])[1] for l in range(n)])
            T, A = oneill_arrays(Pv, Ph, dPh, gam)
            N = dual.einsum("kij,ia,aj->k", T, Pv, Ginv)
            return T, A, N, Pv, Ph

        T, A, N, Pv, Ph = fields(x)
        self.T, self.A, self.N = T, A, N
        self.Pv, self.Ph = Pv, Ph
        dT, dA, dN = [], [], []
        for l in range(n):
            _, (tT, tA, tN, _, _) = dual.jvp(fields, x, eye[l])
            dT.append(tT)
            dA.append(tA)
            dN.append(tN)
        gam = self.gamma
        self.nablaT = _covariant_12(np.stack(dT), T, gam)
        self.nablaA = _covariant_12(np.stack(dA), A, gam)
        self.nablaN = np.stack(dN) + np.einsum("klm,m->lk", gam, N)

    # lazily computed curvature of base and fibre -------------------------

    @cached_property
    def base_curv(self):
        return curvature(self.spec.base, self.base_point)

    @cached_property
    def fibre_curv(self):
        fib = self.spec.fibre_index
        fibre = self.spec.fibre_through(self.x)
        return curvature(fibre, self.x[list(fib)])

    # vector-level helpers --------------------------------------------------

    def inner(self, a, b):
        return float(a @ self.g @ b)

    def t(self, E, F):
        return np.einsum("kij,i,j->k", self.T, E, F)

    def a(self, E, F):
        return np.einsum("kij,i,j->k", self.A, E, F)

    def dt(self, E, F, G):
        return np.einsum("lkij,l,i,j->k", self.nablaT, E, F, G)

    def da(self, E, F, G):
        return np.einsum("lkij,l,i,j->k", self.nablaA, E, F, G)

    def dn(self, E):
        return E @ self.nablaN

    def vertical(self, v):
        return self.Pv @ v

    def horizontal(self, v):
        return self.Ph @ v

    def push(self, X):
        return self.J @ X

    def fibre_part(self, U):
        return np.asarray(U)[list(self.spec.fibre_index)]


# ---------------------------------------------------------------------------
# operations on points and vectors


def _x(p):
    return p.coords if isinstance(p, Point) else np.asarray(p, dtype=float)


def _vec(v):
    return np.asarray(v.components if isinstance(v, TangentVector) else v, dtype=float)


def _point_of(s, v, p=None):
    if isinstance(v, TangentVector):
        return v.at
    if p is None:
        raise ValueError("a point is required when passing bare component arrays")
    return p if isinstance(p, Point) else Point(np.asarray(p, dtype=float), s.total)


def differential(s, p):
    """Jacobian of ``pi`` at ``p`` (``b x n``); raises :class:`RankError` if rank < b."""
    x = _x(p)
    if not s.accepts(x):
        raise DomainError(f"{x} is outside the domain of {s.name}")
    J = np.asarray(jacobian(s.pi, x), dtype=float)
    sv = np.linalg.svd(J, compute_uv=False)
    if sv.size == 0 or sv[0] == 0 or sv[-1] < RANK_TOL * sv[0] or len(sv) < s.base.dim:
        raise RankError(f"{s.name}: rank of dπ at {x} is below {s.base.dim}")
    return J


def projectors_at(s, x):
    x = _x(x)
    G = eval_metric(s.total, x)
    return projectors(G, differential(s, x))


def split(s, v):
    """``(vertical, horizontal)`` parts of ``v``; they sum to ``v``."""
    at = v.at
    comp = _vec(v)
    Pv, _ = projectors_at(s, at.coords)
    vert = Pv @ comp
    hor = comp - vert
    return TangentVector(at, vert, VERTICAL), TangentVector(at, hor, HORIZONTAL)


def classify(s, v, tol=1e-10):
    at = v.at
    comp = _vec(v)
    Pv, Ph = projectors_at(s, at.coords)
    g = eval_metric(s.total, at.coords)
    scale = max(1.0, float(np.sqrt(comp @ g @ comp)))
    hv = np.sqrt(abs((Ph @ comp) @ g @ (Ph @ comp))) / scale
    vv = np.sqrt(abs((Pv @ comp) @ g @ (Pv @ comp))) / scale
    if hv <= tol:
        return VERTICAL
    if vv <= tol:
        return HORIZONTAL
    return MIXED


@dataclass(frozen=True, eq=False)
class CompatibleFrame:
    at: Point
    horizontal: tuple
    vertical: tuple
    seed: int

    @property
    def X(self):
        return [v.components for v in self.horizontal]

    @property
    def U(self):
        return [v.components for v in self.vertical]

    def matrix(self):
        """Columns ``X_1..X_b, U_1..U_k``."""
        return np.column_stack(self.X + self.U)


def _gram_schmidt(vectors, g, against=()):
    out = []
    for v in vectors:
        w = np.array(v, dtype=float)
        norm0 = np.sqrt(w @ g @ w)
        for _ in range(2):
            for u in list(against) + out:
                w = w - (u @ g @ w) * u
        norm = np.sqrt(w @ g @ w)
        if norm0 == 0 or norm < PIVOT_TOL * norm0:
            raise FrameDegenerate("Gram-Schmidt pivot below tolerance")
        out.append(w / norm)
    return out


def _null_space(J):
    _, sv, vt = np.linalg.svd(J)
    rank = int(np.sum(sv > RANK_TOL * max(sv[0], 1e-300)))
    return vt[rank:].T


def compatible_frame(s, p, seed=0):
    """Seeded orthonormal frame: horizontal legs ``X_i`` then vertical ``U_j``."""
    pt = p if isinstance(p, Point) else Point(np.asarray(p, dtype=float), s.total)
    x = pt.coords
    g = eval_metric(s.total, x)
    J = differential(s, x)
    _, Ph = projectors(g, J)
    K = _null_space(J)
    rng = np.random.default_rng(seed)
    b, k = s.base.dim, s.fibre_dim
    for _ in range(FRAME_ATTEMPTS):
        try:
            U = _gram_schmidt((K @ rng.uniform(-1, 1, (K.shape[1], k))).T, g)
            X = _gram_schmidt((Ph @ rng.uniform(-1, 1, (s.total.dim, b))).T, g, against=U)
            break
        except FrameDegenerate:
            continue
    else:
        raise FrameDegenerate(f"no well-conditioned frame at {x} after {FRAME_ATTEMPTS} attempts")
    return CompatibleFrame(
        pt,
        tuple(TangentVector(pt, v, HORIZONTAL) for v in X),
        tuple(TangentVector(pt, v, VERTICAL) for v in U),
        seed,
    )


def _field_T_or_A(s, which, E, Ftil, y):
    """``T_E F`` or ``A_E F`` at ``y`` for the extension ``Ftil`` (route 2)."""
    total = s.total
    G = total.metric(y)
    Ginv = dual.inv(G)
    _, dG = jacobian_metric(total, y)
    gam = christoffel_symbols(Ginv, dG)
    Pv, Ph = projectors(G, jacobian(s.pi, y), Ginv)
    dirn = dual.matmul(Pv if which == "T" else Ph, E)

    def hF(z):
        return dual.matmul(projectors(total.metric(z), jacobian(s.pi, z))[1], Ftil(z))

    def vF(z):
        return dual.matmul(projectors(total.metric(z), jacobian(s.pi, z))[0], Ftil(z))

    h_now, dh = dual.jvp(hF, y, dirn)
    v_now, dv = dual.jvp(vF, y, dirn)
    nab_h = dh + dual.einsum("kij,i,j->k", gam, dirn, h_now)
    nab_v = dv + dual.einsum("kij,i,j->k", gam, dirn, v_now)
    return dual.matmul(Pv, nab_h) + dual.matmul(Ph, nab_v)


def jacobian_metric(m, y):
    """``(g(y), dg(y))`` with ``dg[l] = d_l g`` (dual-aware)."""
    n = m.dim
    eye = np.eye(n)
    parts = [dual.jvp(m.metric, y, eye[l]) for l in range(n)]
    return parts[0][0], dual.stack([p[1] for p in parts])


def _extension(F, x, gradient):
    F = np.asarray(F, dtype=float)
    if gradient is None:
        return lambda z: F
    M = np.asarray(gradient, dtype=float)
    return lambda z: F + dual.matmul(M, z - x)


def oneill_T(s, E, F, p=None, extension=None):
    """``T_E F = v∇_{vE} hF + h∇_{vE} vF``.

    ``extension`` optionally gives a matrix ``M`` so that ``F`` is extended
    as ``F + M (y - x)`` instead of by constant components; the result must
    not depend on it.
    """
    at = _point_of(s, E, p)
    x = at.coords
    val = _field_T_or_A(s, "T", _vec(E), _extension(_vec(F), x, extension), x)
    return TangentVector(at, np.asarray(val, dtype=float))


def oneill_A(s, E, F, p=None, extension=None):
    """``A_E F = v∇_{hE} hF + h∇_{hE} vF``; see :func:`oneill_T`."""
    at = _point_of(s, E, p)
    x = at.coords
    val = _field_T_or_A(s, "A", _vec(E), _extension(_vec(F), x, extension), x)
    return TangentVector(at, np.asarray(val, dtype=float))


def _nabla(s, which, E, F, G, p=None):
    at = _point_of(s, E, p)
    x = at.coords
    e, f, gv = _vec(E), _vec(F), _vec(G)
    gam = christoffel_symbols(np.linalg.inv(eval_metric(s.total, x)),
                              jacobian_metric(s.total, x)[1])

    def tensor(a, b, y):
        return _field_T_or_A(s, which, a, lambda z: b, y)

    val, dval = dual.jvp(lambda y: tensor(f, gv, y), x, e)
    nab_f = np.einsum("kij,i,j->k", gam, e, f)
    nab_g = np.einsum("kij,i,j->k", gam, e, gv)
    out = (np.asarray(dval) + np.einsum("kij,i,j->k", gam, e, np.asarray(val))
           - np.asarray(tensor(nab_f, gv, x)) - np.asarray(tensor(f, nab_g, x)))
    return TangentVector(at, out)


def nabla_T(s, E, F, G, p=None):
    """``(∇_E T)_F G`` with chart-constant extensions of ``F`` and ``G``."""
    return _nabla(s, "T", E, F, G, p)


def nabla_A(s, E, F, G, p=None):
    """``(∇_E A)_F G`` with chart-constant extensions of ``F`` and ``G``."""
    return _nabla(s, "A", E, F, G, p)


def mean_curvature_N(s, p, frame=None, geometry=None):
    """``N = Σ_j T_{U_j} U_j`` over the vertical legs of ``frame``."""
    pt = p if isinstance(p, Point) else Point(np.asarray(p, dtype=float), s.total)
    geo = geometry or LocalGeometry(s, pt.coords)
    if frame is None:
        frame = compatible_frame(s, pt, 0)
    val = sum((geo.t(U, U) for U in frame.U), np.zeros(s.total.dim))
    return TangentVector(pt, val, HORIZONTAL)


@dataclass(frozen=True)
class Norms:
    """Squared norms of T, A, N at a point under both block conventions.

    ``normT2``/``normA2`` use only the vertical-vertical block of ``T`` and
    the horizontal-horizontal block of ``A``; the ``*_full`` variants also
    add the mixed blocks ``T_U X`` and ``A_X U``.
    """
    normT2: float
    normA2: float
    normN2: float
    normT2_full: float
    normA2_full: float

    def convention(self, name):
        if name == "block":
            return self.normT2, self.normA2
        if name == "full":
            return self.normT2_full, self.normA2_full
        raise ValueError(f"unknown norm convention {name!r}")


def norms(s, p, frame=None, geometry=None):
    pt = p if isinstance(p, Point) else Point(np.asarray(p, dtype=float), s.total)
    geo = geometry or LocalGeometry(s, pt.coords)
    if frame is None:
        frame = compatible_frame(s, pt, 0)
    sq = lambda v: geo.inner(v, v)
    Xs, Us = frame.X, frame.U
    tvv = sum(sq(geo.t(U, V)) for U in Us for V in Us)
    tvh = sum(sq(geo.t(U, X)) for U in Us for X in Xs)
    ahh = sum(sq(geo.a(X, Y)) for X in Xs for Y in Xs)
    ahv = sum(sq(geo.a(X, U)) for X in Xs for U in Us)
    nn = sum((geo.t(U, U) for U in Us), np.zeros(geo.n))
    return Norms(float(tvv), float(ahh), float(sq(nn)), float(tvv + tvh), float(ahh + ahv))


# ---------------------------------------------------------------------------
# validation


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


def validate_submersion(s, points=20, seed=0, tol=1e-9):
    """(S1) rank, (S2) horizontal isometry and adaptedness at sample points."""
    checks = []
    try:
        fib = s.fibre_index
        checks.append(Check("adapted", True, f"fibre coordinates {[s.total.coords[i] for i in fib]}"))
    except RankError as exc:
        checks.append(Check("adapted", False, str(exc)))
        fib = None
    rng = np.random.default_rng(seed)
    xs = s.sample(rng, points)
    rank_ok, rank_msg = True, ""
    iso_err = 0.0
    adapt_err = 0.0
    evaluated = 0
    for x in xs:
        try:
            J = differential(s, x)
        except RankError as exc:
            rank_ok, rank_msg = False, str(exc)
            continue
        evaluated += 1
        g = eval_metric(s.total, x)
        gb = eval_metric(s.base, s.project(x))
        _, Ph = projectors(g, J)
        H = _gram_schmidt(_independent_columns(Ph), g)
        H = np.column_stack(H)
        iso_err = max(iso_err, float(np.abs((J @ H).T @ gb @ (J @ H) - H.T @ g @ H).max()))
        if fib is not None:
            adapt_err = max(adapt_err, float(np.abs(J[:, list(fib)]).max(initial=0.0)))
    checks.insert(0, Check("S1", rank_ok, rank_msg or f"rank {s.base.dim} at {points} points"))
    if evaluated:
        checks.insert(1, Check("S2", iso_err < tol, f"max Gram deviation {iso_err:.3e}"))
    else:
        checks.insert(1, Check("S2", False, "not evaluated: no full-rank sample point"))
    if fib is not None:
        checks[-1] = Check("adapted", adapt_err <= ADAPTED_TOL, checks[-1].detail)
    return checks


def _independent_columns(P):
    u, sv, _ = np.linalg.svd(P)
    r = int(np.sum(sv > 1e-8 * sv[0]))
    return list(u[:, :r].T)


# ---------------------------------------------------------------------------
# parsing


def parse_submersion(text, validate=True):
    """Build a :class:`SubmersionSpec` from a definition file."""
    doc = parse_document(text)
    blocks, stmts = doc["blocks"], doc["stmts"]
    for key in ("total", "base"):
        if key not in blocks:
            raise ArityError(f"submersion definition needs a '{key} {{ ... }}' block")
    extra = set(blocks) - {"total", "base"}
    if extra:
        raise ArityError(f"unknown blocks: {sorted(extra)}")
    if "pi" not in stmts:
        raise ArityError("submersion definition needs 'pi = (...)'")
    total = manifold_from_body(blocks["total"], "total", validate=validate)
    base = manifold_from_body(blocks["base"], "base", validate=validate)
    exprs = stmts["pi"][1]
    if len(exprs) != base.dim:
        raise ArityError(f"pi has {len(exprs)} components, base dimension is {base.dim}")
    name = stmts["name"][1] if "name" in stmts else "submersion"
    s = SubmersionSpec(total, base, MapFunction(exprs, total.coords), name, text)
    if validate:
        s.fibre_index
    return s
