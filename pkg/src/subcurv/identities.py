"""Catalogue of curvature relations and their residual evaluators.

Every relation has a left-hand side computed from the total-space curvature
(or a generalized tensor built from it) and a right-hand side assembled from
base and fibre curvature, the O'Neill tensors, their derivatives, ``N`` and
frame sums.  The right-hand side exists in a *printed* variant, transcribed
term by term, and, where the printed form is defective, a *corrected*
variant carrying a list of labelled corrections.  Evaluating both lets a
report say which form holds instead of silently fixing anything.

Slot patterns and vector names:

======  ==============  ======  ==============
HHHH    X, Y, Z, H      HVHV    X, V, Y, W
HHHV    X, Y, Z, V      VVVH    U, V, W, X
HHVV    X, Y, V, W      VVVV    U, V, W, F
======  ==============  ======  ==============
"""

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import SubcurvError, UnsupportedCase
from .probe import Probe
from .tensors import Kind, check_dimension, generalized_array, generalized_tensor

CASES = ("HHHH", "HHHV", "HHVV", "HVHV", "VVVH", "VVVV")
DEFAULT_TOL = 1e-8
UMBILIC_TOL = 1e-10


class Verdict(str, enum.Enum):
    PRINTED = "exact_as_printed"
    CORRECTED = "exact_sign_corrected"
    FAIL = "both_fail"


# correction labels -----------------------------------------------------------

HHVV_OVERALL = "overall sign of the right-hand side reversed"
HHVV_SYM = "sign of g(A_X W, A_Y V) reversed (the printed term is symmetric in V, W)"
HVHV_SIGNS = "signs of the (∇_X T), T.T and A.A terms reversed"
HVHV_ALL = "signs of the (∇_X T), (∇_V A), T.T and A.A terms reversed"
TYPO_AXY = "g(A_X Y, A_Y W) read as g(A_X V, A_Y W)"
P_MISSING = "Ricci term + g(V,W) S(X,Y)/(n-1) restored"
V_MISSING = "scalar term - r g(X,Y) g(V,W)/((n-1)(n-2)) restored"
R_FORMULA = "scalar curvature completed with -|N|^2 + 2 Σ g(∇_{X_i} N, X_i)"
SWAPPED = "mixed Ricci bracket evaluated as S(V, X) instead of its role-swapped form"
TYPO_SUV = "bracket S(U,V) multiplying g(F,U) read as S(V,W)"
COR_SIGN = "minus sign restored on Σ_j g((∇_{U_j} T)_{U_j} U, X)"

TOKEN_AXT = "the token A_X T is read as A_X Y"


@dataclass(frozen=True)
class IdentityId:
    family: str            # oneill, ricci, scalar, generalized, corollary
    label: str             # 1..6, i..iii, tensor kind, or ""
    case: str = ""         # slot pattern

    @property
    def key(self):
        parts = [self.family]
        if self.label:
            parts.append(self.label)
        if self.case:
            parts.append(self.case)
        return "/".join(parts)

    def __str__(self):
        return self.key


@dataclass(frozen=True)
class Relation:
    id: IdentityId
    pattern: str
    lhs: Callable
    rhs: Callable                     # rhs(probe, vecs, fixed) -> float
    corrections: tuple = ()
    notes: tuple = ()
    kind: Optional[Kind] = None
    informational: bool = False       # reported, never counted as a failure


@dataclass
class IdentityResidual:
    id: IdentityId
    point: tuple
    seed: int
    lhs: float
    rhs_printed: float
    rhs_corrected: Optional[float]
    abs_printed: float
    rel_printed: float
    abs_corrected: Optional[float]
    rel_corrected: Optional[float]
    verdict: Verdict
    extras: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "identity": self.id.key,
            "seed": self.seed,
            "point": list(self.point),
            "lhs": self.lhs,
            "rhs_printed": self.rhs_printed,
            "rhs_corrected": self.rhs_corrected,
            "abs_printed": self.abs_printed,
            "rel_printed": self.rel_printed,
            "abs_corrected": self.abs_corrected,
            "rel_corrected": self.rel_corrected,
            "verdict": self.verdict.value,
            **({"extras": self.extras} if self.extras else {}),
        }


def residual(lhs, rhs):
    a = abs(lhs - rhs)
    return a, a / max(1.0, abs(lhs), abs(rhs))


def judge(rel_printed, rel_corrected, tol):
    if rel_printed < tol:
        return Verdict.PRINTED
    if rel_corrected is not None and rel_corrected < tol:
        return Verdict.CORRECTED
    return Verdict.FAIL


# ---------------------------------------------------------------------------
# O'Neill blocks


def on_hhhh(p, X, Y, Z, H):
    g, A = p.g, p.A
    return (p.RG(X, Y, Z, H) + 2 * g(A(X, Y), A(Z, H))
            - g(A(Y, Z), A(X, H)) + g(A(X, Z), A(Y, H)))


def on_hhhv(p, X, Y, Z, V):
    g, A, T = p.g, p.A, p.T
    return (-g(p.dA(Z, X, Y), V) - g(A(X, Y), T(V, Z))
            + g(A(Y, Z), T(V, X)) - g(A(X, Z), T(V, Y)))


def on_hhvv(p, X, Y, V, W, sym=-1.0, overall=1.0):
    g, A, T = p.g, p.A, p.T
    return overall * (g(p.dA(V, X, Y), W) - g(p.dA(W, X, Y), V)
                      + g(A(X, V), A(Y, W)) + sym * g(A(X, W), A(Y, V))
                      - g(T(V, X), T(W, Y)) + g(T(W, X), T(V, Y)))


def on_hvhv(p, X, V, Y, W, signs=(1, 1, -1, 1), typo=False):
    g, A, T = p.g, p.A, p.T
    s_dt, s_da, s_tt, s_aa = signs
    return (s_dt * g(p.dT(X, V, W), Y) + s_da * g(p.dA(V, X, Y), W)
            + s_tt * g(T(V, X), T(W, Y)) + s_aa * g(A(X, Y if typo else V), A(Y, W)))


HVHV_FIXED = (-1, -1, 1, -1)


def on_vvvh(p, U, V, W, X):
    return p.g(p.dT(U, V, W), X) - p.g(p.dT(V, U, W), X)


def on_vvvv(p, U, V, W, F):
    g, T = p.g, p.T
    return p.Rhat(U, V, W, F) + g(T(U, W), T(V, F)) - g(T(V, W), T(U, F))


# ---------------------------------------------------------------------------
# relations of the total-space curvature


def _riemann_lhs(p, v):
    return p.R(*v)


def _oneill_relations():
    rels = [
        Relation(IdentityId("oneill", "1", "HHHH"), "HHHH", _riemann_lhs,
                 lambda p, v, fixed: on_hhhh(p, *v)),
        Relation(IdentityId("oneill", "2", "HHHV"), "HHHV", _riemann_lhs,
                 lambda p, v, fixed: on_hhhv(p, *v)),
        Relation(IdentityId("oneill", "3", "HHVV"), "HHVV", _riemann_lhs,
                 lambda p, v, fixed: (on_hhvv(p, *v, sym=-1.0, overall=-1.0) if fixed
                                      else on_hhvv(p, *v, sym=1.0, overall=1.0)),
                 corrections=(HHVV_SYM, HHVV_OVERALL)),
        Relation(IdentityId("oneill", "4", "HVHV"), "HVHV", _riemann_lhs,
                 lambda p, v, fixed: on_hvhv(p, *v, signs=HVHV_FIXED if fixed else (1, -1, -1, 1)),
                 corrections=(HVHV_SIGNS,)),
        Relation(IdentityId("oneill", "5", "VVVH"), "VVVH", _riemann_lhs,
                 lambda p, v, fixed: on_vvvh(p, *v)),
        Relation(IdentityId("oneill", "6", "VVVV"), "VVVV", _riemann_lhs,
                 lambda p, v, fixed: on_vvvv(p, *v)),
    ]
    return rels


def _ricci_relations():
    return [
        Relation(IdentityId("ricci", "i", "VV"), "VV", lambda p, v: p.S(*v),
                 lambda p, v, fixed: p.ric_vv(*v)),
        Relation(IdentityId("ricci", "ii", "HH"), "HH", lambda p, v: p.S(*v),
                 lambda p, v, fixed: p.ric_hh(*v)),
        Relation(IdentityId("ricci", "iii", "VH"), "VH", lambda p, v: p.S(*v),
                 lambda p, v, fixed: p.ric_vh(*v)),
    ]


SCALAR_ID = IdentityId("scalar", "")


# ---------------------------------------------------------------------------
# generalized tensors


def _ricci_coefficient(kind, n):
    if kind is Kind.P:
        return 1.0 / (n - 1)
    if kind in (Kind.L, Kind.V):
        return 1.0 / (n - 2)
    if kind is Kind.W:
        return 1.0 / (2 * (n - 1))
    return 0.0


# (g-pair, S-pair) slot indices of each Ricci correction term, with sign
_TWO_TERM = ((+1, (0, 3), (1, 2)), (-1, (1, 3), (0, 2)))
_FOUR_TERM = _TWO_TERM + ((+1, (1, 2), (0, 3)), (-1, (0, 2), (1, 3)))
_METRIC_TERM = ((+1, (0, 3), (1, 2)), (-1, (1, 3), (0, 2)))


def _model_ricci(p, case, v, i, j, fixed, with_N, cor_sign):
    """Ricci bracket of the relations for slots ``i``, ``j`` of ``case``."""
    ti, tj = case[i], case[j]
    a, b = v[i], v[j]
    if ti == tj == "H":
        return p.ric_hh(a, b, with_N)
    if ti == tj == "V":
        return p.ric_vv(a, b, with_N)
    U, X = (a, b) if ti == "V" else (b, a)
    if case == "HHHV" and not fixed:
        return p.ric_vh_swapped(X, U, with_N)
    return p.ric_vh(U, X, with_N, frame_sign=cor_sign)


def _ricci_part(kind, case, p, v, fixed, with_N=True, cor_sign=-1.0):
    n = p.n
    c = _ricci_coefficient(kind, n)
    terms = _TWO_TERM if kind is Kind.P else _FOUR_TERM
    total = 0.0
    for sign, (gi, gj), (si, sj) in terms:
        if case[gi] != case[gj]:
            continue          # g(horizontal, vertical) = 0
        if (kind is Kind.L and not fixed and case == "VVVV" and (si, sj) == (1, 2)):
            # printed: g(F,U)[S(U,V)]
            s_val = _model_ricci(p, case, v, 0, 1, fixed, with_N, cor_sign)
        else:
            s_val = _model_ricci(p, case, v, si, sj, fixed, with_N, cor_sign)
        total += sign * p.g(v[gi], v[gj]) * s_val
    return -c * total


def _metric_part(p, case, v):
    total = 0.0
    for sign, (ai, aj), (bi, bj) in _METRIC_TERM:
        if case[ai] != case[aj] or case[bi] != case[bj]:
            continue
        total += sign * p.g(v[ai], v[aj]) * p.g(v[bi], v[bj])
    return total


def _scalar_model(kind, p, fixed, with_N):
    if not with_N:
        return p.scalar_rhs(with_N=False)
    if kind is Kind.C and not fixed:
        return p.scalar_rhs(with_N=False)
    return p.scalar_rhs(with_N=True)


def _oneill_part(kind, case, p, v, fixed):
    if case == "HHHH":
        return on_hhhh(p, *v)
    if case == "HHHV":
        return on_hhhv(p, *v)
    if case == "HHVV":
        return on_hhvv(p, *v, sym=-1.0, overall=-1.0 if fixed else 1.0)
    if case == "HVHV":
        if fixed:
            return on_hvhv(p, *v, signs=HVHV_FIXED)
        return on_hvhv(p, *v, signs=(1, 1, -1, 1), typo=kind is not Kind.P)
    if case == "VVVH":
        return on_vvvh(p, *v)
    return on_vvvv(p, *v)


def generalized_rhs(kind, case, p, v, fixed, corollary=False):
    """Right-hand side of the ``kind`` relation for ``case``.

    ``corollary`` selects the form with every N-term removed.
    """
    n = p.n
    with_N = not corollary
    cor_sign = 1.0 if (corollary and not fixed) else -1.0
    out = _oneill_part(kind, case, p, v, fixed)
    if kind is Kind.C:
        r = _scalar_model(kind, p, fixed, with_N)
        return out - r / (n * (n - 1)) * _metric_part(p, case, v)
    if not (kind is Kind.P and case == "HVHV" and not fixed):
        out += _ricci_part(kind, case, p, v, fixed, with_N, cor_sign)
    if kind is Kind.V and not (case == "HVHV" and not fixed):
        r = _scalar_model(kind, p, fixed, with_N)
        out += r / ((n - 1) * (n - 2)) * _metric_part(p, case, v)
    return out


def _generalized_corrections(kind, case):
    fixes, notes = [], []
    if case == "HHHV" and kind in (Kind.C, Kind.L, Kind.V):
        notes.append(TOKEN_AXT)
    if case == "HHHV" and kind in (Kind.L, Kind.V, Kind.W):
        fixes.append(SWAPPED)
    if case == "HHVV":
        fixes.append(HHVV_OVERALL)
    if case == "HVHV":
        fixes.append(HVHV_ALL)
        if kind is not Kind.P:
            fixes.append(TYPO_AXY)
        if kind is Kind.P:
            fixes.append(P_MISSING)
        if kind is Kind.V:
            fixes.append(V_MISSING)
    if kind is Kind.C and case in ("HHHH", "HVHV", "VVVV"):
        fixes.append(R_FORMULA)
    if kind is Kind.L and case == "VVVV":
        fixes.append(TYPO_SUV)
    return tuple(fixes), tuple(notes)


def _generalized_lhs(kind):
    def lhs(p, v):
        return generalized_tensor(kind, p.curv, *v).value
    return lhs


def generalized_relation(kind, case):
    if case not in CASES:
        raise UnsupportedCase(f"{kind.value} has no relation for case {case!r}")
    fixes, notes = _generalized_corrections(kind, case)
    return Relation(
        IdentityId("generalized", kind.value, case), case, _generalized_lhs(kind),
        lambda p, v, fixed: generalized_rhs(kind, case, p, v, fixed),
        corrections=fixes, notes=notes, kind=kind)


COROLLARY_CASES = {
    Kind.P: ("HHHH", "VVVV"),
    Kind.C: CASES,
    Kind.L: ("HHHH", "HHHV", "HVHV", "VVVH", "VVVV"),
    Kind.V: ("HHHH", "HHHV", "HVHV", "VVVH", "VVVV"),
    Kind.W: ("HHHH", "HHHV", "HVHV", "VVVH", "VVVV"),
}


def corollary_relation(kind, case):
    if case not in COROLLARY_CASES[kind]:
        raise UnsupportedCase(f"no N = 0 form of the {kind.value} relation for {case}")
    fixes, notes = _generalized_corrections(kind, case)
    if case == "VVVH":
        fixes = fixes + (COR_SIGN,)
    return Relation(
        IdentityId("corollary", kind.value, case), case, _generalized_lhs(kind),
        lambda p, v, fixed: generalized_rhs(kind, case, p, v, fixed, corollary=True),
        corrections=fixes, notes=notes, kind=kind,
        informational=kind is Kind.C)


ONEILL = _oneill_relations()
RICCI = _ricci_relations()
GENERALIZED = [generalized_relation(k, c) for k in Kind for c in CASES]
COROLLARIES = [corollary_relation(k, c) for k in Kind for c in COROLLARY_CASES[k]]


# ---------------------------------------------------------------------------
# evaluators


def _coords(p):
    return tuple(float(c) for c in p.x)


def evaluate(rel, probe, rng, tol=DEFAULT_TOL, seed=0):
    """Residual record of ``rel`` at ``probe`` with vectors drawn from ``rng``."""
    if rel.kind is not None:
        check_dimension(rel.kind, probe.n)
    return evaluate_at(rel, probe, probe.draw(rng, rel.pattern), tol, seed)


def evaluate_at(rel, probe, v, tol=DEFAULT_TOL, seed=0):
    lhs = float(rel.lhs(probe, v))
    rhs_p = float(rel.rhs(probe, v, False))
    a_p, r_p = residual(lhs, rhs_p)
    rhs_c = a_c = r_c = None
    if rel.corrections:
        rhs_c = float(rel.rhs(probe, v, True))
        a_c, r_c = residual(lhs, rhs_c)
    extras = {}
    if rel.kind is not None:
        # guard against drift between the definitions and the evaluator
        arr = generalized_array(rel.kind, probe.curv)
        extras["lhs_array"] = float(np.einsum("ijkl,i,j,k,l->", arr, *v))
    return IdentityResidual(rel.id, _coords(probe), seed, lhs, rhs_p, rhs_c,
                            a_p, r_p, a_c, r_c, judge(r_p, r_c, tol), extras)


def _probe(s, p, seed, probe):
    if probe is not None:
        return probe
    x = p.coords if hasattr(p, "coords") else np.asarray(p, dtype=float)
    return Probe(s, x, frame_seed=seed)


def eval_oneill(index, s, p, seed=0, tol=DEFAULT_TOL, probe=None):
    rel = ONEILL[int(index) - 1]
    return evaluate(rel, _probe(s, p, seed, probe), np.random.default_rng(seed), tol, seed)


def eval_ricci(index, s, p, seed=0, tol=DEFAULT_TOL, probe=None):
    rel = RICCI[("i", "ii", "iii").index(index)]
    return evaluate(rel, _probe(s, p, seed, probe), np.random.default_rng(seed), tol, seed)


def eval_scalar(s, p, seed=0, tol=DEFAULT_TOL, probe=None):
    """Scalar relation under both norm conventions.

    The printed variant uses the block convention; ``extras`` carries both
    right-hand sides and the list of conventions that satisfy the relation.
    """
    pr = _probe(s, p, seed, probe)
    lhs = pr.r
    rhs = {c: pr.scalar_rhs(c) for c in ("block", "full")}
    rels = {c: residual(lhs, v)[1] for c, v in rhs.items()}
    a, r = residual(lhs, rhs["block"])
    extras = {
        "rhs_block": rhs["block"], "rhs_full": rhs["full"],
        "rel_block": rels["block"], "rel_full": rels["full"],
        "matching_conventions": [c for c in ("block", "full") if rels[c] < tol],
        "normA2_block": pr.norms.normA2, "normA2_full": pr.norms.normA2_full,
        "normT2_block": pr.norms.normT2, "normT2_full": pr.norms.normT2_full,
        "normN2": pr.norms.normN2,
    }
    return IdentityResidual(SCALAR_ID, _coords(pr), seed, lhs, rhs["block"], None,
                            a, r, None, None, judge(r, None, tol), extras)


def eval_generalized(kind, case, s, p, seed=0, tol=DEFAULT_TOL, probe=None):
    if isinstance(kind, str):
        kind = Kind.parse(kind)
    rel = generalized_relation(kind, case)
    return evaluate(rel, _probe(s, p, seed, probe), np.random.default_rng(seed), tol, seed)


def umbilicity(probe):
    """Deviation of ``T_U V`` from ``g(U,V) N / k`` over the vertical frame."""
    k = len(probe.Us)
    mean = probe.N / k
    worst = 0.0
    for U in probe.Us:
        for V in probe.Us:
            d = probe.T(U, V) - probe.g(U, V) * mean
            worst = max(worst, np.sqrt(abs(probe.g(d, d))))
    return worst


@dataclass
class CorollaryReport:
    point: tuple
    normN: float
    totally_umbilical: float
    applicable: bool
    reason: str
    records: list


def eval_umbilical_corollaries(s, p, seed=0, tol=DEFAULT_TOL, probe=None,
                               umbilic_tol=UMBILIC_TOL, rng_for=None):
    """N = 0 forms of the generalized relations, compared to the full forms.

    Skipped with reason ``"N != 0"`` when ``|N|`` exceeds ``umbilic_tol``.
    Each record's ``extras`` holds the full-form right-hand sides and the
    difference between corollary and full forms.
    """
    pr = _probe(s, p, seed, probe)
    normN = float(np.sqrt(abs(pr.g(pr.N, pr.N))))
    umb = umbilicity(pr)
    if normN > umbilic_tol:
        return CorollaryReport(_coords(pr), normN, umb, False, "N != 0", [])
    records = []
    for i, rel in enumerate(COROLLARIES):
        rng = rng_for(i) if rng_for else np.random.default_rng([seed, i])
        try:
            check_dimension(rel.kind, pr.n)
        except SubcurvError as exc:
            records.append((rel, exc))
            continue
        v = pr.draw(rng, rel.pattern)
        rec = evaluate_at(rel, pr, v, tol, seed)
        full = generalized_relation(rel.kind, rel.id.case)
        fp = float(full.rhs(pr, v, False))
        rec.extras.update(full_printed=fp, delta_printed=abs(rec.rhs_printed - fp))
        if rec.rhs_corrected is not None:
            fc = float(full.rhs(pr, v, True))
            rec.extras.update(full_corrected=fc, delta_corrected=abs(rec.rhs_corrected - fc))
        records.append((rel, rec))
    return CorollaryReport(_coords(pr), normN, umb, True, "", records)
