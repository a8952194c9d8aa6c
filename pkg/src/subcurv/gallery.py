"""Built-in submersions in adapted coordinates, with known geometry.

Each entry is defined twice: natively (dual-aware Python callables) and as
definition-file text.  :func:`export_text` writes the text form; the
round-trip tests check both forms produce the same suite results.
"""

from dataclasses import dataclass, field

from . import dual
from .dual import cos, cosh, exp, sin
from .errors import UnknownExample
from .expr import constant_value, parse_expression
from .manifold import ChartedManifold
from .submersion import SubmersionSpec, parse_submersion

SPEC_NAMES = ("product_s2_s1", "hopf", "warped_interval_s1", "flat_torus_quotient")
EXTRA_NAMES = ("kaluza_klein_generic", "minimal_fibres")
NAMES = SPEC_NAMES + EXTRA_NAMES


@dataclass(frozen=True, eq=False)
class GalleryEntry:
    name: str
    spec: SubmersionSpec
    known: dict = field(default_factory=dict)
    notes: str = ""


def _matrix_text(rows, indent="  "):
    body = (",\n" + indent + "     ").join("[" + ", ".join(r) + "]" for r in rows)
    return f"{indent}g = [{body}]"


def _block(label, coords, domain, rows):
    dom = ", ".join(f"({lo}, {hi})" for lo, hi in domain)
    return "\n".join([
        f"{label} {{",
        f"  dim = {len(coords)}",
        f"  coords = ({', '.join(coords)})",
        f"  domain = ({dom})",
        _matrix_text(rows),
        "}",
    ])


def _document(name, comment, total, base, pi_exprs):
    return "\n".join([
        f"# {comment}",
        f"name = {name}",
        _block("total", *total),
        _block("base", *base),
        f"pi = ({', '.join(pi_exprs)})",
        "",
    ])


def _num_domain(domain_text):
    def value(s):
        return constant_value(parse_expression(s))
    return tuple((value(lo), value(hi)) for lo, hi in domain_text)


def _spec(name, text, total_metric, base_metric, projection, total, base):
    tm = ChartedManifold(len(total[0]), total_metric, _num_domain(total[1]), "total",
                         tuple(total[0]))
    bm = ChartedManifold(len(base[0]), base_metric, _num_domain(base[1]), "base",
                         tuple(base[0]))
    return SubmersionSpec(tm, bm, projection, name, text)


def _product_s2_s1():
    total = (["theta", "phi", "psi"], [("0", "pi"), ("0", "2*pi"), ("0", "2*pi")],
             [["1", "0", "0"], ["0", "sin(theta)^2", "0"], ["0", "0", "1"]])
    base = (["theta", "phi"], [("0", "pi"), ("0", "2*pi")],
            [["1", "0"], ["0", "sin(theta)^2"]])
    text = _document("product_s2_s1", "unit S^2 x unit S^1 projected onto the S^2 factor",
                     total, base, ["theta", "phi"])

    def gt(x):
        return dual.asarray([[1.0, 0.0, 0.0], [0.0, sin(x[0]) ** 2, 0.0], [0.0, 0.0, 1.0]])

    def gb(y):
        return dual.asarray([[1.0, 0.0], [0.0, sin(y[0]) ** 2]])

    spec = _spec("product_s2_s1", text, gt, gb, lambda x: dual.stack([x[0], x[1]]),
                 total, base)
    known = dict(scalar_total=2.0, scalar_base=2.0, scalar_fibre=0.0,
                 T_zero=True, A_zero=True, N_zero=True)
    return GalleryEntry("product_s2_s1", spec, known,
                        "Riemannian product; fibres totally geodesic, horizontal distribution integrable.")


def _hopf():
    # Euler angles on the unit 3-sphere: g = (dθ² + dφ² + dψ² + 2cosθ dψ dφ)/4
    total = (["psi", "theta", "phi"], [("0", "4*pi"), ("0", "pi"), ("0", "2*pi")],
             [["0.25", "0", "0.25*cos(theta)"], ["0", "0.25", "0"],
              ["0.25*cos(theta)", "0", "0.25"]])
    base = (["theta", "phi"], [("0", "pi"), ("0", "2*pi")],
            [["0.25", "0"], ["0", "0.25*sin(theta)^2"]])
    text = _document("hopf", "Hopf fibration S^3(1) -> S^2(1/2) in Euler angles",
                     total, base, ["theta", "phi"])

    def gt(x):
        c = 0.25 * cos(x[1])
        return dual.asarray([[0.25, 0.0, c], [0.0, 0.25, 0.0], [c, 0.0, 0.25]])

    def gb(y):
        return dual.asarray([[0.25, 0.0], [0.0, 0.25 * sin(y[0]) ** 2]])

    spec = _spec("hopf", text, gt, gb, lambda x: dual.stack([x[1], x[2]]), total, base)
    known = dict(scalar_total=6.0, scalar_base=8.0, scalar_fibre=0.0,
                 sectional_total=1.0, sectional_base=4.0, A_unit=1.0,
                 T_zero=True, A_zero=False, N_zero=True)
    return GalleryEntry("hopf", spec, known,
                        "Constant curvatures 1 (total) and 4 (base); |A_X Y| = 1 for orthonormal X, Y.")


def _warped():
    total = (["t", "theta"], [("-1", "1"), ("0", "2*pi")], [["1", "0"], ["0", "exp(2*t)"]])
    base = (["t"], [("-1", "1")], [["1"]])
    text = _document("warped_interval_s1", "warped product I x_f S^1 with f(t) = e^t",
                     total, base, ["t"])

    def gt(x):
        return dual.asarray([[1.0, 0.0], [0.0, exp(2 * x[0])]])

    def gb(y):
        return dual.asarray([[1.0]])

    spec = _spec("warped_interval_s1", text, gt, gb, lambda x: dual.stack([x[0]]), total, base)
    known = dict(scalar_total=-2.0, scalar_base=0.0, scalar_fibre=0.0, N_norm=1.0,
                 T_zero=False, A_zero=True, N_zero=False)
    return GalleryEntry("warped_interval_s1", spec, known,
                        "|f'|/f = 1, so |N| = 1 and the Gaussian curvature is -f''/f = -1.")


def _torus():
    total = (["x", "y"], [("0", "2*pi"), ("0", "2*pi")], [["1", "0"], ["0", "1"]])
    base = (["x"], [("0", "2*pi")], [["1"]])
    text = _document("flat_torus_quotient", "flat torus onto a circle", total, base, ["x"])
    spec = _spec("flat_torus_quotient", text, lambda x: dual.asarray([[1.0, 0.0], [0.0, 1.0]]),
                 lambda y: dual.asarray([[1.0]]), lambda x: dual.stack([x[0]]), total, base)
    known = dict(scalar_total=0.0, scalar_base=0.0, scalar_fibre=0.0,
                 T_zero=True, A_zero=True, N_zero=True)
    return GalleryEntry("flat_torus_quotient", spec, known, "Everything vanishes.")


# Generic Kaluza-Klein form g = g_B(u,v) + h(x)(dy + a du + b dv)² with all of
# T, A, N and the fibre curvature nonzero.  Any such metric makes
# (u, v, y, z) -> (u, v) a Riemannian submersion.
_KK_BASE = [["1 + 0.2*v^2", "0.1*u*v"], ["0.1*u*v", "cosh(u)^2"]]
_KK_FIBRE = [["exp(0.4*u + 0.3*y)", "0.2*sin(v + z)"],
             ["0.2*sin(v + z)", "1 + 0.25*u^2 + 0.3*y*z"]]
# _KK_CONN[alpha][a] is the coefficient of du^a in the connection form of fibre direction alpha
_KK_CONN = [["0.5*v + 0.3*z", "0.2*u*y"], ["0.4*sin(y)", "0.3*u - 0.2*z*v"]]


def _kk_native(x):
    u, v, y, z = x[0], x[1], x[2], x[3]
    gB = [[1 + 0.2 * v ** 2, 0.1 * u * v], [0.1 * u * v, cosh(u) ** 2]]
    h = [[exp(0.4 * u + 0.3 * y), 0.2 * sin(v + z)],
         [0.2 * sin(v + z), 1 + 0.25 * u ** 2 + 0.3 * y * z]]
    conn = [[0.5 * v + 0.3 * z, 0.2 * u * y], [0.4 * sin(y), 0.3 * u - 0.2 * z * v]]
    return gB, h, conn


def _kk_compose(gB, h, conn, add, mul):
    """Assemble the 4x4 metric from blocks; works on numbers and on strings."""
    g = [[None] * 4 for _ in range(4)]
    for a in range(2):
        for b in range(2):
            terms = [gB[a][b]]
            for al in range(2):
                for be in range(2):
                    terms.append(mul(mul(conn[al][a], h[al][be]), conn[be][b]))
            g[a][b] = add(terms)
        for be in range(2):
            g[a][2 + be] = g[2 + be][a] = add([mul(h[be][al], conn[al][a]) for al in range(2)])
    for al in range(2):
        for be in range(2):
            g[2 + al][2 + be] = h[al][be]
    return g


def _add_s(terms):
    return " + ".join(terms)


def _mul_s(p, q):
    return f"({p})*({q})"


def _add_n(terms):
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def _kk():
    rows = _kk_compose(_KK_BASE, _KK_FIBRE, _KK_CONN, _add_s, _mul_s)
    dom = [("-0.6", "0.6")] * 4
    total = (["u", "v", "y", "z"], dom, rows)
    base = (["u", "v"], dom[:2], _KK_BASE)
    text = _document("kaluza_klein_generic",
                     "generic Kaluza-Klein submersion: T, A, N and fibre curvature all nonzero",
                     total, base, ["u", "v"])

    def gt(x):
        gB, h, conn = _kk_native(x)
        return dual.asarray(_kk_compose(gB, h, conn, _add_n, lambda p, q: p * q))

    def gb(y):
        u, v = y[0], y[1]
        return dual.asarray([[1 + 0.2 * v ** 2, 0.1 * u * v], [0.1 * u * v, cosh(u) ** 2]])

    spec = _spec("kaluza_klein_generic", text, gt, gb, lambda x: dual.stack([x[0], x[1]]),
                 total, base)
    known = dict(T_zero=False, A_zero=False, N_zero=False)
    return GalleryEntry("kaluza_klein_generic", spec, known,
                        "No closed-form values; exercises every term of every relation.")


# Same construction with det h = 1 and h independent of the fibre coordinates:
# the fibres are minimal (N = 0) but not totally geodesic (T != 0).
_MF_BASE = [["1", "0"], ["0", "1 + 0.3*u^2"]]
_MF_FIBRE = [["exp(0.5*u + 0.3*sin(v))", "0"], ["0", "exp(-0.5*u - 0.3*sin(v))"]]
_MF_CONN = [["0.4*v", "0.2*u"], ["0.3*u*v", "-0.5*u"]]


def _mf_native(u, v):
    a = 0.5 * u + 0.3 * sin(v)
    gB = [[1.0, 0.0], [0.0, 1 + 0.3 * u ** 2]]
    h = [[exp(a), 0.0], [0.0, exp(-a)]]
    conn = [[0.4 * v, 0.2 * u], [0.3 * u * v, -0.5 * u]]
    return gB, h, conn


def _minimal_fibres():
    rows = _kk_compose(_MF_BASE, _MF_FIBRE, _MF_CONN, _add_s, _mul_s)
    dom = [("-0.6", "0.6")] * 4
    total = (["u", "v", "y", "z"], dom, rows)
    base = (["u", "v"], dom[:2], _MF_BASE)
    text = _document("minimal_fibres",
                     "submersion with minimal but not totally geodesic fibres: N = 0, T != 0",
                     total, base, ["u", "v"])

    def gt(x):
        gB, h, conn = _mf_native(x[0], x[1])
        return dual.asarray(_kk_compose(gB, h, conn, _add_n, lambda p, q: p * q))

    def gb(y):
        return dual.asarray(_mf_native(y[0], y[1])[0])

    spec = _spec("minimal_fibres", text, gt, gb, lambda x: dual.stack([x[0], x[1]]),
                 total, base)
    known = dict(T_zero=False, A_zero=False, N_zero=True)
    return GalleryEntry("minimal_fibres", spec, known,
                        "Unit-determinant fibre metric; exercises the N = 0 forms with T != 0.")


_BUILDERS = {
    "product_s2_s1": _product_s2_s1,
    "hopf": _hopf,
    "warped_interval_s1": _warped,
    "flat_torus_quotient": _torus,
    "kaluza_klein_generic": _kk,
    "minimal_fibres": _minimal_fibres,
}
_CACHE = {}


def build_example(name):
    """Return the validated gallery entry ``name``."""
    if name not in _BUILDERS:
        raise UnknownExample(f"unknown example {name!r}; known: {', '.join(NAMES)}")
    if name not in _CACHE:
        entry = _BUILDERS[name]()
        entry.spec.fibre_index  # adaptedness contract
        _CACHE[name] = entry
    return _CACHE[name]


def export_text(name):
    return build_example(name).spec.source


def reparse(name):
    """The gallery entry rebuilt from its exported definition text."""
    return parse_submersion(export_text(name))


def _measure(probe, rng):
    """Engine values of every quantity a ``known`` record may name."""
    import numpy as np

    g = probe.g
    out = {
        "scalar_total": probe.r,
        "scalar_base": probe.rG,
        "scalar_fibre": probe.rhat,
        "N_norm": float(np.sqrt(abs(g(probe.N, probe.N)))),
    }
    legs = probe.Xs + probe.Us
    out["T_max"] = max(np.sqrt(abs(g(t, t))) for t in (probe.T(e, f) for e in legs for f in legs))
    out["A_max"] = max(np.sqrt(abs(g(a, a))) for a in (probe.A(e, f) for e in legs for f in legs))
    X, Y = rng.standard_normal((2, probe.n))
    area = g(X, X) * g(Y, Y) - g(X, Y) ** 2
    out["sectional_total"] = probe.R(X, Y, Y, X) / area
    if len(probe.Xs) >= 2:
        H1, H2 = probe.draw(rng, "HH")
        area = g(H1, H1) * g(H2, H2) - g(H1, H2) ** 2
        out["sectional_base"] = probe.RG(H1, H2, H2, H1) / area
        a = probe.A(probe.Xs[0], probe.Xs[1])
        out["A_unit"] = float(np.sqrt(abs(g(a, a))))
    return out


def self_test(name, points=20, seed=0):
    """Largest deviation of each ``known`` field from the engine's value."""
    import numpy as np

    from .probe import Probe

    entry = build_example(name)
    rng = np.random.default_rng(seed)
    worst = {}
    for k, x in enumerate(entry.spec.sample(rng, points)):
        m = _measure(Probe(entry.spec, x, frame_seed=k), rng)
        for key, want in entry.known.items():
            if key.endswith("_zero"):
                got = m[key[0] + "_max"] if key[0] in "TA" else m["N_norm"]
                dev = got if want else float(got < 1e-8)
            else:
                dev = abs(m[key] - want)
            worst[key] = max(worst.get(key, 0.0), float(dev))
    return worst
