import numpy as np
import pytest

from subcurv import (DomainError, RankError, SubmersionSpec, TangentVector, classify,
                     compatible_frame, differential, dual, mean_curvature_N, nabla_A, nabla_T,
                     norms, oneill_A, oneill_T, parse_submersion, split, validate_submersion)
from subcurv.gallery import NAMES, build_example, export_text
from subcurv.manifold import HORIZONTAL, MIXED, VERTICAL, ChartedManifold, eval_metric
from subcurv.submersion import LocalGeometry, projectors


def _flat(n, box=2.0):
    return ChartedManifold(n, lambda x: dual.asarray(np.eye(n).tolist()), ((-box, box),) * n)


@pytest.fixture(scope="module")
def product3():
    return SubmersionSpec(_flat(3), _flat(2), lambda x: dual.stack([x[0], x[1]]), "flat")


def _tv(s, x, v):
    return TangentVector(s.total.point(x), np.asarray(v, dtype=float))


def test_differential_product(product3):
    assert np.array_equal(differential(product3, [0.1, 0.2, 0.3]), [[1, 0, 0], [0, 1, 0]])


def test_differential_constant_map_rank_error(product3):
    s = SubmersionSpec(_flat(3), _flat(2), lambda x: dual.stack([0.0 * x[0], 0.0 * x[1]]), "const")
    with pytest.raises(RankError):
        differential(s, [0.1, 0.2, 0.3])


def test_differential_outside_domain(hopf):
    with pytest.raises(DomainError):
        differential(hopf, [1.0, 4.0, 1.0])


def test_hopf_kernel_is_fibre_direction(hopf, rng):
    for x in hopf.total.sample(rng, 5):
        J = differential(hopf, x)
        assert np.allclose(J @ np.array([1.0, 0, 0]), 0)


def test_split_cases(hopf, rng):
    x = hopf.sample(rng, 1)[0]
    g = eval_metric(hopf.total, x)
    v, h = split(hopf, _tv(hopf, x, [1.0, 0, 0]))
    assert np.allclose(v.components, [1, 0, 0]) and np.allclose(h.components, 0)
    Pv, Ph = projectors(g, differential(hopf, x))
    w = Ph @ rng.standard_normal(3)
    v, h = split(hopf, _tv(hopf, x, w))
    assert np.allclose(v.components, 0, atol=1e-14) and np.allclose(h.components, w)
    r = rng.standard_normal(3)
    v, h = split(hopf, _tv(hopf, x, r))
    assert abs(v.components @ g @ h.components) < 1e-12
    assert np.array_equal(v.components + h.components, r) or np.allclose(v.components + h.components, r, atol=1e-15)
    assert (v.kind, h.kind) == (VERTICAL, HORIZONTAL)
    assert classify(hopf, _tv(hopf, x, r)) == MIXED
    assert classify(hopf, v) == VERTICAL and classify(hopf, h) == HORIZONTAL


@pytest.mark.parametrize("name", NAMES)
def test_frames_orthonormal_and_compatible(name, rng):
    s = build_example(name).spec
    for x in s.sample(rng, 5):
        f = compatible_frame(s, x, seed=3)
        M = f.matrix()
        g = eval_metric(s.total, x)
        assert np.allclose(M.T @ g @ M, np.eye(s.total.dim), atol=1e-10)
        J = differential(s, x)
        for U in f.U:
            assert np.allclose(J @ U, 0, atol=1e-12)
        JX = J @ np.column_stack(f.X)
        gb = eval_metric(s.base, s.project(x))
        assert np.allclose(JX.T @ gb @ JX, np.eye(s.base.dim), atol=1e-10)


def test_frame_determinism(kk):
    x = kk.sample(np.random.default_rng(0), 1)[0]
    assert np.array_equal(compatible_frame(kk, x, 9).matrix(), compatible_frame(kk, x, 9).matrix())
    assert not np.allclose(compatible_frame(kk, x, 9).matrix(), compatible_frame(kk, x, 10).matrix())


@pytest.mark.parametrize("name", NAMES)
def test_s1_s2_adaptedness(name):
    checks = validate_submersion(build_example(name).spec, points=100, seed=5)
    assert all(c.passed for c in checks), checks


def test_product_tensors_vanish():
    s = build_example("product_s2_s1").spec
    rng = np.random.default_rng(2)
    for x in s.sample(rng, 5):
        E, F, G = rng.standard_normal((3, 3))
        assert np.abs(oneill_T(s, _tv(s, x, E), _tv(s, x, F)).components).max() < 1e-12
        assert np.abs(oneill_A(s, _tv(s, x, E), _tv(s, x, F)).components).max() < 1e-12
        assert np.abs(nabla_T(s, _tv(s, x, E), _tv(s, x, F), _tv(s, x, G)).components).max() < 1e-12
        assert np.abs(nabla_A(s, _tv(s, x, E), _tv(s, x, F), _tv(s, x, G)).components).max() < 1e-12


def test_hopf_fibres_totally_geodesic_and_A_unit(hopf, rng):
    for x in hopf.sample(rng, 50):
        f = compatible_frame(hopf, x, 0)
        p = hopf.total.point(x)
        U = TangentVector(p, f.U[0])
        assert np.abs(oneill_T(hopf, U, U).components).max() < 1e-9
        a = oneill_A(hopf, TangentVector(p, f.X[0]), TangentVector(p, f.X[1])).components
        assert np.sqrt(a @ eval_metric(hopf.total, x) @ a) == pytest.approx(1.0, abs=1e-10)


def test_warped_T_and_N(warped, rng):
    for x in warped.sample(rng, 10):
        U = np.array([0.0, np.exp(-x[0])])
        T = oneill_T(warped, _tv(warped, x, U), _tv(warped, x, U)).components
        assert np.allclose(T, [-1.0, 0.0], atol=1e-12)     # -(f'/f) ∂_t
        N = mean_curvature_N(warped, x).components
        assert np.allclose(N, [-1.0, 0.0], atol=1e-12)
        A = oneill_A(warped, _tv(warped, x, [1.0, 0.3]), _tv(warped, x, [0.2, 1.0])).components
        assert np.abs(A).max() < 1e-12
        assert norms(warped, x).normA2 == 0.0


def test_hopf_norm_conventions(hopf, rng):
    x = hopf.sample(rng, 1)[0]
    n = norms(hopf, x)
    assert n.normA2 == pytest.approx(2.0) and n.normA2_full == pytest.approx(4.0)
    assert n.normT2 == pytest.approx(0.0, abs=1e-20) and n.normN2 == pytest.approx(0.0, abs=1e-20)


def test_tensor_algebra(kk, rng):
    """Bilinearity, dependence on vE/hE only, A_X X = 0, skew-adjointness."""
    for x in kk.sample(rng, 3):
        geo = LocalGeometry(kk, x)
        g = geo.inner
        E, F, G = rng.standard_normal((3, 4))
        a, b = rng.standard_normal(2)
        for op in (geo.t, geo.a):
            assert np.allclose(op(a * E + b * G, F), a * op(E, F) + b * op(G, F), atol=1e-12)
            assert np.allclose(op(E, a * F + b * G), a * op(E, F) + b * op(E, G), atol=1e-12)
        assert np.allclose(geo.t(E, F), geo.t(geo.vertical(E), F), atol=1e-12)
        assert np.allclose(geo.a(E, F), geo.a(geo.horizontal(E), F), atol=1e-12)
        X, Y = geo.horizontal(E), geo.horizontal(F)
        U, V = geo.vertical(E), geo.vertical(G)
        assert np.abs(geo.a(X, X)).max() < 1e-12
        assert abs(g(geo.t(U, V), X) + g(geo.t(U, X), V)) < 1e-10
        assert abs(g(geo.a(X, Y), V) + g(geo.a(X, V), Y)) < 1e-10


def test_routes_agree_and_extension_independent(kk, rng):
    for x in kk.sample(rng, 2):
        geo = LocalGeometry(kk, x)
        E, F, G = rng.standard_normal((3, 4))
        M = rng.standard_normal((4, 4))
        tE, tF, tG = (_tv(kk, x, v) for v in (E, F, G))
        assert np.allclose(oneill_T(kk, tE, tF).components, geo.t(E, F), atol=1e-10)
        assert np.allclose(oneill_A(kk, tE, tF).components, geo.a(E, F), atol=1e-10)
        assert np.allclose(oneill_T(kk, tE, tF, extension=M).components, geo.t(E, F), atol=1e-8)
        assert np.allclose(oneill_A(kk, tE, tF, extension=M).components, geo.a(E, F), atol=1e-8)
        assert np.allclose(nabla_T(kk, tE, tF, tG).components, geo.dt(E, F, G), atol=1e-9)
        assert np.allclose(nabla_A(kk, tE, tF, tG).components, geo.da(E, F, G), atol=1e-9)


@pytest.mark.parametrize("name", ["hopf", "kaluza_klein_generic"])
def test_A_is_half_vertical_bracket_of_basic_fields(name, rng):
    s = build_example(name).spec
    b = s.base.dim
    base_dirs = [i for i in range(s.total.dim) if i not in s.fibre_index]

    def basic(i):
        e = np.zeros(s.total.dim)
        e[base_dirs[i]] = 1.0
        return lambda z: dual.matmul(projectors(s.total.metric(z), _jac(s, z))[1], e)

    for x in s.sample(rng, 5):
        Xf, Yf = basic(0), basic(b - 1 if b > 1 else 0)
        X, Y = np.asarray(Xf(x)), np.asarray(Yf(x))
        bracket = dual.jvp(Yf, x, X)[1] - dual.jvp(Xf, x, Y)[1]
        Pv, _ = projectors(eval_metric(s.total, x), differential(s, x))
        A = oneill_A(s, _tv(s, x, X), _tv(s, x, Y)).components
        assert np.allclose(A, 0.5 * Pv @ bracket, atol=1e-7)


def _jac(s, z):
    from subcurv.submersion import jacobian
    return jacobian(s.pi, z)


def test_N_frame_independence(kk, rng):
    for x in kk.sample(rng, 3):
        n1 = mean_curvature_N(kk, x, compatible_frame(kk, x, 1)).components
        n2 = mean_curvature_N(kk, x, compatible_frame(kk, x, 77)).components
        assert np.allclose(n1, n2, atol=1e-10)
        assert np.abs(n1).max() > 1e-3


def test_validate_reports_rank_drop():
    text = export_text("hopf").replace("pi = (theta, phi)", "pi = (theta, theta)")
    checks = {c.name: c for c in validate_submersion(parse_submersion(text, validate=False))}
    assert not checks["S1"].passed


def test_non_isometric_projection_fails_s2():
    text = export_text("warped_interval_s1").replace("g = [[1]]", "g = [[4]]")
    checks = {c.name: c for c in validate_submersion(parse_submersion(text))}
    assert checks["S1"].passed and not checks["S2"].passed
