import numpy as np
import pytest

from subcurv import dual
from subcurv.dual import Dual, derivative_tensors, jvp


def test_jvp_scalar_chain_rule():
    y, dy = jvp(lambda x: dual.sin(x[0] * x[1]), np.array([0.3, 2.0]), np.array([1.0, 0.0]))
    assert y == pytest.approx(np.sin(0.6))
    assert dy == pytest.approx(2.0 * np.cos(0.6))


def test_jvp_tuple_output():
    (a, b), (da, db) = jvp(lambda x: (x[0] ** 2, dual.exp(x[0])), np.array([1.5]), np.array([1.0]))
    assert (a, da) == pytest.approx((2.25, 3.0))
    assert (b, db) == pytest.approx((np.exp(1.5),) * 2)


def test_constant_function_has_zero_tangent():
    _, dy = jvp(lambda x: 4.0, np.array([1.0]), np.array([1.0]))
    assert np.all(np.asarray(dy) == 0)


def test_derivative_tensors_polynomial():
    # f = x^3 y + y^2
    f = lambda x: x[0] ** 3 * x[1] + x[1] ** 2
    x = np.array([1.2, -0.7])
    f0, d1, d2, d3 = derivative_tensors(f, x, 3)
    X, Y = x
    assert f0 == pytest.approx(X**3 * Y + Y**2)
    assert d1 == pytest.approx([3 * X**2 * Y, X**3 + 2 * Y])
    assert np.allclose(d2, [[6 * X * Y, 3 * X**2], [3 * X**2, 2.0]])
    assert d3[0, 0, 0] == pytest.approx(6 * Y)
    assert d3[0, 0, 1] == pytest.approx(6 * X)
    assert d3[1, 1, 1] == pytest.approx(0.0)


def test_nested_perturbations_do_not_confuse():
    # d/dx [x * d/dy (x*y)] = d/dx [x*x] = 2x  (perturbation confusion check)
    def inner(x):
        return jvp(lambda y: x * y, 1.0, 1.0)[1]

    _, d = jvp(lambda x: x * inner(x), 3.0, 1.0)
    assert d == pytest.approx(6.0)


@pytest.mark.parametrize("fn,ref,dref", [
    (dual.sin, np.sin, np.cos),
    (dual.cos, np.cos, lambda t: -np.sin(t)),
    (dual.tan, np.tan, lambda t: 1 / np.cos(t) ** 2),
    (dual.exp, np.exp, np.exp),
    (dual.log, np.log, lambda t: 1 / t),
    (dual.sqrt, np.sqrt, lambda t: 0.5 / np.sqrt(t)),
    (dual.sinh, np.sinh, np.cosh),
    (dual.cosh, np.cosh, np.sinh),
])
def test_elementary_derivatives(fn, ref, dref):
    t = 0.8
    y, dy = jvp(fn, t, 1.0)
    assert y == pytest.approx(ref(t))
    assert dy == pytest.approx(dref(t))


def test_array_matrix_inverse_derivative():
    A = lambda t: dual.asarray([[2.0 + t, 1.0], [0.5, 3.0 * t]])
    _, dinv = jvp(lambda t: dual.inv(A(t)), 1.0, 1.0)
    h = 1e-6
    fd = (np.linalg.inv(A(1 + h)) - np.linalg.inv(A(1 - h))) / (2 * h)
    assert np.allclose(dinv, fd, atol=1e-8)


def test_numpy_ufuncs_are_refused():
    d = Dual(1.0, 1.0, 0)
    with pytest.raises(TypeError):
        np.sin(d)
