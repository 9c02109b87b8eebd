import math

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from invgauss.hermite import hermite_tilde
from invgauss.semigroup import (
    classical_heat,
    classical_heat_dt,
    delta_dx_tbar,
    heat_apply,
    mehler_bar,
    mehler_dt,
    mehler_dx,
    mehler_kernel,
)

from .conftest import tilde_function


def T(t, x, y):
    return float(mehler_kernel(t, np.array([x]), np.array([y])))


def T_ref(t, x, y):
    # direct high-precision evaluation of the Mehler display, n = 1
    mpmath.mp.dps = 40
    t, x, y = mpmath.mpf(t), mpmath.mpf(x), mpmath.mpf(y)
    s = 1 - mpmath.e ** (-2 * t)
    return mpmath.e ** (-t) / mpmath.sqrt(mpmath.pi * s) * mpmath.e ** (-(x - mpmath.e ** (-t) * y) ** 2 / s)


def test_kernel_at_origin():
    assert T(1.0, 0.0, 0.0) == pytest.approx(0.2232064, abs=5e-8)
    assert T(1.0, 0.0, 0.0) == pytest.approx(float(T_ref(1, 0, 0)), rel=1e-14)


def test_large_time_limit():
    # e^{-50} pi^{-1/2} e^{-1}: the factor (1 - e^{-100})^{-1/2} is 1 in double precision
    v = T(50.0, 1.0, 0.0)
    assert v == pytest.approx(math.exp(-51) / math.sqrt(math.pi), rel=1e-13)
    assert v == pytest.approx(4.0032e-23, rel=1e-4)


@pytest.mark.parametrize("t,x,y", [(1e-9, 0.3, 0.3 + 1e-5), (1e-3, -1.0, -0.98), (0.3, 1.0, 2.0), (4.0, 2.0, -1.5)])
def test_kernel_against_mpmath(t, x, y):
    assert T(t, x, y) == pytest.approx(float(T_ref(t, x, y)), rel=1e-11)


def test_self_adjoint():
    rng = np.random.default_rng(1)
    for n in (1, 2):
        x, y = rng.normal(size=(2, 20, n))
        t = rng.uniform(0.05, 2, size=20)
        a = np.exp(np.sum(x * x, -1)) * mehler_kernel(t, x, y)
        b = np.exp(np.sum(y * y, -1)) * mehler_kernel(t, y, x)
        assert np.allclose(a, b, rtol=1e-12, atol=0)
    assert math.exp(1) * T(0.3, 1, 2) == pytest.approx(math.exp(4) * T(0.3, 2, 1), rel=1e-12)


def test_kernel_rejects_nonpositive_time():
    with pytest.raises(ValueError):
        mehler_kernel(0.0, np.zeros(1), np.ones(1))


@pytest.mark.parametrize("t,s", [(0.2, 0.2), (0.2, 0.7), (0.7, 0.7)])
def test_chapman_kolmogorov(t, s):
    for x, y in [(0.0, 0.5), (1.0, -0.3), (-0.8, 1.2)]:
        v, _ = quad(lambda z: T(t, x, z) * T(s, z, y), -np.inf, np.inf, epsabs=0, epsrel=1e-12, limit=200)
        assert v == pytest.approx(T(t + s, x, y), rel=1e-8)


@pytest.mark.parametrize("k", [(0,), (1,), (3,), (6,)])
def test_eigenfunction_by_independent_quadrature(k):
    t, x = 0.5, 0.4
    v, _ = quad(lambda y: T(t, x, y) * float(hermite_tilde(k, [y])), -np.inf, np.inf, epsabs=0, epsrel=1e-12,
                limit=200)
    assert v == pytest.approx(math.exp(-(k[0] + 1) * t) * float(hermite_tilde(k, [x])), rel=1e-8)


def test_heat_apply_zero_time_is_identity():
    f = tilde_function(1, {(2,): 1.0})
    assert heat_apply(f, 0.0, [0.7]) == f([[0.7]])[0]


# ---- derivatives


def test_dx_zero_is_kernel():
    x, y, t = np.array([[0.3, -1]]), np.array([[1.0, 0.2]]), np.array([0.4])
    assert mehler_dx((0, 0), t, x, y) == pytest.approx(mehler_kernel(t, x, y), rel=1e-15)


def test_dx_first_order_finite_difference():
    h = 1e-5
    fd = (T(0.5, 0.3 + h, -0.2) - T(0.5, 0.3 - h, -0.2)) / (2 * h)
    assert float(mehler_dx((1,), 0.5, np.array([0.3]), np.array([-0.2]))) == pytest.approx(fd, rel=1e-6)


def test_dx_second_order_at_origin():
    v = float(mehler_dx((2,), 0.5, np.zeros(1), np.zeros(1)))
    assert v == pytest.approx(-2 * math.exp(-0.5) / math.sqrt(math.pi) * (1 - math.exp(-1)) ** -1.5, rel=1e-14)


def test_dt_at_origin():
    v = float(mehler_dt(1.0, np.zeros(1), np.zeros(1)))
    assert v == pytest.approx(-T(1.0, 0, 0) / (1 - math.exp(-2)), rel=1e-14)


def test_dt_finite_difference():
    h = 1e-4
    fd = (T(0.7 + h, 1, 0.5) - T(0.7 - h, 1, 0.5)) / (2 * h)
    assert float(mehler_dt(0.7, np.ones(1), np.array([0.5]))) == pytest.approx(fd, rel=1e-6)


def test_dt_eigen_decay():
    t, x = 0.6, 0.4
    v, _ = quad(lambda y: float(mehler_dt(t, np.array([x]), np.array([y]))) * math.exp(-y * y), -np.inf, np.inf,
                epsabs=0, epsrel=1e-12)
    assert v == pytest.approx(-math.exp(-t) * math.exp(-x * x), rel=1e-8)


def test_tbar_is_scaled_kernel():
    x, y = np.array([0.2, -0.4]), np.array([1.1, 0.3])
    assert mehler_bar(0.8, x, y) == pytest.approx(math.exp(2 * 0.8) * mehler_kernel(0.8, x, y), rel=1e-13)
    assert delta_dx_tbar((0, 0), 0.8, x, y) == pytest.approx(mehler_bar(0.8, x, y), rel=1e-13)


def test_delta_operator_consistency():
    t, y, h = 0.6, 0.9, 1e-5
    for x in (-0.7, 0.2, 1.3):
        g = lambda u: math.exp(u * u) * float(mehler_bar(t, np.array([u]), np.array([y])))
        fd = -0.5 * math.exp(-x * x) * (g(x + h) - g(x - h)) / (2 * h)
        assert float(delta_dx_tbar((1,), t, np.array([x]), np.array([y]))) == pytest.approx(fd, rel=1e-6)


def test_tbar_eigenrelation():
    t, x = 0.5, 0.3
    v, _ = quad(lambda y: float(mehler_bar(t, np.array([x]), np.array([y]))) * float(hermite_tilde((1,), [y])),
                -np.inf, np.inf, epsabs=0, epsrel=1e-12)
    assert v == pytest.approx(math.exp(-t) * float(hermite_tilde((1,), [x])), rel=1e-8)


# ---- classical heat kernel


def test_classical_normalisation():
    assert float(classical_heat((0,), 1 / (2 * math.pi), np.zeros(1))) == pytest.approx(1.0, rel=1e-15)


def test_classical_odd_derivative_at_origin():
    assert float(classical_heat((1,), 0.3, np.zeros(1))) == 0.0


def test_classical_second_derivative_fd():
    W = lambda z: float(classical_heat((0,), 0.4, np.array([z])))
    h = 1e-4
    fd = (W(0.7 + h) - 2 * W(0.7) + W(0.7 - h)) / h ** 2
    assert float(classical_heat((2,), 0.4, np.array([0.7]))) == pytest.approx(fd, rel=1e-6)


def test_classical_dt_fd():
    z = np.array([0.5, -0.2])
    h = 1e-5
    fd = (classical_heat((0, 0), 0.3 + h, z) - classical_heat((0, 0), 0.3 - h, z)) / (2 * h)
    assert classical_heat_dt(0.3, z) == pytest.approx(fd, rel=1e-7)
