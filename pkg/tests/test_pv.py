import math

import numpy as np
import pytest

from invgauss import kernels as K
from invgauss import spectral as S
from invgauss.hermite import EnvelopedFunction, analyze, hermite_tilde
from invgauss.pv import kernel_spec, maximal_apply, pv_apply, richardson, shell_values, split_apply

from .conftest import expansion, random_expansion, tilde_function


def Ht(k, x):
    return float(hermite_tilde(k, np.atleast_1d(x)))


def spectral_value(f, kind, param, x, K_deg=None):
    e = analyze(f, K_deg or f.degree)
    return complex(S.apply_operator(e, kind, param)(np.atleast_1d(np.asarray(x, float))))


H0 = tilde_function(1, {(0,): 1})
H1 = tilde_function(1, {(1,): 1})
H3 = tilde_function(1, {(3,): 1})


def test_riesz_first_order_on_ground_state():
    r = pv_apply(kernel_spec("riesz", 1, (1,)), H0, [0.5])
    assert r.value == pytest.approx(-0.778800783, abs=1e-9)
    assert r.converged and r.extrapolation_error >= 0
    assert len(r.epsilon_sequence) == 13 and all(a > b for a, b in zip(r.epsilon_sequence, r.epsilon_sequence[1:]))


def test_even_order_is_absolutely_convergent():
    r = pv_apply(kernel_spec("riesz", 1, (2,)), H0, [0.0])
    assert r.epsilon_sequence == []
    assert r.value == pytest.approx(-2.0, abs=1e-9)
    # the integral part vanishes by symmetry, the constant carries everything
    assert abs(r.value - r.constant * 1.0) < 1e-9


def test_riesz_bar_on_third_function():
    r = pv_apply(kernel_spec("riesz_bar", 1, (1,)), H3, [0.5])
    assert r.value == pytest.approx(-math.sqrt(3) * Ht((2,), 0.5), abs=1e-9)


def test_imaginary_on_ground_state():
    r = pv_apply(kernel_spec("imaginary", 1, 1.0), H0, [0.3])
    assert r.value == pytest.approx(math.exp(-0.09), abs=1e-9)


def test_imaginary_on_first_function():
    r = pv_apply(kernel_spec("imaginary", 1, 1.0), H1, [0.3])
    assert r.value == pytest.approx(2 ** 1j * Ht((1,), 0.3), abs=1e-9)
    assert abs(r.value) == pytest.approx(abs(Ht((1,), 0.3)), abs=1e-9)


def test_uncorrected_shells_do_not_settle():
    r = pv_apply(kernel_spec("imaginary", 1, 1.0), H1, [0.3])
    fx = Ht((1,), 0.3)
    shells = np.array(r.shell_values)
    tail = shells[len(shells) // 2:]
    # the shell part tracks -alpha(eps) f(x), which turns at constant modulus
    assert np.ptp(tail.real) > 0.5 * abs(K.alpha_eps(1.0, 1, 1.0)) * abs(fx)
    corrected = np.array(r.corrected_values)
    assert abs(corrected[-1] - r.value) < 1e-4


@pytest.mark.parametrize("alpha,f,x", [((2,), H0, 0.3), ((2,), H1, -0.7), ((4,), tilde_function(1, {(2,): 1}), 0.4)])
def test_constant_by_oracle_difference(alpha, f, x):
    spec = kernel_spec("riesz", 1, alpha)
    r = pv_apply(spec, f, [x], tol=1e-11)
    fx = complex(f([[x]])[0])
    integral = r.value - r.constant * fx
    oracle = (spectral_value(f, "riesz", alpha, x) - integral) / fx
    assert oracle.real == pytest.approx(K.riesz_constant(alpha), abs=1e-8)


def test_bar_constant_by_oracle_difference():
    f = tilde_function(1, {(2,): 1, (3,): 0.5})
    for alpha in [(2,), (4,)]:
        for x in (0.2, -0.9):
            r = pv_apply(kernel_spec("riesz_bar", 1, alpha), f, [x], tol=1e-11)
            fx = complex(f([[x]])[0])
            oracle = (spectral_value(f, "riesz_bar", alpha, x) - (r.value - r.constant * fx)) / fx
            assert oracle.real == pytest.approx((-0.5) ** sum(alpha) * K.riesz_constant(alpha), abs=1e-8)


def test_odd_kernel_shells_vanish_for_even_functions():
    spec = kernel_spec("riesz", 1, (1,))
    for f in (H0, tilde_function(1, {(2,): 1})):
        vals = shell_values(spec, f, [0.0], [0.5, 0.1, 0.01])
        assert max(abs(v) for v in vals) < 1e-10


def test_ladder_stability():
    spec = kernel_spec("riesz", 1, (3,))
    f = tilde_function(1, {(1,): 1, (2,): -0.5})
    a = pv_apply(spec, f, [0.6], depth=12)
    b = pv_apply(spec, f, [0.6], depth=11)
    assert abs(a.value - b.value) <= max(a.extrapolation_error, 1e-12)


def test_richardson_detects_order():
    eps = [2.0 ** -j for j in range(8)]
    vals = [3.0 + 0.7 * e ** 2 for e in eps]
    lim, err = richardson(eps, vals)
    assert abs(lim - 3.0) < 1e-12 and err < 1e-10


def test_maximal_operator():
    spec = kernel_spec("riesz", 1, (1,))
    grid = [10.0 ** -j for j in range(4)]
    m = maximal_apply(spec, H0, [0.5], grid)
    shells = shell_values(spec, H0, [0.5], grid)
    assert m >= abs(shells[-1])
    finer = maximal_apply(spec, H0, [0.5], grid + [0.3, 0.03])
    assert finer >= m
    v = pv_apply(spec, H0, [0.5]).value
    assert m <= 10 * abs(v)
    with pytest.raises(ValueError):
        maximal_apply(spec, H0, [0.5], [])


def test_split_additivity():
    spec = kernel_spec("riesz", 1, (1,))
    local, glob = split_apply(spec, H0, [0.5])
    assert local + glob == pytest.approx(pv_apply(spec, H0, [0.5]).value, abs=1e-10)
    spec = kernel_spec("imaginary", 1, 1.0)
    local, glob = split_apply(spec, H1, [0.3])
    assert local + glob == pytest.approx(pv_apply(spec, H1, [0.3]).value, abs=1e-10)


def test_split_far_point_has_no_local_part():
    narrow = EnvelopedFunction(1, [((0,), 1.0)])
    local, glob = split_apply(kernel_spec("neg_power", 1, 1.0), narrow, [5.0])
    assert abs(local) < 1e-9 * max(abs(glob), 1e-300) or abs(local) < 1e-12


def test_split_global_part_of_negative_power_bounded_by_envelope():
    # |M_1(0, y)| <= C exp(-|y|^2)-type envelope away from N; here simply compare with |f|
    local, glob = split_apply(kernel_spec("neg_power", 1, 1.0), H0, [0.0])
    from scipy.integrate import quad

    env = quad(lambda y: math.exp(-y * y), 1.0, np.inf)[0] * 2
    assert abs(glob) <= env


@pytest.mark.parametrize("n,alpha", [(1, (1,)), (1, (3,)), (2, (1, 0)), (2, (1, 1))])
def test_random_expansions_match_spectral(rng, n, alpha):
    e = random_expansion(rng, n, 3)
    f = e.to_enveloped()
    out = S.riesz_apply(e, alpha)
    for x in rng.uniform(-1.5, 1.5, size=(3, n)):
        r = pv_apply(kernel_spec("riesz", n, alpha), f, x)
        assert r.value == pytest.approx(complex(out(x)), abs=1e-6)


def test_sampled_payload_against_spectral():
    f = EnvelopedFunction(1, sampler=lambda y: np.cos(y[..., 0]), bound=(0, 1.0))
    x = 0.4
    r = pv_apply(kernel_spec("riesz", 1, (1,)), f, [x])
    assert r.value == pytest.approx(spectral_value(f, "riesz", (1,), x, K_deg=40), abs=1e-8)


def test_point_dimension_checked():
    with pytest.raises(ValueError):
        pv_apply(kernel_spec("riesz", 2, (1, 0)), H0, [0.1])
