import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invgauss.certify import (
    DISCLAIMER,
    ESTIMATES,
    certify,
    fine_count,
    gaussian_envelope,
    global_grid,
    local_grid,
    polynomial_envelope,
)
from invgauss.regions import (
    angle,
    comparability,
    global_bound_params,
    in_local,
    local_radius,
    m_scale,
    rescaling_holds,
)


def test_m_examples():
    assert m_scale([0.0]) == 1.0
    assert m_scale([2.0, 0.0]) == 0.25
    assert m_scale([0.5]) == 1.0


def test_region_examples():
    assert in_local([2.0], [2.4])
    assert not in_local([3.0], [4.0])
    assert in_local([0.0, 0.0], [1.2, 1.5])  # |y| <= beta n = 2
    assert not in_local([0.0, 0.0], [1.5, 1.5])


def test_region_boundary_is_included():
    x = np.array([2.0])
    assert in_local(x, x + local_radius(x))


def test_angle_examples():
    assert angle([1.0, 0.0], [0.0, 1.0]) == pytest.approx(math.pi / 2)
    assert angle([0.7], [-3.0]) == 0
    assert angle([2.0, 4.0], [1.0, 2.0]) == pytest.approx(0.0, abs=1e-7)
    assert angle([1.0, 0.0], [-1.0, 0.0]) == pytest.approx(math.pi)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=1, max_size=3))
def test_comparability_interval(x):
    v = comparability(np.array(x))
    assert 1.0 <= v <= 2.0


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 3), st.floats(0.01, 0.99), st.floats(0.1, 3.0), st.integers(0, 2 ** 32 - 1))
def test_rescaling_property(n, a, beta, seed):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(scale=3.0, size=(2, n))
    assert rescaling_holds(x, y, a, beta)


def test_global_params_invariants():
    rng = np.random.default_rng(3)
    for _ in range(500):
        n = int(rng.integers(1, 4))
        x, y = rng.normal(scale=2.0, size=(2, n))
        p = global_bound_params(x, y)
        assert p["a"] >= abs(p["b"])
        assert 0 < p["s0"] <= 2
        if x @ y > 0 and y @ y >= x @ x:
            assert p["u0"] >= 0
        assert 0 <= p["theta"] <= math.pi


def test_fine_grid_has_ten_times_the_points():
    for dims in (1, 2, 4):
        m1 = fine_count(15, dims)
        assert m1 ** dims >= 10 * 15 ** dims
        assert (m1 - 1) ** dims < 10 * 15 ** dims


def test_local_grid_stays_in_region():
    X, Y = local_grid(2, 6, 1.0, 3.5, 1e-3)
    d = np.linalg.norm(X - Y, axis=-1)
    assert np.all(d >= 1e-3 * (1 - 1e-12))
    assert np.all(d <= local_radius(X) * (1 + 1e-12))


def test_global_grid_stays_outside():
    X, Y = global_grid(1, 8, 1.0, 3.5)
    polar = np.any(Y != 0, axis=-1)  # the y = 0 slice is filtered by region at evaluation time
    d = np.linalg.norm(X - Y, axis=-1)[polar]
    assert np.all(d >= local_radius(X[polar]) * (1 - 1e-12))


def test_envelopes_positive():
    rng = np.random.default_rng(0)
    X, Y = rng.normal(size=(2, 100, 2))
    assert np.all(gaussian_envelope(X, Y, 0.75) > 0)
    assert np.all(polynomial_envelope(X, Y, 0.5) > 0)


@pytest.mark.parametrize("estimate", ESTIMATES)
def test_every_estimate_passes_in_one_dimension(estimate):
    cert = certify(estimate, 1)
    assert cert.verdict == "pass"
    assert cert.worst_ratio <= cert.calibrated_C
    assert math.isfinite(cert.calibrated_C) and cert.calibrated_C > 0


def test_acotdif_with_explicit_index():
    cert = certify("acotdif", 1, alpha=[1])
    assert cert.verdict == "pass" and cert.params["alpha"] == [1]
    assert cert.grid["rho_min"] == 1e-3


def test_negative_power_bound_in_two_dimensions():
    cert = certify("Mbeta", 2, power=1.0)
    assert cert.verdict == "pass"


def test_certificate_json_shape():
    cert = certify("2.4", 1)
    data = json.loads(cert.to_json())
    for key in ("estimate", "params", "calibrated_C", "worst_ratio", "grid", "verdict", "disclaimer"):
        assert key in data
    assert data["disclaimer"] == DISCLAIMER == "numerical evidence only"
    assert data["params"]["c"] == 0.5 and data["params"]["eta"] == 0.75
    assert data["grid"]["verification_points"] >= 10 * data["grid"]["coarse_points"] * 0.5


def test_certificate_is_reproducible():
    a = certify("acotRalpha", 1, seed=7).to_json()
    b = certify("acotRalpha", 1, seed=7).to_json()
    assert a == b


def test_unknown_estimate():
    with pytest.raises(KeyError):
        certify("bogus-id", 1)


@pytest.mark.parametrize("kw", [{"eta": 1.2}, {"alpha": [0]}, {"alpha": [1, 0]}, {"coarse": 1}])
def test_bad_parameters(kw):
    with pytest.raises(ValueError):
        certify("acotdif", 1, **kw)
