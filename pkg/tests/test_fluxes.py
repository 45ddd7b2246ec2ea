import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viscwave import (
    BracketError,
    ConvexFlux,
    DegenerateError,
    DomainError,
    ViscosityModel,
)


# --- convective flux --------------------------------------------------------

def test_burgers_values():
    f = ConvexFlux.burgers()
    assert f.value(1.0) == 0.5
    assert f.value(0.0) == 0.0
    assert f.value(-2.0) == 2.0


def test_burgers_prime_identity():
    f = ConvexFlux.burgers()
    assert f.prime(0.5) == 0.5
    assert f.prime(0.0) == 0.0


def test_prime_matches_second_by_finite_differences():
    # centered difference of f' is an independent O(h^2) oracle for f''
    f = ConvexFlux.quartic()
    u = 0.7
    for h in (1e-4, 5e-5):
        fd = (f.prime(u + h) - f.prime(u - h)) / (2 * h)
        assert abs(fd - f.second(u)) < 10 * h**2


def test_prime_second_richardson_order():
    f = ConvexFlux.quartic()
    u = -0.3
    errs = []
    for h in (1e-3, 5e-4):
        fd = (f.prime(u + h) - f.prime(u - h)) / (2 * h)
        errs.append(abs(fd - f.second(u)))
    # O(h^2): halving h divides the error by ~4
    assert errs[0] / errs[1] > 3.0


def test_prime_inverse_burgers_exact():
    f = ConvexFlux.burgers()
    assert f.prime_inverse(0.3, -1.0, 1.0) == 0.3
    assert f.prime_inverse(0.0, -1.0, 1.0) == 0.0


def test_prime_inverse_quartic_round_trip():
    f = ConvexFlux.quartic()
    xi = f.prime(0.7)
    u = f.prime_inverse(xi, -1.0, 1.0)
    assert abs(u - 0.7) < 1e-11


def test_prime_inverse_bracket_error():
    f = ConvexFlux.burgers()
    with pytest.raises(BracketError):
        f.prime_inverse(2.0, -1.0, 1.0)


def test_prime_inverse_round_trip_sweep():
    f = ConvexFlux.quartic()
    for xi in np.linspace(f.prime(-0.9), f.prime(0.9), 100):
        u = f.prime_inverse(float(xi), -1.0, 1.0)
        assert abs(f.prime(u) - xi) < 1e-10


def test_prime_strictly_increasing_on_working_interval():
    for f in (ConvexFlux.burgers(), ConvexFlux.quartic()):
        u = np.linspace(-1.5, 1.5, 1000)
        assert np.all(np.diff(f.prime(u)) > 0)


def test_convexity_check_rejects_concave_polynomial():
    f = ConvexFlux.polynomial([0.0, 0.0, -1.0])  # f = -u^2
    with pytest.raises(DomainError):
        f.assert_convex_on(-1.0, 1.0)


def test_convexity_check_accepts_quartic():
    ConvexFlux.quartic().assert_convex_on(-1.5, 1.5)


def test_prime_inverse_array_matches_scalar():
    f = ConvexFlux.quartic()
    xi = np.linspace(f.prime(-0.8), f.prime(0.8), 17)
    u_arr = f.prime_inverse_array(xi, -1.0, 1.0)
    for xv, uv in zip(xi, u_arr):
        assert abs(uv - f.prime_inverse(float(xv), -1.0, 1.0)) < 1e-10


# --- viscous flux -----------------------------------------------------------

def test_carreau_newtonian_reduction():
    s = ViscosityModel.carreau(mu=1.0, p=1.0)
    assert s.value(3.0) == 3.0
    assert s.prime(-5.0) == 1.0


def test_carreau_value_hand_evaluated():
    # mu*(1+v^2)^((p-1)/2)*v at mu=1, p=1/2, v=1 -> 2^(-1/4)
    s = ViscosityModel.carreau(mu=1.0, p=0.5)
    assert abs(s.value(1.0) - 2.0 ** -0.25) < 1e-15


def test_power_law_hand_evaluated():
    # mu*|v|^(p-1)*v at mu=2, p=2, v=-3 -> -18
    s = ViscosityModel.power_law(mu=2.0, p=2.0)
    assert s.value(-3.0) == -18.0
    assert s.value(0.0) == 0.0


def test_power_law_limit_value_at_zero():
    s = ViscosityModel.power_law(mu=1.0, p=0.5)
    assert s.value(0.0) == 0.0
    assert np.all(s.value(np.array([0.0, 0.0])) == 0.0)


def test_carreau_prime_at_zero():
    s = ViscosityModel.carreau(mu=1.0, p=0.5)
    assert s.prime(0.0) == 1.0


def test_carreau_prime_formula():
    s = ViscosityModel.carreau(mu=2.0, p=0.7)
    v = 1.3
    expected = 2.0 * (1 + v * v) ** ((0.7 - 3) / 2) * (1 + 0.7 * v * v)
    assert abs(s.prime(v) - expected) < 1e-14


@pytest.mark.parametrize("form,p", [("carreau", 0.5), ("carreau", 1.7), ("power_law", 2.0)])
def test_sigma_prime_finite_difference_oracle(form, p):
    s = ViscosityModel(form, 1.3, p)
    v = 0.7
    errs = []
    for h in (1e-3, 5e-4):
        fd = (s.value(v + h) - s.value(v - h)) / (2 * h)
        errs.append(abs(fd - s.prime(v)))
    assert errs[0] < 1e-5
    if errs[1] > 1e-12:  # above roundoff floor (power law p=2 is exactly quadratic)
        assert errs[0] / errs[1] > 3.0  # Richardson: O(h^2)


def test_power_law_prime_degenerate_at_zero():
    s = ViscosityModel.power_law(mu=1.0, p=0.5)
    with pytest.raises(DegenerateError):
        s.prime(0.0)
    with pytest.raises(DegenerateError):
        s.prime(np.array([1.0, 0.0]))


def test_power_law_prime_p_above_one_vanishes_at_zero():
    s = ViscosityModel.power_law(mu=1.0, p=2.0)
    assert s.prime(0.0) == 0.0


def test_invalid_parameters_rejected():
    with pytest.raises(DomainError):
        ViscosityModel.carreau(mu=0.0, p=1.0)
    with pytest.raises(DomainError):
        ViscosityModel.carreau(mu=1.0, p=0.0)
    with pytest.raises(DomainError):
        ViscosityModel("maxwell", 1.0, 1.0)


@pytest.mark.parametrize("p", [0.3, 0.5, 1.0, 1.5, 2.7])
def test_carreau_prime_positive_over_wide_range(p):
    s = ViscosityModel.carreau(mu=1.0, p=p)
    v = np.concatenate([-np.logspace(-6, 6, 200), [0.0], np.logspace(-6, 6, 200)])
    assert np.all(s.prime(v) > 0.0)


@given(v=st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
       p=st.floats(min_value=0.1, max_value=3.0))
@settings(max_examples=60, deadline=None)
def test_sigma_odd(v, p):
    for s in (ViscosityModel.carreau(1.0, p), ViscosityModel.power_law(1.0, p)):
        assert s.value(-v) == -s.value(v)


@pytest.mark.parametrize("form", ["carreau", "power_law"])
@pytest.mark.parametrize("p", [0.4, 0.8, 1.0, 1.6, 2.5])
def test_growth_matches_power_law_envelope(form, p):
    # for |v| >= 10 the ratio sigma(v)/(mu*|v|^(p-1)*v) stays in [0.5, 2]
    s = ViscosityModel(form, 1.7, p)
    v = np.concatenate([-np.logspace(1, 6, 50), np.logspace(1, 6, 50)])
    ratio = s.value(v) / (1.7 * np.abs(v) ** (p - 1.0) * v)
    assert np.all(ratio >= 0.5) and np.all(ratio <= 2.0)


def test_degenerate_flag():
    assert ViscosityModel.power_law(1.0, 0.5).degenerate
    assert not ViscosityModel.power_law(1.0, 1.5).degenerate
    assert not ViscosityModel.carreau(1.0, 0.5).degenerate
