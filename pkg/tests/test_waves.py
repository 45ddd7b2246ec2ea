import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gamma

from viscwave import (
    ConfigError,
    ConvexFlux,
    DomainError,
    RiemannData,
    SmoothRarefaction,
    SmoothWave,
    WindowError,
    exact_rarefaction,
    kq_constant,
    rate_table,
    smooth_U,
    smooth_w,
)


@pytest.fixture(scope="module")
def wave():
    return SmoothWave(-0.5, 0.5, 1.0)


@pytest.fixture(scope="module")
def burgers_setup():
    flux = ConvexFlux.burgers()
    riemann = RiemannData(-0.5, 0.5)
    return flux, riemann, SmoothWave.for_flux(flux, riemann, 1.0)


# --- normalization constant -------------------------------------------------

def test_kq_analytic_values():
    assert abs(kq_constant(1.0) - 1.0 / math.pi) < 1e-12
    assert abs(kq_constant(1.5) - 0.5) < 1e-12


def test_kq_q2_against_quadrature_oracle():
    # independent oracle: direct improper integral of the profile
    total, _ = quad(lambda y: (1 + y * y) ** -2.0, -np.inf, np.inf, epsabs=1e-13)
    assert abs(total - math.pi / 2) < 1e-12
    assert abs(kq_constant(2.0) - 1.0 / total) < 1e-12
    assert abs(kq_constant(2.0) - 2.0 / math.pi) < 1e-12


@pytest.mark.parametrize("q", [0.6, 0.8, 1.25, 2.5, 3.7])
def test_kq_against_gamma_oracle(q):
    # whole-line integral of (1+y^2)^(-q) is sqrt(pi)*Gamma(q-1/2)/Gamma(q)
    exact = 1.0 / (math.sqrt(math.pi) * gamma(q - 0.5) / gamma(q))
    assert abs(kq_constant(q) - exact) < 1e-10


def test_kq_diverges_at_half():
    with pytest.raises(DomainError):
        kq_constant(0.5)
    with pytest.raises(DomainError):
        kq_constant(0.3)


@pytest.mark.parametrize("q", [0.7, 1.0, 1.5, 2.0])
def test_normalization_invariant(q):
    k = kq_constant(q)
    total, _ = quad(lambda y: (1 + y * y) ** -q, -np.inf, np.inf, epsabs=1e-12)
    assert abs(k * total - 1.0) < 1e-10


# --- initial profile ----------------------------------------------------------

def test_initial_midpoint_and_far_fields(wave):
    assert wave.initial(0.0) == 0.0
    # normalization forces the far fields
    assert abs(wave.initial(1e9) - 0.5) < 1e-8
    assert abs(wave.initial(-1e9) + 0.5) < 1e-8


def test_initial_analytic_arctan(wave):
    # (w+ - w-) * K_1 * arctan(1) = (1/pi)*(pi/4)
    assert abs(wave.initial(1.0) - 0.25) < 1e-15


def test_initial_derivatives_match_finite_differences(wave):
    x = 0.8
    h = 1e-5
    fd1 = (wave.initial(x + h) - wave.initial(x - h)) / (2 * h)
    fd2 = (wave.initial(x + h) - 2 * wave.initial(x) + wave.initial(x - h)) / h**2
    assert abs(fd1 - wave.initial_prime(x)) < 1e-9
    assert abs(fd2 - wave.initial_second(x)) < 1e-6


@pytest.mark.parametrize("q", [0.75, 1.0, 1.5, 2.2])
def test_initial_generic_q_far_fields_and_slope(q):
    w = SmoothWave(-1.0, 2.0, q)
    big = w.tail_cutoff(1e-9)
    assert abs(w.initial(big) - 2.0) < 1e-8 * 3.0
    assert abs(w.initial(-big) + 1.0) < 1e-8 * 3.0
    x = 0.6
    h = 1e-5
    fd1 = (w.initial(x + h) - w.initial(x - h)) / (2 * h)
    assert abs(fd1 - w.initial_prime(x)) < 1e-8


def test_wave_requires_ordered_states():
    with pytest.raises(ConfigError):
        SmoothWave(0.5, -0.5, 1.0)


# --- characteristics ----------------------------------------------------------

def test_foot_zero_time(wave):
    assert wave.foot(0.0, 17.3) == 17.3


def test_foot_origin_fixed_for_antisymmetric_data(wave):
    for t in (1.0, 10.0, 500.0):
        assert abs(wave.foot(t, 0.0)) < 1e-13


def test_foot_against_bisection_oracle(wave):
    # independent bisection for x0 + 10*w0(x0) = 3
    t, x = 10.0, 3.0
    lo, hi = x - 0.5 * t, x + 0.5 * t
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid + wave.initial(mid) * t - x > 0:
            hi = mid
        else:
            lo = mid
    oracle = 0.5 * (lo + hi)
    assert abs(wave.foot(t, x) - oracle) < 1e-10


def test_foot_residual_everywhere(wave):
    rng = np.random.default_rng(0)
    for t in (0.5, 3.0, 40.0, 700.0):
        x = rng.uniform(-0.6 * t - 30, 0.6 * t + 30, size=300)
        x0 = wave.foot(t, x)
        assert np.max(np.abs(x0 + wave.initial(x0) * t - x)) < 1e-12

def test_foot_rejects_negative_time(wave):
    with pytest.raises(DomainError):
        wave.foot(-1.0, 0.0)


# --- smooth profile -----------------------------------------------------------

def test_profile_at_zero_time_is_initial_data(wave):
    x = np.linspace(-4, 4, 41)
    w, wx, wxx = smooth_w(wave, 0.0, x)
    assert np.allclose(w, wave.initial(x), rtol=0, atol=1e-14)
    assert np.allclose(wx, wave.initial_prime(x), rtol=0, atol=1e-14)
    assert np.allclose(wxx, wave.initial_second(x), rtol=0, atol=1e-14)


def test_profile_derivatives_finite_difference_oracle(wave):
    t, x = 5.0, 1.0
    w, wx, wxx = wave.profile(t, x)
    errs1, errs2 = [], []
    for h in (1e-3, 5e-4):
        wp = wave.profile(t, x + h)[0]
        wm = wave.profile(t, x - h)[0]
        errs1.append(abs((wp - wm) / (2 * h) - wx))
        errs2.append(abs((wp - 2 * w + wm) / h**2 - wxx))
    assert errs1[0] / errs1[1] > 3.0  # O(h^2)
    assert errs1[1] < 1e-7
    assert errs2[1] < 1e-5


def test_profile_bounds_and_positive_slope(wave):
    rng = np.random.default_rng(1)
    for t in (0.5, 12.0, 300.0):
        x = rng.uniform(-t - 20, t + 20, size=200)
        w, wx, _ = wave.profile(t, x)
        assert np.all(w > -0.5) and np.all(w < 0.5)
        assert np.all(wx > 0.0)


def test_profile_solves_quadratic_flux_equation(wave):
    # centered FD residual of w_t + w w_x converges to 0 at O(h^2)
    xs = np.linspace(-6, 6, 25)
    t = 5.0

    def residual(h):
        worst = 0.0
        for x in xs:
            wp = wave.profile(t + h, x)[0]
            wm = wave.profile(t - h, x)[0]
            wc, wx, _ = wave.profile(t, x)
            worst = max(worst, abs((wp - wm) / (2 * h) + wc * wx))
        return worst

    r = [residual(h) for h in (0.1, 0.05, 0.025)]
    assert math.log2(r[0] / r[1]) > 1.9
    assert math.log2(r[1] / r[2]) > 1.9


def test_fan_mass_conserved(wave):
    for t in (0.0, 7.0, 250.0):
        big = wave.tail_cutoff(1e-10)
        theta = np.linspace(-math.atan(big), math.atan(big), 20001)
        x0 = np.tan(theta)
        d1 = wave.initial_prime(x0)
        # integral of dw/dx over x equals the jump (change of variables to x0)
        mass = np.trapezoid(d1 * (1 + x0 * x0), theta)
        assert abs(mass - 1.0) < 1e-6


# --- transformed profile U ------------------------------------------------------

def test_smooth_U_burgers_is_identity(burgers_setup):
    flux, riemann, wave = burgers_setup
    x = np.linspace(-10, 10, 101)
    w, _, _ = wave.profile(3.0, x)
    U, _ = smooth_U(flux, riemann, wave, 3.0, x)
    assert np.allclose(U, w, rtol=0, atol=1e-14)


def test_smooth_U_bounds_and_slope_quartic():
    flux = ConvexFlux.quartic()
    riemann = RiemannData(-0.5, 0.5)
    rare = SmoothRarefaction.build(flux, riemann, 1.0)
    x = np.linspace(-40, 40, 401)
    for t in (0.0, 2.0, 50.0):
        U, dU = rare.U_and_slope(t, x)
        assert np.all(U > -0.5) and np.all(U < 0.5)
        assert np.all(dU > 0.0)


def test_smooth_U_slope_finite_difference_oracle():
    flux = ConvexFlux.quartic()
    riemann = RiemannData(-0.5, 0.5)
    rare = SmoothRarefaction.build(flux, riemann, 1.0)
    x = np.linspace(-8, 8, 33)
    t = 7.0
    _, dU = rare.U_and_slope(t, x)
    h = 1e-5
    fd = (rare.U(t, x + h) - rare.U(t, x - h)) / (2 * h)
    assert np.max(np.abs(fd - dU)) < 1e-8


def test_self_similar_convergence(burgers_setup):
    flux, riemann, _ = burgers_setup
    rare = SmoothRarefaction.build(flux, riemann, 1.0)
    sups = []
    for k in range(3, 13):
        t = float(2**k)
        x = np.linspace(-0.7 * t - 50, 0.7 * t + 50, 4001)
        sups.append(float(np.max(np.abs(rare.U(t, x) - rare.exact(x / t)))))
    assert all(b < a for a, b in zip(sups, sups[1:]))


# --- exact fan -------------------------------------------------------------------

def test_exact_rarefaction_burgers_values(burgers_setup):
    flux, riemann, _ = burgers_setup
    assert exact_rarefaction(flux, riemann, 0.0) == 0.0
    assert exact_rarefaction(flux, riemann, -2.0) == -0.5
    assert exact_rarefaction(flux, riemann, 0.25) == 0.25
    assert exact_rarefaction(flux, riemann, 3.0) == 0.5


def test_exact_rarefaction_continuous_monotone_quartic():
    flux = ConvexFlux.quartic()
    riemann = RiemannData(-0.8, 1.2)
    xi = np.linspace(-3, 3, 1201)
    u = exact_rarefaction(flux, riemann, xi)
    assert np.all(np.diff(u) >= -1e-13)
    assert np.max(np.abs(np.diff(u))) < 0.02  # no jumps on a fine sampling
    assert abs(u[0] + 0.8) < 1e-12 and abs(u[-1] - 1.2) < 1e-12


def test_riemann_data_requires_order():
    with pytest.raises(ConfigError):
        RiemannData(0.5, -0.5)


# --- rate table ------------------------------------------------------------------

@pytest.fixture(scope="module")
def table(wave):
    times = np.logspace(2, 4, 17)
    norms = [(1, 1), (1, 2), (1, math.inf), (2, 1), (2, 2), (2, math.inf)]
    return rate_table(wave, times, norms)


def test_rate_table_l1_equals_jump(table):
    vals = table.column(1, 1)
    assert np.all(np.abs(vals - 1.0) < 1e-6)


def test_rate_table_exponents_match_decay_laws(table):
    # d/dx: (1+t)^(-1+1/r); d2/dx2: (1+t)^(-1-(1/(2q))(1-1/r)), q=1
    expected = {(1, 1): 0.0, (1, 2): -0.5, (1, math.inf): -1.0,
                (2, 1): -1.0, (2, 2): -1.25, (2, math.inf): -1.5}
    for key, target in expected.items():
        fit = table.slope(*key)
        assert fit is not None
        assert abs(fit.slope - target) < 0.1, (key, fit.slope)


def test_rate_table_q_three_halves_exponents():
    w = SmoothWave(-0.5, 0.5, 1.5)
    times = np.logspace(2, 4, 13)
    norms = [(1, 1), (1, 2), (1, math.inf), (2, 1), (2, 2), (2, math.inf)]
    tbl = rate_table(w, times, norms)
    expected = {(1, 1): 0.0, (1, 2): -0.5, (1, math.inf): -1.0,
                (2, 1): -1.0, (2, 2): -1.0 - (1 / 3) * 0.5, (2, math.inf): -1.0 - 1 / 3}
    for key, target in expected.items():
        assert abs(tbl.slope(*key).slope - target) < 0.1, key


def test_rate_table_transformed_field_exponents_quartic():
    # the transformed profile obeys the same decay laws for a convex flux
    flux = ConvexFlux.quartic()
    riemann = RiemannData(-0.5, 0.5)
    wave = SmoothWave.for_flux(flux, riemann, 1.0)
    norms = [(1, 1), (1, 2), (1, math.inf), (2, 1), (2, 2), (2, math.inf)]
    tbl = rate_table(wave, np.logspace(2, 4, 13), norms,
                     field_name="U", flux=flux, riemann=riemann)
    assert np.all(np.abs(tbl.column(1, 1) - 1.0) < 1e-6)  # jump u+ - u-
    expected = {(1, 1): 0.0, (1, 2): -0.5, (1, math.inf): -1.0,
                (2, 1): -1.0, (2, 2): -1.25, (2, math.inf): -1.5}
    for key, target in expected.items():
        assert abs(tbl.slope(*key).slope - target) < 0.1, key


def test_transformed_second_derivative_closed_form():
    # FD oracle for the chain-rule curvature used by the U-field table
    flux = ConvexFlux.quartic()
    riemann = RiemannData(-0.5, 0.5)
    rare = SmoothRarefaction.build(flux, riemann, 1.0)
    wave = rare.wave
    t, x_phys = 7.0, 1.3
    x0 = wave.foot(t, x_phys)
    d1 = wave.initial_prime(x0)
    jac = 1.0 + d1 * t
    g1 = d1 / jac
    g2 = wave.initial_second(x0) / jac**3
    u = flux.prime_inverse(wave.initial(x0), riemann.u_minus, riemann.u_plus)
    g1_f = g1 / flux.second(u)
    g2_f = (g2 - flux.third(u) * g1_f**2) / flux.second(u)
    h = 1e-4
    fd2 = (rare.U(t, x_phys + h) - 2.0 * rare.U(t, x_phys)
           + rare.U(t, x_phys - h)) / h**2
    assert abs(fd2 - g2_f) < 1e-6


def test_rate_table_window_error_on_truncated_window(wave):
    with pytest.raises(WindowError):
        rate_table(wave, [10.0], [(1, 1)], x0_cutoff=5.0)


def test_rate_table_csv_round_trip(tmp_path, table):
    path = tmp_path / "rates.csv"
    table.to_csv(path)
    text = path.read_text().splitlines()
    assert text[0] == "t,k1_r1,k1_r2,k1_rinf,k2_r1,k2_r2,k2_rinf"
    assert len(text) == 1 + len(table.times) + 1
    assert text[-1].startswith("# fit-summary: ")
    first = [float(v) for v in text[1].split(",")]
    assert first[0] == table.times[0]
    assert first[1] == table.column(1, 1)[0]


def test_rate_table_for_transformed_field(burgers_setup):
    flux, riemann, wave = burgers_setup
    tbl = rate_table(wave, np.logspace(2, 3.5, 8), [(1, 1), (1, math.inf)],
                     field_name="U", flux=flux, riemann=riemann)
    assert np.all(np.abs(tbl.column(1, 1) - 1.0) < 1e-6)
    assert abs(tbl.slope(1, math.inf).slope + 1.0) < 0.1
