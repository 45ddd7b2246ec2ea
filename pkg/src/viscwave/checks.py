"""Self-contained property battery behind the ``check`` subcommand.

Each check returns (name, ok, detail); the battery is sized to finish in
well under a minute while touching every subsystem.
"""

from __future__ import annotations

import math

import numpy as np

from . import diagnostics
from .fluxes import ConvexFlux, ViscosityModel
from .solver import (
    GaussianPerturbation,
    Grid1D,
    NoPerturbation,
    SolverConfig,
    initial_condition,
    simulate,
    step,
)
from .waves import RiemannData, SmoothWave, kq_constant, rate_table


def check_normalization_constants():
    e1 = abs(kq_constant(1.0) - 1.0 / math.pi)
    e2 = abs(kq_constant(1.5) - 0.5)
    return e1 < 1e-12 and e2 < 1e-12, f"errors {e1:.2e}, {e2:.2e}"


def check_characteristic_residual():
    wave = SmoothWave(-0.5, 0.5, 1.0)
    worst = 0.0
    for t in np.linspace(0.0, 1e3, 40):
        x = np.linspace(-0.7 * t - 50, 0.7 * t + 50, 40)
        x0 = wave.foot(float(t), x)
        worst = max(worst, float(np.max(np.abs(x0 + wave.initial(x0) * t - x))))
    return worst < 1e-12, f"max residual {worst:.2e}"


def check_profile_equation_order():
    wave = SmoothWave(-0.5, 0.5, 1.0)
    xs = np.linspace(-5, 5, 11)
    t = 5.0

    def res(h):
        worst = 0.0
        for x in xs:
            wp = wave.profile(t + h, x)[0]
            wm = wave.profile(t - h, x)[0]
            wc, wx, _ = wave.profile(t, x)
            worst = max(worst, abs((wp - wm) / (2 * h) + wc * wx))
        return worst

    r = [res(h) for h in (0.1, 0.05, 0.025)]
    orders = (math.log2(r[0] / r[1]), math.log2(r[1] / r[2]))
    return min(orders) >= 1.9, f"orders {orders[0]:.2f}, {orders[1]:.2f}"


def check_decay_exponents():
    wave = SmoothWave(-0.5, 0.5, 1.0)
    tbl = rate_table(wave, np.logspace(2, 4, 9),
                     [(1, 1), (1, math.inf), (2, 1), (2, math.inf)])
    l1_flat = bool(np.all(np.abs(tbl.column(1, 1) - 1.0) < 1e-6))
    checks = {
        (1, math.inf): (-1.0, 0.05),
        (2, math.inf): (-1.5, 0.1),
        (2, 1): (-1.0, 0.1),
    }
    bad = [f"{k}:{tbl.slope(*k).slope:.3f}" for k, (tgt, tol) in checks.items()
           if abs(tbl.slope(*k).slope - tgt) > tol]
    return l1_flat and not bad, f"l1_flat={l1_flat} off-target={bad or 'none'}"


def check_flux_invariants():
    flux = ConvexFlux.quartic()
    u = np.linspace(-1.5, 1.5, 1000)
    monotone = bool(np.all(np.diff(flux.prime(u)) > 0))
    round_trip = all(
        abs(flux.prime(flux.prime_inverse(float(xi), -1.0, 1.0)) - xi) < 1e-10
        for xi in np.linspace(flux.prime(-0.9), flux.prime(0.9), 20))
    visc_ok = True
    for p in (0.5, 1.0, 1.8):
        s = ViscosityModel.carreau(1.0, p)
        v = np.concatenate([-np.logspace(-6, 6, 100), np.logspace(-6, 6, 100)])
        visc_ok &= bool(np.all(s.prime(v) > 0))
        visc_ok &= bool(np.all(s.value(-v) == -s.value(v)))
        ratio = s.value(v) / (np.abs(v) ** (p - 1.0) * v)
        visc_ok &= bool(np.all((ratio[np.abs(v) >= 10] >= 0.5)
                               & (ratio[np.abs(v) >= 10] <= 2.0)))
    return monotone and round_trip and visc_ok, \
        f"monotone={monotone} round_trip={round_trip} viscosity={visc_ok}"


def check_inequality_corpus():
    x = np.linspace(-25, 25, 5001)  # sech(25) ~ 3e-11 clears the decay precondition
    dx = x[1] - x[0]
    corpus = {
        "gaussian": np.exp(-(x**2)),
        "sech": 1.0 / np.cosh(x),
        "bump": np.where(np.abs(x) < 1,
                         np.exp(-1.0 / np.maximum(1e-300, 1 - x**2)), 0.0),
    }
    failed = [name for name, g in corpus.items() if not diagnostics.sobolev_check(g, dx).ok]
    spreads = []
    for p in (0.5, 0.7):
        cs = []
        for lam in (0.25, 1.0, 4.0):
            xs = np.linspace(-40.0 / lam, 40.0 / lam, 8001)
            g = np.exp(-((lam * xs) ** 2))
            cs.append(diagnostics.interpolation_check(g, p, xs[1] - xs[0]).fitted_c)
        spreads.append(max(cs) / min(cs))
    return not failed and max(spreads) < 10.0, \
        f"sobolev_failures={failed or 'none'} interp_spreads={[f'{s:.2f}' for s in spreads]}"


def _small_config(**over):
    base = dict(
        flux=ConvexFlux.burgers(),
        viscosity=ViscosityModel.carreau(1.0, 0.6),
        riemann=RiemannData(-0.3, 0.7),
        grid=Grid1D(-30.0, 30.0, 600),
        t_end=2.0,
        fan_margin=5.0,
        perturbation=GaussianPerturbation(0.2, 0.0, 2.0),
    )
    base.update(over)
    return SolverConfig(**base)


def check_conservation():
    cfg = _small_config()
    state = initial_condition(cfg)
    dx = cfg.grid.dx
    scale = dx * float(np.sum(np.abs(state.values)))
    worst = 0.0
    for _ in range(25):
        new, flux_diff = step(state, cfg)
        change = dx * float(np.sum(new.values[1:-1] - state.values[1:-1]))
        worst = max(worst, abs(change + flux_diff) / max(1.0, scale))
        state = new
    res = simulate(cfg)
    run_err = res.mass_balance_error()
    return worst < 1e-12 and run_err < 1e-8, \
        f"per-step {worst:.2e}, whole-run {run_err:.2e}"


def check_determinism():
    cfg = _small_config()
    a = simulate(cfg)
    b = simulate(cfg)
    same = all(np.array_equal(x.values, y.values)
               for x, y in zip(a.snapshots, b.snapshots))
    return same, "bit-identical snapshots" if same else "snapshots differ"


def check_monotone_profile():
    cfg = _small_config(perturbation=NoPerturbation())
    res = simulate(cfg)
    ok = all(bool(np.all(np.diff(s.values) >= -1e-12)) for s in res.snapshots)
    pinned = all(s.values[0] == -0.3 and s.values[-1] == 0.7 for s in res.snapshots)
    return ok and pinned, f"monotone={ok} pinned={pinned}"


def check_decay_fit_exactness():
    t = np.logspace(0, 3, 30)
    fit = diagnostics.decay_rate_fit(t, (1 + t) ** -1.5, (1.0, 1e3))
    ok = abs(fit.slope + 1.5) < 1e-10 and abs(fit.r2 - 1.0) < 1e-12
    return ok, f"slope {fit.slope:.12f}"


ALL_CHECKS = [
    ("normalization-constants", check_normalization_constants),
    ("characteristic-residual", check_characteristic_residual),
    ("profile-equation-order", check_profile_equation_order),
    ("decay-exponents", check_decay_exponents),
    ("flux-invariants", check_flux_invariants),
    ("inequality-corpus", check_inequality_corpus),
    ("conservation", check_conservation),
    ("determinism", check_determinism),
    ("monotone-profile", check_monotone_profile),
    ("decay-fit", check_decay_fit_exactness),
]


def run_all(report=print) -> bool:
    """Run every check, reporting one line each; True when all pass."""
    all_ok = True
    for name, fn in ALL_CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failure, not a stop
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        report(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return all_ok
