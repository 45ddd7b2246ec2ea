"""Norms, energy functionals, and inequality probes on grid functions.

Everything here is a pure function of sampled data.  Discrete derivatives
use centered differences on interior nodes and one-sided second-order
stencils at the ends, keeping the diagnostic error O(dx^2); inequality
checks carry a discretization slack of 10*dx so continuum statements are
not falsely flagged on coarse grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import NamedTuple

import numpy as np

from .errors import DomainError, FitError, NegativeWeightError, PreconditionError
from .waves import exact_rarefaction

TRANSIENT_WINDOW = 10.0  # asymptotic probes skip [0, 10] by default


def bracket_weight(s):
    """Japanese bracket <s> = (1 + s^2)^(1/2)."""
    return np.sqrt(1.0 + np.square(s))


def grad(g: np.ndarray, dx: float) -> np.ndarray:
    """First derivative: centered interior, one-sided O(dx^2) at the ends."""
    g = np.asarray(g, dtype=float)
    out = np.empty_like(g)
    out[1:-1] = (g[2:] - g[:-2]) / (2.0 * dx)
    out[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * dx)
    out[-1] = (3.0 * g[-1] - 4.0 * g[-2] + g[-3]) / (2.0 * dx)
    return out


def grad2(g: np.ndarray, dx: float) -> np.ndarray:
    """Second derivative: centered interior, one-sided O(dx^2) at the ends."""
    g = np.asarray(g, dtype=float)
    out = np.empty_like(g)
    out[1:-1] = (g[2:] - 2.0 * g[1:-1] + g[:-2]) / dx**2
    out[0] = (2.0 * g[0] - 5.0 * g[1] + 4.0 * g[2] - g[3]) / dx**2
    out[-1] = (2.0 * g[-1] - 5.0 * g[-2] + 4.0 * g[-3] - g[-4]) / dx**2
    return out


def lp_norm(g: np.ndarray, r, dx: float) -> float:
    """Discrete L^r norm: composite trapezoid for r in {1, 2}, max for inf."""
    g = np.asarray(g, dtype=float)
    if r == 1:
        return float(np.trapezoid(np.abs(g), dx=dx))
    if r == 2:
        return float(math.sqrt(np.trapezoid(g * g, dx=dx)))
    if r == math.inf:
        return float(np.max(np.abs(g)))
    raise DomainError(f"unsupported norm order r={r}")


def q_functional(v: np.ndarray, p: float, dx: float) -> float:
    """Weighted dissipation integral of a gradient field v:

        Q = int <v>^(p-1) |v|^2 dx   (trapezoid).

    Reduces to the squared L^2 norm exactly at p = 1.
    """
    if not p > 0.0:
        raise DomainError("q_functional requires p > 0")
    v = np.asarray(v, dtype=float)
    if p == 1.0:
        integrand = v * v
    else:
        integrand = np.power(1.0 + v * v, 0.5 * (p - 1.0)) * v * v
    return float(np.trapezoid(integrand, dx=dx))


def weighted_mass(phi: np.ndarray, du_dx: np.ndarray, dx: float) -> float:
    """int phi^2 * dU/dx dx; the weight must be non-negative."""
    du_dx = np.asarray(du_dx, dtype=float)
    if np.any(du_dx < -1e-12):
        raise NegativeWeightError(
            f"wave slope has negative entries (min {float(du_dx.min()):.3e})")
    phi = np.asarray(phi, dtype=float)
    return float(np.trapezoid(phi * phi * np.maximum(du_dx, 0.0), dx=dx))


def sup_deviation(state, flux, riemann) -> float:
    """max over nodes of |u - u^r(x/t)|; defined for t > 0 only."""
    if state.t <= 0.0:
        raise DomainError("self-similar variable x/t undefined at t = 0")
    xi = state.x / state.t
    return float(np.max(np.abs(state.values - exact_rarefaction(flux, riemann, xi))))


class SobolevCheck(NamedTuple):
    lhs: float
    rhs: float
    ok: bool


def sobolev_check(g: np.ndarray, dx: float, boundary_tol: float = 1e-10) -> SobolevCheck:
    """Check sup|g| <= sqrt(2) ||g||_2^(1/2) ||g'||_2^(1/2) on sampled data.

    Requires g to decay at both ends (|boundary| < boundary_tol); the pass
    verdict allows a discretization slack of 10*dx.
    """
    g = np.asarray(g, dtype=float)
    if abs(g[0]) >= boundary_tol or abs(g[-1]) >= boundary_tol:
        raise PreconditionError(
            f"input does not decay at the ends: |{g[0]:.3e}|, |{g[-1]:.3e}|")
    lhs = float(np.max(np.abs(g)))
    rhs = math.sqrt(2.0) * math.sqrt(lp_norm(g, 2, dx)) * math.sqrt(lp_norm(grad(g, dx), 2, dx))
    return SobolevCheck(lhs, rhs, lhs <= rhs * (1.0 + 10.0 * dx))


class InterpolationCheck(NamedTuple):
    lhs: float
    bound_terms: tuple
    fitted_c: float


def interpolation_check(g: np.ndarray, p: float, dx: float,
                        boundary_tol: float = 1e-10) -> InterpolationCheck:
    """Evaluate both sides of the interpolation bound

        ||g||_inf^2 <= C Q^(1/4) ||g||_2^(1/2) + C Q^(1/(3p+1)) ||g||_2^(2p/(3p+1))

    with Q the weighted dissipation of g', and report the smallest C that
    makes it hold for this sample.  Valid for p in (0, 1).
    """
    if not 0.0 < p < 1.0:
        raise DomainError("interpolation_check requires p in (0, 1)")
    g = np.asarray(g, dtype=float)
    if abs(g[0]) >= boundary_tol or abs(g[-1]) >= boundary_tol:
        raise PreconditionError("input does not decay at the ends")
    lhs = lp_norm(g, math.inf, dx) ** 2
    l2 = lp_norm(g, 2, dx)
    q_val = q_functional(grad(g, dx), p, dx)
    term1 = q_val ** 0.25 * l2 ** 0.5
    term2 = q_val ** (1.0 / (3.0 * p + 1.0)) * l2 ** (2.0 * p / (3.0 * p + 1.0))
    denom = term1 + term2
    fitted_c = 0.0 if lhs == 0.0 else (math.inf if denom == 0.0 else lhs / denom)
    return InterpolationCheck(lhs, (term1, term2), fitted_c)


class FitResult(NamedTuple):
    slope: float
    intercept: float
    r2: float


def decay_rate_fit(times, values, window) -> FitResult:
    """OLS of log(value) against log(1+t) restricted to the time window."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = (times >= window[0]) & (times <= window[1])
    if int(mask.sum()) < 5:
        raise FitError(f"need >= 5 points in window {window}, got {int(mask.sum())}")
    v = values[mask]
    if np.any(v <= 0.0) or not np.all(np.isfinite(v)):
        raise FitError("decay fit requires positive finite values")
    lx = np.log1p(times[mask])
    ly = np.log(v)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return FitResult(float(slope), float(intercept), float(r2))


def essential_sup_bracket(series) -> float:
    """max over times and nodes of <v>; 1 for an identically zero series."""
    peak = 0.0
    for v in series:
        arr = np.asarray(v, dtype=float)
        if arr.size:
            peak = max(peak, float(np.max(np.abs(arr))))
    return math.sqrt(1.0 + peak * peak)


@dataclass
class DiagnosticsRecord:
    """One time-stamped row of deviation norms and energy functionals."""

    t: float
    l2_phi: float
    h1_phi: float
    h2_phi: float
    weighted_mass: float
    q_phi: float
    q2_phi: float
    sup_phi: float
    sup_dev_exact: float  # NaN at t = 0 (self-similar variable undefined)
    linf_dxphi: float
    cum_q_integral: float

    HEADER = ("t,l2_phi,h1_phi,h2_phi,weighted_mass,q_phi,q2_phi,"
              "sup_phi,sup_dev_exact,linf_dxphi,cum_q_integral")

    def row(self) -> str:
        return ",".join(repr(float(getattr(self, f.name))) for f in fields(self))


def evaluate_record(t: float, u: np.ndarray, x: np.ndarray, dx: float,
                    rarefaction, p: float, prev: DiagnosticsRecord | None = None
                    ) -> DiagnosticsRecord:
    """Full diagnostics row for a solution sample u(t, x).

    phi = u - U against the smooth fan; cum_q_integral accumulates the
    dissipation functional by the trapezoidal rule in t from the previous
    record.
    """
    u_wave, du_wave = rarefaction.U_and_slope(t, x)
    phi = u - u_wave
    dphi = grad(phi, dx)
    d2phi = grad2(phi, dx)
    l2 = lp_norm(phi, 2, dx)
    dl2 = lp_norm(dphi, 2, dx)
    d2l2 = lp_norm(d2phi, 2, dx)
    q_val = q_functional(dphi, p, dx)
    q2_val = float(np.trapezoid(
        np.power(1.0 + dphi * dphi, p - 1.0) * d2phi * d2phi, dx=dx))
    if t > 0.0:
        xi = x / t
        dev = float(np.max(np.abs(
            u - exact_rarefaction(rarefaction.flux, rarefaction.riemann, xi))))
    else:
        dev = math.nan
    if prev is None:
        cum = 0.0
    else:
        cum = prev.cum_q_integral + 0.5 * (prev.q_phi + q_val) * (t - prev.t)
    return DiagnosticsRecord(
        t=float(t),
        l2_phi=l2,
        h1_phi=math.sqrt(l2**2 + dl2**2),
        h2_phi=math.sqrt(l2**2 + dl2**2 + d2l2**2),
        weighted_mass=weighted_mass(phi, du_wave, dx),
        q_phi=q_val,
        q2_phi=q2_val,
        sup_phi=lp_norm(phi, math.inf, dx),
        sup_dev_exact=dev,
        linf_dxphi=lp_norm(dphi, math.inf, dx),
        cum_q_integral=cum,
    )


def records_to_csv(records, path) -> None:
    lines = [DiagnosticsRecord.HEADER]
    lines.extend(r.row() for r in records)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def dyadic_increments(records, k_range) -> list[float]:
    """Increments of the cumulative dissipation over [2^k, 2^(k+1)].

    Requires the dyadic endpoints to be snapshot times of the record series.
    """
    by_t = {r.t: r.cum_q_integral for r in records}
    out = []
    for k in k_range:
        a, b = float(2**k), float(2 ** (k + 1))
        if a not in by_t or b not in by_t:
            raise DomainError(f"records lack snapshots at t={a} and t={b}")
        out.append(by_t[b] - by_t[a])
    return out


def eventually_decreasing(times, values, skip: float = TRANSIENT_WINDOW) -> bool:
    """True when the series is strictly decreasing after the transient window."""
    pairs = [(t, v) for t, v in zip(times, values)
             if t > skip and np.isfinite(v)]
    return all(b[1] < a[1] for a, b in zip(pairs, pairs[1:]))


def run_summary(records, *, fit_window=None, transient_skip: float = TRANSIENT_WINDOW) -> dict:
    """JSON-ready summary: fitted slopes, sup bracket, boundedness verdicts."""
    times = [r.t for r in records]
    t_end = times[-1] if times else 0.0
    window = fit_window or (transient_skip, max(t_end, transient_skip + 1.0))
    slopes = {}
    for name in ("l2_phi", "sup_phi", "linf_dxphi", "sup_dev_exact", "q_phi"):
        vals = [getattr(r, name) for r in records]
        try:
            fit = decay_rate_fit(times, vals, window)
            slopes[name] = {"slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2}
        except FitError:
            slopes[name] = None
    linf_series = [r.linf_dxphi for r in records]
    peak = max(linf_series) if linf_series else 0.0
    l2_initial = records[0].l2_phi if records else 0.0
    l2_peak = max(r.l2_phi for r in records) if records else 0.0
    summary = {
        "t_end": t_end,
        "fit_window": list(window),
        "slopes": slopes,
        "ess_sup_bracket": math.sqrt(1.0 + peak * peak),
        "l2_phi_initial": l2_initial,
        "l2_phi_peak": l2_peak,
        "l2_bounded_3x": bool(l2_peak <= 3.0 * l2_initial) if l2_initial > 0.0 else True,
        "sup_dev_eventually_decreasing": eventually_decreasing(
            times, [r.sup_dev_exact for r in records], transient_skip),
        "linf_dxphi_eventually_decreasing": eventually_decreasing(
            times, linf_series, transient_skip),
        "final_cum_q_integral": records[-1].cum_q_integral if records else 0.0,
        "final_sup_dev_exact": records[-1].sup_dev_exact if records else math.nan,
    }
    return summary
