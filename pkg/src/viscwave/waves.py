"""Expanding-fan (rarefaction) waves and their smooth approximations.

The exact fan connecting far fields ``u- < u+`` is the self-similar profile
``u^r(x/t)``.  Its smooth stand-in is built from the auxiliary quadratic-flux
problem: initial data

    w0(x) = (w- + w+)/2 + (w+ - w-) * K_q * int_0^x (1 + y^2)^(-q) dy,

with K_q normalizing the whole-line profile integral to one (so the far
fields of w0 are exactly w- and w+), propagated exactly by
characteristics: ``w(t, x) = w0(x0)`` where ``x0``
solves ``x = x0 + w0(x0) t``.  Transforming through the inverse of the flux
derivative turns ``w`` into the smooth approximation ``U`` of the fan for a
general convex flux.  All spatial derivatives are closed-form via implicit
differentiation, so the profiles serve as reference solutions with no
discretization error of their own.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import ConfigError, ConvergenceError, DomainError, WindowError
from .fluxes import ConvexFlux

FOOT_MAX_ITER = 200


def kq_constant(q: float) -> float:
    """Normalization constant making K_q * int (1+y^2)^(-q) dy = 1 over R.

    Analytic for q in {1, 3/2}; otherwise adaptive quadrature (abs tol 1e-12)
    after the substitution y = tan(theta), with the algebraic endpoint
    behavior handled by a weighted rule.
    """
    if q <= 0.5:
        raise DomainError(f"profile integral diverges for q = {q} <= 1/2")
    if q == 1.0:
        return 1.0 / math.pi
    if q == 1.5:
        return 0.5
    a = 2.0 * q - 2.0
    # int_R (1+y^2)^(-q) dy = 2 * int_0^(pi/2) cos(theta)^(2q-2) dtheta;
    # with d = pi/2 - theta the integrand is (sin d / d)^a * d^a.
    g = lambda d: np.sinc(d / np.pi) ** a
    val, _ = quad(g, 0.0, 0.5 * np.pi, weight="alg", wvar=(a, 0.0),
                  epsabs=1e-12, epsrel=1e-13, limit=200)
    return 1.0 / (2.0 * val)


def _antiderivative(q: float, x):
    """int_0^x (1 + y^2)^(-q) dy, elementwise."""
    if q == 1.0:
        return np.arctan(x)
    if q == 1.5:
        return x / np.sqrt(1.0 + np.square(x))
    a = 2.0 * q - 2.0

    def one(xv: float) -> float:
        if xv == 0.0:
            return 0.0
        # y = tan(theta); integrand smooth on [0, arctan|x|]
        val, _ = quad(lambda th: math.cos(th) ** a, 0.0, math.atan(abs(xv)),
                      epsabs=1e-12, epsrel=1e-13, limit=200)
        return math.copysign(val, xv)

    if np.isscalar(x):
        return one(float(x))
    return np.vectorize(one, otypes=[float])(x)


@dataclass(frozen=True)
class RiemannData:
    """Far-field states of the step initial data; a fan requires u- < u+."""

    u_minus: float
    u_plus: float

    def __post_init__(self):
        if not self.u_minus < self.u_plus:
            raise ConfigError(
                f"fan configuration requires u_minus < u_plus, "
                f"got {self.u_minus} >= {self.u_plus}"
            )

    def speeds(self, flux: ConvexFlux) -> tuple[float, float]:
        """Characteristic speeds (f'(u-), f'(u+)) of the far fields."""
        return float(flux.prime(self.u_minus)), float(flux.prime(self.u_plus))


@dataclass(frozen=True)
class SmoothWave:
    """Smooth fan profile for the quadratic flux, tail exponent q > 1/2.

    ``initial``/``initial_prime``/``initial_second`` evaluate the data
    w0 and its derivatives; ``foot`` traces a point back along its
    characteristic; ``profile`` returns (w, dw/dx, d2w/dx2) at (t, x).
    """

    w_minus: float
    w_plus: float
    q: float = 1.0
    k_q: float = field(init=False)

    def __post_init__(self):
        if not self.w_minus < self.w_plus:
            raise ConfigError(
                f"fan configuration requires w_minus < w_plus, "
                f"got {self.w_minus} >= {self.w_plus}"
            )
        object.__setattr__(self, "k_q", kq_constant(self.q))

    @classmethod
    def for_flux(cls, flux: ConvexFlux, riemann: RiemannData, q: float = 1.0) -> "SmoothWave":
        """Wave in the transformed variable w = f'(u)."""
        lam_minus, lam_plus = riemann.speeds(flux)
        return cls(lam_minus, lam_plus, q)

    @property
    def _mid(self) -> float:
        return 0.5 * (self.w_minus + self.w_plus)

    @property
    def _jump(self) -> float:
        return self.w_plus - self.w_minus

    @property
    def speed_bound(self) -> float:
        return max(abs(self.w_minus), abs(self.w_plus))

    def initial(self, x):
        # K_q normalizes the whole-line profile integral to 1, so the full
        # jump multiplies the antiderivative from the midpoint: the far
        # fields of w0 are then exactly w-/w+.
        return self._mid + self._jump * self.k_q * _antiderivative(self.q, x)

    def initial_prime(self, x):
        return self._jump * self.k_q * np.power(1.0 + np.square(x), -self.q)

    def initial_second(self, x):
        return (self._jump * self.k_q * (-2.0 * self.q) * x
                * np.power(1.0 + np.square(x), -self.q - 1.0))

    def tail_cutoff(self, frac: float) -> float:
        """X such that (w+ - w0(X))/(w+ - w-) <= frac (conservative bound)."""
        return max(1.0, (self.k_q / ((2.0 * self.q - 1.0) * frac))
                   ** (1.0 / (2.0 * self.q - 1.0)))

    def foot(self, t: float, x):
        """Solve x = x0 + w0(x0) t for the characteristic foot x0.

        The map is strictly increasing (w0' > 0, t >= 0), so the root is
        unique; safeguarded Newton inside the bracket
        [x - max|w|*t, x + max|w|*t], residual driven to ~1e-13.
        """
        if t < 0.0:
            raise DomainError("characteristic foot requires t >= 0")
        x_in = np.asarray(x, dtype=float)
        scalar = x_in.ndim == 0
        xv = np.atleast_1d(x_in).astype(float)
        if t == 0.0:
            out = xv.copy()
            return float(out[0]) if scalar else out.reshape(x_in.shape)
        wb = self.speed_bound
        lo = xv - wb * t
        hi = xv + wb * t
        x0 = np.clip(xv - self.initial(xv) * t, lo, hi)
        eps = np.finfo(float).eps
        tol = np.maximum(1e-13, 2.0 * eps * (np.abs(xv) + (1.0 + wb) * t))
        converged = False
        for _ in range(FOOT_MAX_ITER):
            g = x0 + self.initial(x0) * t - xv
            done = np.abs(g) <= tol
            if done.all():
                converged = True
                break
            hi = np.where(~done & (g > 0.0), x0, hi)
            lo = np.where(~done & (g <= 0.0), x0, lo)
            xn = x0 - g / (1.0 + self.initial_prime(x0) * t)
            # bisect on steps that leave the bracket or exceed half its
            # width; large Newton steps can cycle between the flat tails
            bad = (~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
                   | (np.abs(xn - x0) > 0.5 * (hi - lo)))
            xn = np.where(bad, 0.5 * (lo + hi), xn)
            x0 = np.where(done, x0, xn)
        if not converged:
            g = x0 + self.initial(x0) * t - xv
            if np.any(np.abs(g) > tol):
                raise ConvergenceError(
                    f"characteristic solve stalled at t={t}: "
                    f"max residual {float(np.max(np.abs(g))):.3e}"
                )
        return float(x0[0]) if scalar else x0.reshape(x_in.shape)

    def profile(self, t: float, x):
        """(w, dw/dx, d2w/dx2) at (t, x) via the characteristic foot."""
        x0 = self.foot(t, x)
        d1 = self.initial_prime(x0)
        jac = 1.0 + d1 * t
        w = self.initial(x0)
        wx = d1 / jac
        wxx = self.initial_second(x0) / jac**3
        return w, wx, wxx


def smooth_w(wave: SmoothWave, t: float, x):
    """Profile triple (w, dw/dx, d2w/dx2); alias for SmoothWave.profile."""
    return wave.profile(t, x)


def characteristic_foot(wave: SmoothWave, t: float, x):
    return wave.foot(t, x)


def burgers_initial(wave: SmoothWave, x):
    return wave.initial(x)


def smooth_U(flux: ConvexFlux, riemann: RiemannData, wave: SmoothWave, t: float, x):
    """Smooth fan approximation (U, dU/dx) for a general convex flux.

    U = (f')^{-1}(w(t, x)); dU/dx = (dw/dx) / f''(U).  The wave must carry
    the transformed far fields w± = f'(u±) (build it with for_flux).
    """
    lam_minus, lam_plus = riemann.speeds(flux)
    w, wx, _ = wave.profile(t, x)
    w_clipped = np.clip(w, lam_minus, lam_plus)
    u = flux.prime_inverse_array(w_clipped, riemann.u_minus, riemann.u_plus)
    du = wx / flux.second(u)
    if np.isscalar(x):
        return float(u), float(du)
    return u, du


def exact_rarefaction(flux: ConvexFlux, riemann: RiemannData, xi):
    """Self-similar fan profile u^r(xi), xi = x/t.

    u- left of the fan, (f')^{-1}(xi) inside, u+ right of it; continuous
    and non-decreasing.
    """
    lam_minus, lam_plus = riemann.speeds(flux)
    xi_arr = np.asarray(xi, dtype=float)
    xi_c = np.clip(xi_arr, lam_minus, lam_plus)
    u = flux.prime_inverse_array(xi_c, riemann.u_minus, riemann.u_plus)
    return float(u) if np.isscalar(xi) else u


@dataclass(frozen=True)
class SmoothRarefaction:
    """Bundle of flux, far fields, and smooth wave for repeated evaluation."""

    flux: ConvexFlux
    riemann: RiemannData
    wave: SmoothWave

    @classmethod
    def build(cls, flux: ConvexFlux, riemann: RiemannData, q: float = 1.0) -> "SmoothRarefaction":
        flux.assert_convex_on(riemann.u_minus - 1.0, riemann.u_plus + 1.0)
        return cls(flux, riemann, SmoothWave.for_flux(flux, riemann, q))

    def U(self, t: float, x):
        return smooth_U(self.flux, self.riemann, self.wave, t, x)[0]

    def U_and_slope(self, t: float, x):
        return smooth_U(self.flux, self.riemann, self.wave, t, x)

    def exact(self, xi):
        return exact_rarefaction(self.flux, self.riemann, xi)


def _norm_key(k: int, r) -> str:
    return f"k{k}_r{'inf' if r == math.inf else r}"


@dataclass
class RateTable:
    """Norm history of the fan derivatives with fitted log-log slopes."""

    field_name: str
    times: np.ndarray
    norms: list
    values: dict
    fits: dict
    fit_window: tuple

    def column(self, k: int, r) -> np.ndarray:
        return self.values[(k, r)]

    def slope(self, k: int, r):
        return self.fits.get((k, r))

    def to_csv(self, path) -> None:
        keys = [_norm_key(k, r) for (k, r) in self.norms]
        lines = ["t," + ",".join(keys)]
        for i, t in enumerate(self.times):
            row = [repr(float(t))] + [repr(float(self.values[n][i])) for n in self.norms]
            lines.append(",".join(row))
        summary = {
            "field": self.field_name,
            "fit_window": list(self.fit_window),
            "fits": {
                _norm_key(k, r): None if self.fits.get((k, r)) is None else {
                    "slope": self.fits[(k, r)].slope,
                    "intercept": self.fits[(k, r)].intercept,
                    "r2": self.fits[(k, r)].r2,
                }
                for (k, r) in self.norms
            },
        }
        lines.append("# fit-summary: " + json.dumps(summary, sort_keys=True))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def rate_table(wave: SmoothWave, times, norms, *, field_name: str = "w",
               flux: ConvexFlux | None = None, riemann: RiemannData | None = None,
               n_nodes: int = 4001, tail_frac: float = 1e-8,
               fit_window: tuple = (1e2, 1e4), x0_cutoff: float | None = None) -> RateTable:
    """L^r norms of the first and second x-derivatives of the fan profile.

    Quadrature runs on a graded spatial window that follows the fan: nodes
    are the characteristic feet x0 = tan(theta) (theta uniform), and
    integrals over x are evaluated as theta-space trapezoid sums with the
    exact Jacobian dx/dtheta = (1 + w0'(x0) t) sec^2(theta), which keeps
    the far tails accurate.  The window is sized so the omitted tail of
    dw/dx is below ``tail_frac`` of the total jump; a WindowError signals a
    window that lost more than 1e-6 of the mass.

    ``norms`` is a list of (k, r) with k in {1, 2} and r in {1, 2, inf};
    ``field_name`` "w" uses the quadratic-flux profile, "U" the transformed
    one (requires flux and riemann).
    """
    times = np.asarray(sorted(float(t) for t in times))
    if np.any(times < 0.0):
        raise DomainError("rate table requires non-negative times")
    for (k, r) in norms:
        if k not in (1, 2) or r not in (1, 2, math.inf):
            raise DomainError(f"unsupported norm request (k={k}, r={r})")
    if field_name not in ("w", "U"):
        raise DomainError("field_name must be 'w' or 'U'")
    if field_name == "U" and (flux is None or riemann is None):
        raise ConfigError("field 'U' needs flux and riemann data")

    cutoff = x0_cutoff if x0_cutoff is not None else wave.tail_cutoff(tail_frac)
    theta_max = math.atan(cutoff)
    theta = np.linspace(-theta_max, theta_max, n_nodes)
    x0 = np.tan(theta)
    d1 = wave.initial_prime(x0)
    d2 = wave.initial_second(x0)
    w0 = wave.initial(x0)
    # quadrature runs in theta with the exact Jacobian dx/dtheta =
    # (1 + w0'(x0) t) * sec^2(theta), so the graded tails stay accurate
    sec2 = 1.0 + x0 * x0
    jump = wave.w_plus - wave.w_minus

    values = {key: np.empty_like(times) for key in norms}
    for i, t in enumerate(times):
        jac = 1.0 + d1 * t
        dx_dtheta = jac * sec2
        g1 = d1 / jac
        g2 = d2 / jac**3
        if field_name == "U":
            u = flux.prime_inverse_array(
                np.clip(w0, wave.w_minus, wave.w_plus), riemann.u_minus, riemann.u_plus)
            fpp = flux.second(u)
            g1_f = g1 / fpp
            g2_f = (g2 - flux.third(u) * g1_f**2) / fpp
            total = riemann.u_plus - riemann.u_minus
        else:
            g1_f, g2_f = g1, g2
            total = jump
        captured = np.trapezoid(g1_f * dx_dtheta, theta)
        if captured < (1.0 - 1e-6) * total:
            raise WindowError(
                f"window captured {captured:.9f} of {total:.9f} at t={t}")
        for (k, r) in norms:
            g = g1_f if k == 1 else g2_f
            if r == math.inf:
                values[(k, r)][i] = np.max(np.abs(g))
            elif r == 1:
                values[(k, r)][i] = np.trapezoid(np.abs(g) * dx_dtheta, theta)
            else:
                values[(k, r)][i] = math.sqrt(
                    np.trapezoid(g * g * dx_dtheta, theta))

    from .diagnostics import decay_rate_fit
    from .errors import FitError

    fits = {}
    for key in norms:
        try:
            fits[key] = decay_rate_fit(times, values[key], fit_window)
        except FitError:
            fits[key] = None
    return RateTable(field_name, times, list(norms), values, fits, tuple(fit_window))
