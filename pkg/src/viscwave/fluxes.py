"""Convective and viscous flux models.

The convective flux ``f`` is a convex polynomial with strictly increasing
derivative; the viscous flux ``sigma`` relates the stress to the gradient
``v = du/dx`` and comes in two built-in forms:

* Carreau:    sigma(v) = mu * (1 + v^2)^((p-1)/2) * v   (smooth, sigma'(0) = mu)
* power law:  sigma(v) = mu * |v|^(p-1) * v             (degenerate at v = 0)

``p = 1`` reduces both to the Newtonian stress mu*v; ``p < 1`` is the
shear-thinning (pseudo-plastic) regime, ``p > 1`` shear-thickening.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BracketError, ConvergenceError, DegenerateError, DomainError

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 100

CARREAU = "carreau"
POWER_LAW = "power_law"


def _polyval(coeffs: tuple[float, ...], u):
    return np.polynomial.polynomial.polyval(u, np.asarray(coeffs))


def _polyder(coeffs: tuple[float, ...], order: int = 1) -> tuple[float, ...]:
    c = np.polynomial.polynomial.polyder(np.asarray(coeffs), m=order)
    return tuple(float(x) for x in c)


@dataclass(frozen=True)
class ConvexFlux:
    """Polynomial convective flux with f'' > 0 on the working interval."""

    kind: str
    coefficients: tuple[float, ...]

    @classmethod
    def burgers(cls) -> "ConvexFlux":
        """f(u) = u^2 / 2."""
        return cls("burgers", (0.0, 0.0, 0.5))

    @classmethod
    def quartic(cls) -> "ConvexFlux":
        """Regularized quartic f(u) = u^2/2 + u^4/12 (f'' = 1 + u^2 > 0)."""
        return cls("quartic", (0.0, 0.0, 0.5, 0.0, 1.0 / 12.0))

    @classmethod
    def polynomial(cls, coefficients) -> "ConvexFlux":
        """User polynomial, ascending powers. Convexity is checked on use."""
        return cls("polynomial", tuple(float(c) for c in coefficients))

    def value(self, u):
        if self.kind == "burgers":
            return 0.5 * u * u
        return _polyval(self.coefficients, u)

    def prime(self, u):
        if self.kind == "burgers":
            return u * 1.0 if np.isscalar(u) else np.asarray(u, dtype=float)
        return _polyval(_polyder(self.coefficients, 1), u)

    def second(self, u):
        if self.kind == "burgers":
            return 1.0 if np.isscalar(u) else np.ones_like(np.asarray(u, dtype=float))
        return _polyval(_polyder(self.coefficients, 2), u)

    def third(self, u):
        if self.kind == "burgers":
            return 0.0 if np.isscalar(u) else np.zeros_like(np.asarray(u, dtype=float))
        return _polyval(_polyder(self.coefficients, 3), u)

    def assert_convex_on(self, lo: float, hi: float, samples: int = 1000) -> None:
        """Raise DomainError unless f'' > 0 at every sampled point of [lo, hi]."""
        u = np.linspace(lo, hi, samples)
        if not np.all(self.second(u) > 0.0):
            raise DomainError(
                f"flux {self.kind} is not convex on [{lo}, {hi}]"
            )

    def prime_inverse(self, xi: float, lo: float, hi: float) -> float:
        """Solve f'(u) = xi on [lo, hi] by safeguarded Newton.

        Residual tolerance 1e-12 with bisection fallback; for the Burgers
        flux the first Newton step lands on xi exactly.
        """
        flo = float(self.prime(lo))
        fhi = float(self.prime(hi))
        if not (flo - NEWTON_TOL <= xi <= fhi + NEWTON_TOL):
            raise BracketError(
                f"xi={xi} outside [f'({lo}), f'({hi})] = [{flo}, {fhi}]"
            )
        a, b = float(lo), float(hi)
        u = 0.5 * (a + b)
        for _ in range(NEWTON_MAX_ITER):
            r = float(self.prime(u)) - xi
            if abs(r) < NEWTON_TOL:
                return u
            if r > 0.0:
                b = u
            else:
                a = u
            d = float(self.second(u))
            u_new = u - r / d if d > 0.0 else 0.5 * (a + b)
            if not (a < u_new < b) or not np.isfinite(u_new):
                u_new = 0.5 * (a + b)
            u = u_new
        if abs(float(self.prime(u)) - xi) < NEWTON_TOL:
            return u
        raise ConvergenceError(f"prime_inverse failed for xi={xi} on [{lo}, {hi}]")

    def prime_inverse_array(self, xi, lo: float, hi: float) -> np.ndarray:
        """Vectorized prime_inverse over an array of targets."""
        xi = np.asarray(xi, dtype=float)
        flo = float(self.prime(lo))
        fhi = float(self.prime(hi))
        if np.any(xi < flo - NEWTON_TOL) or np.any(xi > fhi + NEWTON_TOL):
            raise BracketError(f"targets outside [f'({lo}), f'({hi})]")
        if self.kind == "burgers":
            return xi.copy()
        a = np.full_like(xi, float(lo))
        b = np.full_like(xi, float(hi))
        u = 0.5 * (a + b)
        for _ in range(NEWTON_MAX_ITER):
            r = self.prime(u) - xi
            done = np.abs(r) < NEWTON_TOL
            if done.all():
                return u
            b = np.where(r > 0.0, u, b)
            a = np.where(r <= 0.0, u, a)
            d = self.second(u)
            with np.errstate(divide="ignore", invalid="ignore"):
                u_new = u - r / d
            bad = ~np.isfinite(u_new) | (u_new <= a) | (u_new >= b)
            u_new = np.where(bad, 0.5 * (a + b), u_new)
            u = np.where(done, u, u_new)
        if np.all(np.abs(self.prime(u) - xi) < NEWTON_TOL):
            return u
        raise ConvergenceError("prime_inverse_array failed to converge")


@dataclass(frozen=True)
class ViscosityModel:
    """Viscous stress sigma(v) with coefficient mu > 0 and exponent p > 0."""

    form: str
    mu: float
    p: float

    def __post_init__(self):
        if self.form not in (CARREAU, POWER_LAW):
            raise DomainError(f"unknown viscosity form: {self.form!r}")
        if not self.mu > 0.0:
            raise DomainError("viscosity coefficient mu must be positive")
        if not self.p > 0.0:
            raise DomainError("rheology exponent p must be positive")

    @classmethod
    def carreau(cls, mu: float = 1.0, p: float = 1.0) -> "ViscosityModel":
        return cls(CARREAU, mu, p)

    @classmethod
    def power_law(cls, mu: float = 1.0, p: float = 1.0) -> "ViscosityModel":
        return cls(POWER_LAW, mu, p)

    @property
    def degenerate(self) -> bool:
        """True when sigma' is unbounded at v = 0 (power law with p < 1)."""
        return self.form == POWER_LAW and self.p < 1.0

    def value(self, v):
        if self.form == CARREAU:
            if self.p == 1.0:
                return self.mu * np.asarray(v, dtype=float) if not np.isscalar(v) else self.mu * v
            return self.mu * v * np.power(1.0 + np.square(v), 0.5 * (self.p - 1.0))
        # power law: mu*|v|^(p-1)*v with the limit value 0 at v = 0
        v_arr = np.asarray(v, dtype=float)
        av = np.abs(v_arr)
        safe = np.where(av == 0.0, 1.0, av)
        out = self.mu * np.power(safe, self.p - 1.0) * v_arr
        out = np.where(av == 0.0, 0.0, out)
        return float(out) if np.isscalar(v) else out

    def prime(self, v):
        if self.form == CARREAU:
            if self.p == 1.0:
                return self.mu * np.ones_like(np.asarray(v, dtype=float)) if not np.isscalar(v) else self.mu
            w = 1.0 + np.square(v)
            return self.mu * np.power(w, 0.5 * (self.p - 3.0)) * (1.0 + self.p * np.square(v))
        v_arr = np.asarray(v, dtype=float)
        av = np.abs(v_arr)
        if self.p < 1.0 and np.any(av == 0.0):
            raise DegenerateError("power-law sigma' is unbounded at v = 0 for p < 1")
        if self.p == 1.0:
            out = np.full_like(av, self.mu)
        else:
            safe = np.where(av == 0.0, 1.0, av)
            out = self.mu * self.p * np.power(safe, self.p - 1.0)
            out = np.where(av == 0.0, 0.0, out)  # p > 1 limit
        return float(out) if np.isscalar(v) else out

    def diffusive_scale(self, v) -> float:
        """max sigma'(v_i) over the supplied gradients, for time-step control."""
        return float(np.max(self.prime(v)))
