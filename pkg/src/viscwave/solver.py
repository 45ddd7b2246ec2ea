"""Conservative finite-difference integrator on a truncated line.

Node-centered uniform grid with faces at midpoints.  The face flux combines
a local Lax-Friedrichs (Rusanov) convective part with a two-point viscous
part sigma((u_{i+1}-u_i)/dx); explicit SSP Runge-Kutta in time under both an
advective and a diffusive CFL bound.  Far-field values are pinned at the two
end nodes, and the domain is sized so the fan never reaches them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BlowupError, ConfigError, ConvergenceError, DomainError
from .fluxes import ConvexFlux, ViscosityModel
from .waves import RiemannData, SmoothRarefaction
from . import diagnostics

DEFAULT_DX = 0.05
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class Grid1D:
    """Uniform node grid on [x_min, x_max] with n_cells intervals."""

    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self):
        if self.n_cells < 4:
            raise ConfigError("grid needs at least 4 cells")
        if not self.x_max > self.x_min:
            raise ConfigError("grid requires x_max > x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_cells + 1)


def default_margin(t_end: float, speed_spread: float) -> float:
    """Containment margin keeping boundary influence below scheme error."""
    return 20.0 + 0.1 * t_end * speed_spread


def auto_grid(flux: ConvexFlux, riemann: RiemannData, t_end: float,
              dx_target: float = DEFAULT_DX, pure_diffusion: bool = False) -> Grid1D:
    """Domain [f'(u-)T - M, f'(u+)T + M] with dx <= dx_target."""
    lam_minus, lam_plus = (0.0, 0.0) if pure_diffusion else riemann.speeds(flux)
    margin = default_margin(t_end, lam_plus - lam_minus)
    x_min = lam_minus * t_end - margin
    x_max = lam_plus * t_end + margin
    n_cells = int(math.ceil((x_max - x_min) / dx_target))
    return Grid1D(x_min, x_max, n_cells)


# --- initial perturbations -------------------------------------------------

@dataclass(frozen=True)
class NoPerturbation:
    def evaluate(self, x: np.ndarray, dx: float) -> np.ndarray:
        return np.zeros_like(x)

    def spec_string(self) -> str:
        return "none"


@dataclass(frozen=True)
class GaussianPerturbation:
    amplitude: float
    center: float
    width: float

    def evaluate(self, x: np.ndarray, dx: float) -> np.ndarray:
        z = (x - self.center) / self.width
        return self.amplitude * np.exp(-0.5 * z * z)

    def spec_string(self) -> str:
        return f"gaussian:a={self.amplitude!r},c={self.center!r},s={self.width!r}"


@dataclass(frozen=True)
class SinePacket:
    amplitude: float
    center: float
    width: float
    wavenumber: float

    def evaluate(self, x: np.ndarray, dx: float) -> np.ndarray:
        z = (x - self.center) / self.width
        return (self.amplitude * np.exp(-0.5 * z * z)
                * np.sin(self.wavenumber * (x - self.center)))

    def spec_string(self) -> str:
        return (f"sine:a={self.amplitude!r},c={self.center!r},"
                f"s={self.width!r},k={self.wavenumber!r}")


@dataclass(frozen=True)
class RandomSmooth:
    """Seeded filtered noise, mollified to C2 and tapered at the ends."""

    amplitude: float
    seed: int
    correlation_length: float

    def evaluate(self, x: np.ndarray, dx: float) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        white = rng.standard_normal(x.size)
        m = max(2, int(round(4.0 * self.correlation_length / dx)))
        xk = np.arange(-m, m + 1) * dx
        kern = np.exp(-0.5 * (xk / self.correlation_length) ** 2)
        kern /= kern.sum()
        smooth = np.convolve(white, kern, mode="same")
        center = 0.5 * (x[0] + x[-1])
        half_width = 0.5 * (x[-1] - x[0])
        # envelope drives the ends to ~1e-14 of the peak
        env = np.exp(-0.5 * ((x - center) / (half_width / 8.0)) ** 2)
        bump = smooth * env
        peak = float(np.max(np.abs(bump)))
        if peak == 0.0:
            return np.zeros_like(x)
        return self.amplitude * bump / peak

    def spec_string(self) -> str:
        return (f"random:a={self.amplitude!r},seed={self.seed},"
                f"ell={self.correlation_length!r}")


def parse_perturbation(spec: str):
    """Parse a perturbation spec string (see each class's spec_string)."""
    spec = spec.strip()
    if spec == "none":
        return NoPerturbation()
    if ":" not in spec:
        raise ConfigError(f"malformed perturbation spec: {spec!r}")
    kind, _, body = spec.partition(":")
    try:
        kv = dict(item.split("=", 1) for item in body.split(",") if item)
    except ValueError as exc:
        raise ConfigError(f"malformed perturbation spec: {spec!r}") from exc
    try:
        if kind == "gaussian":
            return GaussianPerturbation(float(kv["a"]), float(kv["c"]), float(kv["s"]))
        if kind == "sine":
            return SinePacket(float(kv["a"]), float(kv["c"]),
                              float(kv["s"]), float(kv["k"]))
        if kind == "random":
            return RandomSmooth(float(kv["a"]), int(kv["seed"]), float(kv["ell"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad perturbation parameters in {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown perturbation kind: {kind!r}")


# --- state and configuration ----------------------------------------------

@dataclass
class State:
    """Node samples of u at time t; end nodes hold the far fields exactly."""

    t: float
    x: np.ndarray
    values: np.ndarray

    def copy(self) -> "State":
        return State(self.t, self.x, self.values.copy())


@dataclass(frozen=True)
class SolverConfig:
    flux: ConvexFlux
    viscosity: ViscosityModel
    riemann: RiemannData
    grid: Grid1D
    t_end: float
    cfl_advective: float = 0.4
    cfl_diffusive: float = 0.4
    integrator: str = "rk2"
    snapshot_times: tuple = ()
    perturbation: object = field(default_factory=NoPerturbation)
    q: float = 1.0
    pure_diffusion: bool = False
    fan_margin: float | None = None

    def validate(self) -> None:
        if self.t_end < 0.0:
            raise ConfigError("t_end must be non-negative")
        for name in ("cfl_advective", "cfl_diffusive"):
            c = getattr(self, name)
            if not 0.0 < c <= 1.0:
                raise ConfigError(f"{name} must lie in (0, 1], got {c}")
        if self.integrator not in ("rk2", "rk3"):
            raise ConfigError(f"unknown integrator {self.integrator!r}")
        if self.viscosity.degenerate:
            raise ConfigError(
                "power-law viscosity with p < 1 has unbounded sigma' at 0; "
                "use the Carreau form for the pseudo-plastic regime")
        for t in self.snapshot_times:
            if not 0.0 <= t <= self.t_end:
                raise ConfigError(f"snapshot time {t} outside [0, {self.t_end}]")
        try:
            self.flux.assert_convex_on(self.riemann.u_minus - 1.0,
                                       self.riemann.u_plus + 1.0)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        lam_minus, lam_plus = (0.0, 0.0) if self.pure_diffusion \
            else self.riemann.speeds(self.flux)
        margin = self.fan_margin if self.fan_margin is not None \
            else default_margin(self.t_end, lam_plus - lam_minus)
        if (self.grid.x_min > lam_minus * self.t_end - margin + 1e-9
                or self.grid.x_max < lam_plus * self.t_end + margin - 1e-9):
            raise ConfigError(
                f"grid [{self.grid.x_min}, {self.grid.x_max}] does not contain "
                f"the fan plus margin {margin:.3g} up to t={self.t_end}")


def initial_condition(config: SolverConfig,
                      rarefaction: SmoothRarefaction | None = None) -> State:
    """u(0, x) = U(0, x) + phi0(x) with the far fields pinned at the ends."""
    if rarefaction is None:
        rarefaction = SmoothRarefaction.build(config.flux, config.riemann, config.q)
    x = config.grid.nodes()
    phi0 = config.perturbation.evaluate(x, config.grid.dx)
    if abs(phi0[0]) > BOUNDARY_TOL or abs(phi0[-1]) > BOUNDARY_TOL:
        raise ConfigError(
            f"perturbation does not vanish at the boundary "
            f"({phi0[0]:.3e}, {phi0[-1]:.3e}); far-field pinning inconsistent")
    values = rarefaction.U(0.0, x) + phi0
    values[0] = config.riemann.u_minus
    values[-1] = config.riemann.u_plus
    return State(0.0, x, values)


# --- spatial operator and time stepping ------------------------------------

def rhs(values: np.ndarray, config: SolverConfig):
    """du/dt at interior nodes plus the face-flux array.

    Conservative form: (du/dt)_i = -(F_{i+1/2} - F_{i-1/2})/dx with
    F = Rusanov convective flux minus sigma of the two-point gradient.
    """
    dx = config.grid.dx
    du = values[1:] - values[:-1]
    visc = config.viscosity.value(du / dx)
    if config.pure_diffusion:
        faces = -visc
    else:
        f = config.flux.value(values)
        speed = np.abs(config.flux.prime(values))
        alpha = np.maximum(speed[:-1], speed[1:])
        faces = 0.5 * (f[:-1] + f[1:]) - 0.5 * alpha * du - visc
    dudt = -(faces[1:] - faces[:-1]) / dx
    return dudt, faces


def cfl_dt(values: np.ndarray, config: SolverConfig) -> float:
    """min(cfl_adv*dx/alpha_max, cfl_diff*dx^2/(2*sigma'_max)); inf if both idle."""
    dx = config.grid.dx
    dt = math.inf
    if not config.pure_diffusion:
        alpha_max = float(np.max(np.abs(config.flux.prime(values))))
        if alpha_max > 0.0:
            dt = config.cfl_advective * dx / alpha_max
    sp_max = config.viscosity.diffusive_scale(np.diff(values) / dx)
    if sp_max > 0.0:
        dt = min(dt, config.cfl_diffusive * dx * dx / (2.0 * sp_max))
    return dt


def step(state: State, config: SolverConfig, dt_max: float = math.inf):
    """One SSP Runge-Kutta step; returns (new state, dt*(F_right - F_left)).

    dt honors both CFL bounds and is clipped to dt_max so snapshot times are
    hit exactly.  Raises BlowupError when the solution leaves the admissible
    range 10*max|u_pm| + 10 or goes non-finite.
    """
    dt = min(cfl_dt(state.values, config), dt_max)
    if not (dt > 0.0 and math.isfinite(dt)):
        raise ConvergenceError(f"cannot choose a positive finite time step (dt={dt})")
    u = state.values
    if config.integrator == "rk2":
        l0, f0 = rhs(u, config)
        u1 = u.copy()
        u1[1:-1] += dt * l0
        l1, f1 = rhs(u1, config)
        un = u.copy()
        un[1:-1] = 0.5 * (u[1:-1] + u1[1:-1] + dt * l1)
        flux_diff = 0.5 * ((f0[-1] - f0[0]) + (f1[-1] - f1[0]))
    else:
        l0, f0 = rhs(u, config)
        u1 = u.copy()
        u1[1:-1] += dt * l0
        l1, f1 = rhs(u1, config)
        u2 = u.copy()
        u2[1:-1] = 0.75 * u[1:-1] + 0.25 * (u1[1:-1] + dt * l1)
        l2, f2 = rhs(u2, config)
        un = u.copy()
        un[1:-1] = (u[1:-1] + 2.0 * (u2[1:-1] + dt * l2)) / 3.0
        flux_diff = ((f0[-1] - f0[0]) + (f1[-1] - f1[0])
                     + 4.0 * (f2[-1] - f2[0])) / 6.0
    limit = 10.0 * max(abs(config.riemann.u_minus), abs(config.riemann.u_plus)) + 10.0
    if not np.all(np.isfinite(un)) or float(np.max(np.abs(un))) > limit:
        raise BlowupError(f"solution left admissible range at t={state.t + dt:.6g}")
    return State(state.t + dt, state.x, un), dt * flux_diff


@dataclass
class SimulationResult:
    snapshots: list
    records: list
    boundary_flux_integral: float
    mass_initial: float
    mass_final: float
    n_steps: int

    def mass_balance_error(self) -> float:
        """|d(mass) + time-integrated boundary flux difference|."""
        return abs(self.mass_final - self.mass_initial + self.boundary_flux_integral)


def _interior_mass(values: np.ndarray, dx: float) -> float:
    return dx * float(np.sum(values[1:-1]))


def simulate(config: SolverConfig) -> SimulationResult:
    """Integrate to t_end, recording snapshots and diagnostics on the way.

    Snapshot times always include 0 and t_end; runs are deterministic for a
    fixed configuration (including any perturbation seed).
    """
    config.validate()
    rare = SmoothRarefaction.build(config.flux, config.riemann, config.q)
    state = initial_condition(config, rare)
    dx = config.grid.dx
    times = sorted({0.0, float(config.t_end), *(float(t) for t in config.snapshot_times)})

    snapshots = [state.copy()]
    records = [diagnostics.evaluate_record(
        0.0, state.values, state.x, dx, rare, config.viscosity.p)]
    mass0 = _interior_mass(state.values, dx)
    flux_integral = 0.0
    n_steps = 0
    for target in times[1:]:
        while state.t < target - 1e-12:
            state, dfi = step(state, config, dt_max=target - state.t)
            flux_integral += dfi
            n_steps += 1
        state.t = target
        snapshots.append(state.copy())
        records.append(diagnostics.evaluate_record(
            target, state.values, state.x, dx, rare, config.viscosity.p,
            prev=records[-1]))
    return SimulationResult(
        snapshots=snapshots,
        records=records,
        boundary_flux_integral=flux_integral,
        mass_initial=mass0,
        mass_final=_interior_mass(state.values, dx),
        n_steps=n_steps,
    )


# --- grid refinement verification ------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    n_cells: int
    error: float
    observed_order: float


def restriction_error(coarse: np.ndarray, fine: np.ndarray, dx_coarse: float) -> float:
    """Discrete L2 distance between a coarse field and a nested refinement."""
    stride = (fine.size - 1) // (coarse.size - 1)
    if stride * (coarse.size - 1) != fine.size - 1:
        raise ConfigError("fine grid nodes do not nest the coarse nodes")
    diff = coarse - fine[::stride]
    return math.sqrt(dx_coarse * float(np.sum(diff * diff)))


def convergence_study(config: SolverConfig, refinements: int) -> list[ConvergenceRow]:
    """Self-refinement error table; finest grid is the reference solution."""
    if refinements < 2:
        raise ConfigError("need at least 2 refinements")
    if not isinstance(config.perturbation, (NoPerturbation, GaussianPerturbation)):
        raise ConfigError("convergence study requires smooth initial data")
    finals = []
    cells = []
    for k in range(refinements + 1):
        n = config.grid.n_cells * 2**k
        cfg = replace(config, grid=Grid1D(config.grid.x_min, config.grid.x_max, n),
                      snapshot_times=())
        result = simulate(cfg)
        finals.append(result.snapshots[-1].values)
        cells.append(n)
    rows = []
    errors = []
    for k in range(refinements):
        dx_k = (config.grid.x_max - config.grid.x_min) / cells[k]
        errors.append(restriction_error(finals[k], finals[-1], dx_k))
    for k in range(refinements):
        order = math.nan if k == 0 else math.log2(errors[k - 1] / errors[k])
        rows.append(ConvergenceRow(cells[k], errors[k], order))
    return rows
