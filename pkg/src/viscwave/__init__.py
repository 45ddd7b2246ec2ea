"""1-D laboratory for viscous conservation laws with non-Newtonian stress.

Builds exact and smoothed expanding-fan (rarefaction) profiles, integrates
the Cauchy problem on truncated domains with Carreau or power-law viscosity,
and monitors the norms and energy functionals that govern the long-time
relaxation of the solution toward the fan.
"""

from .errors import (
    BlowupError,
    BracketError,
    ConfigError,
    ConvergenceError,
    DegenerateError,
    DomainError,
    FitError,
    NegativeWeightError,
    PreconditionError,
    ViscwaveError,
    WindowError,
)
from .fluxes import CARREAU, POWER_LAW, ConvexFlux, ViscosityModel
from .waves import (
    RiemannData,
    SmoothRarefaction,
    SmoothWave,
    burgers_initial,
    characteristic_foot,
    exact_rarefaction,
    kq_constant,
    rate_table,
    smooth_U,
    smooth_w,
)
from .solver import (
    GaussianPerturbation,
    Grid1D,
    NoPerturbation,
    RandomSmooth,
    SinePacket,
    SimulationResult,
    SolverConfig,
    State,
    auto_grid,
    cfl_dt,
    convergence_study,
    initial_condition,
    parse_perturbation,
    rhs,
    simulate,
    step,
)
from .diagnostics import (
    DiagnosticsRecord,
    bracket_weight,
    decay_rate_fit,
    essential_sup_bracket,
    evaluate_record,
    interpolation_check,
    lp_norm,
    q_functional,
    run_summary,
    sobolev_check,
    sup_deviation,
    weighted_mass,
)

__version__ = "0.1.0"
