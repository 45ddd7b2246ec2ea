"""Explore the relaxation across the rheology exponent p.

The stress sigma(v) = mu (1+v^2)^((p-1)/2) v interpolates from strongly
shear-thinning (small p) through Newtonian (p = 1) to shear-thickening
(p > 1).  This sweep runs the same perturbed-fan experiment for a list of
exponents, including values below one half where the effective viscosity
collapses quickly under large gradients, and reports how far the solution
is from the self-similar fan at the end of each run.  The numbers are
reported, not asserted: the sweep is exploratory.

Run:  python3 demos/04_rheology_sweep.py   (about a minute)
"""

import numpy as np

from viscwave import (
    ConvexFlux,
    GaussianPerturbation,
    Grid1D,
    RiemannData,
    SolverConfig,
    ViscosityModel,
    simulate,
)
from viscwave.errors import BlowupError

P_VALUES = (0.4, 0.45, 0.5, 0.6, 1.0, 1.5)

flux = ConvexFlux.burgers()
riemann = RiemannData(-0.5, 0.5)
t_end = 20.0
grid = Grid1D(-35.0, 35.0, 700)

print("   p    status      sup|u-u^r|(T)   max<dphi/dx>    steps")
for p in P_VALUES:
    config = SolverConfig(
        flux=flux,
        viscosity=ViscosityModel.carreau(mu=1.0, p=p),
        riemann=riemann,
        grid=grid,
        t_end=t_end,
        snapshot_times=(5.0, 10.0),
        perturbation=GaussianPerturbation(0.3, 0.0, 2.0),
    )
    try:
        result = simulate(config)
    except BlowupError as exc:
        print(f"{p:5.2f}   blowup      ({exc})")
        continue
    final = result.records[-1]
    bracket = np.sqrt(1.0 + max(r.linf_dxphi for r in result.records) ** 2)
    print(f"{p:5.2f}   completed   {final.sup_dev_exact:.6f}       "
          f"{bracket:.6f}      {result.n_steps}")

print("\nAll the exponents above relax toward the fan at this amplitude; "
      "the sweep is the tool for probing how the margin changes as p "
      "decreases toward the strongly shear-thinning regime.")
