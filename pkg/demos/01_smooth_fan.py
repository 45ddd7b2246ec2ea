"""Build the smooth expanding-fan profile and inspect its basic properties.

The fan connecting far fields u- < u+ is approximated by a smooth profile
constructed with the method of characteristics: every point (t, x) is traced
back to its foot x0 solving x = x0 + w0(x0) t, and the profile value is the
initial datum at the foot.  Spatial derivatives come out in closed form, so
the profile is a discretization-free reference solution.

Run:  python3 demos/01_smooth_fan.py
"""

import numpy as np

from viscwave import ConvexFlux, RiemannData, SmoothRarefaction, SmoothWave
from viscwave.svg import line_plot

wave = SmoothWave(w_minus=-0.5, w_plus=0.5, q=1.0)

print("tail exponent q =", wave.q, " normalization K_q =", wave.k_q)
print("midpoint value w0(0) =", wave.initial(0.0))
print("far fields: w0(-1e9) =", wave.initial(-1e9), " w0(+1e9) =", wave.initial(1e9))

# how a single point is traced back along its characteristic
t, x = 10.0, 3.0
x0 = wave.foot(t, x)
print(f"\nfoot of (t={t}, x={x}): x0 = {x0:.12f}")
print("residual of the implicit equation:", x0 + wave.initial(x0) * t - x)

# the profile flattens: its slope at the fan center decays like 1/t
print("\n t      max dw/dx     max |d2w/dx2|")
for tt in (1.0, 10.0, 100.0, 1000.0):
    xs = np.linspace(-0.6 * tt - 20, 0.6 * tt + 20, 2001)
    _, wx, wxx = wave.profile(tt, xs)
    print(f"{tt:7.0f}  {wx.max():.6e}  {np.abs(wxx).max():.6e}")

# the transformed profile U for a non-quadratic convex flux, and its
# approach to the self-similar fan u^r(x/t)
flux = ConvexFlux.quartic()
riemann = RiemannData(-0.5, 0.5)
rare = SmoothRarefaction.build(flux, riemann, q=1.0)

print("\n t      sup |U - u^r|   (self-similar convergence)")
for k in range(3, 11):
    tt = float(2**k)
    xs = np.linspace(-0.8 * tt - 50, 0.8 * tt + 50, 4001)
    sup = float(np.max(np.abs(rare.U(tt, xs) - rare.exact(xs / tt))))
    print(f"{tt:7.0f}  {sup:.6f}")

# picture: profiles at a few times
xs = np.linspace(-80, 80, 1201)
series = [(f"t={tt:g}", xs, rare.U(tt, xs)) for tt in (0.0, 20.0, 100.0)]
series.append(("u^r at t=100", xs, rare.exact(xs / 100.0)))
svg_text = line_plot(series, title="smooth fan vs self-similar fan",
                     xlabel="x", ylabel="u")
with open("demo_smooth_fan.svg", "w") as fh:
    fh.write(svg_text)
print("\nwrote demo_smooth_fan.svg")
