"""Measure the decay exponents of the smooth fan's derivatives.

The fan slope obeys ||dw/dx||_{L^r} ~ (1+t)^(-1+1/r) and the curvature
||d2w/dx2||_{L^r} ~ (1+t)^(-1-(1/(2q))(1-1/r)); this script fits log-log
slopes over t in [1e2, 1e4] and compares them with those exponents for two
tail exponents q.

Run:  python3 demos/02_decay_rates.py
"""

import math

import numpy as np

from viscwave import SmoothWave, rate_table
from viscwave.svg import line_plot

NORMS = [(1, 1), (1, 2), (1, math.inf), (2, 1), (2, 2), (2, math.inf)]


def expected_slope(k, r, q):
    rr = 0.0 if r == math.inf else 1.0 / r
    if k == 1:
        return -1.0 + rr
    return -1.0 - (1.0 / (2.0 * q)) * (1.0 - rr)


times = np.logspace(2, 4, 25)
for q in (1.0, 1.5):
    wave = SmoothWave(-0.5, 0.5, q)
    tbl = rate_table(wave, times, NORMS)
    print(f"\nq = {q}:  (k = derivative order, r = norm)")
    print(" k  r     fitted    expected   residual")
    for (k, r) in NORMS:
        fit = tbl.slope(k, r)
        exp_s = expected_slope(k, r, q)
        rname = "inf" if r == math.inf else str(r)
        print(f" {k}  {rname:>3}   {fit.slope:+.4f}   {exp_s:+.4f}    "
              f"{abs(fit.slope - exp_s):.4f}")
    if q == 1.0:
        series = [(f"k={k},r={'inf' if r == math.inf else r}",
                   times, tbl.column(k, r)) for (k, r) in NORMS]
        text = line_plot(series, title="fan derivative decay (q=1)",
                         xlabel="t", ylabel="norm", logx=True, logy=True)
        with open("demo_decay_rates.svg", "w") as fh:
            fh.write(text)
        print("wrote demo_decay_rates.svg")

print("\nnote: the L1 norm of dw/dx is exactly the far-field jump at every "
      "time (the profile is monotone), so its fitted slope is zero.")
