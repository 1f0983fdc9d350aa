"""Three deterministic regimes of x'(t) = a x(t) + b x(q t).

Negative a gives polynomial decay with exponent solving a + |b| q^g = 0;
a = 0 gives subexponential growth tracked by the classical profile psi;
positive a is capped by plain exponential growth.
"""

import math

import numpy as np

from pantolab import detsolver


def main():
    # 1. polynomial decay: slope of log x vs log t approaches -1
    sol = detsolver.solve_pantograph_ode(-2.0, 1.0, 0.5, 1.0, 2000.0, h=0.02)
    targets = np.geomspace(200.0, 2000.0, 24)
    idx = np.unique(np.round(targets / 0.02).astype(int))
    slope = np.polyfit(np.log(idx * 0.02), np.log(sol.values[idx]), 1)[0]
    print(f"a=-2, b=1, q=1/2: late-time slope {slope:.5f} (exponent -1)")

    # 2. a = 0: log x grows like (log t)^2 / (2 log(1/q))
    sub = detsolver.solve_pantograph_ode(0.0, 1.0, 0.5, 100.0, 1.0e5, h=0.2)
    t = 1.0e5
    ratio = math.log(float(sub(t))) / math.log(t) ** 2
    print(f"a=0,  b=1, q=1/2: log x/(log t)^2 = {ratio:.5f} "
          f"(limit {1.0 / (2.0 * math.log(2.0)):.5f}, slow convergence)")
    psi = detsolver.kato_mcleod_psi(0.5, 1.0, t)
    print(f"                  profile psi({t:.0e}) = {psi:.4e}")

    # 3. a > 0: growth rate pinned to a, delay term subdominant
    grow = detsolver.solve_multi_pantograph_ode(1.0, [0.5], [0.5], 1.0, 60.0, h=0.01)
    grid = grow.t_grid
    tail = grid >= 50.0
    rate = np.max(np.log(grow.values[tail]) / grid[tail])
    print(f"a=+1, b=1/2, q=1/2: log x/t <= {rate:.5f} on [50, 60] (rate 1)")


if __name__ == "__main__":
    main()
