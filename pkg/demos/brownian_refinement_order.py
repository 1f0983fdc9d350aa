"""Measure the strong convergence order of the Euler scheme.

Each coarse step size is compared against a fine simulation driven by the
same Brownian path, obtained by Levy midpoint refinement of the coarse
increments. The error should scale like sqrt(h).
"""

import math

import numpy as np

from pantolab import models, sdesim


def strong_error(model, h, n_paths=200, seed=2024, levels=4):
    n = int(round(1.0 / h))
    errs = np.empty(n_paths)
    for k in range(n_paths):
        stream = sdesim.RandomStreamSpec(seed, k)
        fine_dw = sdesim.brownian_refinement(stream, n, h, levels)
        coarse = sdesim.simulate_path(model, 1.0, h, 1.0, stream)
        fine = sdesim.simulate_path(model, 1.0, h / 2 ** levels, 1.0, stream,
                                    _dW=fine_dw)
        errs[k] = (coarse.values[-1] - fine.values[-1]) ** 2
    return math.sqrt(errs.mean())


def main():
    model = models.ScalarPantographModel(a=-1.0, b=0.5, sigma=0.3, rho=0.2, q=0.5)
    hs = [0.04, 0.02, 0.01]
    errors = [strong_error(model, h) for h in hs]
    print("   h      strong error   ratio")
    prev = None
    for h, e in zip(hs, errors):
        ratio = "" if prev is None else f"{prev / e:.3f}"
        print(f" {h:.3f}   {e:.6f}      {ratio}")
        prev = e
    print("expected ratio per halving: sqrt(2) ~ 1.414")


if __name__ == "__main__":
    main()
