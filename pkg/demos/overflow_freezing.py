"""Exploding paths are frozen, not propagated as NaN.

An unstable model is run until some paths cross the overflow guard. The
frozen fraction is reported and the ensemble statistics stay finite.
"""

import numpy as np

from pantolab import models, sdesim, stats


def main():
    model = models.ScalarPantographModel(a=2.0, b=0.5, sigma=1.5, rho=0.0, q=0.5)
    ensemble = sdesim.Ensemble(
        model=model,
        x0_spec=models.InitialCondition(kind="deterministic", value=1.0e120),
        h=0.01, T=120.0, n_paths=500, master_seed=8)

    n_frozen = 0
    first_freeze = None
    for lo, hi, block, freeze in ensemble.chunks():
        assert np.all(np.isfinite(block))
        hit = freeze >= 0
        n_frozen += int(hit.sum())
        if hit.any():
            t0 = freeze[hit].min() * ensemble.h
            first_freeze = t0 if first_freeze is None else min(first_freeze, t0)

    print(f"paths: {ensemble.n_paths}, frozen: {n_frozen} "
          f"({100.0 * n_frozen / ensemble.n_paths:.1f}%)")
    if first_freeze is not None:
        print(f"earliest freeze at t = {first_freeze:.2f}")

    # moment curves exclude frozen paths past their freeze time but the
    # almost-sure statistic keeps them (a frozen path's sup is final)
    bundle = stats.collect(ensemble, p_orders=(1,), as_kinds=("exponential",))
    curve = bundle.curves[1]
    print(f"excluded at final node: {int(curve.n_excluded[-1])}")
    est = bundle.as_estimates["exponential"]
    print(f"a.s. exponential statistic (95th pct): {est.value:.4f} "
          f"over {est.n_paths} paths")


if __name__ == "__main__":
    main()
