"""Stability of a coupled 2x2 stochastic pantograph system.

Solves the Lyapunov equation for the drift matrix, reports the
mean-square exponent from the eta-search, and verifies the claimed decay
against a simulated ensemble.
"""

import numpy as np

from pantolab import exponents, linalg, models, sdesim, stats


def main():
    A = np.array([[-2.0, 0.3], [0.0, -1.5]])
    model = models.MatrixModel(
        A=A, B=0.2 * np.eye(2), Sigma=0.1 * np.eye(2),
        Theta=0.05 * np.eye(2), q=0.5, d=2)

    C = linalg.solve_lyapunov(A)
    resid = np.linalg.norm(A.T @ C + C @ A + np.eye(2), ord="fro")
    print(f"Lyapunov residual: {resid:.2e}")

    report = exponents.matrix_classify(model, mode="sharp")
    print(f"regime: {report.regime}, alpha: {report.alpha_mean:.4f}, "
          f"stable: {report.stable_mean}")

    ensemble = sdesim.Ensemble(
        model=model,
        x0_spec=models.InitialCondition(kind="deterministic", value=[1.0, -1.0]),
        h=0.02, T=200.0, n_paths=2000, master_seed=77)
    curve = stats.collect(ensemble, p_orders=(2,)).curves[2]
    fit = stats.fit_polynomial_exponent(curve, (20.0, 200.0))
    print(f"simulated mean-square slope: {fit.value:.4f} "
          f"(bound {report.alpha_mean:.4f}, slack "
          f"{report.alpha_mean - fit.value:.4f})")
    ok = fit.value <= report.alpha_mean + 0.15
    print("bound respected" if ok else "bound visibly violated")


if __name__ == "__main__":
    main()
