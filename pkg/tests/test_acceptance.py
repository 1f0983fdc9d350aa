"""Acceptance suite: one test per advertised guarantee, one verdict line each.

Each test prints `ACCEPTANCE n: PASS/FAIL` with the measured quantities so a
plain pytest run doubles as a checklist. Tolerances are stated inline; seeds
and step sizes are pinned so every run is reproducible.
"""

import filecmp
import json
import math

import numpy as np
import pytest

from pantolab import cli
from pantolab import detsolver as ds
from pantolab import exponents as ex
from pantolab import linalg
from pantolab import models
from pantolab import sdesim as sd
from pantolab import stats as stt
from conftest import eta_grid_alpha

S = models.ScalarPantographModel
X0 = models.InitialCondition(kind="deterministic", value=1.0)


def check(n, cond, detail):
    print(f"ACCEPTANCE {n}: {'PASS' if cond else 'FAIL'} ({detail})")
    assert cond, f"criterion {n} failed: {detail}"


@pytest.fixture(scope="module")
def sharp_mean_bundle():
    # shared ensemble for criteria 1 and 2: a=-1, b=0.5, sigma=0.2, q=1/2
    m = S(a=-1.0, b=0.5, sigma=0.2, rho=0.0, q=0.5)
    ens = sd.Ensemble(model=m, x0_spec=X0, h=0.01, T=200.0,
                      n_paths=20_000, master_seed=1001)
    return stt.collect(ens, p_orders=(1,))


def test_acceptance_1_sharp_first_mean_slope(sharp_mean_bundle):
    curve = sharp_mean_bundle.curves[1]
    fit = stt.fit_polynomial_exponent(curve, (50.0, 200.0))
    ok = -1.15 <= fit.value <= -0.85
    check(1, ok, f"fitted slope {fit.value:.4f} in [-1.15, -0.85], "
                 f"analytic alpha = -1")


def test_acceptance_2_first_mean_curve_vs_deterministic(sharp_mean_bundle):
    curve = sharp_mean_bundle.curves[1]
    ref = ds.solve_pantograph_ode(-1.0, 0.5, 0.5, 1.0, 200.0, h=0.01)
    t = np.asarray(curve.t_nodes)
    z = (np.asarray(curve.m_hat) - ref(t)) / np.asarray(curve.stderr)
    n_pass = int(np.sum(np.abs(z) <= 3.0))
    check(2, n_pass >= 29,
          f"{n_pass}/{len(t)} nodes within 3 standard errors of the "
          f"deterministic first-moment curve")


def test_acceptance_3_mean_square_alpha_vs_eta_grid_oracle():
    rng = np.random.default_rng(2026)
    worst = 0.0
    n_checked = 0
    while n_checked < 100:
        a = -float(rng.uniform(0.3, 5.0))
        sigma = float(rng.uniform(0.0, 1.0))
        if 2.0 * a + sigma ** 2 >= -0.05:
            continue
        b = float(rng.uniform(-2.0, 2.0))
        rho = float(rng.uniform(0.02, 1.0)) * (1.0 if rng.random() < 0.5 else -1.0)
        q = float(rng.uniform(0.1, 0.9))
        alpha = ex.mean_square_alpha(S(a=a, b=b, sigma=sigma, rho=rho, q=q))
        oracle = eta_grid_alpha(a, b, sigma, rho, q, n_eta=5_000)
        worst = max(worst, abs(alpha - oracle))
        n_checked += 1
    check(3, worst <= 1e-6,
          f"closed form vs eta-grid oracle on {n_checked} random models, "
          f"worst |diff| = {worst:.3e} <= 1e-6")


def test_acceptance_4_as_polynomial_bound():
    m = S(a=-3.0, b=1.0, sigma=0.2, rho=0.0, q=0.5)
    alpha = ex.first_mean_alpha(m)
    bound = alpha + 1.0 + 0.15
    ens = sd.Ensemble(model=m, x0_spec=X0, h=0.02, T=500.0,
                      n_paths=2000, master_seed=404)
    est = stt.collect(ens, as_kinds=("polynomial",)).as_estimates["polynomial"]
    check(4, est.value <= bound,
          f"95th-percentile pathwise exponent {est.value:.4f} <= "
          f"alpha+1+0.15 = {bound:.4f}")


def test_acceptance_5_exponential_regime():
    m = S(a=0.5, b=0.2, sigma=0.3, rho=0.1, q=0.5)
    ens = sd.Ensemble(model=m, x0_spec=X0, h=0.01, T=100.0,
                      n_paths=4000, master_seed=2202)
    bundle = stt.collect(ens, p_orders=(2,), as_kinds=("exponential",))
    rate = stt.fit_exponential_rate(bundle.curves[2], (10.0, 40.0))
    as_est = bundle.as_estimates["exponential"]
    n_frozen = int(bundle.curves[2].n_excluded[-1])
    ok = rate.value <= 1.19 and as_est.value <= 0.645
    check(5, ok,
          f"mean-square rate {rate.value:.4f} <= 1.19, a.s. statistic "
          f"{as_est.value:.4f} <= 0.645, frozen fraction "
          f"{n_frozen / ens.n_paths:.4f}")


def test_acceptance_6_multi_delay_root():
    root = ex.multi_delay_real_root(-3.0, [1.0, 1.0], [0.5, 0.25])
    target = math.log((-1.0 + math.sqrt(13.0)) / 2.0) / math.log(0.5)
    diff = abs(root - target)
    check(6, diff <= 1e-9,
          f"two-delay root {root:.12f} within {diff:.2e} of the "
          f"quadratic-substitution value")


def test_acceptance_7_lyapunov_criteria():
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(100):
        d = int(rng.integers(1, 9))
        R = rng.normal(size=(d, d))
        A = R - (linalg.spectral_norm(R) + 1.0) * np.eye(d)
        C = linalg.solve_lyapunov(A)
        resid = np.linalg.norm(A.T @ C + C @ A + np.eye(d), ord="fro")
        worst = max(worst, resid / np.linalg.norm(C, ord="fro"))
    residual_ok = worst <= 1e-10

    mm = models.MatrixModel(A=np.diag([-1.0, -2.0]), B=np.zeros((2, 2)),
                            Sigma=0.1 * np.eye(2), Theta=np.zeros((2, 2)),
                            q=0.5, d=2)
    rep = ex.matrix_classify(mm, mode="corollary")
    corollary_ok = rep.regime == "exponential" and rep.stable_mean

    x0 = models.InitialCondition(kind="deterministic", value=[1.0, 1.0])
    ens = sd.Ensemble(model=mm, x0_spec=x0, h=0.02, T=200.0,
                      n_paths=5000, master_seed=707)
    curve = stt.collect(ens, p_orders=(2,)).curves[2]
    fit = stt.fit_exponential_rate(curve, (1.0, 200.0))
    sim_ok = fit.value <= rep.exp_rate_mean + 0.15

    check(7, residual_ok and corollary_ok and sim_ok,
          f"worst Lyapunov residual {worst:.2e} <= 1e-10 over 100 random "
          f"Hurwitz systems; corollary example stable with rate "
          f"{rep.exp_rate_mean}; simulated rate {fit.value:.4f} <= "
          f"{rep.exp_rate_mean + 0.15:.4f}")


def test_acceptance_8_deterministic_asymptotics(subexp_solution):
    sol = ds.solve_pantograph_ode(-2.0, 1.0, 0.5, 1.0, 1.0e4, h=0.02)
    targets = np.geomspace(1.0e3, 1.0e4, 32)
    idx = np.unique(np.round(targets / 0.02).astype(int))
    t = idx * 0.02
    slope = np.polyfit(np.log(t), np.log(np.abs(sol.values[idx])), 1)[0]
    slope_ok = abs(slope - (-1.0)) <= 0.05

    ratio = math.log(float(subexp_solution(1.0e5))) / math.log(1.0e5) ** 2
    target = 1.0 / (2.0 * math.log(2.0))
    trend_ok = abs(ratio - target) <= 0.2 * target

    check(8, slope_ok and trend_ok,
          f"decay slope {slope:.5f} within 0.05 of -1; "
          f"log x(1e5)/(log 1e5)^2 = {ratio:.5f} within 20% of {target:.4f}")


def test_acceptance_9_comparison_principle():
    rng = np.random.default_rng(909)
    n_pass = 0
    for _ in range(50):
        a = -float(rng.uniform(0.2, 3.0))
        b = float(rng.uniform(0.3, 2.0))
        q = float(rng.uniform(0.1, 0.9))
        delta = float(rng.uniform(0.1, 0.9)) * b
        shrink = float(rng.uniform(0.3, 0.95))
        x = ds.solve_pantograph_ode(a, b, q, 1.0, 5.0, h=0.01)
        p = ds.solve_pantograph_ode(a, b - delta, q, shrink, 5.0, h=0.01)
        if ds.check_comparison(p, x):
            n_pass += 1
    check(9, n_pass == 50,
          f"{n_pass}/50 randomized sub-solutions dominated by the "
          f"comparison solution")


def test_acceptance_10_manifest_replay(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "model": {"a": -2.0, "b": 1.0, "sigma": 0.3, "rho": 0.0, "q": 0.5},
        "sim": {"T": 100.0, "h": 0.02, "n_paths": 200, "master_seed": 99},
        "analysis": {"p": 1},
    }))
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    rc1 = cli.main(["verify", "--config", str(cfg), "--output-dir", str(out1)])
    rc2 = cli.main(["verify", "--config", str(out1 / "manifest.json"),
                    "--output-dir", str(out2)])
    identical = all(
        filecmp.cmp(out1 / name, out2 / name, shallow=False)
        for name in ("moments.csv", "exponents.json", "verdict.json"))
    check(10, rc1 == 0 and rc2 == 0 and identical,
          "verify rerun from its manifest reproduced byte-identical outputs")
