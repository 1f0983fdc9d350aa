"""Tests for the dense-memory deterministic pantograph solver.

The independent oracle is the Dirichlet-type power series in conftest,
evaluated term by term with no code shared with the solver.
"""

import dataclasses
import math

import numpy as np
import pytest

from pantolab import detsolver as ds
from conftest import log_series_a0, series_value


class TestAccuracy:
    def test_pure_ode_reduction(self):
        # b = 0 collapses to x' = a x with exact solution x0 e^{a t}
        sol = ds.solve_pantograph_ode(-1.0, 0.0, 0.5, 1.0, 1.0, h=0.01)
        assert abs(sol(1.0) - math.exp(-1.0)) <= 1e-9
        # stored derivatives must satisfy the ODE exactly at the nodes
        assert np.max(np.abs(sol.derivs - (-1.0) * sol.values)) == 0.0

    def test_series_oracle_endpoint(self):
        sol = ds.solve_pantograph_ode(-2.0, 1.0, 0.5, 1.0, 1.0, h=0.01)
        exact = series_value(-2.0, 1.0, 0.5, 1.0, 1.0)
        assert abs(sol(1.0) - exact) <= 1e-8

    def test_series_oracle_interior_interpolation(self):
        sol = ds.solve_pantograph_ode(-2.0, 1.0, 0.5, 1.0, 1.0, h=0.01)
        for t in (0.13, 0.5, 0.77):
            exact = series_value(-2.0, 1.0, 0.5, 1.0, t)
            assert abs(float(sol(t)) - exact) <= 1e-8

    def test_short_horizon_matches_taylor(self):
        sol = ds.solve_pantograph_ode(-2.0, 1.0, 0.5, 1.0, 0.1, h=0.001)
        exact = series_value(-2.0, 1.0, 0.5, 1.0, 0.1)
        assert abs(sol(0.1) - exact) <= 1e-12

    def test_fourth_order_convergence(self):
        exact = series_value(-2.0, 1.0, 0.5, 1.0, 1.0)
        e_coarse = abs(ds.solve_pantograph_ode(-2.0, 1.0, 0.5, 1.0, 1.0, h=0.02)(1.0) - exact)
        e_fine = abs(ds.solve_pantograph_ode(-2.0, 1.0, 0.5, 1.0, 1.0, h=0.01)(1.0) - exact)
        ratio = e_coarse / e_fine
        assert 16.0 * 0.7 <= ratio <= 16.0 * 1.3

    def test_linearity_in_initial_condition(self):
        s1 = ds.solve_pantograph_ode(-1.5, 0.7, 0.3, 2.0, 1.0, h=0.01)
        s2 = ds.solve_pantograph_ode(-1.5, 0.7, 0.3, 1.0, 1.0, h=0.01)
        assert np.max(np.abs(s1.values - 2.0 * s2.values)) <= 1e-12

    def test_large_q_overlap_regime(self):
        # q = 0.9 makes the delayed argument overlap the step being built
        sol = ds.solve_pantograph_ode(-2.0, 1.0, 0.9, 1.0, 1.0, h=0.01)
        exact = series_value(-2.0, 1.0, 0.9, 1.0, 1.0)
        assert abs(sol(1.0) - exact) <= 1e-8

    def test_duplicate_delays_match_merged_coefficient(self):
        merged = ds.solve_pantograph_ode(-2.0, 1.0, 0.5, 1.0, 1.0, h=0.01)
        split = ds.solve_multi_pantograph_ode(-2.0, [0.6, 0.4], [0.5, 0.5], 1.0, 1.0, h=0.01)
        assert np.array_equal(merged.values, split.values)

    def test_two_delay_series_oracle(self):
        sol = ds.solve_multi_pantograph_ode(-2.0, [0.5, 0.5], [0.5, 0.25], 1.0, 1.0, h=0.01)
        # second-order Taylor by hand: x'' = a x' + sum b_i q_i x'(q_i t)
        h = 1e-3
        x0, f0 = 1.0, -1.0  # f0 = a + b1 + b2
        xpp0 = -2.0 * f0 + 0.5 * 0.5 * f0 + 0.5 * 0.25 * f0
        taylor = x0 + f0 * h + 0.5 * xpp0 * h * h
        assert abs(float(sol(h)) - taylor) <= 1e-9


class TestAsymptotics:
    def test_polynomial_decay_slope(self):
        # alpha = log(2)/log(1/2) = -1 for a=-2, b=1, q=1/2
        sol = ds.solve_pantograph_ode(-2.0, 1.0, 0.5, 1.0, 2000.0, h=0.02)
        targets = np.geomspace(200.0, 2000.0, 24)
        idx = np.unique(np.round(targets / 0.02).astype(int))
        t = idx * 0.02
        x = sol.values[idx]
        A = np.vstack([np.log(t), np.ones_like(t)]).T
        slope = np.linalg.lstsq(A, np.log(np.abs(x)), rcond=None)[0][0]
        assert abs(slope - (-1.0)) <= 0.05

    def test_exponential_growth_rate_cap(self):
        # for a > 0 the solution grows no faster than e^{(a+eps) t}
        sol = ds.solve_multi_pantograph_ode(1.0, [0.5], [0.5], 1.0, 60.0, h=0.01)
        t = sol.t_grid
        mask = t >= 50.0
        ratios = np.log(sol.values[mask]) / t[mask]
        assert ratios.max() <= 1.0 + 0.02

    def test_subexponential_profile_trend(self, subexp_solution):
        # a = 0: log x grows like (log t)^2 up to slowly varying corrections,
        # so log x / (log t)^2 drifts down slowly and stays order one
        ratios = [math.log(float(subexp_solution(t))) / math.log(t) ** 2
                  for t in (1.0e3, 1.0e4, 1.0e5)]
        assert ratios[0] > ratios[1] > ratios[2]
        assert 0.5 <= ratios[2] <= 0.9

    def test_subexponential_series_fidelity(self, subexp_solution):
        log_exact = log_series_a0(0.5, 1.0e5) + math.log(100.0)
        log_num = math.log(float(subexp_solution(1.0e5)))
        assert abs(log_num - log_exact) <= 1e-8 * abs(log_exact)


class TestKatoMcLeodPsi:
    def test_frozen_value(self):
        assert ds.kato_mcleod_psi(0.5, 2.0, 1.0e6) == pytest.approx(
            1.0745048606934708e+52, rel=1e-12)
        assert math.log(ds.kato_mcleod_psi(0.5, 2.0, 1.0e6)) == pytest.approx(
            119.80628479645993, abs=1e-9)

    def test_profile_tracks_solution(self):
        sol = ds.solve_multi_pantograph_ode(0.0, [2.0], [0.5], 1.0, 1.0e5, h=0.2)
        t = 1.0e5
        ratio = math.log(float(sol(t))) / math.log(ds.kato_mcleod_psi(0.5, 2.0, t))
        assert 0.85 <= ratio <= 1.15

    def test_domain_guards(self):
        with pytest.raises(ds.DomainError):
            ds.kato_mcleod_psi(1.5, 2.0, 1.0e6)  # q outside (0,1)
        with pytest.raises(ds.DomainError):
            ds.kato_mcleod_psi(0.5, 2.0, 2.0)  # t <= e
        with pytest.raises(ds.DomainError):
            ds.kato_mcleod_psi(0.5, 0.0, 1.0e6)  # b*log(1/q) must be positive
        with pytest.raises(ds.DomainError):
            ds.kato_mcleod_psi(0.5, -1.0, 1.0e6)


class TestComparison:
    def _base(self):
        return ds.solve_pantograph_ode(1.0, 0.5, 0.5, 1.0, 5.0, h=0.01)

    def test_smaller_feedback_stays_below(self):
        x = self._base()
        p = ds.solve_pantograph_ode(1.0, 0.2, 0.5, 1.0, 5.0, h=0.01)
        assert ds.check_comparison(p, x) is True

    def test_smaller_initial_stays_below(self):
        x = self._base()
        p = ds.solve_pantograph_ode(1.0, 0.5, 0.5, 0.5, 5.0, h=0.01)
        assert ds.check_comparison(p, x) is True

    def test_corrupted_value_detected(self):
        x = self._base()
        vals = x.values.copy()
        vals[200] *= 1.5
        corrupt = dataclasses.replace(x, values=vals)
        assert ds.check_comparison(corrupt, x) is False

    def test_grid_mismatch_rejected(self):
        x = self._base()
        other = ds.solve_pantograph_ode(1.0, 0.2, 0.5, 1.0, 5.0, h=0.02)
        with pytest.raises(ds.GridMismatch):
            ds.check_comparison(other, x)


class TestInterfaceContracts:
    def test_step_guard(self):
        with pytest.raises(ds.StepTooLarge):
            ds.solve_pantograph_ode(-60.0, 1.0, 0.5, 1.0, 1.0, h=0.01)

    def test_default_step_rule(self):
        assert ds.default_step(50.0, [1.0]) == pytest.approx(0.1 / 50.0)
        assert ds.default_step(1.0, [1.0]) == pytest.approx(0.01)
        assert ds.default_step(0.1, [0.2]) == pytest.approx(0.01)

    def test_default_step_clamped_to_horizon(self):
        sol = ds.solve_pantograph_ode(-1.0, 0.5, 0.5, 1.0, 0.005)
        assert sol.h <= 0.005 + 1e-15
        assert sol.T >= 0.005 - 1e-12

    def test_call_outside_domain(self):
        sol = ds.solve_pantograph_ode(-1.0, 0.5, 0.5, 1.0, 1.0, h=0.01)
        with pytest.raises(ds.DomainError):
            sol(-0.01)
        with pytest.raises(ds.DomainError):
            sol(1.02)

    def test_invalid_q_rejected(self):
        with pytest.raises(ds.DetSolverError):
            ds.solve_pantograph_ode(-1.0, 0.5, 1.0, 1.0, 1.0, h=0.01)
        with pytest.raises(ds.DetSolverError):
            ds.solve_pantograph_ode(-1.0, 0.5, 0.0, 1.0, 1.0, h=0.01)

    def test_mismatched_coefficient_lists(self):
        with pytest.raises(ds.DetSolverError):
            ds.solve_multi_pantograph_ode(-1.0, [0.5, 0.2], [0.5], 1.0, 1.0, h=0.01)

    def test_grid_properties(self):
        sol = ds.solve_pantograph_ode(-1.0, 0.5, 0.5, 1.0, 1.0, h=0.01)
        t = sol.t_grid
        assert t[0] == 0.0
        assert len(t) == len(sol.values) == len(sol.derivs)
        assert t[-1] == pytest.approx(sol.T)
        assert np.allclose(np.diff(t), 0.01)

    def test_to_csv_roundtrip(self, tmp_path):
        sol = ds.solve_pantograph_ode(-1.0, 0.5, 0.5, 1.0, 0.1, h=0.01)
        path = tmp_path / "det.csv"
        sol.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "t,x"
        assert len(lines) == len(sol.values) + 1
        x_back = np.array([float(row.split(",")[1]) for row in lines[1:]])
        assert np.array_equal(x_back, sol.values)
