"""Shared fixtures and independent oracles for the test suite.

The oracles here are deliberately written from scratch (power series,
log-sum-exp evaluation, eta-grid minimization) so the library is checked
against derivations that do not share code with it.
"""

import math

import numpy as np
import pytest

from pantolab import detsolver, sdesim


def series_value(a, b, q, x0, t, nmax=400):
    """Exact power series of x' = a x + b x(q t), x(0)=x0.

    Coefficients satisfy c_{n+1} = c_n (a + b q^n) / (n+1); converges for
    every t since the delay factor only shrinks the coefficients.
    """
    c = x0
    total = c
    for n in range(nmax):
        c = c * (a + b * q ** n) / (n + 1)
        total += c * t ** (n + 1)
        if c == 0.0:
            break
    return total


def log_series_a0(q, t, nmax=2000):
    """log x(t) for x' = x(q t), x(0)=1: x(t) = sum_n q^{n(n-1)/2} t^n / n!.

    Evaluated in log space (log-sum-exp) because the terms overflow long
    before the sum is needed at t = 1e5.
    """
    lq, lt = math.log(q), math.log(t)
    terms = []
    lfact = 0.0
    for n in range(nmax):
        if n > 0:
            lfact += math.log(n)
        terms.append(n * (n - 1) / 2.0 * lq + n * lt - lfact)
    m = max(terms)
    return m + math.log(sum(math.exp(x - m) for x in terms))


def eta_grid_alpha(a, b, sigma, rho, q, n_eta=100_000):
    """Independent mean-square exponent oracle.

    For each eta on a log grid, solve A(eta) + B(eta) q^alpha = 0 for
    alpha by bisection (A = 2a + sigma^2 + eta^2 beta, B = rho^2 +
    beta/eta^2, beta = |b + sigma rho|), then take the minimum over eta
    and refine it with a golden-section pass around the grid minimum.
    """
    beta = abs(b + sigma * rho)
    s = 2.0 * a + sigma ** 2

    def alpha_of_eta(eta2):
        # eta2 = eta^2 > 0; A < 0 required for a real root
        A = s + eta2 * beta
        B = rho ** 2 + beta / eta2
        if A >= 0.0 or B <= 0.0:
            return np.inf
        # f(alpha) = A + B q^alpha is strictly decreasing; bracket so that
        # f(lo) >= 0 > f(hi), then bisect
        lo, hi = -1.0, 1.0
        f = lambda al: A + B * q ** al
        while f(lo) < 0.0:  # root is further left
            lo *= 2.0
            if lo < -1e6:
                return np.inf
        while f(hi) >= 0.0:  # root is further right
            hi *= 2.0
            if hi > 1e6:
                return np.inf
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if f(mid) < 0.0:
                hi = mid
            else:
                lo = mid
            if hi - lo < 1e-13:
                break
        return 0.5 * (lo + hi)

    grid = np.geomspace(1e-3, 1e3, n_eta) ** 2
    vals = np.array([alpha_of_eta(e2) for e2 in grid])
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    # golden-section refinement of the eta minimum
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = alpha_of_eta(x1), alpha_of_eta(x2)
    for _ in range(80):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = alpha_of_eta(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = alpha_of_eta(x2)
    return min(float(vals[i]), f1, f2)


def make_trajectory(fn, h, T, freeze_index=None):
    """Synthetic Trajectory from a vectorized function of t."""
    t = np.arange(round(T / h) + 1) * h
    return sdesim.Trajectory(h=h, T=T, values=np.asarray(fn(t), dtype=float),
                             seed=sdesim.RandomStreamSpec(0, 0),
                             model_ref=None,
                             overflow=freeze_index is not None,
                             freeze_index=freeze_index)


@pytest.fixture(scope="session")
def subexp_solution():
    """Long run of x' = x(0.5 t), x(0) = 100: the sub-exponential,
    super-polynomial regime. Shared between module and acceptance tests."""
    return detsolver.solve_pantograph_ode(0.0, 1.0, 0.5, 100.0, 1.0e5, h=0.2)
