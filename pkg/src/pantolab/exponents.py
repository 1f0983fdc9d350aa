"""Analytic growth exponents and stability classification.

Computes polynomial growth exponents (roots of a + |b| q^alpha = 0 and its
multi-delay and matrix generalizations), exponential growth rates, and
stability flags for every supported model family. Results are packaged as
ExponentReport values whose ``source`` field carries the citation tag of the
analytic rule applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .models import (MatrixModel, MultiDelayModel, ScalarPantographModel,
                     validate)

ROOT_ABS_TOL = 1e-13       # bisection window on alpha
ROOT_RESIDUAL_REL = 1e-12  # residual relative to the leading coefficient
ETA_GRID = 64              # matrix-mode (eta1, eta2) grid per axis
ETA_LO, ETA_HI = 1e-3, 1e3


class ExponentError(Exception):
    """Base class for exponent computation failures."""


class RegimeError(ExponentError):
    """Parameters fall outside the regime the requested formula covers."""


class DegenerateB(ExponentError):
    """All delayed coefficients vanish; no transcendental root exists."""


class WrongBranch(ExponentError):
    """A formula for rho != 0 was invoked with rho = 0 (or vice versa)."""


class LyapunovFailure(ExponentError):
    """Lyapunov data could not be produced to tolerance."""


@dataclass(frozen=True)
class LyapunovData:
    """Solution data of A^T C + C A = -I with extreme eigenvalues of C."""

    C: np.ndarray
    gamma_lo2: float
    gamma_hi2: float

    def to_dict(self) -> dict:
        return {"C": np.asarray(self.C).tolist(),
                "gamma_lo2": self.gamma_lo2, "gamma_hi2": self.gamma_hi2}


@dataclass(frozen=True)
class ExponentReport:
    """Classification result for one model at one moment order.

    Exactly one of alpha_mean / exp_rate_mean is present unless the regime
    is unsupported. For polynomial reports alpha_as = alpha_mean + 1 at
    p = 1 and (alpha_mean + 1)/2 at p = 2.
    """

    regime: str
    p: int
    alpha_mean: float | None = None
    alpha_as: float | None = None
    exp_rate_mean: float | None = None
    exp_rate_as: float | None = None
    stable_mean: bool | None = None
    stable_as: bool | None = None
    source: str = ""
    notes: tuple = ()
    sharp_mean: bool = False
    policy: str | None = None
    lyapunov: LyapunovData | None = None

    def __post_init__(self):
        if self.regime not in ("polynomial", "exponential", "unsupported"):
            raise ValueError(f"bad regime {self.regime!r}")
        if self.regime != "unsupported":
            have_alpha = self.alpha_mean is not None
            have_rate = self.exp_rate_mean is not None
            if have_alpha == have_rate:
                raise ValueError("exactly one of alpha_mean/exp_rate_mean "
                                 "must be present outside the unsupported regime")

    def to_dict(self) -> dict:
        out = {"regime": self.regime, "p": self.p, "source": self.source,
               "notes": list(self.notes)}
        for name in ("alpha_mean", "alpha_as", "exp_rate_mean", "exp_rate_as",
                     "stable_mean", "stable_as"):
            val = getattr(self, name)
            if val is not None:
                out[name] = val
        if self.sharp_mean:
            out["sharp_mean"] = True
        if self.policy is not None:
            out["policy"] = self.policy
        if self.lyapunov is not None:
            out["lyapunov"] = self.lyapunov.to_dict()
        return out


def _pow(base: float, expo: float) -> float:
    # base in (0,1); avoid OverflowError for very negative exponents
    e = expo * math.log(base)
    if e > 700.0:
        return math.inf
    return math.exp(e)


def first_mean_alpha(m: ScalarPantographModel) -> float:
    """Polynomial exponent of the first mean: the root of a + |b| q^alpha = 0.

    Requires rho = 0, a < 0 and b != 0.
    """
    validate(m)
    if m.rho != 0.0:
        raise RegimeError("first-mean exponent needs rho = 0; "
                          "use the mean-square analysis for rho != 0")
    if m.a >= 0.0:
        raise RegimeError(f"first-mean exponent needs a < 0, got a={m.a}; "
                          "use the exponential bound for a > 0")
    if m.b == 0.0:
        raise DegenerateB("b = 0 reduces the equation to geometric Brownian "
                          "motion; no polynomial exponent exists")
    alpha = math.log(-m.a / abs(m.b)) / math.log(m.q)
    residual = abs(m.a + abs(m.b) * _pow(m.q, alpha))
    if not residual <= ROOT_RESIDUAL_REL * abs(m.a):
        raise ExponentError(f"root residual {residual:.3e} out of tolerance")
    return alpha


def mean_square_alpha(m: ScalarPantographModel) -> float:
    """Mean-square polynomial exponent for rho != 0 via the optimal-eta
    closed form: alpha = (2/log q) log u with
    u = (sqrt(beta^2 - rho^2 s) - beta)/rho^2, beta = |b + sigma rho|,
    s = 2a + sigma^2 < 0.
    """
    validate(m)
    if m.rho == 0.0:
        raise WrongBranch("closed form needs rho != 0; "
                          "use first_mean_alpha or the policy comparison")
    s = 2.0 * m.a + m.sigma * m.sigma
    if s >= 0.0:
        raise RegimeError(f"mean-square exponent needs 2a + sigma^2 < 0, "
                          f"got {s}")
    beta = abs(m.b + m.sigma * m.rho)
    rho2 = m.rho * m.rho
    u = (math.sqrt(beta * beta - rho2 * s) - beta) / rho2
    alpha = 2.0 * math.log(u) / math.log(m.q)
    # u is the positive root of rho^2 u^2 + 2 beta u + s = 0
    residual = abs(rho2 * u * u + 2.0 * beta * u + s)
    if not residual <= 1e-12 * max(1.0, abs(s)):
        raise ExponentError(f"closed-form residual {residual:.3e} too large")
    return alpha


def multi_delay_real_root(a_tilde: float, b_tilde, p) -> float:
    """Unique real root of a_tilde + sum_i |b_tilde_i| p_i^alpha = 0.

    The left side is strictly decreasing in alpha, so an expanding bracket
    around [-1, 1] followed by bisection (absolute tolerance 1e-13, at most
    200 iterations) is unconditionally safe. Repeated delay factors are
    merged by summing their coefficients.
    """
    a_tilde = float(a_tilde)
    if a_tilde >= 0.0:
        raise RegimeError(f"root requires a_tilde < 0, got {a_tilde}")
    merged: dict = {}
    for bv, pv in zip(b_tilde, p, strict=True):
        pv = float(pv)
        if not 0.0 < pv < 1.0:
            raise ValueError(f"delay factor {pv} outside (0, 1)")
        if bv != 0.0:
            merged[pv] = merged.get(pv, 0.0) + abs(float(bv))
    if not merged:
        raise DegenerateB("all delayed coefficients vanish")
    coeffs = sorted(merged.items())

    def f(alpha: float) -> float:
        return a_tilde + sum(c * _pow(pv, alpha) for pv, c in coeffs)

    lo, hi = -1.0, 1.0
    while f(lo) <= 0.0:
        lo *= 2.0
    while f(hi) >= 0.0:
        hi *= 2.0
    for _ in range(200):
        if hi - lo <= ROOT_ABS_TOL:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    residual = abs(f(root))
    if not residual <= ROOT_RESIDUAL_REL * abs(a_tilde):
        raise linalg.ConvergenceFailure(
            f"bisection residual {residual:.3e} exceeds "
            f"{ROOT_RESIDUAL_REL:.0e} * |a_tilde|")
    return root


def _root_single(abar: float, bbar: float, q: float) -> float:
    """Root of abar + bbar q^alpha = 0 for abar < 0 < bbar, in closed form."""
    return math.log(-abar / bbar) / math.log(q)


def _check_single_residual(abar: float, bbar: float, q: float, alpha: float):
    residual = abs(abar + bbar * _pow(q, alpha))
    if not residual <= ROOT_RESIDUAL_REL * abs(abar):
        raise linalg.ConvergenceFailure(
            f"comparison-root residual {residual:.3e} out of tolerance")


# --- mean-square comparison policies (shared by scalar rho=0 and multi) ---

def _policy_set(a: float, sigma: float, drift, noise):
    """Enumerate the three parameter policies for the comparison equation.

    ``drift`` is a list of (|b_i|, q_i), ``noise`` a list of (|sigma_j|, r_j).
    Yields (name, abar, coeff_list) where coeff_list pairs nonnegative
    delayed coefficients with their delay factors. Policies whose
    instantaneous coefficient fails to be negative are skipped by the caller.
    """
    c0 = 2.0 * a + sigma * sigma
    sb = sum(b for b, _ in drift)
    ss = sum(s for s, _ in noise)
    sig = abs(sigma)

    def noise_coeff(mu2, lam2):
        # delayed noise coefficient at r_j for the given mu_j^2 and lambda_j^2;
        # noise entries all have sigma_j != 0, so mu2 entries are positive
        tot = sum(sl * sl / mu2[k] for k, (sl, _) in enumerate(noise))
        return [(mu2[j] * tot + sig * sj / lam2[j], rj)
                for j, (sj, rj) in enumerate(noise)]

    # P1: vanishing instantaneous transfer; eps takes half the margin
    scale = sb + sig * ss
    if c0 < 0.0:
        eps = 1.0 if scale == 0.0 else min(1.0, -c0 / (2.0 * scale))
        abar = c0 + eps * scale
        coeffs = [(b / eps, qv) for b, qv in drift]
        mu2 = [sj for sj, _ in noise]
        lam2 = [eps] * len(noise)
        coeffs += noise_coeff(mu2, lam2)
        yield "P1", abar, coeffs

    # P2: unit transfer parameters
    abar = c0 + sb + sig * ss
    coeffs = [(b, qv) for b, qv in drift]
    mu2 = [sj for sj, _ in noise]
    lam2 = [1.0] * len(noise)
    coeffs += noise_coeff(mu2, lam2)
    yield "P2", abar, coeffs

    # P3: delay-weighted transfer parameters
    abar = (c0 + sum(b / math.sqrt(qv) for b, qv in drift)
            + sig * sum(sj / math.sqrt(rj) for sj, rj in noise))
    coeffs = [(b * math.sqrt(qv), qv) for b, qv in drift]
    mu2 = [sj / math.sqrt(rj) for sj, rj in noise]
    lam2 = [1.0 / math.sqrt(rj) for _, rj in noise]
    coeffs += noise_coeff(mu2, lam2)
    yield "P3", abar, coeffs


def _best_policy_alpha(a: float, sigma: float, drift, noise):
    """(alpha, policy_name) minimizing the comparison root over the three
    policies; None when no policy yields a negative instantaneous
    coefficient."""
    best = None
    for name, abar, coeffs in _policy_set(a, sigma, drift, noise):
        if not abar < 0.0:
            continue
        total = sum(c for c, _ in coeffs)
        if total <= 0.0:
            continue
        alpha = multi_delay_real_root(abar, [c for c, _ in coeffs],
                                      [pv for _, pv in coeffs])
        if best is None or alpha < best[0]:
            best = (alpha, name)
    return best


def _gbm_report(a: float, sigma: float, p: int, source: str) -> ExponentReport:
    """Report for an equation with no delayed terms (plain GBM comparison)."""
    if p == 1:
        rate_mean, rate_as = a, a
    else:
        rate_mean = 2.0 * a + sigma * sigma
        rate_as = a + 0.5 * sigma * sigma
    stable = bool(rate_mean < 0.0)
    return ExponentReport(
        regime="exponential", p=p, exp_rate_mean=rate_mean,
        exp_rate_as=rate_as, stable_mean=stable, stable_as=stable,
        source=source,
        notes=("pure exponential comparison: all delayed coefficients "
               "vanish, so no polynomial exponent is defined",))


def classify_scalar(m: ScalarPantographModel, p: int) -> ExponentReport:
    """Full classification of a scalar model at moment order p (1 or 2)."""
    validate(m)
    if p not in (1, 2):
        raise RegimeError(f"p must be 1 or 2, got {p!r}")
    if p == 1:
        if m.rho != 0.0:
            raise RegimeError("first-mean classification requires rho = 0")
        if m.a > 0.0:
            return ExponentReport(
                regime="exponential", p=1, exp_rate_mean=m.a,
                exp_rate_as=m.a, stable_mean=False, stable_as=False,
                source="Thm4.1(i)")
        if m.a == 0.0:
            return ExponentReport(
                regime="unsupported", p=1, source="Lem2.2(iii)",
                notes=("a = 0 lies outside the polynomial/exponential "
                       "dichotomy; see Lem2.2(iii) for the deterministic "
                       "iterated-logarithm growth scale",))
        if m.b == 0.0:
            return ExponentReport(
                regime="unsupported", p=1, source="Thm3.1(i)",
                notes=("b = 0 reduces the drift to geometric Brownian "
                       "motion; the first-mean polynomial exponent is "
                       "degenerate (alpha = -infinity)",))
        alpha = first_mean_alpha(m)
        return ExponentReport(
            regime="polynomial", p=1, alpha_mean=alpha, alpha_as=alpha + 1.0,
            stable_mean=bool(m.a + abs(m.b) < 0.0),
            stable_as=bool(m.a + abs(m.b) / m.q < 0.0),
            source="Thm3.1(i)", sharp_mean=bool(m.b > 0.0))

    # p = 2
    s = 2.0 * m.a + m.sigma * m.sigma
    has_delay = (m.b != 0.0) or (m.rho != 0.0)
    if not has_delay:
        if s == 0.0:
            return ExponentReport(
                regime="unsupported", p=2, source="Lem2.2(iii)",
                notes=("2a + sigma^2 = 0 lies outside the "
                       "polynomial/exponential dichotomy",))
        return _gbm_report(m.a, m.sigma, 2, "Thm4.1(ii)")
    if s > 0.0:
        return ExponentReport(
            regime="exponential", p=2, exp_rate_mean=s,
            exp_rate_as=m.a + 0.5 * m.sigma * m.sigma,
            stable_mean=False, stable_as=False, source="Thm4.1(ii)")
    if s == 0.0:
        return ExponentReport(
            regime="unsupported", p=2, source="Lem2.2(iii)",
            notes=("2a + sigma^2 = 0 lies outside the "
                   "polynomial/exponential dichotomy",))

    beta = abs(m.b + m.sigma * m.rho)
    stable_mean = bool(s + m.rho * m.rho + 2.0 * beta < 0.0)
    stable_as = bool(s + m.rho * m.rho / m.q
                     + 2.0 / math.sqrt(m.q) * beta < 0.0)
    if m.rho != 0.0:
        alpha = mean_square_alpha(m)
        return ExponentReport(
            regime="polynomial", p=2, alpha_mean=alpha,
            alpha_as=0.5 * (alpha + 1.0), stable_mean=stable_mean,
            stable_as=stable_as, source="Thm3.1(ii)")
    # rho = 0, b != 0: policy comparison route (matches the multi-delay path)
    best = _best_policy_alpha(m.a, m.sigma, [(abs(m.b), m.q)], [])
    if best is None:
        return ExponentReport(
            regime="unsupported", p=2, source="Thm5.1",
            notes=("no comparison policy yields a negative instantaneous "
                   "coefficient; only boundedness in the exponential scale "
                   "is available",))
    alpha, policy = best
    return ExponentReport(
        regime="polynomial", p=2, alpha_mean=alpha,
        alpha_as=0.5 * (alpha + 1.0), stable_mean=stable_mean,
        stable_as=stable_as, source="Thm5.1", policy=policy)


def multi_delay_classify(m: MultiDelayModel) -> ExponentReport:
    """Mean-square classification of a multi-delay scalar model."""
    validate(m)
    drift = [(abs(b), qv) for b, qv in zip(m.b, m.q) if b != 0.0]
    noise = [(abs(sj), rj) for sj, rj in zip(m.sigma_delayed, m.r)
             if sj != 0.0]
    s = 2.0 * m.a + m.sigma * m.sigma
    if not drift and not noise:
        if s == 0.0:
            return ExponentReport(
                regime="unsupported", p=2, source="Lem2.2(iii)",
                notes=("2a + sigma^2 = 0 lies outside the "
                       "polynomial/exponential dichotomy",))
        return _gbm_report(m.a, m.sigma, 2, "Thm4.1(ii)")
    if s >= 0.0:
        return ExponentReport(
            regime="unsupported", p=2, source="Thm5.1",
            notes=(f"2a + sigma^2 = {s:.6g} >= 0: the multi-delay "
                   "comparison requires a negative instantaneous "
                   "coefficient; exponential-regime analysis is out of "
                   "scope for multiple delays",))

    sum_b = sum(b for b, _ in drift)
    sum_s = sum(sj for sj, _ in noise)
    cond_512 = 2.0 * m.a + 2.0 * sum_b + (abs(m.sigma) + sum_s) ** 2
    cond_513 = (2.0 * m.a
                + 2.0 * sum(b / math.sqrt(qv) for b, qv in drift)
                + (abs(m.sigma)
                   + sum(sj / math.sqrt(rj) for sj, rj in noise)) ** 2)
    best = _best_policy_alpha(m.a, m.sigma, drift, noise)
    if best is None:
        return ExponentReport(
            regime="unsupported", p=2, source="Thm5.1",
            notes=("no comparison policy yields a negative instantaneous "
                   "coefficient",))
    alpha, policy = best
    return ExponentReport(
        regime="polynomial", p=2, alpha_mean=alpha,
        alpha_as=0.5 * (alpha + 1.0), stable_mean=bool(cond_512 < 0.0),
        stable_as=bool(cond_513 < 0.0), source="Thm5.1", policy=policy)


# --- matrix criteria ---

def lyapunov_data(A) -> LyapunovData:
    """Solve A^T C + C A = -I and report the extreme eigenvalues of C."""
    try:
        C = linalg.solve_lyapunov(A)
    except linalg.SingularSystem as exc:
        raise LyapunovFailure(str(exc)) from exc
    lo, hi = linalg.sym_eig_extremes(C)
    if not 0.0 < lo <= hi:
        raise LyapunovFailure(
            f"Lyapunov solution is not positive definite: "
            f"eigenvalues in [{lo:.6g}, {hi:.6g}]")
    return LyapunovData(C=C, gamma_lo2=lo, gamma_hi2=hi)


def _matrix_alpha_search(ghi2: float, glo2: float, q: float,
                         nB: float, nS: float, nT: float, nST: float):
    """Minimize the comparison root over (eta1, eta2) on a log grid with
    golden-section refinement; returns (alpha, eta1, eta2)."""

    def alpha_at(e1: float, e2: float):
        abar = -1.0 / ghi2 + (nB * e1 * e1 + nS + nST * e2 * e2) / glo2
        bbar = (nB / (e1 * e1) + nT + nST / (e2 * e2)) / glo2
        if abar >= 0.0 or bbar <= 0.0:
            return None
        return _root_single(abar, bbar, q)

    grid = np.exp(np.linspace(math.log(ETA_LO), math.log(ETA_HI), ETA_GRID))
    best = None
    for e1 in grid:
        for e2 in grid:
            a = alpha_at(e1, e2)
            if a is not None and (best is None or a < best[0]):
                best = (a, e1, e2)
    if best is None:
        return None
    step = grid[1] / grid[0]

    def golden_1d(fun, lo, hi):
        # minimize fun over [lo, hi] in log scale
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        llo, lhi = math.log(lo), math.log(hi)
        x1 = lhi - phi * (lhi - llo)
        x2 = llo + phi * (lhi - llo)
        f1, f2 = fun(math.exp(x1)), fun(math.exp(x2))
        for _ in range(60):
            if lhi - llo < 1e-10:
                break
            if (f1 if f1 is not None else math.inf) < \
               (f2 if f2 is not None else math.inf):
                lhi, x2, f2 = x2, x1, f1
                x1 = lhi - phi * (lhi - llo)
                f1 = fun(math.exp(x1))
            else:
                llo, x1, f1 = x1, x2, f2
                x2 = llo + phi * (lhi - llo)
                f2 = fun(math.exp(x2))
        xm = math.exp(0.5 * (llo + lhi))
        fm = fun(xm)
        return (xm, fm) if fm is not None else (xm, math.inf)

    alpha, e1, e2 = best
    for _ in range(24):
        prev = alpha
        x, fx = golden_1d(lambda x: alpha_at(x, e2),
                          max(ETA_LO, e1 / step), min(ETA_HI, e1 * step))
        if fx < alpha:
            e1, alpha = x, fx
        y, fy = golden_1d(lambda y: alpha_at(e1, y),
                          max(ETA_LO, e2 / step), min(ETA_HI, e2 * step))
        if fy < alpha:
            e2, alpha = y, fy
        if prev - alpha < 1e-9:
            break
    return alpha, e1, e2


def matrix_classify(m: MatrixModel, mode: str = "sharp") -> ExponentReport:
    """Mean-square classification of a matrix model.

    mode="sharp" evaluates the conditions built from the Lyapunov-weighted
    norms |B^T C|, |Sigma^T C Sigma|, |Theta^T C Theta|, |Sigma^T C Theta|
    (with the sign-corrected boundedness condition); mode="corollary"
    evaluates the coarser operator-norm conditions. The exponent itself is
    always the minimized root of the induced scalar comparison equation
    using the Lyapunov-weighted norms.
    """
    validate(m)
    if mode not in ("sharp", "corollary"):
        raise ValueError(f"mode must be 'sharp' or 'corollary', got {mode!r}")
    mu = linalg.spectral_abscissa(m.A)
    if not mu < 0.0:
        raise linalg.SpectrumError(
            f"A must be Hurwitz; spectral abscissa = {mu:.6g}")
    lyap = lyapunov_data(m.A)
    C, glo2, ghi2 = lyap.C, lyap.gamma_lo2, lyap.gamma_hi2
    q = m.q

    nB = linalg.spectral_norm(m.B.T @ C)
    nS = linalg.spectral_norm(m.Sigma.T @ C @ m.Sigma)
    nT = linalg.spectral_norm(m.Theta.T @ C @ m.Theta)
    nST = linalg.spectral_norm(m.Sigma.T @ C @ m.Theta)

    notes: list = []
    if mode == "sharp":
        cond_bound = -1.0 / ghi2 + nS / glo2 < 0.0
        cond_mean = (-1.0 / ghi2
                     + (nS + nT + 2.0 * nB + 2.0 * nST) / glo2 < 0.0)
        cond_as = (-1.0 / ghi2
                   + (nS + nT / q
                      + 2.0 / math.sqrt(q) * (nB + nST)) / glo2 < 0.0)
        notes.append("boundedness condition evaluated with the corrected "
                     "sign -1/gamma_hi2 + |Sigma^T C Sigma|/gamma_lo2 < 0")
        source = "Thm5.2"
    else:
        ratio = glo2 / (ghi2 * ghi2)
        oB = linalg.spectral_norm(m.B)
        oS = linalg.spectral_norm(m.Sigma)
        oT = linalg.spectral_norm(m.Theta)
        cond_bound = ratio > oS * oS
        cond_mean = ratio > (oS + oT) ** 2
        cond_as = ratio > 2.0 / math.sqrt(q) * oB \
            + (oS + oT / math.sqrt(q)) ** 2
        source = "Cor5.1"

    if not cond_bound:
        return ExponentReport(
            regime="unsupported", p=2, source=source,
            stable_mean=bool(cond_mean), stable_as=bool(cond_as),
            notes=tuple(notes + ["mean-square boundedness condition fails; "
                                 "no polynomial bound is established"]),
            lyapunov=lyap)

    if nB == 0.0 and nT == 0.0 and nST == 0.0:
        # delayed comparison coefficient vanishes identically
        rate = -1.0 / ghi2 + nS / glo2
        return ExponentReport(
            regime="exponential", p=2, exp_rate_mean=rate,
            exp_rate_as=0.5 * rate, stable_mean=bool(cond_mean),
            stable_as=bool(cond_as), source=source,
            notes=tuple(notes + ["pure-exponential-decay comparison: the "
                                 "delayed coefficient is zero, so the "
                                 "comparison equation has no transcendental "
                                 "root"]),
            lyapunov=lyap)

    found = _matrix_alpha_search(ghi2, glo2, q, nB, nS, nT, nST)
    if found is None:
        return ExponentReport(
            regime="unsupported", p=2, source=source,
            stable_mean=bool(cond_mean), stable_as=bool(cond_as),
            notes=tuple(notes + ["no (eta1, eta2) yields a negative "
                                 "instantaneous coefficient"]),
            lyapunov=lyap)
    alpha, e1, e2 = found
    abar = -1.0 / ghi2 + (nB * e1 * e1 + nS + nST * e2 * e2) / glo2
    bbar = (nB / (e1 * e1) + nT + nST / (e2 * e2)) / glo2
    _check_single_residual(abar, bbar, q, alpha)
    return ExponentReport(
        regime="polynomial", p=2, alpha_mean=alpha,
        alpha_as=0.5 * (alpha + 1.0), stable_mean=bool(cond_mean),
        stable_as=bool(cond_as), source=source, notes=tuple(notes),
        lyapunov=lyap)


def classify(model, p: int = 2, mode: str = "sharp") -> ExponentReport:
    """Dispatch classification over the three model families."""
    if isinstance(model, ScalarPantographModel):
        return classify_scalar(model, p)
    if isinstance(model, MultiDelayModel):
        return multi_delay_classify(model)
    if isinstance(model, MatrixModel):
        return matrix_classify(model, mode=mode)
    raise TypeError(f"not a model: {type(model).__name__}")
