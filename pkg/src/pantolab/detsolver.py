"""Deterministic pantograph integrator with dense output.

Integrates x'(t) = a_bar x(t) + sum_i b_bar_i x(q_i t) by classic
fourth-order Runge-Kutta. The delayed argument q t always trails t, so the
solution is built left to right and delayed values are read back from the
stored grid through cubic Hermite interpolation (the stored right-hand
sides supply the derivatives, which keeps the interpolation error at the
scheme's own order). Stage times within the first interval are handled by
sub-stepping [0, h] at h/16; later steps whose stage lookups poke past the
filled grid (possible while q t_stage > t_n, i.e. the first ~q/(1-q)
steps) iterate the step on a provisional Hermite segment until the
endpoint is fixed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

BOOTSTRAP_SUBSTEPS = 16
STEP_GUARD = 0.5          # StepTooLarge when |a_bar| * h exceeds this
COMPARISON_SLACK = 1e-9   # check_comparison tolerance scale


class DetSolverError(Exception):
    """Base class for deterministic-solver failures."""


class StepTooLarge(DetSolverError):
    """The requested step violates the |a_bar| h <= 0.5 stability guard."""


class GridMismatch(DetSolverError):
    """Two dense solutions do not share a common grid."""


class DomainError(DetSolverError):
    """An asymptotic formula was evaluated outside its domain."""


def default_step(a_bar: float, b_bars) -> float:
    mags = [abs(a_bar)] + [abs(b) for b in b_bars] + [1.0]
    return min(0.01, 0.1 / max(mags))


@dataclass(frozen=True)
class DenseSolution:
    """Solution values (and right-hand sides) on a uniform grid of step h."""

    h: float
    values: np.ndarray
    derivs: np.ndarray
    interp_order: str = "cubic"

    @property
    def t_grid(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.h

    @property
    def T(self) -> float:
        return (len(self.values) - 1) * self.h

    def __call__(self, s):
        """Evaluate at time(s) s in [0, T] by cubic Hermite interpolation."""
        s_arr = np.asarray(s, dtype=float)
        scalar = s_arr.ndim == 0
        s_arr = np.atleast_1d(s_arr)
        if np.any(s_arr < 0) or np.any(s_arr > self.T * (1 + 1e-12) + 1e-300):
            raise DomainError(f"evaluation outside [0, {self.T}]")
        n = len(self.values) - 1
        u = s_arr / self.h
        j = np.clip(u.astype(np.int64), 0, n - 1)
        w = np.clip(u - j, 0.0, 1.0)
        y0, y1 = self.values[j], self.values[j + 1]
        d0, d1 = self.derivs[j], self.derivs[j + 1]
        if self.interp_order == "linear":
            out = y0 + w * (y1 - y0)
        else:
            w2, w3 = w * w, w * w * w
            out = ((2 * w3 - 3 * w2 + 1) * y0 + (w3 - 2 * w2 + w) * self.h * d0
                   + (-2 * w3 + 3 * w2) * y1 + (w3 - w2) * self.h * d1)
        return float(out[0]) if scalar else out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "x"])
            for i, v in enumerate(self.values):
                writer.writerow([f"{i * self.h:.17g}", f"{v:.17g}"])


def _hermite(y0, y1, d0, d1, w, h):
    w2 = w * w
    w3 = w2 * w
    return ((2 * w3 - 3 * w2 + 1) * y0 + (w3 - 2 * w2 + w) * h * d0
            + (-2 * w3 + 3 * w2) * y1 + (w3 - w2) * h * d1)


class _Memory:
    """Filled grid (step h) plus an optional fine prefix over [0, h]."""

    def __init__(self, h: float, x0: float, f0: float):
        self.h = h
        self.xs = [x0]
        self.fs = [f0]
        self.fine: "_Memory | None" = None

    def append(self, x: float, f: float) -> None:
        self.xs.append(x)
        self.fs.append(f)

    def filled_end(self) -> float:
        return (len(self.xs) - 1) * self.h

    def eval(self, s: float) -> float:
        if self.fine is not None and s <= self.h:
            return self.fine.eval(s)
        u = s / self.h
        j = int(u)
        last = len(self.xs) - 1
        if j >= last:
            return self.xs[last]
        w = u - j
        if w == 0.0:
            return self.xs[j]
        return _hermite(self.xs[j], self.xs[j + 1], self.fs[j], self.fs[j + 1],
                        w, self.h)


def _integrate(a: float, coeffs, mem: _Memory, n_target: int) -> None:
    """Advance mem to n_target grid nodes of step mem.h."""
    h = mem.h
    q_max = max((qv for _, qv in coeffs), default=0.0)

    def forcing(s: float, t0: float, x1p: float, f1p: float) -> float:
        # sum_i b_i x(q_i s); reads the provisional segment beyond the grid
        total = 0.0
        for b, qv in coeffs:
            sd = qv * s
            if sd <= t0:
                total += b * mem.eval(sd)
            else:
                w = (sd - t0) / h
                total += b * _hermite(mem.xs[-1], x1p, mem.fs[-1], f1p,
                                      min(w, 1.0), h)
        return total

    for n in range(len(mem.xs) - 1, n_target):
        t0 = n * h
        x0 = mem.xs[n]
        f0 = mem.fs[n]
        overlap = q_max * (t0 + h) > t0
        x1p = x0 + h * f0  # Euler predictor for the provisional segment
        f1p = f0
        passes = 8 if overlap else 1
        x1 = x1p
        f1 = f1p
        for _ in range(passes):
            g_half = forcing(t0 + 0.5 * h, t0, x1p, f1p)
            g_full = forcing(t0 + h, t0, x1p, f1p)
            k1 = a * x0 + forcing(t0, t0, x1p, f1p)
            k2 = a * (x0 + 0.5 * h * k1) + g_half
            k3 = a * (x0 + 0.5 * h * k2) + g_half
            k4 = a * (x0 + h * k3) + g_full
            x1 = x0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            f1 = a * x1 + g_full
            if abs(x1 - x1p) <= 1e-14 * max(1.0, abs(x1)):
                x1p, f1p = x1, f1
                break
            x1p, f1p = x1, f1
        mem.append(x1, f1)


def solve_multi_pantograph_ode(a_bar: float, b_bars, qs, x0: float, T: float,
                               h: float | None = None) -> DenseSolution:
    """Dense RK4 solution of x' = a_bar x + sum_i b_bars[i] x(qs[i] t)."""
    a_bar = float(a_bar)
    x0 = float(x0)
    if not math.isfinite(a_bar) or not math.isfinite(x0):
        raise DetSolverError("coefficients and x0 must be finite")
    if len(b_bars) != len(qs):
        raise DetSolverError(
            f"need one delay factor per coefficient, got {len(b_bars)} and {len(qs)}")
    coeffs = []
    for b, qv in zip(b_bars, qs):
        b, qv = float(b), float(qv)
        if not 0.0 < qv < 1.0:
            raise DetSolverError(f"delay factor {qv} outside (0, 1)")
        if b != 0.0:
            coeffs.append((b, qv))
    if h is None:
        h = min(default_step(a_bar, [b for b, _ in coeffs]), T)
    h = float(h)
    if h <= 0.0 or T < h:
        raise DetSolverError(f"need 0 < h <= T, got h={h}, T={T}")
    if abs(a_bar) * h > STEP_GUARD:
        raise StepTooLarge(f"|a_bar|*h = {abs(a_bar) * h:.3g} exceeds "
                           f"{STEP_GUARD}; shrink h")
    n_steps = max(1, math.ceil(T / h - 1e-12))

    f0 = a_bar * x0 + sum(b * x0 for b, _ in coeffs)  # delayed args are 0 at t=0

    # bootstrap: integrate [0, h] on a fine grid to seed the first interval
    fine = _Memory(h / BOOTSTRAP_SUBSTEPS, x0, f0)
    _integrate(a_bar, coeffs, fine, BOOTSTRAP_SUBSTEPS)

    mem = _Memory(h, x0, f0)
    mem.fine = fine
    mem.append(fine.xs[-1], fine.fs[-1])
    _integrate(a_bar, coeffs, mem, n_steps)
    return DenseSolution(h=h, values=np.asarray(mem.xs),
                         derivs=np.asarray(mem.fs))


def solve_pantograph_ode(a_bar: float, b_bar: float, q: float, x0: float,
                         T: float, h: float | None = None) -> DenseSolution:
    """Dense RK4 solution of the single-delay equation
    x' = a_bar x + b_bar x(q t)."""
    return solve_multi_pantograph_ode(a_bar, [b_bar], [q], x0, T, h)


def kato_mcleod_psi(q: float, b_bar: float, t: float) -> float:
    """Asymptotic growth scale of x' = b_bar x(q t):
    psi(t) = t^k (log t)^h exp((log t - log log t)^2 / (2 c')) with
    c' = log(1/q), k = 1/2 + 1/c' + log(b_bar c')/c',
    h = -1 - log(b_bar c')/c'. Requires t > e and b_bar c' > 0.
    """
    if not 0.0 < q < 1.0:
        raise DomainError(f"q={q} outside (0, 1)")
    if t <= math.e:
        raise DomainError(f"psi needs t > e, got t={t}")
    cp = math.log(1.0 / q)
    if b_bar * cp <= 0.0:
        raise DomainError(f"psi needs b_bar*log(1/q) > 0, got {b_bar * cp}")
    lbc = math.log(b_bar * cp)
    k = 0.5 + 1.0 / cp + lbc / cp
    h_exp = -1.0 - lbc / cp
    lt = math.log(t)
    llt = math.log(lt)
    return t ** k * lt ** h_exp * math.exp((lt - llt) ** 2 / (2.0 * cp))


def check_comparison(p_solution: DenseSolution,
                     x_solution: DenseSolution) -> bool:
    """True iff p(t) <= x(t) + 1e-9 max(1, |x(t)|) at every shared grid node."""
    if (abs(p_solution.h - x_solution.h) > 1e-15 * max(p_solution.h, x_solution.h)
            or len(p_solution.values) != len(x_solution.values)):
        raise GridMismatch(
            f"grids differ: h {p_solution.h} vs {x_solution.h}, "
            f"{len(p_solution.values)} vs {len(x_solution.values)} nodes")
    x = x_solution.values
    slack = COMPARISON_SLACK * np.maximum(1.0, np.abs(x))
    return bool(np.all(p_solution.values <= x + slack))
