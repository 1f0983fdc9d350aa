"""Empirical moment curves, exponent fits, and analytic-vs-empirical verdicts.

The estimators consume ensembles as a single streaming pass: per-path
statistics (moment contributions at the subsampled nodes, tail suprema
for the almost-sure exponents) are accumulated chunk by chunk, so only
aggregates persist. Paths are i.i.d., which makes standard errors plain
sample-std/sqrt(M) and the aggregation a commutative reduction that is
safe under out-of-order chunk completion.

Overflowed (frozen) paths are excluded from moment estimates past their
freeze step, with the exclusion count reported per node. They stay in
the almost-sure statistics: a frozen path is evidence about pathwise
growth, not a missing value.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

LOG_FLOOR = 1e-300       # |X| floor before taking logs
DEFAULT_NODES = 32
MIN_FIT_NODES = 8
SPLIT_WARN_REL = 0.25    # split-half slope disagreement that flags a regime mismatch
SPLIT_WARN_ABS = 0.05

AS_KINDS = ("polynomial", "exponential")
ESTIMATE_KINDS = ("polynomial_mean", "polynomial_as",
                  "exponential_mean", "exponential_as")


class StatsError(Exception):
    """Base class for estimator failures."""


class EmptyEnsemble(StatsError):
    """No paths to aggregate."""


class InsufficientNodes(StatsError):
    """Fewer than MIN_FIT_NODES curve nodes inside the fit window."""


class NonpositiveMoment(StatsError):
    """A fit window contains a nonpositive (or undefined) moment value."""


class RegimeMismatch(StatsError):
    """Analytic report and empirical estimates describe different regimes."""


@dataclass(frozen=True)
class MomentCurve:
    """Estimated t -> E|X(t)|^p at log-spaced grid nodes."""

    p: int
    t_nodes: np.ndarray
    m_hat: np.ndarray
    stderr: np.ndarray
    n_paths: int
    n_excluded: np.ndarray = None  # overflow-frozen paths dropped, per node

    def __post_init__(self):
        if np.any(np.diff(self.t_nodes) <= 0):
            raise StatsError("curve nodes must be strictly increasing")
        if self.n_excluded is None:
            object.__setattr__(self, "n_excluded",
                               np.zeros(len(self.t_nodes), dtype=np.int64))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "m_hat", "stderr", "n_excluded"])
            for t, m, s, x in zip(self.t_nodes, self.m_hat, self.stderr,
                                  self.n_excluded):
                writer.writerow([f"{t:.17g}", f"{m:.17g}", f"{s:.17g}",
                                 str(int(x))])


@dataclass(frozen=True)
class ExponentEstimate:
    """One fitted or pathwise exponent.

    ``kind`` is polynomial_mean / exponential_mean for moment-curve fits
    and polynomial_as / exponential_as for the per-path tail statistics
    (95th percentile primary, max kept as a diagnostic). ``warning`` is
    set when split-window slopes disagree enough to suggest the data does
    not follow the fitted functional form. The almost-sure kinds involve
    no regression; their r_squared is reported as 1.0.
    """

    kind: str
    value: float
    window: tuple
    r_squared: float
    warning: str | None = None
    max_value: float | None = None
    n_floored: int = 0
    n_paths: int | None = None

    def __post_init__(self):
        if self.kind not in ESTIMATE_KINDS:
            raise StatsError(f"kind must be one of {ESTIMATE_KINDS}, "
                             f"got {self.kind!r}")
        if not 0.0 <= self.r_squared <= 1.0:
            raise StatsError(f"r_squared outside [0,1]: {self.r_squared}")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "value": self.value,
               "window": [self.window[0], self.window[1]],
               "r_squared": self.r_squared}
        if self.warning is not None:
            out["warning"] = self.warning
        if self.max_value is not None:
            out["max_value"] = self.max_value
        if self.n_floored:
            out["n_floored"] = self.n_floored
        if self.n_paths is not None:
            out["n_paths"] = self.n_paths
        return out

    def to_csv(self, path) -> None:
        d = self.to_dict()
        keys = list(d.keys())
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(keys)
            writer.writerow([d[k] if not isinstance(d[k], float)
                             else f"{d[k]:.17g}" for k in keys])


def _as_chunks(ensemble):
    """Adapt an Ensemble (has .chunks()) or an iterable of trajectories."""
    chunks = getattr(ensemble, "chunks", None)
    if chunks is not None:
        yield from chunks()
        return
    for traj in ensemble:
        vals = np.asarray(traj.values)
        V = vals[:, None] if vals.ndim == 1 else vals[:, None, :]
        fi = getattr(traj, "freeze_index", None)
        fz = np.array([fi if fi is not None else -1], dtype=np.int64)
        yield 0, 1, V, fz


def _grid_meta(ensemble):
    """(h, n_steps) for an Ensemble or a list of equal-grid trajectories."""
    h = getattr(ensemble, "h", None)
    n_steps = getattr(ensemble, "n_steps", None)
    if h is not None and n_steps is not None:
        return float(h), int(n_steps)
    try:
        first = ensemble[0]
    except (IndexError, TypeError, KeyError):
        raise EmptyEnsemble("cannot infer the grid from this ensemble") from None
    return float(first.h), len(first.values) - 1


def _node_indices(n_steps: int, h: float, n_nodes: int) -> np.ndarray:
    T = n_steps * h
    t_lo = max(h, T / 100.0)
    ts = np.geomspace(t_lo, T, n_nodes)
    idx = np.unique(np.clip(np.round(ts / h).astype(np.int64), 1, n_steps))
    return idx


@dataclass
class StatsBundle:
    """Aggregates from one streaming pass over an ensemble."""

    n_paths: int = 0
    curves: dict = field(default_factory=dict)        # p -> MomentCurve
    as_estimates: dict = field(default_factory=dict)  # kind -> ExponentEstimate


def collect(ensemble, p_orders=(), n_nodes: int = DEFAULT_NODES,
            as_kinds=()) -> StatsBundle:
    """Single pass over the ensemble computing every requested statistic.

    p_orders: moment orders for estimate_moment_curve-style curves.
    as_kinds: subset of {"polynomial", "exponential"} tail statistics.
    """
    p_orders = tuple(p_orders)
    as_kinds = tuple(as_kinds)
    for p in p_orders:
        if p not in (1, 2, 4):
            raise StatsError(f"moment order must be in {{1,2,4}}, got {p}")
    for kind in as_kinds:
        if kind not in AS_KINDS:
            raise StatsError(f"a.s. kind must be in {AS_KINDS}, got {kind!r}")

    h, n_steps = _grid_meta(ensemble)
    T = n_steps * h
    idx = _node_indices(n_steps, h, n_nodes)
    t_nodes = idx * h

    if as_kinds and T < 100.0:
        raise StatsError(f"a.s. exponent estimation needs horizon >= 100, "
                         f"got T={T}")
    tail_lo = int(math.ceil((T / 2.0) / h - 1e-9))
    tail_idx = np.arange(tail_lo, n_steps + 1)
    tail_t = tail_idx * h

    counts = np.zeros(len(idx), dtype=np.int64)
    sums = {p: np.zeros(len(idx)) for p in p_orders}
    sqsums = {p: np.zeros(len(idx)) for p in p_orders}
    sup_values = {kind: [] for kind in as_kinds}
    n_floored = 0
    n_paths = 0

    for start, stop, V, fz in _as_chunks(ensemble):
        k = stop - start
        n_paths += k
        if p_orders:
            block = V[idx]
            A = np.abs(block) if block.ndim == 2 else \
                np.sqrt(np.sum(block * block, axis=2))
            include = ~((fz[None, :] >= 0) & (idx[:, None] > fz[None, :]))
            counts += include.sum(axis=1)
            for p in p_orders:
                P = A if p == 1 else A ** p
                P = np.where(include, P, 0.0)
                sums[p] += P.sum(axis=1)
                sqsums[p] += (P * P).sum(axis=1)
        if as_kinds:
            block = V[tail_idx]
            A = np.abs(block) if block.ndim == 2 else \
                np.sqrt(np.sum(block * block, axis=2))
            n_floored += int((A < LOG_FLOOR).sum())
            logs = np.log(np.maximum(A, LOG_FLOOR))
            if "polynomial" in as_kinds:
                sup_values["polynomial"].append(
                    (logs / np.log(tail_t)[:, None]).max(axis=0))
            if "exponential" in as_kinds:
                sup_values["exponential"].append(
                    (logs / tail_t[:, None]).max(axis=0))

    if n_paths == 0:
        raise EmptyEnsemble("ensemble produced no paths")

    bundle = StatsBundle(n_paths=n_paths)
    for p in p_orders:
        with np.errstate(invalid="ignore", divide="ignore"):
            m = np.where(counts > 0, sums[p] / np.maximum(counts, 1), np.nan)
            var = np.where(counts > 1,
                           (sqsums[p] - np.maximum(counts, 1) * m * m)
                           / np.maximum(counts - 1, 1), 0.0)
            stderr = np.sqrt(np.maximum(var, 0.0)
                             / np.maximum(counts, 1))
            stderr = np.where(counts > 0, stderr, np.nan)
        bundle.curves[p] = MomentCurve(
            p=p, t_nodes=t_nodes, m_hat=m, stderr=stderr, n_paths=n_paths,
            n_excluded=n_paths - counts)
    for kind in as_kinds:
        stats = np.concatenate(sup_values[kind])
        bundle.as_estimates[kind] = ExponentEstimate(
            kind=f"{kind}_as",
            value=float(np.percentile(stats, 95.0)),
            window=(tail_t[0], tail_t[-1]),
            r_squared=1.0,
            max_value=float(stats.max()),
            n_floored=n_floored,
            n_paths=n_paths)
    return bundle


def estimate_moment_curve(ensemble, p: int,
                          n_nodes: int = DEFAULT_NODES) -> MomentCurve:
    """Empirical t -> (1/M) sum |X_k(t)|^p at n_nodes log-spaced times."""
    return collect(ensemble, p_orders=(p,), n_nodes=n_nodes).curves[p]


def estimate_as_exponent(ensemble, kind: str) -> ExponentEstimate:
    """Per-path tail statistic for the almost-sure exponent.

    Each path contributes its supremum over [T/2, T] of log|X(t)|/log t
    (polynomial) or log|X(t)|/t (exponential); the 95th percentile across
    paths is the reported estimate and the max a diagnostic.
    """
    return collect(ensemble, as_kinds=(kind,)).as_estimates[kind]


def _ols(x: np.ndarray, y: np.ndarray):
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    fit = A @ coef
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return float(coef[0]), r2


def _fit(curve: MomentCurve, window, x_of_t, kind: str) -> ExponentEstimate:
    t0, t1 = float(window[0]), float(window[1])
    if t0 < 1.0:
        raise StatsError(f"fit window must start at t >= 1, got {t0}")
    if t1 <= t0:
        raise StatsError(f"empty window [{t0}, {t1}]")
    sel = (curve.t_nodes >= t0 * (1 - 1e-12)) & \
          (curve.t_nodes <= t1 * (1 + 1e-12))
    if int(sel.sum()) < MIN_FIT_NODES:
        raise InsufficientNodes(f"{int(sel.sum())} nodes in [{t0}, {t1}], "
                                f"need {MIN_FIT_NODES}")
    m = curve.m_hat[sel]
    if not np.all(m > 0.0):
        raise NonpositiveMoment("window contains nonpositive or undefined "
                                "moment values")
    x = x_of_t(curve.t_nodes[sel])
    y = np.log(m)
    slope, r2 = _ols(x, y)

    half = len(x) // 2
    s1, _ = _ols(x[:half], y[:half])
    s2, _ = _ols(x[half:], y[half:])
    warning = None
    if abs(s1 - s2) > max(SPLIT_WARN_REL * max(abs(s1), abs(s2)),
                          SPLIT_WARN_ABS):
        warning = (f"split-window slopes disagree ({s1:.4g} vs {s2:.4g}); "
                   f"the data may not follow the fitted form over "
                   f"[{t0:.6g}, {t1:.6g}]")
    return ExponentEstimate(kind=kind, value=slope, window=(t0, t1),
                            r_squared=r2, warning=warning,
                            n_paths=curve.n_paths)


def fit_polynomial_exponent(curve: MomentCurve, window) -> ExponentEstimate:
    """OLS slope of log m_hat against log t over the window."""
    return _fit(curve, window, np.log, "polynomial_mean")


def fit_exponential_rate(curve: MomentCurve, window) -> ExponentEstimate:
    """OLS slope of log m_hat against t over the window."""
    return _fit(curve, window, lambda t: t, "exponential_mean")


_ANALYTIC_FIELD = {
    "polynomial_mean": "alpha_mean",
    "polynomial_as": "alpha_as",
    "exponential_mean": "exp_rate_mean",
    "exponential_as": "exp_rate_as",
}


@dataclass(frozen=True)
class VerdictCheck:
    kind: str
    claim: str  # "bound" or "sharp"
    analytic: float
    empirical: float
    tolerance: float
    margin: float
    passed: bool
    warning: str | None = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "claim": self.claim,
               "analytic": self.analytic, "empirical": self.empirical,
               "tolerance": self.tolerance, "margin": self.margin,
               "passed": self.passed}
        if self.warning is not None:
            out["warning"] = self.warning
        return out


@dataclass(frozen=True)
class VerdictRecord:
    passed: bool
    checks: tuple

    def to_dict(self) -> dict:
        return {"passed": self.passed,
                "checks": [c.to_dict() for c in self.checks]}


def _tolerance_for(tolerances, kind: str) -> float:
    if isinstance(tolerances, (int, float)):
        return float(tolerances)
    if kind in tolerances:
        return float(tolerances[kind])
    if "default" in tolerances:
        return float(tolerances["default"])
    raise StatsError(f"no tolerance provided for {kind!r}")


def verify_report(analytic, empirical, tolerances) -> VerdictRecord:
    """Compare empirical exponent estimates against an analytic report.

    Bound-type claims pass when empirical <= analytic + tolerance. When
    the analytic report declares the mean exponent sharp, the mean-kind
    comparison becomes two-sided: |empirical - analytic| <= tolerance.
    ``tolerances`` is a number (uniform) or a mapping from estimate kind
    (with optional "default") to tolerance.
    """
    regime = analytic.regime
    if regime not in ("polynomial", "exponential"):
        raise RegimeMismatch(f"analytic regime {regime!r} admits no "
                             f"empirical comparison")
    checks = []
    for est in empirical:
        if not est.kind.startswith(regime):
            raise RegimeMismatch(f"estimate kind {est.kind!r} does not match "
                                 f"analytic regime {regime!r}")
        ana = getattr(analytic, _ANALYTIC_FIELD[est.kind])
        if ana is None:
            raise RegimeMismatch(f"analytic report lacks a value for "
                                 f"{est.kind!r}")
        tol = _tolerance_for(tolerances, est.kind)
        sharp = est.kind.endswith("_mean") and bool(
            getattr(analytic, "sharp_mean", False))
        if sharp:
            margin = tol - abs(est.value - ana)
            claim = "sharp"
        else:
            margin = (ana + tol) - est.value
            claim = "bound"
        checks.append(VerdictCheck(kind=est.kind, claim=claim, analytic=ana,
                                   empirical=est.value, tolerance=tol,
                                   margin=margin, passed=margin >= 0.0,
                                   warning=est.warning))
    return VerdictRecord(passed=all(c.passed for c in checks),
                         checks=tuple(checks))
