"""Euler-Maruyama simulation for stochastic pantograph equations.

The proportional delay q t is unbounded, so every path keeps its full
trajectory in memory and delayed values are read back by linear
interpolation of the stored grid (q t_n <= t_n always, so one forward
sweep suffices). Randomness is counter-based: each path owns Philox
streams keyed by (master_seed, path_index, purpose), which makes every
per-path output independent of execution order, chunk width, and thread
count. Ensembles are processed in path chunks sized to a fixed array
budget; within a chunk all arithmetic is elementwise across paths, so a
chunk column is bit-identical to the same path simulated alone.

Paths that leave floating-point range are frozen rather than aborted: in
exponential-growth regimes a path can exceed 1e150 inside the horizon,
and the estimators downstream need to know about it instead of dying on
an overflow. A frozen path carries its last safe value to the end of the
grid and records the step at which it froze.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linalg, models

OVERFLOW_LIMIT = 1e150
CHUNK_BUDGET = 16_000_000  # floats per value array in a chunk (about 128 MB)

PURPOSE_INCREMENTS = 0
PURPOSE_INITIAL = 1
PURPOSE_REFINE_BASE = 8  # purpose 8 + level: Brownian midpoint refinement


class SdeSimError(Exception):
    """Base class for simulation failures."""


class StepTooLarge(SdeSimError):
    """h violates the explicit-scheme step bound for this model."""


class InvalidInitial(SdeSimError):
    """Non-finite or wrongly shaped realized initial value."""


@dataclass(frozen=True)
class RandomStreamSpec:
    """Counter-based random stream identity for one path.

    ``generator(purpose)`` returns a fresh Philox generator seeded by
    SeedSequence(master_seed, spawn_key=(path_index, purpose)), so the
    same (seed, path, purpose) triple always replays the same stream.
    Purposes: 0 Brownian increments, 1 initial-condition draw, 8+level
    midpoint refinement noise.
    """

    master_seed: int
    path_index: int

    def generator(self, purpose: int = PURPOSE_INCREMENTS) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed,
                                    spawn_key=(self.path_index, purpose))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class Trajectory:
    """One simulated path on the uniform grid 0, h, ..., n h.

    ``values`` has shape (n+1,) for scalar models and (n+1, d) for matrix
    models. ``overflow`` marks a frozen path; ``freeze_index`` is the step
    at which the update first left [-1e150, 1e150] (the stored value at
    and after that node is the last safe state).
    """

    h: float
    T: float
    values: np.ndarray
    seed: RandomStreamSpec
    model_ref: object
    overflow: bool = False
    freeze_index: int | None = None

    @property
    def t_grid(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.h

    def to_csv(self, path) -> None:
        import csv
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            if self.values.ndim == 1:
                writer.writerow(["t", "x"])
                for i, v in enumerate(self.values):
                    writer.writerow([f"{i * self.h:.17g}", f"{v:.17g}"])
            else:
                d = self.values.shape[1]
                writer.writerow(["t"] + [f"x_{j + 1}" for j in range(d)])
                for i in range(len(self.values)):
                    row = [f"{i * self.h:.17g}"]
                    row += [f"{v:.17g}" for v in self.values[i]]
                    writer.writerow(row)


def max_step(model) -> float:
    """Largest h the explicit scheme accepts for this model."""
    if isinstance(model, models.ScalarPantographModel):
        scale = max(1.0, abs(model.a), abs(model.b),
                    model.sigma ** 2, model.rho ** 2)
    elif isinstance(model, models.MultiDelayModel):
        scale = max(1.0, abs(model.a), sum(abs(b) for b in model.b),
                    (abs(model.sigma) + sum(abs(s) for s in model.sigma_delayed)) ** 2)
    elif isinstance(model, models.MatrixModel):
        scale = max(1.0, linalg.spectral_norm(model.A),
                    linalg.spectral_norm(model.B),
                    linalg.spectral_norm(model.Sigma) ** 2,
                    linalg.spectral_norm(model.Theta) ** 2)
    else:
        raise SdeSimError(f"unknown model type {type(model).__name__}")
    return 0.1 / scale


def _check_step(model, h: float, T: float) -> int:
    if h <= 0.0:
        raise SdeSimError(f"h must be positive, got {h}")
    if T < h:
        raise SdeSimError(f"need T >= h, got T={T}, h={h}")
    hmax = max_step(model)
    if h > hmax * (1 + 1e-12):
        raise StepTooLarge(f"h={h} exceeds the step bound {hmax:.6g} "
                           f"for this model")
    return max(1, math.ceil(T / h - 1e-12))


def _delayed(V: np.ndarray, i: int, q: float):
    """Linear interpolant of stored values at time q * (i h), vectorized
    over the chunk (and components, for matrix chunks)."""
    u = q * i
    j = int(u)
    w = u - j
    if w == 0.0:
        return V[j]
    return (1.0 - w) * V[j] + w * V[j + 1]


def _increments(streams, n_steps: int, h: float) -> np.ndarray:
    """Brownian increments, time-major (n_steps, k); one column per path."""
    D = np.empty((n_steps, len(streams)))
    for col, spec in enumerate(streams):
        D[:, col] = spec.generator(PURPOSE_INCREMENTS).standard_normal(n_steps)
    D *= math.sqrt(h)
    return D


def _freeze_update(X, Xn, alive, freeze_idx, i, over):
    """Apply overflow freezing for step i; returns the stored next state."""
    newly = over & alive
    if newly.any():
        freeze_idx[newly] = i
        alive &= ~over
    return np.where(alive, X, Xn), alive


def _scalar_chunk(model, x0, streams, h, T, n_steps, dW=None):
    a, b, sigma, rho, q = (model.a, model.b, model.sigma, model.rho, model.q)
    k = len(streams)
    V = np.empty((n_steps + 1, k))
    V[0] = x0
    D = _increments(streams, n_steps, h) if dW is None else dW
    alive = np.ones(k, dtype=bool)
    freeze_idx = np.full(k, -1, dtype=np.int64)
    for i in range(n_steps):
        Xn = V[i]
        Xd = _delayed(V, i, q)
        X = Xn + (a * Xn + b * Xd) * h + (sigma * Xn + rho * Xd) * D[i]
        over = ~(np.abs(X) <= OVERFLOW_LIMIT)  # catches NaN as well
        if over.any() or not alive.all():
            X, alive = _freeze_update(X, Xn, alive, freeze_idx, i, over)
        V[i + 1] = X
    return V, freeze_idx


def _multi_chunk(model, x0, streams, h, T, n_steps, dW=None):
    a, sigma = model.a, model.sigma
    drift_terms = [(b, qv) for b, qv in zip(model.b, model.q)]
    noise_terms = [(s, rv) for s, rv in zip(model.sigma_delayed, model.r)]
    k = len(streams)
    V = np.empty((n_steps + 1, k))
    V[0] = x0
    D = _increments(streams, n_steps, h) if dW is None else dW
    alive = np.ones(k, dtype=bool)
    freeze_idx = np.full(k, -1, dtype=np.int64)
    for i in range(n_steps):
        Xn = V[i]
        drift = a * Xn
        for b, qv in drift_terms:
            drift = drift + b * _delayed(V, i, qv)
        diff = sigma * Xn
        for s, rv in noise_terms:
            diff = diff + s * _delayed(V, i, rv)
        X = Xn + drift * h + diff * D[i]
        over = ~(np.abs(X) <= OVERFLOW_LIMIT)
        if over.any() or not alive.all():
            X, alive = _freeze_update(X, Xn, alive, freeze_idx, i, over)
        V[i + 1] = X
    return V, freeze_idx


def _mat_apply(M: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Per-component accumulation of X @ M.T for X of shape (k, d).

    Written as explicit column operations (not a BLAS call) so the result
    for each path is bit-identical regardless of chunk width or thread
    count.
    """
    d = M.shape[0]
    out = np.zeros_like(X)
    for r in range(d):
        acc = out[:, r]
        for c in range(d):
            m = M[r, c]
            if m != 0.0:
                acc += m * X[:, c]
    return out


def _matrix_chunk(model, x0, streams, h, T, n_steps, dW=None):
    A, B, Sg, Th, q = model.A, model.B, model.Sigma, model.Theta, model.q
    d = model.d
    k = len(streams)
    V = np.empty((n_steps + 1, k, d))
    V[0] = x0
    D = _increments(streams, n_steps, h) if dW is None else dW
    alive = np.ones(k, dtype=bool)
    freeze_idx = np.full(k, -1, dtype=np.int64)
    for i in range(n_steps):
        Xn = V[i]
        Xd = _delayed(V, i, q)
        drift = _mat_apply(A, Xn) + _mat_apply(B, Xd)
        diff = _mat_apply(Sg, Xn) + _mat_apply(Th, Xd)
        X = Xn + drift * h + diff * D[i][:, None]
        over = ~(np.max(np.abs(X), axis=1) <= OVERFLOW_LIMIT)
        if over.any() or not alive.all():
            newly = over & alive
            if newly.any():
                freeze_idx[newly] = i
                alive &= ~over
            X = np.where(alive[:, None], X, Xn)
        V[i + 1] = X
    return V, freeze_idx


def _chunk_kernel(model):
    if isinstance(model, models.ScalarPantographModel):
        return _scalar_chunk
    if isinstance(model, models.MultiDelayModel):
        return _multi_chunk
    if isinstance(model, models.MatrixModel):
        return _matrix_chunk
    raise SdeSimError(f"unknown model type {type(model).__name__}")


def _validate_x0(model, x0):
    d = models.dimension(model)
    if d == 1:
        if not np.isscalar(x0) and np.asarray(x0).shape not in ((), (1,)):
            raise InvalidInitial(f"scalar model needs scalar x0, got shape "
                                 f"{np.asarray(x0).shape}")
        x0 = float(np.asarray(x0).reshape(()))
        if not math.isfinite(x0):
            raise InvalidInitial(f"non-finite x0: {x0}")
        return x0
    arr = np.asarray(x0, dtype=float)
    if arr.shape != (d,):
        raise InvalidInitial(f"matrix model needs x0 of shape ({d},), "
                             f"got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInitial("non-finite entries in x0")
    return arr


def simulate_path(model, x0, h: float, T: float,
                  stream: RandomStreamSpec, _dW=None) -> Trajectory:
    """One Euler-Maruyama path of the given model.

    X_{n+1} = X_n + (a X_n + b X~(q t_n)) h + (sigma X_n + rho X~(q t_n)) dB_n
    with dB_n ~ N(0, h) drawn from the path's increment stream and X~ the
    linear interpolant of already-stored values (multi-delay and matrix
    variants use their respective sums and matrix products).
    """
    models.validate(model)
    x0 = _validate_x0(model, x0)
    n_steps = _check_step(model, h, T)
    kernel = _chunk_kernel(model)
    V, freeze_idx = kernel(model, x0, [stream], h, T, n_steps, dW=_dW)
    values = V[:, 0] if V.ndim == 2 else V[:, 0, :]
    fi = int(freeze_idx[0])
    return Trajectory(h=h, T=n_steps * h, values=values, seed=stream,
                      model_ref=model, overflow=fi >= 0,
                      freeze_index=fi if fi >= 0 else None)


def brownian_refinement(stream: RandomStreamSpec, n_coarse: int, h: float,
                        levels: int) -> np.ndarray:
    """Refine the path's coarse increments by Levy midpoint sampling.

    Returns increments on the grid of step h / 2**levels that sum, in
    consecutive pairs, to the coarser levels' increments, so a fine
    simulation shares the same underlying Brownian motion as the coarse
    one drawn from ``stream``.
    """
    inc = stream.generator(PURPOSE_INCREMENTS).standard_normal(n_coarse)
    inc = inc * math.sqrt(h)
    step = h
    for level in range(levels):
        rng = stream.generator(PURPOSE_REFINE_BASE + level)
        mid = 0.5 * inc + math.sqrt(step / 4.0) * rng.standard_normal(len(inc))
        out = np.empty(2 * len(inc))
        out[0::2] = mid
        out[1::2] = inc - mid
        inc = out
        step *= 0.5
    return inc


@dataclass
class Ensemble:
    """Streamed ensemble handle: iterates Trajectory objects path by path.

    Heavy consumers (the stats module) use ``chunks()`` instead, which
    yields (paths_slice, values_array, freeze_idx) blocks without
    materializing per-path objects. Chunk boundaries and thread count do
    not affect any per-path output.
    """

    model: object
    x0_spec: models.InitialCondition
    h: float
    T: float
    n_paths: int
    master_seed: int
    n_threads: int = 1
    path_offset: int = 0
    chunk_size: int | None = field(default=None, repr=False)

    def __post_init__(self):
        models.validate(self.model)
        self.x0_spec.validate(models.dimension(self.model))
        if self.n_paths < 1:
            raise SdeSimError(f"n_paths must be >= 1, got {self.n_paths}")
        self.n_steps = _check_step(self.model, self.h, self.T)
        if self.chunk_size is None:
            d = models.dimension(self.model)
            per_path = (self.n_steps + 1) * d
            self.chunk_size = max(1, min(self.n_paths,
                                         CHUNK_BUDGET // per_path))

    def _spec(self, path_index: int) -> RandomStreamSpec:
        return RandomStreamSpec(self.master_seed, path_index)

    def _x0_chunk(self, specs):
        d = models.dimension(self.model)
        if self.x0_spec.kind == "deterministic":
            base = self.x0_spec.sample(np.random.default_rng(0), d)
            if d == 1:
                return np.full(len(specs), float(base))
            return np.tile(np.asarray(base, dtype=float), (len(specs), 1))
        if d == 1:
            return np.array([
                self.x0_spec.sample(s.generator(PURPOSE_INITIAL), d)
                for s in specs])
        return np.stack([
            np.asarray(self.x0_spec.sample(s.generator(PURPOSE_INITIAL), d))
            for s in specs])

    def _run_chunk(self, start: int, stop: int):
        specs = [self._spec(i) for i in range(start, stop)]
        x0 = self._x0_chunk(specs)
        kernel = _chunk_kernel(self.model)
        V, freeze_idx = kernel(self.model, x0, specs, self.h, self.T,
                               self.n_steps)
        return start, stop, V, freeze_idx

    def chunks(self):
        """Yield (path_range, values, freeze_idx) blocks in path order.

        values is time-major: shape (n_steps+1, k) or (n_steps+1, k, d).
        freeze_idx is -1 for paths that never froze. Blocks are computed
        with up to n_threads workers but always yielded in order.
        """
        lo = self.path_offset
        hi = self.path_offset + self.n_paths
        bounds = list(range(lo, hi, self.chunk_size)) + [hi]
        jobs = list(zip(bounds[:-1], bounds[1:]))
        if self.n_threads <= 1 or len(jobs) == 1:
            for start, stop in jobs:
                yield self._run_chunk(start, stop)
            return
        # keep at most n_threads+1 chunk results in flight (memory bound)
        with ThreadPoolExecutor(max_workers=self.n_threads) as pool:
            pending = []
            it = iter(jobs)
            for s, t in it:
                pending.append(pool.submit(self._run_chunk, s, t))
                if len(pending) > self.n_threads:
                    break
            for s, t in it:
                yield pending.pop(0).result()
                pending.append(pool.submit(self._run_chunk, s, t))
            for fut in pending:
                yield fut.result()

    def __iter__(self):
        for start, stop, V, freeze_idx in self.chunks():
            for col in range(stop - start):
                vals = V[:, col] if V.ndim == 2 else V[:, col, :]
                fi = int(freeze_idx[col])
                yield Trajectory(h=self.h, T=self.n_steps * self.h,
                                 values=vals.copy(),
                                 seed=self._spec(start + col),
                                 model_ref=self.model,
                                 overflow=fi >= 0,
                                 freeze_index=fi if fi >= 0 else None)

    def __len__(self) -> int:
        return self.n_paths


def simulate_ensemble(model, x0_spec: models.InitialCondition, h: float,
                      T: float, n_paths: int, master_seed: int,
                      n_threads: int = 1, path_offset: int = 0,
                      chunk_size: int | None = None) -> Ensemble:
    """Streamed ensemble of n_paths independent paths; see Ensemble."""
    return Ensemble(model=model, x0_spec=x0_spec, h=h, T=T, n_paths=n_paths,
                    master_seed=master_seed, n_threads=n_threads,
                    path_offset=path_offset, chunk_size=chunk_size)
