"""Model descriptors for pantograph-type equations with proportional delays.

Three equation families are supported, all driven by scalar Brownian motion:

* scalar:  dX = (a X + b X(qt)) dt + (sigma X + rho X(qt)) dB
* multi-delay scalar:  dX = (a X + sum_i b_i X(q_i t)) dt
                          + (sigma X + sum_j sigma_delayed_j X(r_j t)) dB
* matrix:  dX = (A X + B X(qt)) dt + (Sigma X + Theta X(qt)) dB,  X in R^d

Every proportional-delay ratio lies strictly inside (0, 1). Models are frozen
after construction; ``validate`` returns the model unchanged when it is legal
and is idempotent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

MAX_DIM = 64

_DISTRIBUTIONS = ("normal", "uniform", "lognormal")  # all have finite 4th moments


class ModelError(ValueError):
    """Base class for model validation failures."""


class QOutOfRange(ModelError):
    """A delay ratio lies outside the open interval (0, 1)."""


class DuplicateDelay(ModelError):
    """A delay-ratio list contains a repeated value."""


class DimensionMismatch(ModelError):
    """Array shapes or coefficient-list lengths are inconsistent."""


def _check_finite_scalar(name: str, value) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError) as exc:
        raise ModelError(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(x):
        raise ModelError(f"{name} must be finite, got {x!r}")
    return x


def _check_q(name: str, q) -> float:
    q = _check_finite_scalar(name, q)
    if not 0.0 < q < 1.0:
        raise QOutOfRange(f"{name} must lie strictly inside (0, 1), got {q!r}")
    return q


@dataclass(frozen=True)
class ScalarPantographModel:
    """Scalar linear stochastic pantograph equation."""

    a: float
    b: float
    sigma: float
    rho: float
    q: float

    def validate(self) -> "ScalarPantographModel":
        for name in ("a", "b", "sigma", "rho"):
            _check_finite_scalar(name, getattr(self, name))
        _check_q("q", self.q)
        return self

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "sigma": self.sigma,
                "rho": self.rho, "q": self.q}

    @classmethod
    def from_dict(cls, d: dict) -> "ScalarPantographModel":
        return cls(a=float(d["a"]), b=float(d["b"]), sigma=float(d["sigma"]),
                   rho=float(d["rho"]), q=float(d["q"])).validate()


@dataclass(frozen=True)
class MultiDelayModel:
    """Scalar equation with several proportional delays in drift and noise.

    ``b[i]`` multiplies X(q[i] t) in the drift; ``sigma_delayed[j]``
    multiplies X(r[j] t) in the diffusion. Either list may be empty.
    """

    a: float
    b: tuple = ()
    q: tuple = ()
    sigma: float = 0.0
    sigma_delayed: tuple = ()
    r: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        object.__setattr__(self, "q", tuple(float(v) for v in self.q))
        object.__setattr__(self, "sigma_delayed",
                           tuple(float(v) for v in self.sigma_delayed))
        object.__setattr__(self, "r", tuple(float(v) for v in self.r))

    def validate(self) -> "MultiDelayModel":
        _check_finite_scalar("a", self.a)
        _check_finite_scalar("sigma", self.sigma)
        if len(self.b) != len(self.q):
            raise DimensionMismatch(
                f"len(b)={len(self.b)} must equal len(q)={len(self.q)}")
        if len(self.sigma_delayed) != len(self.r):
            raise DimensionMismatch(
                f"len(sigma_delayed)={len(self.sigma_delayed)} must equal "
                f"len(r)={len(self.r)}")
        for i, v in enumerate(self.b):
            _check_finite_scalar(f"b[{i}]", v)
        for j, v in enumerate(self.sigma_delayed):
            _check_finite_scalar(f"sigma_delayed[{j}]", v)
        for i, v in enumerate(self.q):
            _check_q(f"q[{i}]", v)
        for j, v in enumerate(self.r):
            _check_q(f"r[{j}]", v)
        # exact comparison: the contract asks for pairwise-distinct ratios
        if len(set(self.q)) != len(self.q):
            raise DuplicateDelay(f"q contains repeated ratios: {self.q}")
        if len(set(self.r)) != len(self.r):
            raise DuplicateDelay(f"r contains repeated ratios: {self.r}")
        return self

    def to_dict(self) -> dict:
        return {"a": self.a, "b": list(self.b), "q": list(self.q),
                "sigma": self.sigma,
                "sigma_delayed": list(self.sigma_delayed), "r": list(self.r)}

    @classmethod
    def from_dict(cls, d: dict) -> "MultiDelayModel":
        return cls(a=float(d["a"]), b=tuple(d.get("b", ())),
                   q=tuple(d.get("q", ())), sigma=float(d.get("sigma", 0.0)),
                   sigma_delayed=tuple(d.get("sigma_delayed", ())),
                   r=tuple(d.get("r", ()))).validate()


def _as_square(name: str, M, d: int) -> np.ndarray:
    arr = np.asarray(M, dtype=float)
    if arr.shape != (d, d):
        raise DimensionMismatch(f"{name} must be {d}x{d}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ModelError(f"{name} contains non-finite entries")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class MatrixModel:
    """d-dimensional linear system with one proportional delay."""

    A: np.ndarray
    B: np.ndarray
    Sigma: np.ndarray
    Theta: np.ndarray
    q: float
    d: int

    def validate(self) -> "MatrixModel":
        if not isinstance(self.d, int) or self.d < 1:
            raise DimensionMismatch(f"d must be a positive integer, got {self.d!r}")
        if self.d > MAX_DIM:
            raise DimensionMismatch(f"d={self.d} exceeds the supported cap {MAX_DIM}")
        for name in ("A", "B", "Sigma", "Theta"):
            object.__setattr__(self, name, _as_square(name, getattr(self, name), self.d))
        _check_q("q", self.q)
        return self

    def to_dict(self) -> dict:
        return {"A": np.asarray(self.A).tolist(), "B": np.asarray(self.B).tolist(),
                "Sigma": np.asarray(self.Sigma).tolist(),
                "Theta": np.asarray(self.Theta).tolist(),
                "q": self.q, "d": self.d}

    @classmethod
    def from_dict(cls, d: dict) -> "MatrixModel":
        dim = int(d.get("d", len(d["A"])))
        return cls(A=np.asarray(d["A"], dtype=float),
                   B=np.asarray(d["B"], dtype=float),
                   Sigma=np.asarray(d["Sigma"], dtype=float),
                   Theta=np.asarray(d["Theta"], dtype=float),
                   q=float(d["q"]), d=dim).validate()


@dataclass(frozen=True)
class InitialCondition:
    """Initial state: a fixed value or an i.i.d. draw from a named law.

    ``kind`` is "deterministic" (value: scalar or d-vector) or "sampled"
    (value: {"distribution": name, "params": {...}}). Sampled laws are
    restricted to distributions with finite fourth moments: normal
    (mean, std), uniform (low, high), lognormal (mean, sigma of the
    underlying normal). Sampled vectors draw components independently.
    """

    kind: str = "deterministic"
    value: object = 1.0

    def validate(self, d: int = 1) -> "InitialCondition":
        if self.kind == "deterministic":
            val = self.value
            if np.isscalar(val):
                _check_finite_scalar("value", val)
            else:
                arr = np.asarray(val, dtype=float)
                if arr.ndim != 1 or arr.shape[0] != d:
                    raise DimensionMismatch(
                        f"deterministic vector value must have shape ({d},), "
                        f"got {arr.shape}")
                if not np.all(np.isfinite(arr)):
                    raise ModelError("initial value contains non-finite entries")
        elif self.kind == "sampled":
            if not isinstance(self.value, dict):
                raise ModelError("sampled initial condition needs a "
                                 "{'distribution': ..., 'params': ...} value")
            dist = self.value.get("distribution")
            if dist not in _DISTRIBUTIONS:
                raise ModelError(
                    f"distribution {dist!r} not in the finite-4th-moment "
                    f"whitelist {_DISTRIBUTIONS}")
            params = self.value.get("params", {})
            for v in params.values():
                _check_finite_scalar("distribution parameter", v)
            if dist == "normal" and float(params.get("std", 1.0)) < 0:
                raise ModelError("normal std must be nonnegative")
            if dist == "lognormal" and float(params.get("sigma", 1.0)) < 0:
                raise ModelError("lognormal sigma must be nonnegative")
            if dist == "uniform" and float(params.get("low", 0.0)) > float(params.get("high", 1.0)):
                raise ModelError("uniform requires low <= high")
        else:
            raise ModelError(f"kind must be 'deterministic' or 'sampled', got {self.kind!r}")
        return self

    def sample(self, rng: np.random.Generator, d: int = 1):
        """Realize one initial state: a float (d == 1) or a (d,) array."""
        if self.kind == "deterministic":
            if np.isscalar(self.value):
                x = float(self.value)
                return x if d == 1 else np.full(d, x)
            return np.asarray(self.value, dtype=float).copy()
        dist = self.value["distribution"]
        params = self.value.get("params", {})
        size = None if d == 1 else d
        if dist == "normal":
            out = rng.normal(float(params.get("mean", 0.0)),
                             float(params.get("std", 1.0)), size=size)
        elif dist == "uniform":
            out = rng.uniform(float(params.get("low", 0.0)),
                              float(params.get("high", 1.0)), size=size)
        else:  # lognormal
            out = rng.lognormal(float(params.get("mean", 0.0)),
                                float(params.get("sigma", 1.0)), size=size)
        return float(out) if d == 1 else np.asarray(out, dtype=float)

    def to_dict(self) -> dict:
        if self.kind == "deterministic" and not np.isscalar(self.value):
            return {"kind": self.kind, "value": np.asarray(self.value).tolist()}
        return {"kind": self.kind, "value": self.value}

    @classmethod
    def from_dict(cls, d: dict) -> "InitialCondition":
        if np.isscalar(d):
            return cls("deterministic", float(d)).validate()
        return cls(kind=d.get("kind", "deterministic"), value=d.get("value", 1.0))


AnyModel = (ScalarPantographModel, MultiDelayModel, MatrixModel)


def validate(model):
    """Validate any model object; returns it unchanged when legal."""
    if not isinstance(model, AnyModel):
        raise ModelError(f"not a model: {type(model).__name__}")
    return model.validate()


def model_to_json(model) -> str:
    return json.dumps(validate(model).to_dict(), sort_keys=True)


def model_from_dict(d: dict):
    """Rebuild a model from its dict form, inferring the family from fields."""
    if "A" in d:
        return MatrixModel.from_dict(d)
    if isinstance(d.get("b"), (list, tuple)) or "sigma_delayed" in d or "r" in d:
        return MultiDelayModel.from_dict(d)
    return ScalarPantographModel.from_dict(d)


def model_from_json(text: str):
    return model_from_dict(json.loads(text))


def dimension(model) -> int:
    """State dimension: 1 for scalar families, d for matrix models."""
    return model.d if isinstance(model, MatrixModel) else 1
