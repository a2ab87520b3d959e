"""Domain types and the mean-field trust dynamics.

Every node ``i`` posts benign content at rate ``alpha_i`` and malicious
content at rate ``beta_i = 1 - alpha_i``.  Its trust share ``x_i`` is the
expected fraction of users interacting with it.  All functions here are pure
and accept either floats or numpy arrays where that makes sense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

SIMPLEX_SLACK = 1e-9


class ConfigError(ValueError):
    """Invalid parameters, shapes or configuration values."""


@dataclass(frozen=True)
class NodeParams:
    """Economic constants of one node.

    p: profit per unit trust share per unit malicious rate.
    q: cost coefficient of benign posting (quadratic in the rate).
    r: penalty coefficient of malicious posting (quadratic in the rate).
    """

    p: float
    q: float
    r: float

    def __post_init__(self):
        for name in ("p", "q", "r"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a positive finite number, got {value!r}")

    def with_r(self, r: float) -> NodeParams:
        return NodeParams(self.p, self.q, r)


@dataclass(frozen=True)
class Strategy:
    """A control pair; only ``alpha`` is stored, ``beta`` is always ``1 - alpha``."""

    alpha: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha!r}")

    @property
    def beta(self) -> float:
        return 1.0 - self.alpha

    @classmethod
    def from_beta(cls, beta: float) -> Strategy:
        return cls(1.0 - beta)


def _check_shares(x: np.ndarray) -> None:
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise ConfigError(f"trust shares must lie in [0, 1], got {x.tolist()}")
    if x.sum() > 1.0 + SIMPLEX_SLACK:
        raise ConfigError(f"trust shares must sum to at most 1, got sum {x.sum()!r}")


@dataclass(frozen=True)
class TrustState:
    x: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(-1)
        _check_shares(x)
        x.flags.writeable = False
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class NodeTrajectory:
    """Time-sampled path of one node.  ``lam`` is None for static solutions."""

    times: np.ndarray
    x: np.ndarray
    alpha: np.ndarray
    profit_density: np.ndarray
    lam: np.ndarray | None = None

    def __post_init__(self):
        arrays = [self.times, self.x, self.alpha, self.profit_density]
        if self.lam is not None:
            arrays.append(self.lam)
        lengths = {len(a) for a in arrays}
        if len(lengths) != 1:
            raise ConfigError(f"trajectory arrays have mismatched lengths {sorted(lengths)}")
        if np.any(np.diff(self.times) <= 0):
            raise ConfigError("trajectory times must be strictly increasing")
        for name in ("x", "alpha"):
            values = getattr(self, name)
            if np.any(values < -SIMPLEX_SLACK) or np.any(values > 1.0 + SIMPLEX_SLACK):
                raise ConfigError(f"trajectory {name} samples leave [0, 1]")

    @property
    def beta(self) -> np.ndarray:
        return 1.0 - self.alpha


@dataclass(frozen=True)
class GameConfig:
    """Everything a solver needs.  ``None`` solver fields mean "module default"."""

    params: tuple[NodeParams, ...]
    x0: np.ndarray = None
    horizon: float = 30.0
    step: float | None = None
    tol: float | None = None
    max_iter: int | None = None
    damping: float = 0.5
    seed: int = 0

    def __post_init__(self):
        params = tuple(self.params)
        if not params:
            raise ConfigError("at least one node is required")
        for prm in params:
            if not isinstance(prm, NodeParams):
                raise ConfigError(f"params entries must be NodeParams, got {type(prm).__name__}")
        object.__setattr__(self, "params", params)
        x0 = np.zeros(len(params)) if self.x0 is None else self.x0
        state = TrustState(x0)
        if state.n != len(params):
            raise ConfigError(f"x0 has {state.n} entries but there are {len(params)} nodes")
        object.__setattr__(self, "x0", state.x)
        if not self.horizon > 0:
            raise ConfigError(f"horizon must be positive, got {self.horizon!r}")
        if not 0.0 < self.damping <= 1.0:
            raise ConfigError(f"damping must lie in (0, 1], got {self.damping!r}")
        if self.step is not None and not self.step > 0:
            raise ConfigError(f"step must be positive, got {self.step!r}")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol!r}")
        if self.max_iter is not None and self.max_iter < 1:
            raise ConfigError(f"max_iter must be at least 1, got {self.max_iter!r}")

    @property
    def n(self) -> int:
        return len(self.params)

    @classmethod
    def symmetric(cls, n: int, p: float, q: float, r: float, **kwargs) -> GameConfig:
        return cls(params=tuple(NodeParams(p, q, r) for _ in range(n)), **kwargs)

    def param_arrays(self) -> ParamArrays:
        return ParamArrays.of(self.params)


class ParamArrays(NamedTuple):
    """Per-node p, q, r as arrays; usable wherever a NodeParams is accepted."""

    p: np.ndarray
    q: np.ndarray
    r: np.ndarray

    @classmethod
    def of(cls, params: Sequence[NodeParams]) -> ParamArrays:
        return cls(
            np.array([prm.p for prm in params], dtype=float),
            np.array([prm.q for prm in params], dtype=float),
            np.array([prm.r for prm in params], dtype=float),
        )


def _rate(s):
    return s.alpha if isinstance(s, Strategy) else s


def drift_single(x, s):
    """Rate of change of a lone node's trust share: alpha(1 - x) - beta x."""
    alpha = _rate(s)
    beta = 1.0 - alpha
    return alpha * (1.0 - x) - beta * x


def others_sum(alpha: np.ndarray) -> np.ndarray:
    """For each node, the total benign rate of every other node."""
    alpha = np.asarray(alpha, dtype=float)
    return alpha.sum(axis=-1, keepdims=True) - alpha


def drift_multi(x, strategies) -> np.ndarray:
    """Competitive trust dynamics.

    Node i gains ``alpha_i (1 - x_i)``, loses ``beta_i x_i`` to its own
    malicious posting and ``sum_{j != i} alpha_j x_i`` to competitors.
    Works on trailing axis, so (m, n) arrays of samples are fine.
    """
    if isinstance(x, TrustState):
        x = x.x
    x = np.asarray(x, dtype=float)
    if len(strategies) and isinstance(strategies[0], Strategy):
        strategies = alphas_of(strategies)
    alpha = np.asarray(strategies, dtype=float)
    if x.shape != alpha.shape:
        raise ConfigError(f"state shape {x.shape} does not match strategy shape {alpha.shape}")
    return alpha * (1.0 - x) - others_sum(alpha) * x - (1.0 - alpha) * x


def profit_density(x, s, params):
    """Instantaneous net profit p beta x - q alpha^2 - r beta^2."""
    alpha = _rate(s)
    beta = 1.0 - alpha
    return params.p * beta * x - params.q * alpha**2 - params.r * beta**2


def closed_form_trust(t, x0, alpha_i, S=0.0):
    """Exact trust share under constant controls; relaxes to alpha_i / (1 + S)."""
    decay = np.exp(-(1.0 + S) * np.asarray(t, dtype=float))
    return decay * x0 + alpha_i / (1.0 + S) * (1.0 - decay)


def long_run_average_profit(s, S, params):
    """Time-averaged net profit of constant controls, after trust has settled.

    The transient from ``x0`` decays exponentially, so it does not survive the
    averaging and the result is independent of the initial share.
    """
    alpha = _rate(s)
    p, q, r = params.p, params.q, params.r
    return p * (1.0 - alpha) * alpha / (1.0 + S) - r * (1.0 - alpha) ** 2 - q * alpha**2


def as_strategies(alphas: Sequence[float]) -> list[Strategy]:
    return [Strategy(float(a)) for a in alphas]


def alphas_of(strategies: Sequence[Strategy]) -> np.ndarray:
    return np.array([s.alpha for s in strategies], dtype=float)
