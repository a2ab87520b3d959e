"""Agent-based Monte Carlo model behind the mean-field trust dynamics.

Each of N users is either unattached (state 0) or attending exactly one
node (state i = 1..n), so attention is exclusive by construction.  Per time
step dt a user

* unattached joins node i with probability alpha_i dt,
* attending j leaves for nobody with probability beta_j dt,
* attending j is poached by node i != j with probability alpha_i dt.

The expected one-step change of the share X_i / N is then exactly
dt * drift_multi(x), so the ODE is the large-N, small-dt limit.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import ConfigError, GameConfig
from .ode import Schedule

DEFAULT_DT = 1e-2
MAX_STEP_PROBABILITY = 0.5


def transition_matrix(alpha: np.ndarray, dt: float) -> np.ndarray:
    """(n+1) x (n+1) one-step probabilities; row = current state, column = next."""
    alpha = np.asarray(alpha, dtype=float)
    n = alpha.size
    P = np.zeros((n + 1, n + 1))
    P[0, 1:] = alpha * dt
    for j in range(1, n + 1):
        P[j, 1:] = alpha * dt
        P[j, 0] = (1.0 - alpha[j - 1]) * dt
        P[j, j] = 0.0
    P[np.arange(n + 1), np.arange(n + 1)] = 1.0 - P.sum(axis=1)
    return P


def check_step(alpha_max: np.ndarray, dt: float) -> None:
    """Reject dt unless every exit probability bound stays below 1/2."""
    alpha_max = np.asarray(alpha_max, dtype=float)
    beta_max = np.max(1.0 - alpha_max) if alpha_max.size else 0.0
    worst_exit = max(alpha_max.sum(), float(np.max(alpha_max.sum() - alpha_max + 1.0 - alpha_max)))
    bound = dt * (alpha_max.sum() + beta_max + worst_exit)
    if not dt > 0 or bound > MAX_STEP_PROBABILITY:
        raise ConfigError(
            f"dt={dt!r} too large: dt*(sum alpha + max beta + max exit rate) = {bound:.4g} "
            f"exceeds {MAX_STEP_PROBABILITY}"
        )


@dataclass
class AgentPopulation:
    """Mutable per-user attention states for one replicate."""

    N: int
    assignment: np.ndarray  # int8/int16 state per user
    rng_seed: int
    dt: float

    @classmethod
    def initial(cls, N: int, x0: np.ndarray, seed: int, dt: float) -> AgentPopulation:
        counts = np.floor(np.asarray(x0) * N + 0.5).astype(np.int64)
        if counts.sum() > N:
            raise ConfigError("initial shares exceed the population")
        assignment = np.zeros(N, dtype=np.int16)
        start = 0
        for i, c in enumerate(counts, start=1):
            assignment[start:start + c] = i
            start += c
        return cls(N=N, assignment=assignment, rng_seed=seed, dt=dt)

    def counts(self, n: int) -> np.ndarray:
        return np.bincount(self.assignment, minlength=n + 1)

    def step(self, alpha: np.ndarray, rng: np.random.Generator) -> None:
        """One Bernoulli-thinned step; users leaving their state are a small minority."""
        P = transition_matrix(alpha, self.dt)
        stay = np.diag(P).copy()
        np.fill_diagonal(P, 0.0)
        # u < exit probability means "move"; the same u then picks the destination
        cum_moves = np.cumsum(P, axis=1)
        u = rng.random(self.N)
        moving = np.flatnonzero(u < (1.0 - stay)[self.assignment])
        if moving.size:
            src = self.assignment[moving]
            dest = (u[moving, None] >= cum_moves[src]).sum(axis=1)
            self.assignment[moving] = dest


@dataclass(frozen=True)
class EmpiricalTrajectory:
    times: np.ndarray
    shares: np.ndarray  # (len(times), n) mean over replicates
    stderr: np.ndarray
    runs: int
    N: int


@dataclass(frozen=True)
class _Constant:
    alpha: np.ndarray

    def __call__(self, t):
        return self.alpha


def _controls(strategies, n):
    if isinstance(strategies, Schedule):
        if strategies.values.shape[1] != n:
            raise ConfigError(f"expected {n} control columns, got {strategies.values.shape[1]}")
        return strategies, strategies.values.max(axis=0)
    alpha = np.asarray(strategies, dtype=float).reshape(-1)
    if alpha.size != n:
        raise ConfigError(f"expected {n} benign rates, got {alpha.size}")
    if np.any(alpha < 0) or np.any(alpha > 1):
        raise ConfigError("benign rates must lie in [0, 1]")
    return _Constant(alpha), alpha


def _replicate(args) -> np.ndarray:
    """Shares X_i/N on the time grid for one replicate."""
    x0, n, N, times, controls, dt, seed = args
    rng = np.random.default_rng(seed)
    pop = AgentPopulation.initial(N, x0, seed, dt)
    out = np.empty((len(times), n))
    out[0] = pop.counts(n)[1:] / N
    for k in range(1, len(times)):
        pop.step(np.asarray(controls(times[k - 1])).reshape(-1), rng)
        out[k] = pop.counts(n)[1:] / N
    return out


def simulate_population(
    config: GameConfig,
    N: int,
    strategies,
    dt: float = DEFAULT_DT,
    runs: int = 20,
    horizon: float | None = None,
    workers: int = 1,
) -> EmpiricalTrajectory:
    """Average ``runs`` replicates seeded ``config.seed + k``.

    ``strategies`` is a constant vector of benign rates or a Schedule.
    ``horizon`` defaults to ``config.horizon``.
    """
    if N < 1 or runs < 1:
        raise ConfigError("N and runs must be positive")
    controls, alpha_max = _controls(strategies, config.n)
    check_step(alpha_max, dt)
    T = config.horizon if horizon is None else horizon
    m = int(round(T / dt))
    times = np.arange(m + 1) * dt
    jobs = [(config.x0, config.n, N, times, controls, dt, config.seed + k) for k in range(runs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(_replicate, jobs))
    else:
        samples = [_replicate(job) for job in jobs]
    stack = np.stack(samples)
    mean = stack.mean(axis=0)
    stderr = stack.std(axis=0, ddof=1) / np.sqrt(runs) if runs > 1 else np.zeros_like(mean)
    return EmpiricalTrajectory(times=times, shares=mean, stderr=stderr, runs=runs, N=N)


def resample(times: np.ndarray, source_times: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Linear resampling of (len(source_times), n) values onto ``times``."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    return np.column_stack([np.interp(times, source_times, col) for col in values.T])


def meanfield_gap(emp: EmpiricalTrajectory, ode_times: np.ndarray, ode_x: np.ndarray) -> np.ndarray:
    """Per-node sup over the grid of |empirical share - ODE share|."""
    ode_times = np.asarray(ode_times, dtype=float)
    ode_x = np.asarray(ode_x, dtype=float).reshape(len(ode_times), -1)
    if ode_times.shape != emp.times.shape or not np.allclose(ode_times, emp.times, rtol=0, atol=1e-12):
        raise ValueError("empirical and ODE trajectories must share one time grid; resample first")
    return np.max(np.abs(emp.shares - ode_x), axis=0)
