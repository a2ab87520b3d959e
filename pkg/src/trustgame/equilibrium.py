"""Static optima, best responses and Nash fixed points for constant controls."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import GameConfig, NodeParams, ParamArrays, Strategy, long_run_average_profit, others_sum

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000
EXTRA_STARTS = 8


def single_static_optimum(params: NodeParams) -> Strategy:
    """Unique maximiser of p(1-a)a - r(1-a)^2 - q a^2 for a lone node."""
    p, q, r = params.p, params.q, params.r
    return Strategy((p + 2.0 * r) / (2.0 * (p + q + r)))


def static_best_response(params, S):
    """Best constant benign rate against competitors whose benign rates sum to S.

    Vectorises over array-valued ``params`` fields and ``S``.
    """
    p, q, r = params.p, params.q, params.r
    return (p + 2.0 * r * (1.0 + S)) / (2.0 * (p + q + r + (q + r) * S))


def brute_force_best_response(params, S: float, resolution: float = 1e-5) -> float:
    """Grid argmax of the long-run average profit; ties go to the smaller rate."""
    if not 0.0 < resolution <= 0.01:
        raise ValueError(f"resolution must lie in (0, 0.01], got {resolution!r}")
    m = int(round(1.0 / resolution))
    grid = np.linspace(0.0, 1.0, m + 1)
    values = long_run_average_profit(grid, S, params)
    return float(grid[int(np.argmax(values))])


def best_response_slope(params: NodeParams, alpha_j: float) -> float:
    """Two-player best-response slope in the published closed form.

    Returns -(4r(q+r) + p(q+3r)) / (2(p + (q+r)(1+alpha_j)^2)).  This does not
    agree with the derivative of :func:`static_best_response`; see
    :func:`best_response_derivative` for the exact one.
    """
    p, q, r = params.p, params.q, params.r
    return -(4.0 * r * (q + r) + p * (q + 3.0 * r)) / (2.0 * (p + (q + r) * (1.0 + alpha_j) ** 2))


def best_response_derivative(params, S):
    """Exact d(best response)/dS: p(r - q) / (2(p + (q+r)(1+S))^2)."""
    p, q, r = params.p, params.q, params.r
    return p * (r - q) / (2.0 * (p + (q + r) * (1.0 + S)) ** 2)


@dataclass(frozen=True)
class StaticProfile:
    alphas: np.ndarray
    converged: bool
    iterations: int
    residual: float
    # Further distinct fixed points found from the random starts.
    alternatives: tuple[np.ndarray, ...] = field(default=())

    @property
    def betas(self) -> np.ndarray:
        return 1.0 - self.alphas


def best_response_map(alphas: np.ndarray, prm: ParamArrays) -> np.ndarray:
    return static_best_response(prm, others_sum(alphas))


def _iterate(start: np.ndarray, prm: ParamArrays, damping: float, tol: float, max_iter: int):
    alphas = start.copy()
    residual = float(np.max(np.abs(best_response_map(alphas, prm) - alphas)))
    k = 0
    while residual >= tol and k < max_iter:
        alphas = (1.0 - damping) * alphas + damping * best_response_map(alphas, prm)
        residual = float(np.max(np.abs(best_response_map(alphas, prm) - alphas)))
        k += 1
    return alphas, k, residual


def static_nash_fixed_point(config: GameConfig, starts: int = EXTRA_STARTS) -> StaticProfile:
    """Damped simultaneous best-response iteration from alpha = 0.5.

    ``starts`` extra random initial profiles (seeded by ``config.seed``) are
    run to look for other equilibria; any that converge more than 100 tol
    away from the main one are attached as ``alternatives``.
    """
    tol = config.tol if config.tol is not None else DEFAULT_TOL
    max_iter = config.max_iter if config.max_iter is not None else DEFAULT_MAX_ITER
    prm = config.param_arrays()
    alphas, k, residual = _iterate(np.full(config.n, 0.5), prm, config.damping, tol, max_iter)

    found = [alphas]
    rng = np.random.default_rng(config.seed)
    for start in rng.uniform(0.0, 1.0, size=(starts, config.n)):
        other, _, other_res = _iterate(start, prm, config.damping, tol, max_iter)
        if other_res < tol and all(np.max(np.abs(other - f)) > 100 * tol for f in found):
            found.append(other)

    return StaticProfile(
        alphas=alphas,
        converged=residual < tol,
        iterations=k,
        residual=residual,
        alternatives=tuple(found[1:]),
    )


@dataclass(frozen=True)
class NashReport:
    gains: np.ndarray  # best profitable deviation per node, clipped at 0
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.all(self.gains <= self.tolerance))


def verify_nash(
    alphas, config: GameConfig, resolution: float = 1e-4, tolerance: float = 1e-6
) -> NashReport:
    """Check every unilateral deviation on a grid fails to pay more than ``tolerance``."""
    if isinstance(alphas, StaticProfile):
        alphas = alphas.alphas
    alphas = np.asarray(alphas, dtype=float)
    grid = np.linspace(0.0, 1.0, int(round(1.0 / resolution)) + 1)
    S = others_sum(alphas)
    gains = np.empty(config.n)
    for i, prm in enumerate(config.params):
        current = long_run_average_profit(alphas[i], S[i], prm)
        best = np.max(long_run_average_profit(grid, S[i], prm))
        gains[i] = max(0.0, best - current)
    return NashReport(gains=gains, tolerance=tolerance)
