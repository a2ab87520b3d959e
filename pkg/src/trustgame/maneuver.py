"""Penalty settings (the administrator's maneuver) that pin malicious activity.

The administrator controls only ``r``.  Every inversion here is checked by
recomputing the equilibrium under the returned penalty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConfigError, GameConfig, NodeParams, ParamArrays, others_sum
from .equilibrium import single_static_optimum, static_best_response
from .pontryagin import steady_state_open_loop, symmetric_steady_alpha

R_LO = 1e-9
R_HI = 1e3
BISECTION_ITERS = 200


class InfeasibleTarget(ConfigError):
    def __init__(self, target, lo: float, hi: float, detail: str = ""):
        self.target, self.lo, self.hi = target, lo, hi
        msg = f"target beta {target!r} is not achievable; feasible interval is ({lo:.12g}, {hi:.12g})"
        super().__init__(msg + (f": {detail}" if detail else ""))


class ManeuverError(RuntimeError):
    """Bisection failed to bracket or converge."""


@dataclass(frozen=True)
class ManeuverResult:
    r: np.ndarray
    achieved_beta: np.ndarray
    target_beta: np.ndarray
    residual: float
    converged: bool = True

    @property
    def total_beta(self) -> float:
        return float(np.sum(self.achieved_beta))


def _result(r, achieved, target) -> ManeuverResult:
    r, achieved, target = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (r, achieved, target))
    return ManeuverResult(r=r, achieved_beta=achieved, target_beta=target,
                          residual=float(np.max(np.abs(achieved - target))))


def single_beta_max(p: float, q: float) -> float:
    """Malicious rate of a lone node as the penalty vanishes."""
    return (p + 2.0 * q) / (2.0 * (p + q))


def maneuver_single(p: float, q: float, target_beta: float) -> ManeuverResult:
    """Closed-form penalty r = (p + 2q) / (2 beta) - p - q for one node."""
    hi = single_beta_max(p, q)
    if not 0.0 < target_beta < hi:
        raise InfeasibleTarget(target_beta, 0.0, hi)
    r = (p + 2.0 * q) / (2.0 * target_beta) - p - q
    if not r > 0:
        raise InfeasibleTarget(target_beta, 0.0, hi, f"penalty {r!r} is not positive")
    achieved = single_static_optimum(NodeParams(p, q, r)).beta
    return _result(r, achieved, target_beta)


def symmetric_beta(n: int, p: float, q: float, r: float) -> float:
    return 1.0 - symmetric_steady_alpha(n, NodeParams(p, q, r))


def _symmetric_r_closed_form(n: int, p: float, q: float, alpha: float) -> float:
    # the steady-state quadratic is linear in r
    num = 2.0 * q * (n - 1) * alpha**2 + 2.0 * (p + q) * alpha - p
    den = 2.0 * (1.0 - alpha) * (1.0 + (n - 1) * alpha)
    return num / den


def _bisect(beta_of_r, target: float, lo: float = R_LO, hi: float = R_HI, xtol: float = 1e-15):
    """Root of beta_of_r(r) = target for a decreasing map; returns r."""
    f_lo, f_hi = beta_of_r(lo) - target, beta_of_r(hi) - target
    if f_lo < 0 or f_hi > 0:
        raise ManeuverError(
            f"bracket [{lo}, {hi}] does not straddle target {target!r} "
            f"(beta ranges over [{f_hi + target:.12g}, {f_lo + target:.12g}])"
        )
    for _ in range(BISECTION_ITERS):
        mid = 0.5 * (lo + hi)
        if beta_of_r(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= xtol * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def maneuver_symmetric(n: int, p: float, q: float, target_beta: float) -> ManeuverResult:
    """Shared penalty that puts every one of n identical nodes at ``target_beta``."""
    if n < 1:
        raise ConfigError(f"n must be at least 1, got {n}")
    hi = 1.0 - symmetric_steady_alpha(n, NodeParams(p, q, 1e-300)) if n > 1 else single_beta_max(p, q)
    if not 0.0 < target_beta < hi:
        raise InfeasibleTarget(target_beta, 0.0, hi)
    r = _symmetric_r_closed_form(n, p, q, 1.0 - target_beta)
    if not r > 0:
        raise InfeasibleTarget(target_beta, 0.0, hi, f"penalty {r!r} is not positive")
    achieved = symmetric_beta(n, p, q, r)
    if abs(achieved - target_beta) >= 1e-8:
        r = _bisect(lambda rr: symmetric_beta(n, p, q, rr), target_beta)
        achieved = symmetric_beta(n, p, q, r)
    return _result(np.full(n, r), np.full(n, achieved), np.full(n, target_beta))


def maneuver_two_symmetric_literal(p: float, q: float, target_beta: float) -> float:
    """Published two-node formula r = (p + q)(3 - 2 beta)^2 - (3p + q) / 4, verbatim.

    It disagrees with the steady-state equations (for p=0.4, q=0.2 and
    beta=0.5 it gives 2.05 where the round-trip inverse gives 0.2), so nothing
    else in the package calls it.
    """
    return (p + q) * (3.0 - 2.0 * target_beta) ** 2 - 0.25 * (3.0 * p + q)


def equilibrium_betas(params) -> np.ndarray:
    return 1.0 - steady_state_open_loop(params)


def maneuver_general(config: GameConfig, targets, tol: float = 1e-6, max_rounds: int = 200) -> ManeuverResult:
    """Per-node penalties hitting per-node malicious targets.

    Gauss-Seidel over nodes: each r_i is bisected against node i's own
    equilibrium beta with the other penalties frozen, until every target is
    met within ``tol``.  Returns the best point found with ``converged=False``
    if that does not happen within ``max_rounds``.
    """
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    if targets.shape != (config.n,):
        raise ConfigError(f"expected {config.n} targets, got {targets.size}")
    if np.any(targets <= 0) or np.any(targets >= 1):
        raise InfeasibleTarget(targets.tolist(), 0.0, 1.0)
    if config.n == 1:
        prm = config.params[0]
        return maneuver_single(prm.p, prm.q, float(targets[0]))

    params = list(config.params)

    def betas_with(i, r):
        trial = params.copy()
        trial[i] = trial[i].with_r(r)
        return equilibrium_betas(trial)

    best = None
    for _ in range(max_rounds):
        for i in range(config.n):
            beta_of_r = lambda r, i=i: betas_with(i, r)[i]
            try:
                r_i = _bisect(beta_of_r, targets[i])
            except ManeuverError as exc:
                raise InfeasibleTarget(targets.tolist(), beta_of_r(R_HI), beta_of_r(R_LO), str(exc)) from exc
            params[i] = params[i].with_r(r_i)
        achieved = equilibrium_betas(params)
        result = _result([prm.r for prm in params], achieved, targets)
        if best is None or result.residual < best.residual:
            best = result
        if result.residual < tol:
            return result
    return ManeuverResult(best.r, best.achieved_beta, best.target_beta, best.residual, converged=False)


def static_r_for_profile(params: NodeParams, alpha: float, S: float) -> float:
    """Penalty making ``alpha`` node i's static best response against S.

    Independent closed form, used to cross-check the numeric inversions.
    """
    p, q = params.p, params.q
    return (2.0 * alpha * (p + q * (1.0 + S)) - p) / (2.0 * (1.0 - alpha) * (1.0 + S))


def best_response_residual(params, alphas) -> float:
    prm = ParamArrays.of(params)
    return float(np.max(np.abs(static_best_response(prm, others_sum(alphas)) - alphas)))
