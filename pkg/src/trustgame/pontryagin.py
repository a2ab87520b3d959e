"""Open-loop dynamic solutions via Pontryagin's necessary conditions.

Node i's Hamiltonian is ``H_i = lam_i * xdot_i + g_i`` with ``g_i`` the
profit density.  Maximising it over ``alpha_i`` gives a costate-to-control
map; the costate obeys ``lam_i' = -dH_i/dx_i = lam_i (1 + S_i) - p_i (1 - alpha_i)``
with ``S_i`` the competitors' benign rate sum.  Dynamic equilibria are found
by a damped forward-backward sweep on a uniform grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    GameConfig,
    NodeParams,
    NodeTrajectory,
    ParamArrays,
    drift_multi,
    others_sum,
    profit_density,
)
from .equilibrium import single_static_optimum, static_best_response
from .ode import FIXED_RK4, AffineField, IntegratorSpec, Schedule, integrate_backward, integrate_forward, make_grid

DEFAULT_HORIZON = 30.0
DEFAULT_TOL = 1e-8
DEFAULT_MAX_SWEEPS = 500
GRID_INTERVALS = 3000


class NumericInconsistency(ArithmeticError):
    pass


def control_from_costate(lam, x, params):
    """Hamiltonian-maximising benign rate, projected onto [0, 1]."""
    p, q, r = params.p, params.q, params.r
    alpha = (lam - p * x + 2.0 * r) / (2.0 * (q + r))
    return np.clip(np.where(lam > p * x - 2.0 * r, alpha, 0.0), 0.0, 1.0)


def costate_drift_single(lam, alpha, params):
    return lam - params.p * (1.0 - alpha)


def costate_drift_multi(lam, alpha, S, params):
    return lam * (1.0 + S) - params.p * (1.0 - alpha)


def hamiltonian(node: int, state, strategies, lambda_i: float, params: NodeParams) -> float:
    x = getattr(state, "x", state)
    alphas = np.array([getattr(s, "alpha", s) for s in strategies], dtype=float)
    xdot = drift_multi(np.asarray(x, dtype=float), alphas)[node]
    return lambda_i * xdot + profit_density(x[node], alphas[node], params)


def steady_state_open_loop(params) -> np.ndarray:
    """Benign rates at the open-loop steady state.

    At stationarity x_i = alpha_i / (1 + S_i) and lam_i = p_i (1 - alpha_i) / (1 + S_i);
    putting both into the first-order condition leaves one equation per node.
    Identical nodes reduce to a scalar quadratic solved in closed form; other
    cases use a damped simultaneous fixed point.
    """
    params = tuple(params)
    n = len(params)
    if all(prm == params[0] for prm in params):
        return np.full(n, symmetric_steady_alpha(n, params[0]))

    prm = ParamArrays.of(params)
    alphas = np.full(n, 0.5)
    for _ in range(200_000):
        target = static_best_response(prm, others_sum(alphas))
        if np.max(np.abs(target - alphas)) < 1e-15:
            return target
        alphas = 0.5 * alphas + 0.5 * target
    raise NumericInconsistency("steady-state fixed point did not settle")


def symmetric_steady_alpha(n: int, params: NodeParams) -> float:
    """Root in [0, 1] of 2(q+r)(n-1)a^2 + 2[p+q+r-r(n-1)]a - (p+2r) = 0."""
    p, q, r = params.p, params.q, params.r
    a2 = 2.0 * (q + r) * (n - 1)
    a1 = 2.0 * (p + q + r - r * (n - 1))
    a0 = -(p + 2.0 * r)
    disc = math.sqrt(a1 * a1 - 4.0 * a2 * a0)
    # pick the cancellation-free expression for the positive root
    alpha = -2.0 * a0 / (a1 + disc) if a1 >= 0 else (-a1 + disc) / (2.0 * a2)
    if not 0.0 <= alpha <= 1.0:
        raise NumericInconsistency(f"symmetric steady state {alpha!r} lies outside [0, 1]")
    return alpha


@dataclass(frozen=True)
class OpenLoopSolution:
    times: np.ndarray
    x: np.ndarray  # (m+1, n)
    alpha: np.ndarray  # (m+1, n)
    lam: np.ndarray  # (m+1, n)
    params: tuple[NodeParams, ...]
    converged: bool
    sweeps: int
    control_residual: float
    history: tuple[float, ...] = field(default=())

    @property
    def n(self) -> int:
        return self.x.shape[1]

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def profit(self) -> np.ndarray:
        return profit_density(self.x, self.alpha, ParamArrays.of(self.params))

    def node(self, i: int) -> NodeTrajectory:
        return NodeTrajectory(
            times=self.times,
            x=self.x[:, i],
            alpha=self.alpha[:, i],
            profit_density=self.profit[:, i],
            lam=self.lam[:, i],
        )

    @property
    def nodes(self) -> tuple[NodeTrajectory, ...]:
        return tuple(self.node(i) for i in range(self.n))

    def window(self, lo: float = 0.4, hi: float = 0.6) -> np.ndarray:
        """Boolean mask of grid times inside [lo T, hi T]."""
        T = self.times[-1]
        return (self.times >= lo * T - 1e-12) & (self.times <= hi * T + 1e-12)

    def plateau(self, lo: float = 0.4, hi: float = 0.6) -> np.ndarray:
        """Mean control per node over the mid-horizon window."""
        return self.alpha[self.window(lo, hi)].mean(axis=0)


# alpha_i (1 - x_i) - S_i x_i - (1 - alpha_i) x_i collapses to alpha_i - (1 + S_i) x_i
STATE_FIELD = AffineField(
    offset=lambda t, alpha: alpha,
    gain=lambda t, alpha: -(1.0 + others_sum(alpha)),
)


def costate_field(p: np.ndarray) -> AffineField:
    return AffineField(
        offset=lambda t, alpha: -p * (1.0 - alpha),
        gain=lambda t, alpha: 1.0 + others_sum(alpha),
    )


def solve_open_loop(
    config: GameConfig,
    initial_controls: np.ndarray | None = None,
    spec: IntegratorSpec = FIXED_RK4,
) -> OpenLoopSolution:
    """Forward-backward sweep for the open-loop Nash trajectories.

    Each sweep integrates all trust shares forward under the current
    controls, all costates backward from lam(T) = 0, and relaxes the controls
    toward the Hamiltonian maximiser with ``config.damping``.  Stops when the
    largest control change of a sweep drops below ``config.tol``.
    """
    T = config.horizon
    step = config.step if config.step is not None else T / GRID_INTERVALS
    tol = config.tol if config.tol is not None else DEFAULT_TOL
    max_sweeps = config.max_iter if config.max_iter is not None else DEFAULT_MAX_SWEEPS
    d = config.damping
    prm = config.param_arrays()
    grid = make_grid(0.0, T, step)
    fwd = IntegratorSpec(method=spec.method, base_step=step, clamp=True)
    bwd = IntegratorSpec(method=spec.method, base_step=step, clamp=False)
    lam_field = costate_field(prm.p)

    if initial_controls is None:
        start = np.array([single_static_optimum(p).alpha for p in config.params])
        alpha = np.tile(start, (len(grid), 1))
    else:
        alpha = np.array(initial_controls, dtype=float).reshape(len(grid), config.n)

    def sweep_states(alpha):
        controls = Schedule(grid, alpha)
        x = integrate_forward(STATE_FIELD, config.x0, 0.0, T, fwd, controls, grid).values
        lam = integrate_backward(lam_field, np.zeros(config.n), T, 0.0, bwd, controls, grid).values
        return x, lam

    history = []
    converged = False
    sweeps = 0
    residual = math.inf
    while sweeps < max_sweeps:
        x, lam = sweep_states(alpha)
        update = d * (control_from_costate(lam, x, prm) - alpha)
        alpha = alpha + update
        sweeps += 1
        residual = float(np.max(np.abs(update)))
        history.append(residual)
        if residual < tol:
            converged = True
            break

    x, lam = sweep_states(alpha)
    return OpenLoopSolution(
        times=grid,
        x=x,
        alpha=alpha,
        lam=lam,
        params=config.params,
        converged=converged,
        sweeps=sweeps,
        control_residual=residual,
        history=tuple(history),
    )


def pontryagin_residuals(sol: OpenLoopSolution, interior_margin: float = 1e-6) -> dict[str, float]:
    """Largest violation of each necessary condition on interior grid points.

    ``control``: |dH_i/dalpha_i| where the control is strictly inside (0, 1).
    ``costate``: |lam_i' + dH_i/dx_i| with lam_i' by central differences.
    ``state``: |x_i' - drift| with x_i' by central differences.
    Central-difference stencils that straddle a switch between interior and
    clamped control are skipped, as the solution is only C^1 there.
    """
    prm = ParamArrays.of(sol.params)
    h = sol.step
    a, x, lam = sol.alpha, sol.x, sol.lam
    S = others_sum(a)
    inner = (a > interior_margin) & (a < 1.0 - interior_margin)

    dH_da = lam - prm.p * x + 2.0 * prm.r - 2.0 * (prm.q + prm.r) * a
    control = float(np.max(np.abs(dH_da[inner]), initial=0.0))

    # any node's clamp switch perturbs every node through S
    stable = (inner[:-2] == inner[1:-1]) & (inner[2:] == inner[1:-1])
    smooth = np.broadcast_to(stable.all(axis=1, keepdims=True), stable.shape)
    lam_dot = (lam[2:] - lam[:-2]) / (2.0 * h)
    x_dot = (x[2:] - x[:-2]) / (2.0 * h)
    a_c, x_c, lam_c, S_c = a[1:-1], x[1:-1], lam[1:-1], S[1:-1]
    dH_dx = -lam_c * (1.0 + S_c) + prm.p * (1.0 - a_c)
    costate = float(np.max(np.abs(lam_dot + dH_dx)[smooth], initial=0.0))
    state = float(np.max(np.abs(x_dot - (a_c - (1.0 + S_c) * x_c))[smooth], initial=0.0))
    return {"control": control, "costate": costate, "state": state}
