"""Finite-horizon integration of the trust and costate dynamics.

Vector fields have the signature ``f(t, y, u) -> dy`` where ``u`` is the
input (controls, or frozen state/control samples) evaluated at ``t``.  Inputs
are either a constant array or a :class:`Schedule` sampled on a time grid and
interpolated linearly in between.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

RK4 = "rk4"
RK45 = "rk45"


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegratorSpec:
    method: str = RK45
    base_step: float = 1e-3
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    clamp: bool = True

    def __post_init__(self):
        if self.method not in (RK4, RK45):
            raise ValueError(f"unknown integration method {self.method!r}; use 'rk4' or 'rk45'")
        if not self.base_step > 0:
            raise ValueError(f"base_step must be positive, got {self.base_step!r}")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")


FIXED_RK4 = IntegratorSpec(method=RK4)


@dataclass(frozen=True)
class Schedule:
    """Piecewise-linear input signal; ``values`` has one row per sample time."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if len(times) != len(values):
            raise ValueError("schedule times and values differ in length")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __call__(self, t: float) -> np.ndarray:
        times = self.times
        k = int(np.searchsorted(times, t, side="right")) - 1
        if k < 0:
            return self.values[0]
        if k >= len(times) - 1:
            return self.values[-1]
        w = (t - times[k]) / (times[k + 1] - times[k])
        return (1.0 - w) * self.values[k] + w * self.values[k + 1]

    def sample(self, ts: np.ndarray) -> np.ndarray:
        """Vectorised evaluation, one row per entry of ``ts``."""
        return np.column_stack([np.interp(ts, self.times, col) for col in self.values.T])

    def covers(self, t0: float, t1: float) -> bool:
        eps = 1e-9 * max(1.0, abs(t1))
        return self.times[0] <= t0 + eps and self.times[-1] >= t1 - eps


@dataclass(frozen=True)
class AffineField:
    """Element-wise affine field ``y' = offset(t, u) + gain(t, u) * y``.

    ``offset`` and ``gain`` receive a vector of times and the matching input
    rows, and return arrays shaped like the state samples.  Fixed-step RK4 on
    such a field collapses to a per-step affine map computed up front.
    """

    offset: Callable
    gain: Callable

    def __call__(self, t, y, u):
        ts = np.atleast_1d(t)
        us = None if u is None else np.atleast_2d(u)
        return self.offset(ts, us)[0] + self.gain(ts, us)[0] * y


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    values: np.ndarray  # shape (len(times), dim)

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]


def make_grid(t0: float, t1: float, step: float) -> np.ndarray:
    """Uniform grid from t0 to t1 whose spacing does not exceed ``step``."""
    m = max(1, math.ceil((t1 - t0) / step - 1e-9))
    return np.linspace(t0, t1, m + 1)


def _as_input(u):
    if u is None:
        return lambda t: None
    if isinstance(u, Schedule):
        return u
    const = np.asarray(u, dtype=float)
    return lambda t: const


def _rk4_affine(f: AffineField, u_nodes, u_mids, grid, mids, y0, clamp_fn):
    h = np.diff(grid)[:, None]
    c, g = f.offset(grid, u_nodes), f.gain(grid, u_nodes)
    cm, gm = f.offset(mids, u_mids), f.gain(mids, u_mids)
    c0, g0, c1, g1 = c[:-1], g[:-1], c[1:], g[1:]
    # each RK4 stage is a_j * y + b_j
    a1, b1 = g0, c0
    a2, b2 = gm * (1.0 + 0.5 * h * a1), cm + 0.5 * h * gm * b1
    a3, b3 = gm * (1.0 + 0.5 * h * a2), cm + 0.5 * h * gm * b2
    a4, b4 = g1 * (1.0 + h * a3), c1 + h * g1 * b3
    A = 1.0 + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    B = (h / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
    out = np.empty((len(grid), y0.size))
    y = y0.copy()
    out[0] = y
    for k in range(len(grid) - 1):
        y = A[k] * y + B[k]
        if clamp_fn is not None:
            y = clamp_fn(y)
        out[k + 1] = y
    return out


def _rk4(f, u, grid, y0, clamp_fn):
    mids = 0.5 * (grid[:-1] + grid[1:])
    if isinstance(u, Schedule):
        u_nodes, u_mids = u.sample(grid), u.sample(mids)
    else:
        u_nodes = [u(t) for t in grid]
        u_mids = [u(t) for t in mids]
    if isinstance(f, AffineField):
        if not isinstance(u, Schedule):
            u_nodes = None if u_nodes[0] is None else np.array(u_nodes)
            u_mids = None if u_mids[0] is None else np.array(u_mids)
        return _rk4_affine(f, u_nodes, u_mids, grid, mids, y0, clamp_fn)
    out = np.empty((len(grid), y0.size))
    y = y0.copy()
    out[0] = y
    for k in range(len(grid) - 1):
        t, h = grid[k], grid[k + 1] - grid[k]
        um = u_mids[k]
        k1 = f(t, y, u_nodes[k])
        k2 = f(mids[k], y + 0.5 * h * k1, um)
        k3 = f(mids[k], y + 0.5 * h * k2, um)
        k4 = f(grid[k + 1], y + h * k3, u_nodes[k + 1])
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if clamp_fn is not None:
            y = clamp_fn(y)
        out[k + 1] = y
    return out


def _rk45(f, u, grid, y0, spec, clamp_fn):
    def rhs(t, y):
        if clamp_fn is not None:
            y = clamp_fn(y)
        return f(t, y, u(t))

    sol = solve_ivp(
        rhs,
        (grid[0], grid[-1]),
        y0,
        method="RK45",
        t_eval=grid,
        rtol=spec.rel_tol,
        atol=spec.abs_tol,
    )
    # scipy gives up once the step shrinks below float spacing around t.
    if sol.status != 0 or sol.y.shape[1] != len(grid):
        raise IntegrationError(
            f"adaptive integration failed at t={sol.t[-1] if sol.t.size else grid[0]!r}: {sol.message}"
        )
    out = sol.y.T.copy()
    if clamp_fn is not None:
        out = clamp_fn(out)
    return out


def _integrate(f, y0, grid, spec, u):
    y0 = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    clamp_fn = (lambda y: np.clip(y, 0.0, 1.0)) if spec.clamp else None
    if spec.method == RK4:
        return _rk4(f, u, grid, y0, clamp_fn)
    return _rk45(f, u, grid, y0, spec, clamp_fn)


def integrate_forward(
    f: Callable,
    x0,
    t0: float,
    t1: float,
    spec: IntegratorSpec = IntegratorSpec(),
    controls=None,
    grid: np.ndarray | None = None,
) -> Trajectory:
    """Integrate ``f`` from ``x0`` at ``t0`` to ``t1``.

    Samples are returned on ``grid`` when given, otherwise on a uniform grid
    with spacing ``spec.base_step``.
    """
    if not t1 > t0:
        raise ValueError(f"need t1 > t0, got t0={t0!r}, t1={t1!r}")
    if isinstance(controls, Schedule) and not controls.covers(t0, t1):
        raise ValueError("control schedule does not cover the integration interval")
    if grid is None:
        grid = make_grid(t0, t1, spec.base_step)
    values = _integrate(f, x0, np.asarray(grid, dtype=float), spec, _as_input(controls))
    return Trajectory(np.asarray(grid, dtype=float), values)


def integrate_backward(
    f: Callable,
    xT,
    t1: float,
    t0: float,
    spec: IntegratorSpec = IntegratorSpec(clamp=False),
    frozen_inputs=None,
    grid: np.ndarray | None = None,
) -> Trajectory:
    """Integrate ``f`` from the terminal value ``xT`` at ``t1`` back to ``t0``.

    The result is reported on an increasing grid; its last sample is ``xT``
    exactly.
    """
    if not t1 > t0:
        raise ValueError(f"need t1 > t0, got t0={t0!r}, t1={t1!r}")
    if isinstance(frozen_inputs, Schedule) and not frozen_inputs.covers(t0, t1):
        raise ValueError("frozen inputs do not cover the integration interval")
    if grid is None:
        grid = make_grid(t0, t1, spec.base_step)
    grid = np.asarray(grid, dtype=float)
    values = _integrate(f, xT, grid[::-1], spec, _as_input(frozen_inputs))
    return Trajectory(grid, values[::-1].copy())
