import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trustgame.core import (
    ConfigError,
    GameConfig,
    NodeParams,
    NodeTrajectory,
    Strategy,
    TrustState,
    closed_form_trust,
    drift_multi,
    drift_single,
    long_run_average_profit,
    others_sum,
    profit_density,
)
from trustgame.ode import IntegratorSpec, integrate_forward, make_grid

unit = st.floats(0.0, 1.0)
positive = st.floats(0.01, 1.0)


def test_node_params_reject_non_positive():
    with pytest.raises(ConfigError):
        NodeParams(0.0, 0.2, 0.2)
    with pytest.raises(ConfigError):
        NodeParams(0.4, -1.0, 0.2)
    with pytest.raises(ConfigError):
        NodeParams(0.4, 0.2, math.inf)


def test_strategy_beta_is_complement():
    s = Strategy(0.3)
    assert s.beta == pytest.approx(0.7)
    assert Strategy.from_beta(0.25).alpha == pytest.approx(0.75)
    with pytest.raises(ConfigError):
        Strategy(1.2)


def test_trust_state_budget():
    TrustState([0.5, 0.5])
    with pytest.raises(ConfigError):
        TrustState([0.6, 0.5])
    with pytest.raises(ConfigError):
        TrustState([-0.1])
    state = TrustState([0.2, 0.3])
    with pytest.raises(ValueError):
        state.x[0] = 0.9


def test_game_config_validation():
    cfg = GameConfig.symmetric(3, 0.4, 0.2, 0.2)
    assert cfg.n == 3
    assert np.all(cfg.x0 == 0)
    with pytest.raises(ConfigError):
        GameConfig.symmetric(2, 0.4, 0.2, 0.2, x0=[0.1])
    with pytest.raises(ConfigError):
        GameConfig.symmetric(1, 0.4, 0.2, 0.2, horizon=0.0)
    with pytest.raises(ConfigError):
        GameConfig.symmetric(1, 0.4, 0.2, 0.2, damping=0.0)
    with pytest.raises(ConfigError):
        GameConfig(params=())


def test_node_trajectory_checks_lengths():
    t = np.linspace(0, 1, 5)
    traj = NodeTrajectory(t, np.full(5, 0.2), np.full(5, 0.5), np.zeros(5))
    assert np.allclose(traj.beta, 0.5)
    with pytest.raises(ConfigError):
        NodeTrajectory(t, np.full(4, 0.2), np.full(5, 0.5), np.zeros(5))


@pytest.mark.parametrize(
    "x, alpha, expected",
    [(0.5, 0.5, 0.0), (0.0, 1.0, 1.0), (0.2, 0.3, 0.10)],
)
def test_drift_single_examples(x, alpha, expected):
    assert drift_single(x, Strategy(alpha)) == pytest.approx(expected, abs=1e-15)


def test_drift_multi_examples():
    assert np.allclose(drift_multi([1 / 3, 1 / 3], [Strategy(0.5), Strategy(0.5)]), 0.0, atol=1e-15)
    assert np.allclose(drift_multi(TrustState([0.0, 0.0]), [Strategy(0.3), Strategy(0.8)]), [0.3, 0.8])


def test_drift_multi_length_mismatch():
    with pytest.raises(ConfigError):
        drift_multi([0.1, 0.2], [Strategy(0.5)])


@given(unit, unit)
def test_drift_multi_reduces_to_single(x, a):
    assert drift_multi([x], [Strategy(a)])[0] == drift_single(x, Strategy(a))


def test_profit_density_examples():
    prm = NodeParams(0.4, 0.2, 0.2)
    assert profit_density(0.5, Strategy(0.5), prm) == pytest.approx(0.0, abs=1e-15)
    assert profit_density(0.0, Strategy(1.0), prm) == pytest.approx(-0.2)
    assert profit_density(1.0, Strategy(0.0), NodeParams(0.7, 0.2, 0.3)) == pytest.approx(0.4)


def test_closed_form_trust_examples():
    assert closed_form_trust(0.0, 0.3, 0.5, 1.0) == pytest.approx(0.3)
    assert closed_form_trust(200.0, 0.3, 0.5, 1.0) == pytest.approx(0.25)
    assert closed_form_trust(math.log(2), 0.0, 0.5) == pytest.approx(0.25)


@given(unit, unit, st.floats(0.0, 4.0), st.floats(1e-5, 10.0))
def test_closed_form_derivative_matches_drift(x0, a, S, t):
    h = 1e-6
    x = closed_form_trust(t, x0, a, S)
    fd = (closed_form_trust(t + h, x0, a, S) - closed_form_trust(t - h, x0, a, S)) / (2 * h)
    drift = a * (1 - x) - S * x - (1 - a) * x
    assert fd == pytest.approx(drift, abs=1e-6)


def test_long_run_average_examples():
    prm = NodeParams(0.4, 0.2, 0.2)
    assert long_run_average_profit(Strategy(0.5), 0.0, prm) == pytest.approx(0.0, abs=1e-15)
    assert long_run_average_profit(Strategy(1.0), 2.5, prm) == pytest.approx(-0.2)
    assert long_run_average_profit(Strategy(0.0), 0.0, prm) == pytest.approx(-0.2)


@settings(max_examples=30, deadline=None)
@given(positive, positive, positive, unit, st.floats(0.0, 3.0), unit)
def test_time_average_converges_to_long_run_profit(p, q, r, a, S, x0):
    prm = NodeParams(p, q, r)
    T = 50.0
    grid = make_grid(0.0, T, 1e-2)
    k = 1.0 + S
    x = closed_form_trust(grid, x0 * min(1.0, 1.0 / k) , a, S)
    avg = np.trapezoid(profit_density(x, a, prm), grid) / T
    # transient contributes at most p (1 - a) |x0 - x*| / (1 + S) in total
    setup = p * (1 - a) / k
    assert abs(avg - long_run_average_profit(a, S, prm)) <= 2 * setup / T + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.data())
def test_trust_stays_on_simplex(n, data):
    alphas = np.array(data.draw(st.lists(unit, min_size=n, max_size=n)))
    raw = np.array(data.draw(st.lists(unit, min_size=n, max_size=n)))
    x0 = raw / max(1.0, raw.sum())
    grid = make_grid(0, 10, 0.01)
    field = lambda t, x, u: drift_multi(x, u)
    # without clamping the box and budget hold up to the integration tolerance
    free = integrate_forward(field, x0, 0.0, 10.0, IntegratorSpec(clamp=False), controls=alphas, grid=grid)
    assert np.all(free.values >= -1e-7)
    assert np.all(free.values.sum(axis=1) <= 1 + 1e-7)
    clamped = integrate_forward(field, x0, 0.0, 10.0, controls=alphas, grid=grid)
    assert np.all((clamped.values >= 0) & (clamped.values <= 1))
    assert np.all(clamped.values.sum(axis=1) <= 1 + 1e-9)


def test_others_sum():
    assert np.allclose(others_sum(np.array([0.1, 0.2, 0.3])), [0.5, 0.4, 0.3])
