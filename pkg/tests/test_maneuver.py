import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trustgame.core import GameConfig, NodeParams
from trustgame.equilibrium import single_static_optimum
from trustgame.maneuver import (
    InfeasibleTarget,
    equilibrium_betas,
    maneuver_general,
    maneuver_single,
    maneuver_symmetric,
    maneuver_two_symmetric_literal,
    single_beta_max,
    static_r_for_profile,
    symmetric_beta,
)

positive = st.floats(0.01, 1.0)


def test_single_examples():
    res = maneuver_single(0.4, 0.2, 0.5)
    assert res.r[0] == pytest.approx(0.2, abs=1e-15)
    assert res.residual < 1e-12
    assert maneuver_single(0.4, 0.2, 0.4).r[0] == pytest.approx(0.4, abs=1e-15)


def test_single_boundary_rejected():
    hi = single_beta_max(0.4, 0.2)
    assert hi == pytest.approx(2 / 3)
    with pytest.raises(InfeasibleTarget) as err:
        maneuver_single(0.4, 0.2, hi)
    assert err.value.hi == pytest.approx(2 / 3)
    assert "feasible interval" in str(err.value)
    for bad in (0.0, -0.1, 0.9):
        with pytest.raises(InfeasibleTarget):
            maneuver_single(0.4, 0.2, bad)


@settings(max_examples=100, deadline=None)
@given(positive, positive, st.floats(0.001, 0.999))
def test_single_round_trip(p, q, frac):
    target = frac * single_beta_max(p, q)
    res = maneuver_single(p, q, target)
    assert res.r[0] > 0
    assert single_static_optimum(NodeParams(p, q, res.r[0])).beta == pytest.approx(target, abs=1e-12)


def test_symmetric_examples():
    assert maneuver_symmetric(2, 0.4, 0.2, 0.5).r == pytest.approx([0.2, 0.2], abs=1e-12)
    target = 1 - 0.5811388300841898
    res = maneuver_symmetric(2, 0.5, 0.1, target)
    assert res.r[0] == pytest.approx(0.2, abs=1e-8)
    assert res.residual < 1e-8


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 8), positive, positive, st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_symmetric_monotone_in_target(n, p, q, f1, f2):
    hi = symmetric_beta(n, p, q, 1e-300)
    lo_t, hi_t = sorted((f1 * hi, f2 * hi))
    if hi_t - lo_t < 1e-6:
        return
    r_low_target = maneuver_symmetric(n, p, q, lo_t)
    r_high_target = maneuver_symmetric(n, p, q, hi_t)
    assert r_low_target.residual < 1e-8 and r_high_target.residual < 1e-8
    assert r_high_target.r[0] < r_low_target.r[0]


def test_symmetric_infeasible():
    with pytest.raises(InfeasibleTarget):
        maneuver_symmetric(3, 0.4, 0.2, 0.99)
    with pytest.raises(InfeasibleTarget):
        maneuver_symmetric(3, 0.4, 0.2, 0.0)


def test_published_two_node_formula():
    assert maneuver_two_symmetric_literal(0.4, 0.2, 0.5) == pytest.approx(2.05)
    # only r = 0.2 gives beta = 0.5; the literal value does not
    assert equilibrium_betas([NodeParams(0.4, 0.2, 0.2)] * 2) == pytest.approx([0.5, 0.5])
    off = equilibrium_betas([NodeParams(0.4, 0.2, 2.05)] * 2)
    assert abs(off[0] - 0.5) > 0.1
    p, q = 0.4, 0.2
    beta0 = (3 - math.sqrt((3 * p + q) / (4 * (p + q)))) / 2
    assert maneuver_two_symmetric_literal(p, q, beta0) == pytest.approx(0.0, abs=1e-12)


def test_general_reductions():
    cfg = GameConfig.symmetric(3, 0.4, 0.2, 1.0)
    gen = maneuver_general(cfg, [0.45] * 3)
    sym = maneuver_symmetric(3, 0.4, 0.2, 0.45)
    assert np.allclose(gen.r, sym.r, atol=1e-5)
    single = maneuver_general(GameConfig.symmetric(1, 0.4, 0.2, 1.0), [0.5])
    assert single.r[0] == pytest.approx(0.2, abs=1e-15)


def test_general_recovers_penalties():
    params = (NodeParams(0.5, 0.1, 0.2), NodeParams(0.5, 0.1, 0.3))
    targets = equilibrium_betas(params)
    res = maneuver_general(GameConfig(params=(params[0].with_r(1.0), params[1].with_r(1.0))), targets)
    assert res.converged
    assert np.allclose(res.r, [0.2, 0.3], atol=1e-4)
    assert res.residual < 1e-6
    assert res.total_beta == pytest.approx(targets.sum(), abs=1e-5)


def test_general_infeasible_and_bad_shape():
    cfg = GameConfig.symmetric(2, 0.4, 0.2, 0.2)
    with pytest.raises(InfeasibleTarget):
        maneuver_general(cfg, [0.95, 0.5])
    with pytest.raises(InfeasibleTarget):
        maneuver_general(cfg, [0.0, 0.5])
    with pytest.raises(ValueError):
        maneuver_general(cfg, [0.5, 0.5, 0.5])


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.data())
def test_forward_map_decreasing_in_r(n, data):
    params = [NodeParams(*data.draw(st.tuples(positive, positive, positive))) for _ in range(n)]
    i = data.draw(st.integers(0, n - 1))
    grid = np.geomspace(1e-3, 1e2, 25)
    betas = [equilibrium_betas([*params[:i], params[i].with_r(r), *params[i + 1:]])[i] for r in grid]
    assert np.all(np.diff(betas) < 0)


@settings(max_examples=60, deadline=None)
@given(positive, positive, positive, st.floats(0.0, 3.0))
def test_static_r_oracle_inverts_best_response(p, q, r, S):
    from trustgame.equilibrium import static_best_response

    prm = NodeParams(p, q, r)
    alpha = static_best_response(prm, S)
    assert static_r_for_profile(prm, alpha, S) == pytest.approx(r, rel=1e-8, abs=1e-10)
