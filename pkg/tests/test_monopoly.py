import numpy as np
import pytest

from smallcell_market.market import InvalidParameterError, utility
from smallcell_market.monopoly import monopoly_objective, optimal_split
from smallcell_market.oracle import (GridSpec, grid_monopoly_revenue_opt,
                                     grid_social_opt)

from strategies import random_params


def test_unconstrained_split(base_params):
    res = optimal_split(base_params, 3.0, 0.0)
    assert res.allocation.small == pytest.approx(2.0)
    assert res.allocation.macro == pytest.approx(1.0)
    assert not res.clipped


def test_floor_binds(base_params):
    res = optimal_split(base_params, 3.0, 2.5)
    assert res.allocation.small == 2.5
    assert res.clipped


def test_floor_at_optimum_is_not_clipped(base_params):
    res = optimal_split(base_params, 3.0, 2.0)
    assert res.allocation.small == pytest.approx(2.0)
    assert not res.clipped


def test_invalid_floor(base_params):
    with pytest.raises(InvalidParameterError):
        optimal_split(base_params, 3.0, 3.5)


def test_prices_clear_market(base_params):
    o = optimal_split(base_params, 3.0).outcome
    assert (o.rate_macro, o.rate_small) == pytest.approx((1.0, 4.0))
    assert o.price_macro == pytest.approx(o.rate_macro ** -0.5)


def test_objective_matches_grid_argmax(base_params):
    xs = np.linspace(0, 3, 10_001)
    vals = np.array([monopoly_objective(base_params, 3.0, x) for x in xs])
    assert xs[vals[:, 0].argmax()] == pytest.approx(2.0, abs=3e-4)
    assert xs[vals[:, 1].argmax()] == pytest.approx(2.0, abs=3e-4)


def test_welfare_concave_in_small(base_params):
    # past the overflow region welfare is a smooth concave function
    xs = np.linspace(1.0, 3.0, 401)
    w = np.array([monopoly_objective(base_params, 3.0, x)[1] for x in xs])
    assert np.all(np.diff(w, 2) <= 1e-9)


def test_all_small_corner(base_params):
    rev, w = monopoly_objective(base_params, 3.0, 3.0)
    assert w == pytest.approx(50 * utility(2 * 3 * 50 / 50, 0.5))
    # mobile users pay nothing because they are not served
    assert rev == pytest.approx(2 * 3 * 50 * (6.0 ** -0.5))


def test_revenue_and_welfare_argmax_coincide(rng):
    for _ in range(100):
        p = random_params(rng)
        b = float(rng.uniform(0.5, 10))
        grid = GridSpec(10_001)
        s_w, _ = grid_social_opt(p, b, 0.0, grid)
        s_r, _ = grid_monopoly_revenue_opt(p, b, 0.0, grid)
        step = b / 10_000
        expected = optimal_split(p, b).allocation.small
        assert abs(s_w - expected) <= step
        assert abs(s_r - expected) <= step


def test_clipping_monotone(base_params):
    floors = np.linspace(0, 3, 61)
    results = [optimal_split(base_params, 3.0, f) for f in floors]
    smalls = [r.allocation.small for r in results]
    assert all(b >= a for a, b in zip(smalls, smalls[1:]))
    clipped = [r for r in results if r.clipped]
    for a, b in zip(clipped, clipped[1:]):
        assert b.revenue <= a.revenue + 1e-12
        assert b.welfare <= a.welfare + 1e-12
