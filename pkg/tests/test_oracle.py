import numpy as np
import pytest

from smallcell_market.duopoly import ConstraintPair, solve_ne
from smallcell_market.market import (DuopolyAllocation, SpAllocation,
                                     clear_allocation, social_welfare)
from smallcell_market.monopoly import optimal_split
from smallcell_market.oracle import (GridSpec, certify_epsilon_ne, cross_check,
                                     grid_best_response, grid_social_opt,
                                     welfare_curve)


def _alloc(b1, s1, b2, s2, f1=0.0, f2=0.0):
    return DuopolyAllocation(SpAllocation.split(b1, s1, f1), SpAllocation.split(b2, s2, f2))


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(resolution=50)
    with pytest.raises(ValueError):
        GridSpec(epsilon=0)


def test_welfare_curve_matches_market(base_params):
    for s in np.linspace(0, 3, 31):
        w = social_welfare(base_params, clear_allocation(base_params, SpAllocation.split(3, s)))
        assert welfare_curve(base_params, 3, [s])[0] == pytest.approx(w, rel=1e-12)


def test_grid_social_opt(base_params):
    grid = GridSpec(10_001)
    step = 3 / 10_000
    s, _ = grid_social_opt(base_params, 3, 0, grid)
    assert s == pytest.approx(2.0, abs=step)
    s, _ = grid_social_opt(base_params, 3, 2.5, grid)
    assert s == 2.5
    s, _ = grid_social_opt(base_params, 3, 3, grid)
    assert s == 3


def test_grid_best_response_floor_binding(base_params):
    alloc = _alloc(2, 1.9, 1, 0.95, f1=1.9)
    assert grid_best_response(base_params, alloc, 0) == 1.9


def test_grid_best_response_symmetric(base_params):
    alloc = _alloc(1.5, 1.0, 1.5, 1.0)
    assert grid_best_response(base_params, alloc, 0) == grid_best_response(base_params, alloc, 1)


def test_certify_solver_output(base_params):
    for floors in [(0, 0), (1.9, 0.95), (0.2, 0.9), (1.7, 0.1)]:
        res = solve_ne(base_params, 2, 1, ConstraintPair(*floors))
        eps = 1e-4 * max(res.revenues)
        ok, worst = certify_epsilon_ne(base_params, res.allocation, GridSpec(10_000, eps))
        assert ok, (floors, worst)


def test_certify_rejects_perturbed_point(base_params):
    res = solve_ne(base_params, 2, 1)
    a = res.allocation
    off = _alloc(2, a.sp1.small * 1.05, 1, a.sp2.small)
    eps = 1e-4 * max(res.revenues)
    ok, worst = certify_epsilon_ne(base_params, off, GridSpec(10_000, eps))
    assert not ok and worst > eps


def test_certify_singleton(base_params):
    alloc = _alloc(2, 2, 1, 1, 2, 1)
    assert certify_epsilon_ne(base_params, alloc) == (True, 0.0)


def test_oracle_resolution_converges(base_params):
    coarse = grid_social_opt(base_params, 3, 0, GridSpec(1_001))[0]
    fine = grid_social_opt(base_params, 3, 0, GridSpec(2_001))[0]
    assert abs(coarse - fine) <= 3 / 1_000


def test_cross_check_report(base_params):
    rep = cross_check(base_params, 2, 1, ConstraintPair(1.0, 0.8))
    assert rep.ok
    assert rep.monopoly_split_gap <= rep.monopoly_grid_step
    assert optimal_split(base_params, 3, 1.8).allocation.small == pytest.approx(2.0)
