"""Brute-force grid oracles.

Revenue and welfare are re-derived here in vectorized form straight from
the clearing rules rather than through :mod:`market`, so a grid search
cross-checks the analytic solvers without sharing their code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .duopoly import ConstraintPair, best_response, solve_ne
from .market import DuopolyAllocation, MarketParams, SpAllocation
from .monopoly import optimal_split


@dataclass(frozen=True)
class GridSpec:
    resolution: int = 10_000
    epsilon: float = 1e-6

    def __post_init__(self) -> None:
        if self.resolution < 100:
            raise ValueError(f"resolution={self.resolution} must be >= 100")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon={self.epsilon} must be > 0")


def _pow(x: np.ndarray, e: float) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] ** e
    return out


def revenue_curve(params: MarketParams, own_small, own_total: float,
                  opp_small: float, opp_total: float) -> np.ndarray:
    """One SP's revenue for each candidate own small-cell bandwidth."""
    a, lam, r0 = params.alpha, params.lambda_s, params.r0
    n_m, n_f = params.n_mobile, params.n_fixed
    own_small = np.asarray(own_small, dtype=float)
    own_cs = lam * own_small * r0
    own_cm = (own_total - own_small) * r0
    c_s = own_cs + lam * opp_small * r0
    c_m = own_cm + (opp_total - opp_small) * r0

    separated = (c_s * n_m >= c_m * n_f) & (c_s > 0)
    # zero-capacity tiers earn nothing, which _pow encodes as 0 * 0
    sep = own_cs * _pow(c_s / n_f, -a) + own_cm * _pow(c_m / n_m, -a)
    common = (c_m + c_s) / (n_m + n_f)
    over = (own_cs + own_cm) * _pow(common, -a)
    return np.where(separated, sep, over)


def welfare_curve(params: MarketParams, b_total: float, small) -> np.ndarray:
    """Social welfare for each candidate pooled small-cell bandwidth."""
    a = params.alpha
    n_m, n_f = params.n_mobile, params.n_fixed
    small = np.asarray(small, dtype=float)
    c_s = params.lambda_s * small * params.r0
    c_m = (b_total - small) * params.r0
    separated = c_s * n_m >= c_m * n_f
    sep = n_m * _pow(c_m / n_m, 1 - a) + n_f * _pow(c_s / n_f, 1 - a)
    over = (n_m + n_f) * _pow((c_m + c_s) / (n_m + n_f), 1 - a)
    return np.where(separated, sep, over) / (1 - a)


def _own_grid(floor: float, total: float, grid: GridSpec) -> np.ndarray:
    return np.linspace(floor, total, grid.resolution)


def grid_best_response(params: MarketParams, alloc: DuopolyAllocation,
                       sp_index: int, grid: GridSpec = GridSpec()) -> float:
    """Exhaustive argmax of revenue over the SP's discretized feasible range.

    Ties go to the lowest grid index.
    """
    own, opp = alloc[sp_index], alloc[1 - sp_index]
    xs = _own_grid(own.floor, own.total, grid)
    rev = revenue_curve(params, xs, own.total, opp.small, opp.total)
    return float(xs[int(np.argmax(rev))])


def max_improvement(params: MarketParams, alloc: DuopolyAllocation,
                    grid: GridSpec = GridSpec()) -> tuple[float, float]:
    """Largest unilateral revenue gain each SP can find on its grid."""
    gains = []
    for i in (0, 1):
        own, opp = alloc[i], alloc[1 - i]
        if own.total - own.floor <= 0:
            gains.append(0.0)
            continue
        xs = _own_grid(own.floor, own.total, grid)
        rev = revenue_curve(params, xs, own.total, opp.small, opp.total)
        here = revenue_curve(params, [own.small], own.total, opp.small, opp.total)[0]
        gains.append(max(float(rev.max() - here), 0.0))
    return gains[0], gains[1]


def certify_epsilon_ne(params: MarketParams, alloc: DuopolyAllocation,
                       grid: GridSpec = GridSpec()) -> tuple[bool, float]:
    """Check that no SP gains more than ``grid.epsilon`` by a grid deviation.

    Floors are read from ``alloc``. Returns the verdict and the largest gain.
    """
    worst = max(max_improvement(params, alloc, grid))
    return worst <= grid.epsilon, worst


def grid_ne(params: MarketParams, b1: float, b2: float,
            floors: ConstraintPair = ConstraintPair(),
            grid: GridSpec = GridSpec(), max_rounds: int = 200) -> DuopolyAllocation:
    """Equilibrium of the grid-restricted game by grid best-response rounds."""
    alloc = DuopolyAllocation(SpAllocation.split(b1, floors[0], floors[0]),
                              SpAllocation.split(b2, floors[1], floors[1]))
    for _ in range(max_rounds):
        before = alloc.smalls
        for i in (0, 1):
            alloc = alloc.replace(i, alloc[i].with_small(
                grid_best_response(params, alloc, i, grid)))
        if alloc.smalls == before:
            break
    return alloc


def grid_social_opt(params: MarketParams, b_total: float, min_small_total: float = 0.0,
                    grid: GridSpec = GridSpec()) -> tuple[float, float]:
    """Welfare-maximizing pooled small-cell bandwidth above ``min_small_total``."""
    if min_small_total > b_total:
        raise ValueError(f"min_small_total={min_small_total} exceeds b_total={b_total}")
    xs = np.linspace(min_small_total, b_total, grid.resolution)
    w = welfare_curve(params, b_total, xs)
    k = int(np.argmax(w))
    return float(xs[k]), float(w[k])


def grid_monopoly_revenue_opt(params: MarketParams, b_total: float, floor: float = 0.0,
                              grid: GridSpec = GridSpec()) -> tuple[float, float]:
    """Revenue-maximizing small-cell bandwidth for a lone SP (no opponent)."""
    xs = np.linspace(floor, b_total, grid.resolution)
    rev = revenue_curve(params, xs, b_total, 0.0, 0.0)
    k = int(np.argmax(rev))
    return float(xs[k]), float(rev[k])


@dataclass(frozen=True)
class VerifyReport:
    monopoly_split_gap: float
    monopoly_grid_step: float
    ne_max_improvement: float
    ne_epsilon: float
    ne_certified: bool
    best_response_gap: float
    br_grid_step: float
    grid_ne_gap: float

    @property
    def ok(self) -> bool:
        return (self.monopoly_split_gap <= self.monopoly_grid_step
                and self.ne_certified
                and self.best_response_gap <= 2 * self.br_grid_step
                and self.grid_ne_gap <= 1e-3)


def cross_check(params: MarketParams, b1: float, b2: float,
                floors: ConstraintPair = ConstraintPair(),
                grid: GridSpec = GridSpec()) -> VerifyReport:
    """Run every oracle against the analytic solvers for one scenario."""
    pooled = b1 + b2
    mono = optimal_split(params, pooled, min(sum(floors), pooled))
    grid_small, _ = grid_social_opt(params, pooled, min(sum(floors), pooled), grid)
    mono_step = (pooled - min(sum(floors), pooled)) / (grid.resolution - 1)

    ne = solve_ne(params, b1, b2, floors)
    eps = max(grid.epsilon, 1e-4 * max(ne.revenues))
    certified, worst = certify_epsilon_ne(params, ne.allocation, GridSpec(grid.resolution, eps))

    br_gap, br_step = 0.0, 0.0
    for i in (0, 1):
        own = ne.allocation[i]
        br_gap = max(br_gap, abs(best_response(params, ne.allocation, i)
                                 - grid_best_response(params, ne.allocation, i, grid)))
        br_step = max(br_step, (own.total - own.floor) / (grid.resolution - 1))

    gne = grid_ne(params, b1, b2, floors, grid)
    gne_gap = max(abs(a - b) for a, b in zip(gne.smalls, ne.smalls))
    return VerifyReport(
        monopoly_split_gap=abs(mono.allocation.small - grid_small),
        monopoly_grid_step=mono_step, ne_max_improvement=worst, ne_epsilon=eps,
        ne_certified=certified, best_response_gap=br_gap, br_grid_step=br_step,
        grid_ne_gap=gne_gap)
