"""Welfare accounting and the regulator's new-spectrum partition sweep.

New bandwidth is small-cell only: SP i ends up with total ``B_i^o + B_i^n``
and a small-cell floor of ``B_i^n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .duopoly import (ConstraintPair, Region, SolverDiagnostic, solve_ne,
                      type1_condition)
from .market import (InvalidParameterError, MarketParams, SpAllocation,
                     clear_allocation, social_welfare)


@dataclass(frozen=True)
class RegulatorScenario:
    params: MarketParams
    b1_initial: float
    b2_initial: float
    b_new: float

    def __post_init__(self) -> None:
        for name in ("b1_initial", "b2_initial", "b_new"):
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"{name}={getattr(self, name)} must be >= 0")

    @property
    def pooled(self) -> float:
        return self.b1_initial + self.b2_initial + self.b_new


@dataclass(frozen=True)
class SweepRow:
    b1_new: float
    b2_new: float
    sw_wo_star: float
    sw_w_star: float
    sw_w_ne: float
    region: Region | None
    rev1: float
    rev2: float
    type1: tuple[bool, bool] = (False, False)
    error: str | None = field(default=None, compare=False)


def _welfare_at(params: MarketParams, b_total: float, b_small: float) -> float:
    alloc = SpAllocation.split(b_total, min(b_small, b_total))
    return social_welfare(params, clear_allocation(params, alloc))


def sw_unconstrained_opt(params: MarketParams, b_total: float) -> float:
    """Best achievable welfare from ``b_total`` with no small-cell floor."""
    if b_total <= 0:
        raise InvalidParameterError(f"b_total={b_total} must be > 0")
    return _welfare_at(params, b_total, params.small_share * b_total)


def sw_constrained_opt(scenario: RegulatorScenario, b1_new: float,
                       b2_new: float) -> float:
    """Planner's best welfare when all new bandwidth must go to small-cells.

    Welfare only sees tier totals, and is concave in the small-cell total,
    so the planner uses the unconstrained share unless the floor on the
    pooled small-cell bandwidth cuts above it.
    """
    if not np.isclose(b1_new + b2_new, scenario.b_new, rtol=1e-12, atol=1e-12):
        raise InvalidParameterError(
            f"b1_new + b2_new = {b1_new + b2_new} != b_new={scenario.b_new}")
    params, total = scenario.params, scenario.pooled
    small = max(params.small_share * total, b1_new + b2_new)
    return _welfare_at(params, total, small)


def threshold(scenario: RegulatorScenario) -> float:
    """Largest amount of new small-cell-only bandwidth with no welfare loss."""
    p = scenario.params
    return (scenario.b1_initial + scenario.b2_initial) * p.n_fixed * p.gain / p.n_mobile


def equality_interval(scenario: RegulatorScenario) -> tuple[float, float] | None:
    """Range of SP 1's share of new bandwidth keeping equilibrium welfare optimal.

    Returns ``None`` when no partition works (new bandwidth above threshold).
    """
    p = scenario.params
    k = p.n_fixed * p.gain / p.n_mobile
    lo = max(scenario.b_new - scenario.b2_initial * k, 0.0)
    hi = min(scenario.b1_initial * k, scenario.b_new)
    if lo > hi + 1e-12 * max(1.0, scenario.b_new):
        return None
    return lo, max(lo, hi)


def sw_bound_ratio(params: MarketParams) -> float:
    """Lower bound on constrained-equilibrium welfare over the unconstrained optimum."""
    return params.small_share ** params.alpha


def loss_condition(params: MarketParams, totals: tuple[float, float],
                   floors: tuple[float, float]) -> bool:
    """True when the floors force more small-cell bandwidth in total than the
    unconstrained optimum uses.

    This is exactly when even a planner loses welfare, and it guarantees an
    equilibrium loss. The converse fails: a single violated floor can cost
    equilibrium welfare while the total stays below the optimum.
    """
    return params.small_share * sum(totals) < sum(floors)


def sweep_row(scenario: RegulatorScenario, b1_new: float) -> SweepRow:
    b1_new = min(max(b1_new, 0.0), scenario.b_new)
    b2_new = scenario.b_new - b1_new
    params = scenario.params
    b1 = scenario.b1_initial + b1_new
    b2 = scenario.b2_initial + b2_new
    floors = ConstraintPair(b1_new, b2_new)
    sw_wo = sw_unconstrained_opt(params, scenario.pooled)
    sw_w = sw_constrained_opt(scenario, b1_new, b2_new)
    try:
        result = solve_ne(params, b1, b2, floors)
    except SolverDiagnostic as exc:
        return SweepRow(b1_new, b2_new, sw_wo, sw_w, float("nan"), None,
                        float("nan"), float("nan"), error=str(exc))
    return SweepRow(b1_new=b1_new, b2_new=b2_new, sw_wo_star=sw_wo,
                    sw_w_star=sw_w, sw_w_ne=result.welfare, region=result.region,
                    rev1=result.revenues[0], rev2=result.revenues[1],
                    type1=type1_condition(params, b1, b2, floors))


def sweep(scenario: RegulatorScenario, n_points: int) -> list[SweepRow]:
    """Evaluate every partition of the new bandwidth on a uniform grid.

    Endpoints (winner-take-all) are included. Rows whose solve failed
    carry NaN welfare and the diagnostic in ``error``.
    """
    if n_points < 2:
        raise InvalidParameterError(f"n_points={n_points} must be >= 2")
    if scenario.b_new <= 0:
        raise InvalidParameterError(f"b_new={scenario.b_new} must be > 0 for a sweep")
    if scenario.b1_initial <= 0 or scenario.b2_initial <= 0:
        raise InvalidParameterError("initial bandwidths must be > 0 for a sweep")
    grid = np.linspace(0.0, scenario.b_new, n_points)
    return [sweep_row(scenario, float(x)) for x in grid]
