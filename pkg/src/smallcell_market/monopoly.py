"""Optimal bandwidth split for a single SP subject to a small-cell floor."""

from __future__ import annotations

from dataclasses import dataclass

from .market import (ClearingOutcome, InvalidParameterError, MarketParams,
                     SpAllocation, clear_allocation, social_welfare, sp_revenue)


@dataclass(frozen=True)
class MonopolyResult:
    allocation: SpAllocation
    revenue: float
    welfare: float
    clipped: bool
    outcome: ClearingOutcome


def monopoly_objective(params: MarketParams, b_total: float,
                       b_small: float) -> tuple[float, float]:
    """Revenue and welfare at market-clearing prices for a given split."""
    if not 0 <= b_small <= b_total:
        raise InvalidParameterError(
            f"b_small={b_small} must lie in [0, b_total={b_total}]")
    alloc = SpAllocation.split(b_total, b_small)
    outcome = clear_allocation(params, alloc)
    return sp_revenue(params, alloc, outcome), social_welfare(params, outcome)


def optimal_split(params: MarketParams, b_total: float,
                  floor: float = 0.0) -> MonopolyResult:
    """Revenue- and welfare-maximizing split (the two coincide).

    The unconstrained optimum puts a fixed share of the bandwidth on
    small-cells; a floor above it binds and the SP sits exactly on it.
    """
    if b_total < 0:
        raise InvalidParameterError(f"b_total={b_total} must be >= 0")
    if not 0 <= floor <= b_total:
        raise InvalidParameterError(
            f"floor={floor} must lie in [0, b_total={b_total}]")
    unconstrained = params.small_share * b_total
    clipped = floor > unconstrained
    small = floor if clipped else unconstrained
    alloc = SpAllocation.split(b_total, small, floor)
    outcome = clear_allocation(params, alloc)
    return MonopolyResult(allocation=alloc,
                          revenue=sp_revenue(params, alloc, outcome),
                          welfare=social_welfare(params, outcome),
                          clipped=clipped, outcome=outcome)
