"""Pricing and bandwidth equilibria for two-tier wireless markets with
regulatory minimums on small-cell bandwidth."""

from .duopoly import (ConstraintPair, EquilibriumResult, Region, best_response,
                      classify_region, marginal_revenue, solve_ne, type1_condition,
                      unconstrained_ne)
from .market import (CapacityPair, ClearingOutcome, DuopolyAllocation, MarketParams,
                     Regime, SpAllocation, capacities, clear_market, demand,
                     net_payoff, social_welfare, sp_revenue, utility)
from .monopoly import MonopolyResult, monopoly_objective, optimal_split
from .oracle import (GridSpec, certify_epsilon_ne, grid_best_response,
                     grid_social_opt)
from .welfare import (RegulatorScenario, SweepRow, equality_interval, loss_condition,
                      sw_bound_ratio, sw_constrained_opt, sw_unconstrained_opt,
                      sweep, threshold)

__version__ = "0.1.0"

__all__ = [
    "ConstraintPair",
    "EquilibriumResult",
    "Region",
    "best_response",
    "classify_region",
    "marginal_revenue",
    "solve_ne",
    "type1_condition",
    "unconstrained_ne",
    "CapacityPair",
    "ClearingOutcome",
    "DuopolyAllocation",
    "MarketParams",
    "Regime",
    "SpAllocation",
    "capacities",
    "clear_market",
    "demand",
    "net_payoff",
    "social_welfare",
    "sp_revenue",
    "utility",
    "MonopolyResult",
    "monopoly_objective",
    "optimal_split",
    "GridSpec",
    "certify_epsilon_ne",
    "grid_best_response",
    "grid_social_opt",
    "RegulatorScenario",
    "SweepRow",
    "equality_interval",
    "loss_condition",
    "sw_bound_ratio",
    "sw_constrained_opt",
    "sw_unconstrained_opt",
    "sweep",
    "threshold",
]
