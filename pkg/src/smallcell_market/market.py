"""Market model for a two-tier (macro / small-cell) wireless market.

Users carry alpha-fair utilities. Mobile users attach only to macro-cells;
fixed users attach to whichever tier is cheaper. Prices clear the market,
so every quantity here is a function of the tier capacities alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

ALLOC_TOL = 1e-12


class MarketError(ValueError):
    """Base class for invalid inputs to the market model."""


class InvalidParameterError(MarketError):
    pass


class InvalidPriceError(MarketError):
    pass


class DegenerateRatesError(MarketError):
    """A per-user rate is zero where a derivative needs it positive."""


@dataclass(frozen=True)
class MarketParams:
    """Global market constants.

    Attributes:
        alpha: Utility curvature, strictly inside (0, 1).
        n_mobile: Mobile-user density.
        n_fixed: Fixed-user density.
        r0: Macro-cell spectral efficiency (rate per unit bandwidth).
        lambda_s: Small-cell efficiency gain over macro, > 1.
    """

    alpha: float
    n_mobile: float
    n_fixed: float
    r0: float
    lambda_s: float

    def __post_init__(self) -> None:
        checks = [
            ("alpha", 0.0 < self.alpha < 1.0, "must lie in (0, 1)"),
            ("n_mobile", self.n_mobile > 0, "must be > 0"),
            ("n_fixed", self.n_fixed > 0, "must be > 0"),
            ("r0", self.r0 > 0, "must be > 0"),
            ("lambda_s", self.lambda_s > 1, "must be > 1"),
        ]
        for name, ok, msg in checks:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and ok):
                raise InvalidParameterError(f"{name}={value!r} {msg}")

    @property
    def gain(self) -> float:
        """lambda_s ** (1/alpha - 1), the effective small-cell advantage."""
        return self.lambda_s ** (1.0 / self.alpha - 1.0)

    @property
    def small_share(self) -> float:
        """Unconstrained optimal fraction of bandwidth given to small-cells."""
        weighted = self.n_fixed * self.gain
        return weighted / (weighted + self.n_mobile)


@dataclass(frozen=True)
class SpAllocation:
    """One SP's bandwidth split. Build with :meth:`split`."""

    total: float
    small: float
    macro: float
    floor: float = 0.0

    def __post_init__(self) -> None:
        if self.total < 0 or self.floor < 0:
            raise InvalidParameterError(
                f"total={self.total} and floor={self.floor} must be >= 0")
        if self.floor > self.total + ALLOC_TOL:
            raise InvalidParameterError(
                f"floor={self.floor} exceeds total={self.total}")
        if abs(self.small + self.macro - self.total) > ALLOC_TOL:
            raise InvalidParameterError(
                f"small + macro = {self.small + self.macro} != total={self.total}")
        if self.macro < -ALLOC_TOL or self.small < self.floor - ALLOC_TOL:
            raise InvalidParameterError(
                f"small={self.small} must lie in [floor={self.floor}, total={self.total}]")

    @classmethod
    def split(cls, total: float, small: float, floor: float = 0.0) -> SpAllocation:
        # absorb round-off at the upper end so macro never goes negative
        if total < small <= total + ALLOC_TOL:
            small = total
        return cls(total=total, small=small, macro=total - small, floor=floor)

    def with_small(self, small: float) -> SpAllocation:
        return SpAllocation.split(self.total, small, self.floor)


@dataclass(frozen=True)
class DuopolyAllocation:
    sp1: SpAllocation
    sp2: SpAllocation

    def __getitem__(self, index: int) -> SpAllocation:
        return (self.sp1, self.sp2)[index]

    def replace(self, index: int, alloc: SpAllocation) -> DuopolyAllocation:
        if index == 0:
            return DuopolyAllocation(alloc, self.sp2)
        return DuopolyAllocation(self.sp1, alloc)

    @property
    def smalls(self) -> tuple[float, float]:
        return (self.sp1.small, self.sp2.small)


@dataclass(frozen=True)
class CapacityPair:
    c_macro: float
    c_small: float


class Regime(str, Enum):
    SEPARATED = "Separated"
    OVERFLOW = "Overflow"


@dataclass(frozen=True)
class ClearingOutcome:
    """Market-clearing prices, rates and user masses for a capacity pair.

    A tier without capacity carries an infinite price and zero rate; no
    user associates with it. ``mobile_unserved`` flags the case where the
    macro tier is empty and mobile users get nothing.
    """

    price_macro: float
    price_small: float
    rate_macro: float
    rate_small: float
    mass_macro: float
    mass_small: float
    overflow_fraction: float
    regime: Regime
    capacities: CapacityPair
    mobile_unserved: bool = False


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise InvalidParameterError(f"alpha={alpha!r} must lie in (0, 1)")


def utility(r: float, alpha: float) -> float:
    """Alpha-fair utility r^(1-alpha) / (1-alpha); zero at r = 0."""
    _check_alpha(alpha)
    if r < 0:
        raise InvalidParameterError(f"rate r={r!r} must be >= 0")
    return r ** (1.0 - alpha) / (1.0 - alpha)


def demand(p: float, alpha: float) -> float:
    """Per-user rate demanded at unit price ``p``."""
    _check_alpha(alpha)
    if not p > 0:
        raise InvalidPriceError(f"price p={p!r} must be > 0")
    return (1.0 / p) ** (1.0 / alpha)


def net_payoff(p: float, alpha: float) -> float:
    """Best achievable utility-minus-payment for a user facing price ``p``."""
    _check_alpha(alpha)
    if not p > 0:
        raise InvalidPriceError(f"price p={p!r} must be > 0")
    return alpha / (1.0 - alpha) * p ** (1.0 - 1.0 / alpha)


def capacities(params: MarketParams,
               alloc: SpAllocation | DuopolyAllocation) -> CapacityPair:
    sps = (alloc,) if isinstance(alloc, SpAllocation) else (alloc.sp1, alloc.sp2)
    b_macro = sum(sp.macro for sp in sps)
    b_small = sum(sp.small for sp in sps)
    return CapacityPair(c_macro=max(b_macro, 0.0) * params.r0,
                        c_small=params.lambda_s * b_small * params.r0)


def _price(rate: float, alpha: float) -> float:
    return rate ** -alpha if rate > 0 else math.inf


def clear_market(params: MarketParams, caps: CapacityPair) -> ClearingOutcome:
    """Compute market-clearing prices and user association.

    Fixed users take the small tier while it is at least as generous per
    user as the macro tier. Otherwise they spill onto macro-cells until the
    two prices equalize, with ``overflow_fraction`` of them on macro.
    """
    n_m, n_f, alpha = params.n_mobile, params.n_fixed, params.alpha
    c_m, c_s = caps.c_macro, caps.c_small
    if c_m < 0 or c_s < 0:
        raise InvalidParameterError(f"capacities must be >= 0, got {caps}")

    if c_s * n_m >= c_m * n_f and c_s > 0:
        r_m, r_s = c_m / n_m, c_s / n_f
        return ClearingOutcome(
            price_macro=_price(r_m, alpha), price_small=_price(r_s, alpha),
            rate_macro=r_m, rate_small=r_s,
            mass_macro=n_m if c_m > 0 else 0.0, mass_small=n_f,
            overflow_fraction=0.0, regime=Regime.SEPARATED, capacities=caps,
            mobile_unserved=c_m == 0)

    if c_m == 0:
        # nothing to clear at all
        return ClearingOutcome(
            price_macro=math.inf, price_small=math.inf, rate_macro=0.0,
            rate_small=0.0, mass_macro=0.0, mass_small=0.0,
            overflow_fraction=1.0, regime=Regime.OVERFLOW, capacities=caps,
            mobile_unserved=True)

    rate = (c_m + c_s) / (n_m + n_f)
    # equivalent to (n_f*c_m - n_m*c_s) / (n_f*(c_m + c_s)) without cancellation
    mass_small = min(c_s / rate, n_f)
    x = (n_f - mass_small) / n_f
    price = _price(rate, alpha)
    return ClearingOutcome(
        price_macro=price, price_small=price if c_s > 0 else math.inf,
        rate_macro=rate, rate_small=rate if c_s > 0 else 0.0,
        mass_macro=n_m + n_f - mass_small, mass_small=mass_small,
        overflow_fraction=x, regime=Regime.OVERFLOW, capacities=caps)


def clear_allocation(params: MarketParams,
                     alloc: SpAllocation | DuopolyAllocation) -> ClearingOutcome:
    return clear_market(params, capacities(params, alloc))


def sp_revenue(params: MarketParams, alloc_i: SpAllocation,
               outcome: ClearingOutcome) -> float:
    """Payments collected by one SP at the given clearing outcome.

    Users on a tier are split across SPs in proportion to capacity, so an
    SP earns its own capacity times the tier price. Empty tiers earn 0.
    """
    c_small = params.lambda_s * alloc_i.small * params.r0
    c_macro = alloc_i.macro * params.r0
    revenue = 0.0
    if c_small > 0:
        revenue += c_small * outcome.price_small
    if c_macro > 0:
        revenue += c_macro * outcome.price_macro
    return revenue


def social_welfare(params: MarketParams, outcome: ClearingOutcome) -> float:
    """Sum of user utilities; unserved users contribute zero."""
    a = params.alpha
    return (outcome.mass_macro * utility(outcome.rate_macro, a)
            + outcome.mass_small * utility(outcome.rate_small, a))
