"""Constrained duopoly bandwidth equilibrium.

Each SP picks its small-cell bandwidth in [floor, total] to maximize its
own market-clearing revenue. Revenue rises while fixed users overflow onto
macro-cells and is strictly concave once the tiers separate, so every best
response is a root of the marginal revenue, or an endpoint.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace
from enum import Enum

from scipy.optimize import brentq

from .market import (DegenerateRatesError, DuopolyAllocation,
                     InvalidParameterError, MarketError, MarketParams,
                     SpAllocation, clear_allocation, social_welfare, sp_revenue)

ITER_TOL = 1e-10
MAX_ITER = 10_000
KKT_TOL = 1e-7  # relative to r0 * (lambda_s * p_S + p_M)
BIND_TOL = 1e-9
REGION_TOL = 1e-9
ROUNDOFF = 1e-13  # relative to the size of the cancelling terms


class SolverDiagnostic(RuntimeError):
    """The equilibrium solver could not certify its answer."""

    def __init__(self, message: str, residuals: tuple[float, float] | None = None):
        if residuals is not None:
            message = f"{message} (residuals={residuals[0]:.6g}, {residuals[1]:.6g})"
        super().__init__(message)
        self.residuals = residuals


class NoConvergenceError(SolverDiagnostic):
    pass


class InconsistentResultError(SolverDiagnostic):
    pass


class RegimeError(MarketError):
    """The closed-form marginal revenue only holds when tiers are separated."""


class Region(str, Enum):
    A = "A"
    B_I = "B_I"
    B_II = "B_II"
    C_I = "C_I"
    C_II = "C_II"


@dataclass(frozen=True)
class ConstraintPair:
    floor1: float = 0.0
    floor2: float = 0.0

    def __iter__(self):
        return iter((self.floor1, self.floor2))

    def __getitem__(self, index: int) -> float:
        return (self.floor1, self.floor2)[index]


@dataclass(frozen=True)
class EquilibriumResult:
    allocation: DuopolyAllocation
    region: Region | None
    kkt_residual_1: float
    kkt_residual_2: float
    iterations: int
    revenues: tuple[float, float]
    welfare: float

    @property
    def smalls(self) -> tuple[float, float]:
        return self.allocation.smalls

    @property
    def total_small(self) -> float:
        return self.allocation.sp1.small + self.allocation.sp2.small


def _marginal(params: MarketParams, own_small: float, own_total: float,
              opp_small: float, opp_total: float) -> float:
    return _marginal_and_scale(params, own_small, own_total, opp_small, opp_total)[0]


def _marginal_and_scale(params: MarketParams, own_small: float, own_total: float,
                        opp_small: float, opp_total: float) -> tuple[float, float]:
    """Marginal revenue plus the magnitude of the terms that cancel in it."""
    a, lam, r0 = params.alpha, params.lambda_s, params.r0
    own_macro = own_total - own_small
    macro_total = own_macro + opp_total - opp_small
    r_s = lam * (own_small + opp_small) * r0 / params.n_fixed
    r_m = macro_total * r0 / params.n_mobile
    if r_s <= 0:
        raise DegenerateRatesError("small-cell rate is zero")
    small_term = (lam * r_s ** -a
                  - a * lam ** 2 * own_small * r0 / params.n_fixed * r_s ** (-a - 1))
    if r_m <= 0:
        # shifting bandwidth back to an empty macro tier is infinitely valuable
        return -math.inf, math.inf
    macro_term = (-r_m ** -a
                  + a * own_macro * r0 / params.n_mobile * r_m ** (-a - 1))
    return r0 * (small_term + macro_term), r0 * (lam * r_s ** -a + r_m ** -a)


def _nonpositive(value_scale: tuple[float, float]) -> bool:
    value, scale = value_scale
    return value <= ROUNDOFF * scale


def marginal_revenue(params: MarketParams, alloc: DuopolyAllocation,
                     sp_index: int) -> float:
    """Derivative of SP ``sp_index``'s revenue w.r.t. its small-cell bandwidth.

    Valid while the small tier is at least as generous per user as the
    macro tier (the regime every equilibrium lives in).

    Raises:
        DegenerateRatesError: if either tier's per-user rate is zero.
        RegimeError: if fixed users overflow onto macro-cells at ``alloc``.
    """
    own, opp = alloc[sp_index], alloc[1 - sp_index]
    outcome = clear_allocation(params, alloc)
    if outcome.rate_small <= 0 or outcome.rate_macro <= 0:
        raise DegenerateRatesError(
            f"rates R_S={outcome.rate_small}, R_M={outcome.rate_macro} must be > 0")
    if outcome.overflow_fraction > 0:
        raise RegimeError("fixed users overflow onto macro-cells at this allocation")
    return _marginal(params, own.small, own.total, opp.small, opp.total)


def separation_point(params: MarketParams, own_total: float, opp_small: float,
                     opp_total: float) -> float:
    """Own small-cell bandwidth at which the two tiers' per-user rates meet.

    Below it fixed users overflow onto macro-cells, where revenue strictly
    increases in small-cell bandwidth. Clipped to [0, own_total].
    """
    lam_nm = params.lambda_s * params.n_mobile
    opp_macro = opp_total - opp_small
    point = ((params.n_fixed * (own_total + opp_macro) - lam_nm * opp_small)
             / (lam_nm + params.n_fixed))
    return min(max(point, 0.0), own_total)


def unconstrained_ne(params: MarketParams, b1: float, b2: float) -> DuopolyAllocation:
    if b1 <= 0 or b2 <= 0:
        raise InvalidParameterError(f"totals b1={b1}, b2={b2} must be > 0")
    share = params.small_share
    return DuopolyAllocation(SpAllocation.split(b1, share * b1),
                             SpAllocation.split(b2, share * b2))


def _best_response(params: MarketParams, own_total: float, own_floor: float,
                   opp_small: float, opp_total: float) -> float:
    lo = max(own_floor, separation_point(params, own_total, opp_small, opp_total))
    hi = own_total
    if lo >= hi:
        return hi

    def d(x: float) -> float:
        return _marginal(params, x, own_total, opp_small, opp_total)

    if _nonpositive(_marginal_and_scale(params, lo, own_total, opp_small, opp_total)):
        return lo
    if d(hi) >= 0:
        return hi
    return brentq(d, lo, hi, xtol=1e-15, rtol=4 * sys.float_info.epsilon, maxiter=200)


def best_response(params: MarketParams, alloc: DuopolyAllocation, sp_index: int) -> float:
    """Revenue-maximizing small-cell bandwidth for SP ``sp_index``.

    The opponent's split and the SP's own total and floor are read from
    ``alloc``; the SP's current small-cell value is ignored.
    """
    own, opp = alloc[sp_index], alloc[1 - sp_index]
    return _best_response(params, own.total, own.floor, opp.small, opp.total)


def _validate(b1: float, b2: float, floors: ConstraintPair) -> None:
    for i, (total, floor) in enumerate(zip((b1, b2), floors), start=1):
        if total <= 0:
            raise InvalidParameterError(f"b{i}={total} must be > 0")
        if not 0 <= floor <= total:
            raise InvalidParameterError(f"floor{i}={floor} must lie in [0, b{i}={total}]")


def _kkt_ok(params: MarketParams, alloc: DuopolyAllocation) -> bool:
    for i in (0, 1):
        sp, opp = alloc[i], alloc[1 - i]
        d, scale = _marginal_and_scale(params, sp.small, sp.total, opp.small, opp.total)
        tol = KKT_TOL * scale
        at_floor = sp.small - sp.floor <= BIND_TOL * max(1.0, sp.total)
        at_top = sp.total - sp.small <= BIND_TOL * max(1.0, sp.total)
        at_kink = abs(sp.small - separation_point(params, sp.total, opp.small,
                                                  opp.total)) <= BIND_TOL
        if at_floor and at_top:
            continue
        if at_floor or at_kink:
            ok = d <= tol
        elif at_top:
            ok = d >= -tol
        else:
            ok = abs(d) <= tol
        if not ok:
            return False
    return True


def solve_ne(params: MarketParams, b1: float, b2: float,
             floors: ConstraintPair = ConstraintPair(),
             start: tuple[float, float] | None = None,
             tol: float = ITER_TOL, max_iter: int = MAX_ITER) -> EquilibriumResult:
    """Constrained Nash equilibrium via alternating best responses.

    Starts from the unconstrained equilibrium lifted onto the floors unless
    ``start`` gives explicit small-cell values. Stops once an entire sweep
    moves both SPs by less than ``tol``.

    Raises:
        NoConvergenceError: iteration budget exhausted.
        SolverDiagnostic: the converged point fails the first-order check.
    """
    floors = ConstraintPair(*floors)
    _validate(b1, b2, floors)
    if start is None:
        share = params.small_share
        start = (max(share * b1, floors.floor1), max(share * b2, floors.floor2))
    smalls = [min(max(s, f), t) for s, f, t in zip(start, floors, (b1, b2))]
    totals = (b1, b2)

    iterations = 0
    while True:
        iterations += 1
        move = 0.0
        for i in (0, 1):
            new = _best_response(params, totals[i], floors[i],
                                 smalls[1 - i], totals[1 - i])
            move = max(move, abs(new - smalls[i]))
            smalls[i] = new
        if move < tol:
            break
        if iterations >= max_iter:
            raise NoConvergenceError(
                f"best-response iteration did not settle in {max_iter} sweeps "
                f"(last move {move:.3g})")

    alloc = DuopolyAllocation(SpAllocation.split(b1, smalls[0], floors.floor1),
                              SpAllocation.split(b2, smalls[1], floors.floor2))
    residuals = tuple(
        _marginal(params, alloc[i].small, alloc[i].total,
                  alloc[1 - i].small, alloc[1 - i].total) for i in (0, 1))
    if not _kkt_ok(params, alloc):
        raise SolverDiagnostic("equilibrium fails first-order conditions", residuals)

    outcome = clear_allocation(params, alloc)
    result = EquilibriumResult(
        allocation=alloc, region=None,
        kkt_residual_1=residuals[0], kkt_residual_2=residuals[1],
        iterations=iterations,
        revenues=(sp_revenue(params, alloc.sp1, outcome),
                  sp_revenue(params, alloc.sp2, outcome)),
        welfare=social_welfare(params, outcome))
    return replace(result, region=classify_region(params, b1, b2, floors, result))


def type1_condition(params: MarketParams, b1: float, b2: float,
                    floors: ConstraintPair) -> tuple[bool, bool]:
    """Whether each SP is content to sit exactly on its floor.

    Evaluated at the profile where both SPs sit on their floors: true for
    SP i when its marginal revenue there is non-positive, or when it has no
    room to move up. Both true means the floors themselves are the
    equilibrium.
    """
    floors = ConstraintPair(*floors)
    _validate(b1, b2, floors)
    totals = (b1, b2)
    flags = []
    for i in (0, 1):
        if floors[i] >= totals[i]:
            flags.append(True)
            continue
        kink = separation_point(params, totals[i], floors[1 - i], totals[1 - i])
        if floors[i] < kink:
            # overflow regime: revenue still rising
            flags.append(False)
            continue
        flags.append(_nonpositive(_marginal_and_scale(
            params, floors[i], totals[i], floors[1 - i], totals[1 - i])))
    return flags[0], flags[1]


def classify_region(params: MarketParams, b1: float, b2: float,
                    floors: ConstraintPair, result: EquilibriumResult) -> Region:
    """Label an equilibrium by which floors cut into the unconstrained one
    (none: A, both: B, one: C) and how many bind at the solution (both: I,
    one: II).

    Raises:
        InconsistentResultError: the binding pattern is impossible for the
            case, which points at a solver bug.
    """
    floors = ConstraintPair(*floors)
    share = params.small_share
    violated = [floors[i] > share * t + REGION_TOL for i, t in enumerate((b1, b2))]
    binding = [
        result.allocation[i].small - floors[i]
        <= BIND_TOL * max(1.0, result.allocation[i].total) for i in (0, 1)]

    if not any(violated):
        return Region.A
    if all(violated):
        if not any(binding):
            raise InconsistentResultError(
                "case B equilibrium with no binding floor",
                (result.kkt_residual_1, result.kkt_residual_2))
        return Region.B_I if all(binding) else Region.B_II
    forced = violated.index(True)
    if not binding[forced]:
        raise InconsistentResultError(
            f"case C equilibrium where SP {forced + 1} leaves its floor",
            (result.kkt_residual_1, result.kkt_residual_2))
    return Region.C_I if all(binding) else Region.C_II
