"""One-shot, zero-error and asymptotic distillation/dilution rates.

One-shot yields and costs are log2 of an integer unit count; the raw
(pre-rounding) optimum is always reported alongside. An integer guard
absorbs floating-point error before flooring/ceiling, since the exact
optima sit exactly on integers for structured states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hypotest import dh_epsilon, dh_zero_closed_form
from .linalg import fidelity
from .monotones import r_delta, rel_entropy_coherence
from .states import check_density, dephase, is_incoherent

INT_GUARD_RTOL = 1e-7


@dataclass
class RateReport:
    one_shot_bits: float
    raw_value: float
    eps: float
    regime: str


def _guarded_int(x: float) -> float:
    r = round(x)
    if abs(x - r) <= INT_GUARD_RTOL * max(1.0, abs(x)):
        return float(r)
    return x


def guarded_floor(x: float) -> int:
    return int(math.floor(_guarded_int(x)))


def guarded_ceil(x: float) -> int:
    return int(math.ceil(_guarded_int(x)))


def distill_one_shot(rho, eps: float) -> RateReport:
    """Largest log2 m such that Psi_m is reachable within error eps."""
    rho = check_density(rho)
    result = dh_epsilon(rho, dephase(rho), eps)
    m = guarded_floor(2.0 ** result.dh_bits)
    return RateReport(math.log2(m), result.dh_bits, eps, "one_shot")


def distill_zero_error(rho) -> RateReport:
    """Exact distillation yield from the support-projector closed form."""
    raw = dh_zero_closed_form(rho)
    m = guarded_floor(2.0 ** raw)
    return RateReport(math.log2(m), raw, 0.0, "zero_error")


def distill_asymptotic(rho) -> RateReport:
    value = rel_entropy_coherence(rho)
    return RateReport(value, value, 0.0, "asymptotic")


def distill_zero_error_asymptotic(rho) -> RateReport:
    """Un-floored zero-error value; exact by additivity under tensor powers."""
    raw = dh_zero_closed_form(rho)
    return RateReport(raw, raw, 0.0, "asymptotic")


def dilute_zero_error(rho) -> RateReport:
    """Exact dilution cost log2 ceil(R_Delta + 1)."""
    raw = math.log2(r_delta(rho) + 1.0)
    m = guarded_ceil(2.0 ** raw)
    return RateReport(math.log2(m), raw, 0.0, "zero_error")


def dilute_asymptotic(rho) -> RateReport:
    value = rel_entropy_coherence(rho)
    return RateReport(value, value, 0.0, "asymptotic")


def dilute_zero_error_asymptotic(rho) -> RateReport:
    raw = math.log2(r_delta(rho) + 1.0)
    return RateReport(raw, raw, 0.0, "asymptotic")


def _dilution_lower_unit(rho, eps: float, n_grid: int = 12) -> float:
    """Certified lower bound on min{R_Delta(w)+1 : F(rho, w) >= 1-eps}.

    For any test 0 <= M <= 1 and any feasible w, contractivity of the trace
    distance together with w <= (R_Delta(w)+1) dephase(w) gives

        R_Delta(w) + 1 >= (Tr M rho - sqrt(eps)) / (Tr M dephase(rho) + sqrt(eps)).

    The bound is maximized over the optimal hypothesis tests at a small
    grid of type-I error levels.
    """
    rho = check_density(rho)
    delta = dephase(rho)
    root_eps = math.sqrt(max(eps, 0.0))
    best = 1.0
    for dlt in np.linspace(0.0, 0.9, n_grid):
        res = dh_epsilon(rho, delta, float(dlt))
        num = float(np.trace(res.primal @ rho).real) - root_eps
        den = float(np.trace(res.primal @ delta).real) + root_eps
        if num > 0.0 and den > 0.0:
            best = max(best, num / den)
    return best


def _dilution_upper_unit(rho, eps: float, n_grid: int = 201) -> float:
    """Upper bound on the smoothed dilution unit count via the candidate
    family w_t = (1-t) rho + t dephase(rho); each accepted candidate is
    checked to satisfy the fidelity constraint."""
    rho = check_density(rho)
    delta = dephase(rho)
    lam0 = r_delta(rho) + 1.0

    def unit(t: float) -> float:
        # R_Delta((1-t) rho + t delta) + 1 = t + (1-t)(R_Delta(rho)+1)
        return t + (1.0 - t) * lam0

    def feasible(t: float) -> bool:
        omega = (1.0 - t) * rho + t * delta
        return fidelity(rho, omega) >= 1.0 - eps - 1e-12

    best_t = 0.0
    grid = np.linspace(0.0, 1.0, n_grid)
    feas = [bool(feasible(float(t))) for t in grid]
    for t, ok in zip(grid, feas):
        if ok:
            best_t = max(best_t, float(t))
    # refine between the last feasible grid point and the next one
    lo, hi = best_t, min(best_t + (grid[1] - grid[0]), 1.0)
    if best_t < 1.0:
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            if feasible(mid):
                lo = mid
            else:
                hi = mid
        best_t = lo
    return unit(best_t)


def dilute_one_shot_bounds(rho, eps: float) -> tuple[RateReport, RateReport]:
    """Certified bracket [lower, upper] on the eps-error one-shot dilution cost.

    At eps = 0 only w = rho is feasible, so both sides collapse to the
    exact zero-error cost.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must be in [0, 1), got {eps}")
    rho = check_density(rho)
    if eps == 0.0:
        exact = dilute_zero_error(rho)
        lower = RateReport(exact.one_shot_bits, exact.raw_value, 0.0, "one_shot")
        upper = RateReport(exact.one_shot_bits, exact.raw_value, 0.0, "one_shot")
        return lower, upper
    unit_lo = _dilution_lower_unit(rho, eps)
    unit_hi = _dilution_upper_unit(rho, eps)
    unit_lo = min(unit_lo, unit_hi)  # the certified bound can never exceed the witness
    lower = RateReport(
        math.log2(guarded_ceil(unit_lo)), math.log2(unit_lo), eps, "one_shot"
    )
    upper = RateReport(
        math.log2(guarded_ceil(unit_hi)), math.log2(unit_hi), eps, "one_shot"
    )
    return lower, upper


def asymptotic_rate(rho, sigma) -> float:
    """Asymptotic conversion rate D(rho||dephase(rho)) / D(sigma||dephase(sigma)).

    Returns math.inf when the target is incoherent (unbounded rate) and 0
    when only the source is incoherent.
    """
    rho = check_density(rho)
    sigma = check_density(sigma)
    if is_incoherent(sigma):
        return math.inf
    if is_incoherent(rho):
        return 0.0
    return rel_entropy_coherence(rho) / rel_entropy_coherence(sigma)
