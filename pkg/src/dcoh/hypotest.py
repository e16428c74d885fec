"""Quantum Neyman-Pearson solvers.

Two structured semidefinite programs are solved without a general SDP
dependency, by maximizing/minimizing their concave/convex piecewise-linear
one-dimensional Lagrangian duals and recovering the optimal test operator
at the active kink:

* hypothesis-testing relative entropy
    min Tr(M sigma)  s.t.  Tr(M rho) >= 1 - eps,  0 <= M <= 1
* twirled distillation-fidelity program
    max <X, rho>     s.t.  <X, dephase(rho)> = 1/m,  0 <= X <= 1
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import check_hermitian, support_projector
from .states import check_density, dephase

# Eigenvalues within ZERO_BAND of zero at the dual optimum form the
# fractional eigenspace of the optimal test.
ZERO_BAND = 1e-9
# A dual subgradient this close to zero counts as a sign change.
SLOPE_TOL = 1e-12
GAP_TOL = 1e-6


@dataclass
class NPResult:
    """Solution of the hypothesis-testing program with certificates."""

    optimal_value: float
    dh_bits: float
    primal: np.ndarray
    dual_t: float
    dual_value: float
    gap: float
    infinite: bool = False


@dataclass
class FidelityProgram:
    """Solution of the twirled distillation-fidelity program."""

    value: float
    primal: np.ndarray
    dual_t: float
    dual_value: float
    gap: float


def check_test_operator(m, atol: float = 1e-9) -> np.ndarray:
    """Validate 0 <= M <= 1 within tolerance."""
    m = check_hermitian(m)
    w = np.linalg.eigvalsh(m)
    if w[0] < -atol or w[-1] > 1.0 + atol:
        raise ValueError(
            f"test operator eigenvalues [{w[0]:.3e}, {w[-1]:.3e}] outside [0, 1]"
        )
    return m


def _split_spectrum(a, band: float):
    """Eigendecompose and split into positive / near-zero eigenspaces."""
    w, v = np.linalg.eigh(a)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    tau = band * scale
    pos = w > tau
    zero = np.abs(w) <= tau
    p_pos = v[:, pos] @ v[:, pos].conj().T
    p_zero = v[:, zero] @ v[:, zero].conj().T
    return w, p_pos, p_zero, tau


def _recover_primal(a, weight_op, target: float, band: float = ZERO_BAND):
    """Optimal test at a kink: full positive eigenspace of ``a`` plus a
    uniform fraction of the near-zero eigenspace tuned so that
    Tr(M weight_op) = target."""
    for _ in range(5):
        _, p_pos, p_zero, _ = _split_spectrum(a, band)
        got = float(np.trace(p_pos @ weight_op).real)
        room = float(np.trace(p_zero @ weight_op).real)
        need = target - got
        alpha = 0.0
        if room > 1e-15:
            alpha = min(max(need / room, 0.0), 1.0)
        m = p_pos + alpha * p_zero
        if -1e-8 <= need <= room + 1e-8:
            return m
        band *= 10.0  # widen the kink eigenspace and retry
    return m


def dh_epsilon(rho, sigma, eps: float) -> NPResult:
    """Hypothesis-testing relative entropy D_H^eps(rho || sigma) in bits.

    The concave dual g(t) = t(1 - eps) - Tr(t rho - sigma)_+ is maximized
    over t >= 0 by bisection on its (non-increasing) subgradient.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must be in [0, 1), got {eps}")
    rho = check_density(rho)
    sigma = check_density(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")

    if eps == 0.0:
        # Tr(M rho) = 1 forces M to dominate the support projector of rho,
        # so M = Pi_rho is exactly optimal; the dual sup is its asymptote.
        pi = support_projector(rho)
        optimal = float(np.trace(pi @ sigma).real)
        if optimal <= 1e-12:
            return NPResult(optimal, math.inf, pi, math.inf, optimal, 0.0, infinite=True)
        return NPResult(optimal, -math.log2(optimal), pi, math.inf, optimal, 0.0)

    def slope(t: float) -> float:
        _, p_pos, _, _ = _split_spectrum(t * rho - sigma, ZERO_BAND)
        return (1.0 - eps) - float(np.trace(p_pos @ rho).real)

    hi = 1.0
    for _ in range(80):
        if slope(hi) <= SLOPE_TOL:
            break
        hi *= 2.0
    else:
        raise RuntimeError("dual subgradient never turned non-positive")
    lo = 0.0
    while hi - lo > 1e-13 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if slope(mid) > SLOPE_TOL:
            lo = mid
        else:
            hi = mid
    t_star = hi

    a = t_star * rho - sigma
    m = _recover_primal(a, rho, 1.0 - eps)
    optimal = float(np.trace(m @ sigma).real)
    w = np.linalg.eigvalsh(a)
    tau = ZERO_BAND * max(1.0, float(np.max(np.abs(w))))
    dual = t_star * (1.0 - eps) - float(np.sum(w[w > tau]))
    gap = optimal - dual
    if optimal <= 1e-12:
        return NPResult(optimal, math.inf, m, t_star, dual, gap, infinite=True)
    return NPResult(optimal, -math.log2(optimal), m, t_star, dual, gap)


def dh_zero_closed_form(rho) -> float:
    """Zero-error value -log2 Tr(Pi_rho dephase(rho)), in bits."""
    rho = check_density(rho)
    pi = support_projector(rho)
    return -math.log2(float(np.trace(pi @ dephase(rho)).real))


def distill_fidelity_program(rho, m: float) -> FidelityProgram:
    """Solve max <X, rho> s.t. 0 <= X <= 1, <X, dephase(rho)> = 1/m.

    The convex dual h(t) = Tr(rho - t dephase(rho))_+ + t/m is minimized
    over t >= 0 (the t < 0 branch is never strictly better for m >= 1).
    """
    if m < 1.0:
        raise ValueError(f"m must be >= 1, got {m}")
    rho = check_density(rho)
    delta = dephase(rho)

    def slope(t: float) -> float:
        _, p_pos, _, _ = _split_spectrum(rho - t * delta, ZERO_BAND)
        return 1.0 / m - float(np.trace(p_pos @ delta).real)

    if slope(0.0) >= -SLOPE_TOL:
        t_star = 0.0
    else:
        hi = 1.0
        for _ in range(80):
            if slope(hi) >= -SLOPE_TOL:
                break
            hi *= 2.0
        else:
            raise RuntimeError("dual subgradient never turned non-negative")
        lo = 0.0
        while hi - lo > 1e-13 * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if slope(mid) < -SLOPE_TOL:
                lo = mid
            else:
                hi = mid
        t_star = hi

    a = rho - t_star * delta
    x = _recover_primal(a, delta, 1.0 / m)
    value = float(np.trace(x @ rho).real)
    w = np.linalg.eigvalsh(a)
    tau = ZERO_BAND * max(1.0, float(np.max(np.abs(w))))
    dual = float(np.sum(w[w > tau])) + t_star / m
    return FidelityProgram(
        value=min(max(value, 0.0), 1.0),
        primal=x,
        dual_t=t_star,
        dual_value=dual,
        gap=dual - value,
    )


def distill_fidelity(rho, m: float) -> float:
    """Best fidelity with Psi_m achievable by an input-tailored protocol."""
    return distill_fidelity_program(rho, m).value
