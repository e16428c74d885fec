"""Coherence quantifiers that are monotone under dephasing-covariant and
input-tailored dephasing-covariant channels.

All logarithms are base 2; values are reported in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import matrix_power, support_projector
from .states import (
    check_density,
    check_pure,
    coherence_distribution,
    dephase,
    l1_norm,
    prob_vector,
)

DEFAULT_ALPHAS = (0.0, 0.5, 1.0, 1.5, 2.0)
DEFAULT_PS = (0.25, 0.5, 0.75, 1.25, 1.5, 2.0)


@dataclass
class MonotoneReport:
    r_delta: float
    rel_entropy_bits: float
    renyi: list[tuple[float, float]]
    l1: float
    c_k: list[tuple[int, float]] = field(default_factory=list)
    lp_moduli: list[tuple[float, float]] = field(default_factory=list)


def r_delta(rho) -> float:
    """Max-relative-entropy monotone: min{lambda : rho <= (1+lambda) dephase(rho)}.

    Computed in closed form as the largest eigenvalue of
    D^{-1/2} rho D^{-1/2} minus one, with D = dephase(rho) pseudo-inverted
    on its support.
    """
    rho = check_density(rho)
    d_inv_sqrt = matrix_power(dephase(rho), -0.5)
    conj = d_inv_sqrt @ rho @ d_inv_sqrt
    lam = float(np.max(np.linalg.eigvalsh((conj + conj.conj().T) / 2)))
    return max(lam - 1.0, 0.0)


def _entropy_bits(w) -> float:
    w = np.clip(np.asarray(w, dtype=float), 0.0, None)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def rel_entropy_coherence(rho) -> float:
    """Relative entropy of coherence S(dephase(rho)) - S(rho), in bits."""
    rho = check_density(rho)
    s_rho = _entropy_bits(np.linalg.eigvalsh(rho))
    s_deph = _entropy_bits(np.diag(dephase(rho)).real)
    return max(s_deph - s_rho, 0.0)


def renyi_relative(rho, alpha: float) -> float:
    """Petz-Renyi relative entropy between rho and its dephasing, in bits.

    Valid (data-processing-monotone) only for alpha in [0, 2]; values
    outside that range are rejected.
    """
    if not 0.0 <= alpha <= 2.0:
        raise ValueError(f"alpha must be in [0, 2], got {alpha}")
    rho = check_density(rho)
    if alpha == 1.0:
        return rel_entropy_coherence(rho)
    delta = dephase(rho)
    if alpha == 0.0:
        trace = float(np.trace(support_projector(rho) @ delta).real)
        return -math.log2(trace)
    term = matrix_power(rho, alpha) @ matrix_power(delta, 1.0 - alpha)
    trace = float(np.trace(term).real)
    return math.log2(trace) / (alpha - 1.0)


def renyi_entropy(p, gamma: float) -> float:
    """Renyi entropy of a probability vector, in bits; gamma=1 is Shannon."""
    if gamma < 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    p = prob_vector(p)
    if gamma == 1.0:
        return _entropy_bits(p)
    support = p[p > 1e-15]
    if gamma == 0.0:
        return math.log2(len(support))
    return math.log2(float(np.sum(support ** gamma))) / (1.0 - gamma)


def c_k_monotone(psi, k: int) -> float:
    """Tail sum of the sorted coherence distribution from position k (1-based)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    p = np.sort(coherence_distribution(psi))[::-1]
    return float(np.sum(p[k - 1:]))


def lp_moduli_norm(psi, p: float) -> float:
    """l_p norm of the squared moduli of the amplitudes; p=0 counts the support."""
    if p < 0.0:
        raise ValueError(f"p must be >= 0, got {p}")
    q = coherence_distribution(psi)
    if p == 0.0:
        return float(np.count_nonzero(q > 1e-15))
    return float(np.sum(q ** p) ** (1.0 / p))


def monotone_report(rho, psi=None, alphas=DEFAULT_ALPHAS, ks=(2,), ps=DEFAULT_PS) -> MonotoneReport:
    """Evaluate the full monotone family on a state.

    This is a necessary-conditions family only: no finite set of monotones
    is known to fully characterize input-tailored transformations. When the
    pure amplitude vector is available the pure-state-only quantifiers are
    included as well.
    """
    rho = check_density(rho)
    report = MonotoneReport(
        r_delta=r_delta(rho),
        rel_entropy_bits=rel_entropy_coherence(rho),
        renyi=[(a, renyi_relative(rho, a)) for a in alphas],
        l1=l1_norm(rho),
    )
    if psi is not None:
        psi = check_pure(psi)
        report.c_k = [(k, c_k_monotone(psi, k)) for k in ks]
        report.lp_moduli = [(p, lp_moduli_norm(psi, p)) for p in ps]
    return report
