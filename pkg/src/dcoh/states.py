"""States in a fixed incoherent basis: density matrices, pure amplitude
vectors, dephasing, and the coherence-specific norms.

The incoherent basis is always the computational basis of the stored
array; any basis change is the caller's responsibility.
"""

from __future__ import annotations

import json

import numpy as np

from .linalg import check_hermitian, check_psd

TRACE_ATOL = 1e-9
NORM_ATOL = 1e-9
# Floating-point dust below this magnitude is clamped to zero in
# probability vectors.
PROB_CLAMP = 1e-12


def check_density(rho) -> np.ndarray:
    """Validate a density matrix (Hermitian, PSD, unit trace); returns it symmetrized."""
    rho = check_psd(check_hermitian(rho))
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValueError(f"trace is {tr!r}, expected 1 within {TRACE_ATOL:.1e}")
    return rho


def check_pure(psi) -> np.ndarray:
    """Validate a pure-state amplitude vector (unit l2 norm)."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    nrm = float(np.linalg.norm(psi))
    if abs(nrm - 1.0) > NORM_ATOL:
        raise ValueError(f"norm is {nrm!r}, expected 1 within {NORM_ATOL:.1e}")
    return psi


def prob_vector(p) -> np.ndarray:
    """Clamp dust, validate normalization, and return an exactly normalized copy."""
    p = np.asarray(p, dtype=float).reshape(-1)
    if np.any(p < -PROB_CLAMP):
        raise ValueError(f"negative probability {p.min()!r}")
    p = np.where(p < 0.0, 0.0, p)
    s = float(p.sum())
    if abs(s - 1.0) > NORM_ATOL:
        raise ValueError(f"probabilities sum to {s!r}, expected 1 within {NORM_ATOL:.1e}")
    return p / s


def pure_to_density(psi) -> np.ndarray:
    psi = check_pure(psi)
    return np.outer(psi, psi.conj())


def coherence_distribution(psi) -> np.ndarray:
    """Squared moduli |psi_x|^2 of the amplitudes, as a probability vector."""
    psi = check_pure(psi)
    return prob_vector(np.abs(psi) ** 2)


def dephase(rho) -> np.ndarray:
    """Completely dephasing channel: zero all off-diagonal entries."""
    rho = np.asarray(rho, dtype=complex)
    return np.diag(np.diag(rho).real).astype(complex)


def max_coherent(m: int, dim: int | None = None) -> np.ndarray:
    """Maximally coherent state: first m amplitudes 1/sqrt(m), rest zero."""
    if dim is None:
        dim = m
    if m < 1 or dim < m:
        raise ValueError(f"need 1 <= m <= dim, got m={m}, dim={dim}")
    psi = np.zeros(dim, dtype=complex)
    psi[:m] = 1.0 / np.sqrt(m)
    return psi


def l1_norm(rho) -> float:
    """Entrywise l1 norm: sum of moduli of all matrix entries."""
    rho = check_density(rho)
    return float(np.sum(np.abs(rho)))


def is_incoherent(rho, tol: float = 1e-9) -> bool:
    rho = check_density(rho)
    return float(np.linalg.norm(rho - dephase(rho))) <= tol


# ---------------------------------------------------------------------------
# JSON state format
#   density: {"kind": "density", "dim": d, "re": [[...]], "im": [[...]]}
#   pure:    {"kind": "pure", "dim": d, "re": [...], "im": [...]}
# ---------------------------------------------------------------------------

def state_to_json(obj) -> str:
    arr = np.asarray(obj, dtype=complex)
    if arr.ndim == 1:
        doc = {
            "kind": "pure",
            "dim": arr.shape[0],
            "re": arr.real.tolist(),
            "im": arr.imag.tolist(),
        }
    elif arr.ndim == 2:
        doc = {
            "kind": "density",
            "dim": arr.shape[0],
            "re": arr.real.tolist(),
            "im": arr.imag.tolist(),
        }
    else:
        raise ValueError(f"cannot serialize array of ndim {arr.ndim}")
    return json.dumps(doc, sort_keys=True)


def state_from_json(doc) -> tuple[str, np.ndarray]:
    """Parse and validate a JSON state document; returns (kind, array)."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    try:
        kind = doc["kind"]
        dim = int(doc["dim"])
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc["im"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed state document: {exc}") from exc
    arr = re + 1j * im
    if kind == "density":
        if arr.shape != (dim, dim):
            raise ValueError(f"density shape {arr.shape} does not match dim {dim}")
        return "density", check_density(arr)
    if kind == "pure":
        if arr.shape != (dim,):
            raise ValueError(f"pure shape {arr.shape} does not match dim {dim}")
        return "pure", check_pure(arr)
    raise ValueError(f"unknown state kind {kind!r}")


def load_state(path) -> tuple[str, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        return state_from_json(fh.read())
