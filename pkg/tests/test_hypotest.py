import math

import numpy as np
import pytest

from dcoh.hypotest import (
    check_test_operator,
    dh_epsilon,
    dh_zero_closed_form,
    distill_fidelity,
    distill_fidelity_program,
)
from dcoh.states import dephase, max_coherent, pure_to_density

QUTRIT = np.array([math.sqrt(5.0 / 8.0), math.sqrt(3.0 / 16.0), math.sqrt(3.0 / 16.0)])


def rand_rho(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def diag_dh_oracle(r, s, eps):
    """Fractional-knapsack LP oracle for commuting (diagonal) instances:
    min sum M_i s_i subject to sum M_i r_i >= 1 - eps, 0 <= M_i <= 1."""
    order = sorted(
        (i for i in range(len(r)) if r[i] > 1e-15), key=lambda i: s[i] / r[i]
    )
    need = 1.0 - eps
    cost = 0.0
    for i in order:
        take = min(1.0, need / r[i])
        cost += take * s[i]
        need -= take * r[i]
        if need <= 1e-15:
            break
    return cost


def test_check_test_operator():
    check_test_operator(np.diag([0.0, 0.5, 1.0]))
    with pytest.raises(ValueError, match="outside"):
        check_test_operator(np.diag([1.2, 0.0]))


def test_dh_diagonal_matches_lp_oracle():
    rng = np.random.default_rng(31)
    for _ in range(60):
        d = int(rng.integers(2, 6))
        r = rng.dirichlet(np.ones(d))
        s = rng.dirichlet(np.ones(d))
        eps = float(rng.choice([0.0, 0.05, 0.2, 0.5]))
        got = dh_epsilon(np.diag(r), np.diag(s), eps)
        want = diag_dh_oracle(r, s, eps)
        assert abs(got.optimal_value - want) < 1e-7, (r, s, eps)
        assert abs(got.gap) < 1e-6


def test_dh_primal_is_feasible_and_dual_certified():
    rng = np.random.default_rng(101)
    for _ in range(40):
        d = int(rng.integers(2, 6))
        rho = rand_rho(rng, d)
        sigma = rand_rho(rng, d)
        eps = float(rng.uniform(0.0, 0.8))
        res = dh_epsilon(rho, sigma, eps)
        check_test_operator(res.primal, atol=1e-7)
        assert np.trace(res.primal @ rho).real >= 1.0 - eps - 1e-7
        assert abs(res.gap) < 1e-6
        assert res.dual_t >= 0.0


def test_dh_never_beats_random_feasible_tests():
    # any feasible test upper-bounds the minimum
    rng = np.random.default_rng(55)
    rho = rand_rho(rng, 4)
    sigma = rand_rho(rng, 4)
    eps = 0.3
    opt = dh_epsilon(rho, sigma, eps).optimal_value
    tried = 0
    for _ in range(200):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        a = (a + a.conj().T) / 2
        w, v = np.linalg.eigh(a)
        m = (v * np.clip(w, 0.0, 1.0)) @ v.conj().T
        # mix toward the identity (always feasible) so the sampler actually
        # lands inside the feasible region often enough
        c = rng.uniform(0.0, 1.0)
        m = (1.0 - c) * m + c * np.eye(4)
        if np.trace(m @ rho).real >= 1.0 - eps:
            assert np.trace(m @ sigma).real >= opt - 1e-8
            tried += 1
    assert tried > 20


def test_dh_zero_matches_closed_form():
    rng = np.random.default_rng(202)
    for _ in range(40):
        d = int(rng.integers(2, 6))
        rho = rand_rho(rng, d)
        res = dh_epsilon(rho, dephase(rho), 0.0)
        assert abs(res.dh_bits - dh_zero_closed_form(rho)) < 1e-9
        assert abs(res.gap) < 1e-9


def test_dh_qutrit_example_values():
    rho = pure_to_density(QUTRIT)
    # sum of squared populations is 59/128, so the zero-error value is
    # -log2(59/128)
    assert abs(dh_zero_closed_form(rho) + math.log2(59.0 / 128.0)) < 1e-12
    res = dh_epsilon(rho, dephase(rho), 0.0)
    assert abs(res.optimal_value - 59.0 / 128.0) < 1e-12


def test_dh_maxcoherent_vs_maximally_mixed():
    # Psi_2 against I/2 at eps = 1/2: the optimal test accepts Psi_2 fully
    # plus nothing else, value 1/4, i.e. exactly 2 bits
    rho = pure_to_density(max_coherent(2))
    res = dh_epsilon(rho, np.eye(2) / 2.0, 0.5)
    assert abs(res.dh_bits - 2.0) < 1e-9
    assert abs(res.gap) < 1e-8


def test_dh_monotone_in_eps():
    rng = np.random.default_rng(9)
    rho = rand_rho(rng, 3)
    sigma = rand_rho(rng, 3)
    values = [dh_epsilon(rho, sigma, e).optimal_value for e in (0.0, 0.1, 0.3, 0.6)]
    assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))


def test_dh_identical_states_is_zero():
    rng = np.random.default_rng(12)
    rho = rand_rho(rng, 3)
    res = dh_epsilon(rho, rho, 0.0)
    assert abs(res.dh_bits) < 1e-9


def test_dh_orthogonal_supports_is_infinite():
    rho = np.diag([1.0, 0.0])
    sigma = np.diag([0.0, 1.0])
    res = dh_epsilon(rho, sigma, 0.0)
    assert res.infinite
    assert math.isinf(res.dh_bits)


def test_dh_rejects_bad_eps():
    rho = np.eye(2) / 2
    with pytest.raises(ValueError):
        dh_epsilon(rho, rho, 1.0)
    with pytest.raises(ValueError):
        dh_epsilon(rho, rho, -0.1)


def test_distill_fidelity_diagonal_state():
    # for incoherent input the objective and the constraint coincide
    rho = np.diag([0.4, 0.35, 0.25])
    for m in (2, 3):
        assert abs(distill_fidelity(rho, m) - 1.0 / m) < 1e-9


def test_distill_fidelity_pure_threshold():
    # unit fidelity exactly when the largest squared amplitude is <= 1/m
    rho = pure_to_density(QUTRIT)
    assert abs(distill_fidelity(rho, 2) - 1.0) < 1e-9
    assert distill_fidelity(rho, 3) < 1.0 - 1e-6
    psi = max_coherent(3)
    assert abs(distill_fidelity(pure_to_density(psi), 3) - 1.0) < 1e-9


def test_distill_fidelity_program_certificates():
    rng = np.random.default_rng(303)
    for _ in range(40):
        d = int(rng.integers(2, 6))
        m = int(rng.integers(2, 5))
        rho = rand_rho(rng, d)
        prog = distill_fidelity_program(rho, m)
        check_test_operator(prog.primal, atol=1e-7)
        weight = np.trace(prog.primal @ dephase(rho)).real
        assert abs(weight - 1.0 / m) < 1e-8
        assert 1.0 / m - 1e-9 <= prog.value <= 1.0 + 1e-12
        assert abs(prog.gap) < 1e-6
        assert prog.dual_t >= 0.0


def test_distill_fidelity_decreasing_in_m():
    rng = np.random.default_rng(404)
    rho = rand_rho(rng, 4)
    vals = [distill_fidelity(rho, m) for m in (2, 3, 4, 6)]
    assert all(a >= b - 1e-9 for a, b in zip(vals, vals[1:]))


def test_distill_fidelity_rejects_small_m():
    with pytest.raises(ValueError):
        distill_fidelity(np.eye(2) / 2, 0.5)
