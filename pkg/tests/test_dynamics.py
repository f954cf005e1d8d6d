import numpy as np
import pytest
import scipy.linalg

from echoent.dynamics import (
    coherence,
    echoed_coherence,
    echoed_joint_state,
    joint_state,
    reduce_qubit,
)
from echoent.linalg import comm_norm, dagger
from echoent.model import (
    EnvDensity,
    GeneratedPropagators,
    random_model,
    thermal_state,
)
from echoent.scenarios import commuting_family, fig1_model, sec4b_snapshot

S = 1.0 / np.sqrt(2.0)
SX = np.array([[0, 1], [1, 0]], dtype=complex)


def echo_product_oracle(pair, a, b, R0, tau):
    """Direct five-matrix evaluation of the pulse sequence on the 2N space."""
    n = pair.env_dim
    w0 = pair.branch_unitary(0, tau)
    w1 = pair.branch_unitary(1, tau)
    u = np.zeros((2 * n, 2 * n), dtype=complex)
    u[:n, :n] = w0
    u[n:, n:] = w1
    px = np.kron(SX, np.eye(n))
    u_echo = px @ u @ px @ u
    # initial product state (a|0> + b|1>)(a* <0| + b* <1|) (x) R(0)
    qubit = np.array([[abs(a) ** 2, a * np.conj(b)], [np.conj(a) * b, abs(b) ** 2]])
    sigma0 = np.kron(qubit, R0.R)
    return u_echo @ sigma0 @ dagger(u_echo)


# ------------------------------------------------------------------ joint state

def test_joint_state_initial_product():
    scn = fig1_model(1.0)
    s = joint_state(scn.pair, scn.a, scn.b, scn.R0, 0.0)
    qubit = np.array([[0.5, 0.5], [0.5, 0.5]])
    assert np.max(np.abs(s.S - np.kron(qubit, scn.R0.R))) < 1e-12


def test_joint_state_pointer_preparation():
    model = random_model(3, seed=2)
    pair = GeneratedPropagators(model)
    r0 = EnvDensity.random_full_rank(3, seed=3)
    s = joint_state(pair, 1.0, 0.0, r0, 0.8)
    n = 3
    assert np.max(np.abs(s.S[:n, n:])) < 1e-14
    assert np.max(np.abs(s.S[n:, :n])) < 1e-14
    assert np.max(np.abs(s.S[n:, n:])) < 1e-14
    w0 = pair.branch_unitary(0, 0.8)
    assert np.allclose(s.S[:n, :n], w0 @ r0.R @ dagger(w0), atol=1e-13)


def test_joint_state_snapshot_block_trace():
    scn = sec4b_snapshot(0.7)
    s = joint_state(scn.pair, S, S, scn.R0, scn.reference_time)
    assert abs(np.trace(s.block(0, 1)) - 0.2) < 1e-12


def test_reduced_snapshot_matches_coherence_form():
    # tracing out the environment reproduces the 2x2 form with W = c0 - c1
    scn = sec4b_snapshot(0.7)
    s = joint_state(scn.pair, S, S, scn.R0, scn.reference_time)
    q = reduce_qubit(s)
    expected = np.array([[0.5, 0.5 * 0.4], [0.5 * 0.4, 0.5]])
    assert np.max(np.abs(q.rho - expected)) < 1e-12
    assert abs(q.W - 0.4) < 1e-12


def test_joint_state_rejects_unnormalized_amplitudes():
    scn = fig1_model(1.0)
    with pytest.raises(ValueError, match="amplitudes"):
        joint_state(scn.pair, 0.9, 0.5, scn.R0, 0.1)


def test_joint_state_invariants_random():
    for seed in range(25):
        model = random_model(4, seed=seed)
        pair = GeneratedPropagators(model)
        r0 = EnvDensity.random_full_rank(4, seed=seed + 100)
        s = joint_state(pair, 0.6, 0.8j, r0, 0.5 + 0.1 * seed)
        # construction validates Hermiticity, trace, and positivity
        assert s.S.shape == (8, 8)


# ------------------------------------------------------------------- coherence

def test_coherence_initial():
    scn = fig1_model(1.0)
    assert abs(coherence(scn.pair, scn.R0, 0.0) - 1.0) < 1e-12


def test_coherence_snapshot_value():
    for c0 in (0.0, 0.3, 0.7, 1.0):
        scn = sec4b_snapshot(c0)
        w = coherence(scn.pair, scn.R0, scn.reference_time)
        assert abs(w - (2.0 * c0 - 1.0)) < 1e-12


def test_coherence_independent_oracle():
    # independent dense evaluation of the trace with Pade exponentials
    model = random_model(4, seed=11)
    pair = GeneratedPropagators(model)
    r0 = EnvDensity.random_full_rank(4, seed=12)
    t = 0.3
    w0 = scipy.linalg.expm(-1j * (model.H_E + model.V0) * t)
    w1 = scipy.linalg.expm(-1j * (model.H_E + model.V1) * t)
    expected = np.trace(r0.R @ dagger(w1) @ w0)
    assert abs(coherence(pair, r0, t) - expected) < 1e-11


def test_coherence_bounded():
    for seed in range(10):
        model = random_model(3, seed=seed)
        pair = GeneratedPropagators(model)
        r0 = EnvDensity.random_full_rank(3, seed=seed)
        for t in (0.2, 1.4, 3.0):
            assert abs(coherence(pair, r0, t)) <= 1.0 + 1e-12


# ------------------------------------------------------------------ echo states

def test_echoed_state_commuting_pair_restores_qubit():
    scn = commuting_family(4, seed=5, with_v_commuting=True)
    s = echoed_joint_state(scn.pair, S, S, scn.R0, 1.3)
    rho = reduce_qubit(s).rho
    target = np.array([[0.5, 0.5], [0.5, 0.5]])
    assert np.max(np.abs(rho - target)) < 1e-12


def test_echoed_state_snapshot_fully_decohered():
    for c0 in (0.0, 0.3, 0.5, 0.9):
        scn = sec4b_snapshot(c0)
        s = echoed_joint_state(scn.pair, S, S, scn.R0, scn.reference_time)
        rho = reduce_qubit(s).rho
        assert abs(rho[0, 1]) < 1e-12


def test_echoed_state_matches_five_matrix_product():
    for seed in range(10):
        model = random_model(3, seed=seed)
        pair = GeneratedPropagators(model)
        r0 = EnvDensity.random_full_rank(3, seed=seed + 50)
        a, b = 0.6, 0.8
        tau = 0.7 + 0.2 * seed
        s = echoed_joint_state(pair, a, b, r0, tau)
        oracle = echo_product_oracle(pair, a, b, r0, tau)
        assert np.max(np.abs(s.S - oracle)) < 1e-12


def test_echoed_coherence_commuting_pair():
    scn = commuting_family(5, seed=9, with_v_commuting=True)
    for tau in (0.2, 1.1, 2.9):
        assert abs(echoed_coherence(scn.pair, scn.R0, tau) - 1.0) < 1e-10


def test_echoed_coherence_snapshot_zero():
    for c0 in (0.0, 0.25, 0.5, 0.7, 1.0):
        scn = sec4b_snapshot(c0)
        assert abs(echoed_coherence(scn.pair, scn.R0, scn.reference_time)) < 1e-12


def test_echoed_coherence_against_reduced_oracle():
    scn = fig1_model(1.0)
    tau = 0.5
    sigma = echo_product_oracle(scn.pair, scn.a, scn.b, scn.R0, tau)
    n = scn.pair.env_dim
    rho01 = np.trace(sigma[:n, n:])
    expected = rho01 / (scn.a * np.conj(scn.b))
    assert abs(echoed_coherence(scn.pair, scn.R0, tau) - expected) < 1e-12


# ------------------------------------------------------------------- properties

def test_coherence_equals_block_trace():
    rng = np.random.default_rng(77)
    for trial in range(200):
        n = int(rng.integers(2, 5))
        model = random_model(n, seed=trial)
        pair = GeneratedPropagators(model)
        r0 = EnvDensity.random_full_rank(n, seed=trial + 1000)
        phi = rng.uniform(0, 2 * np.pi)
        a = np.cos(0.3) * np.exp(1j * phi)
        b = np.sin(0.3)
        t = rng.uniform(0.1, 3.0)
        s = joint_state(pair, a, b, r0, t)
        w = coherence(pair, r0, t)
        block = np.trace(s.block(0, 1)) / (a * np.conj(b))
        assert abs(w - block) < 1e-11


def test_perfect_echo_property():
    # commuting conditional propagators imply full coherence recovery
    for seed in range(30):
        scn = commuting_family(4, seed=seed, with_v_commuting=True)
        rng = np.random.default_rng(seed)
        for tau in rng.uniform(0.1, 4.0, size=5):
            w0 = scn.pair.branch_unitary(0, tau)
            w1 = scn.pair.branch_unitary(1, tau)
            assert comm_norm(dagger(w0), w1) < 1e-12
            assert abs(echoed_coherence(scn.pair, scn.R0, tau) - 1.0) < 1e-10


def test_phase_cancellation_in_echoed_coherence():
    base = random_model(3, seed=42)
    from echoent.model import PureDephasingModel
    with_phases = PureDephasingModel(1.7, -0.9, base.H_E, base.V0, base.V1)
    r0 = EnvDensity.random_full_rank(3, seed=43)
    for tau in (0.4, 1.9):
        w_plain = echoed_coherence(GeneratedPropagators(base), r0, tau)
        w_phased = echoed_coherence(GeneratedPropagators(with_phases), r0, tau)
        assert abs(w_plain - w_phased) < 1e-12


def test_prepulse_phase_appears_in_coherence():
    from echoent.model import PureDephasingModel
    base = random_model(3, seed=42)
    with_phases = PureDephasingModel(1.7, -0.9, base.H_E, base.V0, base.V1)
    r0 = EnvDensity.random_full_rank(3, seed=43)
    t = 0.8
    w_plain = coherence(GeneratedPropagators(base), r0, t)
    w_phased = coherence(GeneratedPropagators(with_phases), r0, t)
    # w1+ contributes e^{+i eps1 t}, w0 contributes e^{-i eps0 t}
    expected = w_plain * np.exp(1j * (-0.9 - 1.7) * t)
    assert abs(w_phased - expected) < 1e-12
