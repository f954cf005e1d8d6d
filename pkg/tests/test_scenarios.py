import numpy as np
import pytest

from echoent.dynamics import (
    coherence,
    echoed_coherence,
    echoed_joint_state,
    joint_state,
    reduce_qubit,
)
from echoent.entanglement import (
    conditional_env_state,
    echoed_separability,
    negativity,
    prepulse_separability,
    pure_entanglement_entropy,
)
from echoent.linalg import comm_norm, dagger, unitarity_defect
from echoent.scenarios import (
    commuting_family,
    fig1_model,
    nonevolving_env,
    perfect_echo_entangling,
    random_scenario,
    sec4b_snapshot,
)

S = 1.0 / np.sqrt(2.0)


# -------------------------------------------------------------------- snapshot

def test_snapshot_operator_identities():
    scn = sec4b_snapshot(0.7)
    t = scn.reference_time
    w0 = scn.pair.branch_unitary(0, t)
    w1 = scn.pair.branch_unitary(1, t)
    s = 1.0 / np.sqrt(2.0)
    assert np.max(np.abs(dagger(w0) - s * np.array([[1, 1], [-1, 1]]))) < 1e-12
    assert np.max(np.abs(w1 - s * np.array([[1, 1], [1, -1]]))) < 1e-12
    assert np.max(np.abs(w1 - dagger(w1))) < 1e-12
    assert np.max(np.abs(dagger(w0) @ w1 - np.diag([1.0, -1.0]))) < 1e-12
    echoed = dagger(w0) @ dagger(w1) @ w0 @ w1
    assert np.max(np.abs(echoed - np.array([[0, 1], [-1, 0]]))) < 1e-12


def test_snapshot_coherences():
    for c0 in (0.0, 0.25, 0.5, 0.7, 1.0):
        scn = sec4b_snapshot(c0)
        t = scn.reference_time
        assert abs(coherence(scn.pair, scn.R0, t) - (c0 - (1 - c0))) < 1e-12
        assert abs(echoed_coherence(scn.pair, scn.R0, t)) < 1e-12


def test_snapshot_separability_flip():
    for c0, separable in ((0.5, True), (0.5 - 1e-3, False), (0.5 + 1e-3, False)):
        scn = sec4b_snapshot(c0)
        v = echoed_separability(scn.pair, scn.R0, scn.reference_time)
        assert v.separable == separable


def test_snapshot_rejects_out_of_range():
    with pytest.raises(ValueError, match="c0"):
        sec4b_snapshot(1.2)


# -------------------------------------------------------------- periodic model

def test_fig1_matches_snapshot_at_reference_time():
    tau0 = 0.8
    scn = fig1_model(tau0)
    ref = sec4b_snapshot(0.5)
    for branch in (0, 1):
        a = scn.pair.branch_unitary(branch, tau0)
        b = ref.pair.branch_unitary(branch, 1.0)
        assert np.max(np.abs(a - b)) < 1e-12


def test_fig1_propagators_unitary_everywhere():
    scn = fig1_model(1.0)
    for t in np.linspace(0.0, 4.0, 17):
        for branch in (0, 1):
            assert unitarity_defect(scn.pair.branch_unitary(branch, t)) < 1e-12


def test_fig1_periodicity():
    scn = fig1_model(1.0)
    period = 4.0
    for t in (0.15, 0.7, 1.3, 2.6):
        w1a = scn.pair.branch_unitary(1, t)
        w1b = scn.pair.branch_unitary(1, t + period)
        assert np.max(np.abs(w1a - w1b)) < 1e-10
        # branch 0 is periodic up to a global sign
        w0a = scn.pair.branch_unitary(0, t)
        w0b = scn.pair.branch_unitary(0, t + period)
        assert np.max(np.abs(w0a + w0b)) < 1e-10
        # entanglement curves are exactly periodic
        for builder in (joint_state, echoed_joint_state):
            ea = pure_entanglement_entropy(
                reduce_qubit(builder(scn.pair, scn.a, scn.b, scn.R0, t)).rho)
            eb = pure_entanglement_entropy(
                reduce_qubit(builder(scn.pair, scn.a, scn.b, scn.R0, t + period)).rho)
            assert abs(ea - eb) < 1e-10


def test_fig1_entropies_at_reference_time():
    scn = fig1_model(1.0)
    pre = joint_state(scn.pair, scn.a, scn.b, scn.R0, 1.0)
    echo = echoed_joint_state(scn.pair, scn.a, scn.b, scn.R0, 1.0)
    assert pure_entanglement_entropy(reduce_qubit(pre).rho) < 1e-10
    assert abs(pure_entanglement_entropy(reduce_qubit(echo).rho) - 1.0) < 1e-9
    assert negativity(pre) < 1e-12
    assert abs(negativity(echo) - 0.5) < 1e-12


def test_fig1_amplitudes_are_parameters():
    scn = fig1_model(1.0, a=0.6, b=0.8)
    echo = echoed_joint_state(scn.pair, scn.a, scn.b, scn.R0, 1.0)
    e = pure_entanglement_entropy(reduce_qubit(echo).rho)
    # 0.6/0.8 split caps the entropy below 1
    expected = -(0.36 * np.log2(0.36) + 0.64 * np.log2(0.64))
    assert abs(e - expected) < 1e-9


# ------------------------------------------------------------------- commuting

def test_commuting_family_perfect_echo_iff_v_commute():
    taus = np.linspace(0.2, 4.0, 11)
    good = commuting_family(4, seed=12, with_v_commuting=True)
    assert all(abs(echoed_coherence(good.pair, good.R0, t) - 1.0) < 1e-10
               for t in taus)
    model = good.pair.model
    assert comm_norm(model.V0, model.V1) < 1e-12
    bad = commuting_family(4, seed=12, with_v_commuting=False)
    model = bad.pair.model
    assert comm_norm(model.V0, model.H_E) < 1e-12
    assert comm_norm(model.V1, model.H_E) < 1e-12
    assert comm_norm(model.V0, model.V1) > 1e-3
    assert max(abs(echoed_coherence(bad.pair, bad.R0, t) - 1.0)
               for t in taus) > 1e-3


def test_commuting_family_separable_at_all_times():
    for flag in (True, False):
        scn = commuting_family(5, seed=4, with_v_commuting=flag)
        for t in np.linspace(0.1, 5.0, 13):
            assert prepulse_separability(scn.pair, scn.R0, t).separable


def test_commuting_family_rejects_small_dimension():
    with pytest.raises(ValueError, match=">= 2"):
        commuting_family(1, seed=0, with_v_commuting=True)


def test_perfect_echo_entangling_variant():
    scn = perfect_echo_entangling(4, seed=3)
    model = scn.pair.model
    assert comm_norm(scn.R0.R, model.V0 - model.V1) > 1e-3
    for tau in (0.4, 1.1, 2.3):
        assert abs(echoed_coherence(scn.pair, scn.R0, tau) - 1.0) < 1e-10
        state = joint_state(scn.pair, scn.a, scn.b, scn.R0, tau)
        assert negativity(state) > 1e-6
        assert not prepulse_separability(scn.pair, scn.R0, tau).separable


# ---------------------------------------------------------------- nonevolving

def test_nonevolving_environment_is_frozen():
    scn = nonevolving_env(5, seed=6)
    for t in (0.3, 1.2, 3.7):
        for branch in (0, 1):
            r = conditional_env_state(scn.pair, scn.R0, branch, t)
            assert np.max(np.abs(r - scn.R0.R)) < 1e-12


def test_nonevolving_still_dephases():
    scn = nonevolving_env(4, seed=11)
    mags = [abs(coherence(scn.pair, scn.R0, t)) for t in np.linspace(0.2, 3.0, 10)]
    assert min(mags) < 0.9


# --------------------------------------------------------------------- random

def test_random_scenario_deterministic():
    s1 = random_scenario(3, seed=9)
    s2 = random_scenario(3, seed=9)
    assert np.array_equal(s1.R0.R, s2.R0.R)
    t = 0.7
    assert np.array_equal(s1.pair.branch_unitary(0, t), s2.pair.branch_unitary(0, t))


def test_random_scenario_zero_coupling_perfect_echo():
    scn = random_scenario(3, seed=2, lam=0.0)
    for tau in (0.5, 1.5):
        assert abs(echoed_coherence(scn.pair, scn.R0, tau) - 1.0) < 1e-12


def test_random_scenario_states_valid():
    scn = random_scenario(2, seed=9)
    state = joint_state(scn.pair, scn.a, scn.b, scn.R0, 0.8)
    echo = echoed_joint_state(scn.pair, scn.a, scn.b, scn.R0, 0.8)
    assert state.S.shape == (4, 4) and echo.S.shape == (4, 4)
