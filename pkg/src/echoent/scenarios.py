"""Built-in scenario constructions.

Each scenario bundles a propagator pair with a default environment state,
qubit amplitudes, and a scan grid.  The four CLI-addressable scenarios are

  sec4b      two-level-environment snapshot whose echo step manufactures
             entanglement out of a separable pre-pulse state,
  fig1       the periodic two-level model whose propagators pass through the
             sec4b snapshot at its reference time,
  commuting  couplings that commute with the environment Hamiltonian
             (dephasing without pre-pulse entanglement),
  random     a seeded generic model.

Two more constructions support the classification tests: an evolution whose
environment never evolves (echoed entanglement is impossible, even at
isolated times) and a commuting model paired with a non-stationary
environment state (perfect echo at all times, yet entangled before the
pulse).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import comm_norm, dagger
from .model import (
    EnvDensity,
    GeneratedPropagators,
    PropagatorPair,
    PureDephasingModel,
    SpectralPropagators,
    gue_matrix,
    random_model,
    thermal_state,
)

INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    pair: PropagatorPair
    R0: EnvDensity
    a: complex
    b: complex
    tau_grid: np.ndarray
    reference_time: Optional[float] = None
    description: str = ""

    def __post_init__(self):
        grid = np.asarray(self.tau_grid, dtype=float).reshape(-1)
        grid.setflags(write=False)
        object.__setattr__(self, "tau_grid", grid)


def _snapshot_spectral_pair(tau0: float) -> SpectralPropagators:
    """Two-level spectral pair that hits the snapshot operators at t = tau0.

    Branch 0 rotates in the plane of the initial basis at +-pi/(4 tau0);
    branch 1 mixes frequencies pi/tau0 and 2 pi/tau0 through the projectors
    of a Hadamard-type reflection.  Both branches use the canonical second
    basis vector for the direction orthogonal to the initial state, with
    phases fixed so the overlap of the first branch-0 vector with the
    initial state is real positive.
    """
    if tau0 <= 0:
        raise ValueError(f"tau0 must be positive, got {tau0}")
    psi0 = np.array([INV_SQRT2, -1j * INV_SQRT2])
    psi0p = np.array([INV_SQRT2, 1j * INV_SQRT2])
    alpha = np.sqrt(2.0 - np.sqrt(2.0)) / 2.0
    gamma = np.sqrt(2.0 + np.sqrt(2.0)) / 2.0
    psi1 = np.array([-alpha, gamma], dtype=complex)
    psi1p = np.array([gamma, alpha], dtype=complex)
    w = np.pi / tau0
    return SpectralPropagators(
        branch0=[(0.25 * w, psi0), (-0.25 * w, psi0p)],
        branch1=[(w, psi1), (2.0 * w, psi1p)],
    )


def sec4b_snapshot(c0: float) -> Scenario:
    """Snapshot scenario over a two-dimensional environment.

    At the reference time the conditional propagators satisfy
    w0+ = [[1, 1], [-1, 1]]/sqrt(2) and w1 = w1+ = [[1, 1], [1, -1]]/sqrt(2)
    in the eigenbasis of R(0) = diag(c0, 1 - c0).  The pre-pulse product
    w0+ w1 is then diagonal (no entanglement at the pulse time for any c0)
    while the echoed operator [[0, 1], [-1, 0]] entangles unless c0 = 1/2.
    """
    if not 0.0 <= c0 <= 1.0:
        raise ValueError(f"c0 must lie in [0, 1], got {c0}")
    pair = _snapshot_spectral_pair(1.0)
    return Scenario(
        name="sec4b",
        pair=pair,
        R0=EnvDensity.diagonal([c0, 1.0 - c0]),
        a=INV_SQRT2, b=INV_SQRT2,
        tau_grid=np.linspace(0.0, 4.0, 801),
        reference_time=1.0,
        description="two-level snapshot: separable at the pulse, "
                    "entangled after the echo unless c0 = 1/2",
    )


def fig1_model(tau0: float, a: complex = INV_SQRT2, b: complex = INV_SQRT2) -> Scenario:
    """Periodic two-level model with a pure initial environment state.

    The evolution repeats every 4 tau0 (branch 0 only up to a global sign)
    and at t = tau0 the propagators coincide with the sec4b snapshot, where
    the pre-pulse state is a product yet the echoed state is maximally
    entangled for a = b = 1/sqrt(2).
    """
    pair = _snapshot_spectral_pair(tau0)
    return Scenario(
        name="fig1",
        pair=pair,
        R0=EnvDensity.pure([1.0, 0.0]),
        a=complex(a), b=complex(b),
        tau_grid=np.linspace(0.0, 4.0 * tau0, 801),
        reference_time=float(tau0),
        description="periodic two-level model; entanglement curves with and "
                    "without the pulse as functions of the pulse time",
    )


def _haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def commuting_family(n: int, seed: int, with_v_commuting: bool,
                     beta: float = 1.0) -> Scenario:
    """Couplings commuting with H_E, thermal environment state.

    with_v_commuting=True draws H_E, V0, V1 diagonal in one common random
    basis: no entanglement at any time and a perfect echo at any time.
    with_v_commuting=False keeps [V_i, H_E] = 0 through degenerate H_E
    blocks but lets the blocks of V0 and V1 fail to commute: still no
    entanglement at any time, yet the echo is imperfect.  Needs n >= 2 (a
    block of size 2) in the latter case.
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"commuting family needs dimension >= 2, got {n}")
    rng = np.random.default_rng(seed)
    q = _haar_unitary(rng, n)
    if with_v_commuting:
        d_h = rng.uniform(-1.0, 1.0, size=n)
        d_v0 = rng.uniform(-1.0, 1.0, size=n)
        d_v1 = rng.uniform(-1.0, 1.0, size=n)
        h_e = q @ np.diag(d_h.astype(complex)) @ dagger(q)
        v0 = q @ np.diag(d_v0.astype(complex)) @ dagger(q)
        v1 = q @ np.diag(d_v1.astype(complex)) @ dagger(q)
    else:
        # degenerate H_E blocks; V blocks generic Hermitian, non-commuting
        levels = np.repeat(rng.uniform(-1.0, 1.0, size=(n + 1) // 2), 2)[:n]
        levels = np.sort(levels)
        h_blk = np.diag(levels.astype(complex))
        v0_blk = np.zeros((n, n), dtype=complex)
        v1_blk = np.zeros((n, n), dtype=complex)
        i = 0
        while i < n:
            size = 2 if i + 1 < n and levels[i + 1] == levels[i] else 1
            v0_blk[i:i + size, i:i + size] = gue_matrix(rng, size)
            v1_blk[i:i + size, i:i + size] = gue_matrix(rng, size)
            i += size
        h_e = q @ h_blk @ dagger(q)
        v0 = q @ v0_blk @ dagger(q)
        v1 = q @ v1_blk @ dagger(q)
    h_e = 0.5 * (h_e + dagger(h_e))
    v0 = 0.5 * (v0 + dagger(v0))
    v1 = 0.5 * (v1 + dagger(v1))
    model = PureDephasingModel(0.0, 0.0, h_e, v0, v1)
    return Scenario(
        name="commuting",
        pair=GeneratedPropagators(model),
        R0=thermal_state(h_e, beta),
        a=INV_SQRT2, b=INV_SQRT2,
        tau_grid=np.linspace(0.0, 5.0, 201),
        description="couplings commute with H_E; thermal state dephases "
                    "without ever entangling",
    )


def perfect_echo_entangling(n: int, seed: int) -> Scenario:
    """Mutually commuting operators with a non-stationary environment state.

    The echo is perfect at every pulse time, yet the joint state is
    entangled at generic pre-pulse times because [R(0), V0 - V1] != 0.
    """
    base = commuting_family(n, seed, with_v_commuting=True)
    model = base.pair.model
    for offset in range(8):
        r0 = EnvDensity.random_full_rank(n, seed + 1000 + offset)
        gap = comm_norm(r0.R, model.V0 - model.V1)
        if gap > 1e-3:
            break
    else:
        raise RuntimeError("could not draw a state with [R0, V0 - V1] != 0")
    return Scenario(
        name="perfect-echo-entangling",
        pair=base.pair,
        R0=r0,
        a=INV_SQRT2, b=INV_SQRT2,
        tau_grid=base.tau_grid,
        description="perfect echo at every time with pre-pulse entanglement",
    )


def nonevolving_env(n: int, seed: int) -> Scenario:
    """Evolution whose environment state never changes.

    Both conditional Hamiltonians commute with R(0) (block structure with a
    block-scalar R), so w_i R(0) w_i+ = R(0) at all times.  The qubit still
    dephases, but neither the plain evolution nor the echo can ever
    entangle it with the environment.
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"nonevolving environment needs dimension >= 2, got {n}")
    rng = np.random.default_rng(seed)
    h_e = np.zeros((n, n), dtype=complex)
    v0 = np.zeros((n, n), dtype=complex)
    v1 = np.zeros((n, n), dtype=complex)
    block_probs = []
    i = 0
    while i < n:
        size = min(2, n - i)
        h_e[i:i + size, i:i + size] = gue_matrix(rng, size)
        v0[i:i + size, i:i + size] = gue_matrix(rng, size)
        v1[i:i + size, i:i + size] = gue_matrix(rng, size)
        block_probs.append((rng.uniform(0.2, 1.0), size))
        i += size
    probs = np.concatenate([np.full(size, p) for p, size in block_probs])
    probs = probs / probs.sum()
    model = PureDephasingModel(0.0, 0.0, h_e, v0, v1)
    return Scenario(
        name="nonevolving",
        pair=GeneratedPropagators(model),
        R0=EnvDensity.diagonal(probs),
        a=INV_SQRT2, b=INV_SQRT2,
        tau_grid=np.linspace(0.0, 5.0, 201),
        description="environment state frozen under both branches; "
                    "dephasing without any entanglement, echoed or not",
    )


def random_scenario(n: int, seed: int, lam: float = 1.0) -> Scenario:
    """Seeded generic model; couplings scaled by lam (lam = 0: free model)."""
    base = random_model(n, seed)
    model = PureDephasingModel(0.0, 0.0, base.H_E,
                               lam * base.V0, lam * base.V1)
    return Scenario(
        name="random",
        pair=GeneratedPropagators(model),
        R0=EnvDensity.random_full_rank(n, seed),
        a=INV_SQRT2, b=INV_SQRT2,
        tau_grid=np.linspace(0.0, 3.0, 121),
        description="seeded generic model with a random full-rank "
                    "environment state",
    )
