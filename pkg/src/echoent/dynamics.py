"""Joint and reduced state evolution, with and without the echo pulse.

For the initial product state (a|0> + b|1>) <x| R(0), pure dephasing gives
the joint density matrix in qubit pointer-state blocks

    sigma(t) = [[ |a|^2 w0 R w0+ ,  a b* w0 R w1+ ],
                [ a* b w1 R w0+  ,  |b|^2 w1 R w1+ ]]

and the reduced qubit coherence W(t) = tr[R w1+(t) w0(t)].

The echo sequence evolves for tau, applies a pi pulse (sigma_x) to the
qubit, evolves for tau again and applies a second pi pulse.  The second
pulse swaps the two conjugate coherences back so the final coherence equals
the original one (not its conjugate) when the echo is perfect.  The net
effect is the same block structure with the replacement

    w0 -> w1(tau) w0(tau),    w1 -> w0(tau) w1(tau)

and the echoed coherence W(2 tau) = tr[R w1+ w0+ w1 w0] at time tau.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import dagger, hermiticity_defect, partial_trace
from .model import EnvDensity, PropagatorPair

AMPLITUDE_TOL = 1e-12
STATE_PSD_FLOOR = -1e-10
COHERENCE_CAP = 1.0 + 1e-12


def _check_amplitudes(a: complex, b: complex):
    a = complex(a)
    b = complex(b)
    total = abs(a) ** 2 + abs(b) ** 2
    if abs(total - 1.0) > AMPLITUDE_TOL:
        # Deliberately refuse rather than renormalize; silent renormalization
        # hides caller bugs.
        raise ValueError(
            f"qubit amplitudes must satisfy |a|^2 + |b|^2 = 1 within "
            f"{AMPLITUDE_TOL:.1e}, got {total!r}"
        )
    return a, b


@dataclass(frozen=True, eq=False)
class JointState:
    """Qubit (x) environment density matrix with its preparation amplitudes."""

    S: np.ndarray
    a: complex
    b: complex
    env_dim: int

    def __post_init__(self):
        s = np.asarray(self.S, dtype=np.complex128)
        n = int(self.env_dim)
        if s.shape != (2 * n, 2 * n):
            raise ValueError(f"joint state has shape {s.shape}, expected {(2 * n, 2 * n)}")
        defect = hermiticity_defect(s)
        if defect > 1e-10:
            raise ValueError(f"joint state is not Hermitian (defect {defect:.3e})")
        tr = np.trace(s).real
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"joint state trace is {tr!r}, must be 1")
        eigs = np.linalg.eigvalsh(s)
        if eigs[0] < STATE_PSD_FLOOR:
            raise ValueError(
                f"joint state eigenvalue {eigs[0]:.3e} below {STATE_PSD_FLOOR:.1e}"
            )
        arr = np.array(s)
        arr.setflags(write=False)
        object.__setattr__(self, "S", arr)

    def block(self, i: int, j: int) -> np.ndarray:
        n = self.env_dim
        return self.S[i * n:(i + 1) * n, j * n:(j + 1) * n]


@dataclass(frozen=True, eq=False)
class QubitState:
    """Reduced 2x2 qubit state and its normalized coherence.

    ``W`` is None when |a b*| vanishes (no coherence to normalize).
    """

    rho: np.ndarray
    W: Optional[complex]

    def __post_init__(self):
        r = np.asarray(self.rho, dtype=np.complex128)
        if r.shape != (2, 2):
            raise ValueError(f"qubit state must be 2x2, got {r.shape}")
        if self.W is not None and abs(self.W) > COHERENCE_CAP:
            raise ValueError(f"|W| = {abs(self.W)!r} exceeds 1")
        arr = np.array(r)
        arr.setflags(write=False)
        object.__setattr__(self, "rho", arr)


def _assemble(w0, w1, a, b, R, n) -> JointState:
    s = np.empty((2 * n, 2 * n), dtype=np.complex128)
    s[:n, :n] = (abs(a) ** 2) * (w0 @ R @ dagger(w0))
    s[:n, n:] = (a * np.conjugate(b)) * (w0 @ R @ dagger(w1))
    s[n:, :n] = (np.conjugate(a) * b) * (w1 @ R @ dagger(w0))
    s[n:, n:] = (abs(b) ** 2) * (w1 @ R @ dagger(w1))
    return JointState(S=s, a=a, b=b, env_dim=n)


def joint_state(pair: PropagatorPair, a: complex, b: complex,
                R0: EnvDensity, t: float) -> JointState:
    """Joint state at time t for the initial product preparation."""
    a, b = _check_amplitudes(a, b)
    w0 = pair.branch_unitary(0, t)
    w1 = pair.branch_unitary(1, t)
    return _assemble(w0, w1, a, b, R0.R, pair.env_dim)


def coherence(pair: PropagatorPair, R0: EnvDensity, t: float) -> complex:
    """Normalized qubit coherence W(t) = tr[R(0) w1+(t) w0(t)]."""
    w0 = pair.branch_unitary(0, t)
    w1 = pair.branch_unitary(1, t)
    return complex(np.trace(R0.R @ dagger(w1) @ w0))


def echoed_joint_state(pair: PropagatorPair, a: complex, b: complex,
                       R0: EnvDensity, tau: float) -> JointState:
    """Joint state at time 2 tau after the full pulse sequence."""
    a, b = _check_amplitudes(a, b)
    w0 = pair.branch_unitary(0, tau)
    w1 = pair.branch_unitary(1, tau)
    return _assemble(w1 @ w0, w0 @ w1, a, b, R0.R, pair.env_dim)


def echoed_coherence(pair: PropagatorPair, R0: EnvDensity, tau: float) -> complex:
    """Echoed coherence W(2 tau) = tr[R(0) w1+ w0+ w1 w0] at time tau.

    The qubit splitting phases cancel between each propagator and its
    adjoint, so this quantity is independent of eps0 and eps1.
    """
    w0 = pair.branch_unitary(0, tau)
    w1 = pair.branch_unitary(1, tau)
    return complex(np.trace(R0.R @ dagger(w1) @ dagger(w0) @ w1 @ w0))


def reduce_qubit(state: JointState) -> QubitState:
    """Trace out the environment and extract the normalized coherence."""
    rho = partial_trace(state.S, (2, state.env_dim), over="B")
    ab = state.a * np.conjugate(state.b)
    w = complex(rho[0, 1] / ab) if abs(ab) > 1e-14 else None
    return QubitState(rho=rho, W=w)
