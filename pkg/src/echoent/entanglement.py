"""Separability criteria, negativity, entanglement entropy, and scans.

For pure-dephasing evolution of a product preparation, the joint state at
time t is separable if and only if

    [w0+(t) w1(t), R(0)] = 0,

and the state after the echo sequence is separable if and only if

    [w0+(tau) w1+(tau) w0(tau) w1(tau), R(0)] = 0.

Both criteria are evaluated through a Frobenius commutator norm against a
scale-aware tolerance, and cross-validated against the negativity of the
explicit joint state (sum of negative partial-transpose eigenvalues).
Instances whose negativity falls inside a declared dead band are reported
inconclusive rather than silently rounded to either side.

For a pure environment the joint state stays pure and entanglement is
quantified by the normalized von Neumann entropy of the reduced qubit
state, computed from its eigenvalues.  The closed form through

    Delta = 1 - 4 |a|^2 |b|^2 (1 - |W|^2),   eigenvalues (1 +- sqrt(Delta))/2

is kept as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import comm_norm, comm_tol, dagger, partial_transpose
from .model import EnvDensity, PropagatorPair
from .dynamics import (
    JointState,
    echoed_coherence,
    echoed_joint_state,
    joint_state,
    coherence,
    reduce_qubit,
)

# Negativity dead band for criterion/negativity cross-validation:
# below -> separable side, above -> entangled side, inside -> inconclusive.
NEG_DEAD_BAND = (1e-10, 1e-8)

SCAN_CSV_COLUMNS = (
    "tau", "W_pre_re", "W_pre_im", "W_echo_re", "W_echo_im",
    "comm_pre", "comm_echo", "neg_pre", "neg_echo",
    "E_pre", "E_echo", "flag_echo_induced",
)


@dataclass(frozen=True)
class SeparabilityVerdict:
    commutator_norm: float
    separable: bool
    tolerance: float


@dataclass(frozen=True, eq=False)
class EchoRecord:
    """One scan row: coherences, verdicts, negativities, entropies at one tau."""

    tau: float
    W_pre: complex
    W_echo: complex
    verdict_pre: SeparabilityVerdict
    verdict_echo: SeparabilityVerdict
    negativity_pre: float
    negativity_echo: float
    entropy_pre: Optional[float] = None
    entropy_echo: Optional[float] = None

    @property
    def flag_echo_induced(self) -> bool:
        return self.verdict_pre.separable and not self.verdict_echo.separable


def prepulse_separability(pair: PropagatorPair, R0: EnvDensity, tau: float,
                          tol: Optional[float] = None) -> SeparabilityVerdict:
    """Separability of the joint state at time tau, before any pulse."""
    w0 = pair.branch_unitary(0, tau)
    w1 = pair.branch_unitary(1, tau)
    op = dagger(w0) @ w1
    if tol is None:
        tol = comm_tol(op, R0.R)
    norm = comm_norm(op, R0.R)
    return SeparabilityVerdict(norm, norm < tol, tol)


def echoed_separability(pair: PropagatorPair, R0: EnvDensity, tau: float,
                        tol: Optional[float] = None) -> SeparabilityVerdict:
    """Separability of the joint state at time 2 tau after the echo sequence."""
    w0 = pair.branch_unitary(0, tau)
    w1 = pair.branch_unitary(1, tau)
    op = dagger(w0) @ dagger(w1) @ w0 @ w1
    if tol is None:
        tol = comm_tol(op, R0.R)
    norm = comm_norm(op, R0.R)
    return SeparabilityVerdict(norm, norm < tol, tol)


def negativity(state: JointState) -> float:
    """Sum of |negative eigenvalues| of the partial transpose over the qubit."""
    pt = partial_transpose(state.S, (2, state.env_dim), on="A")
    eigs = np.linalg.eigvalsh(pt)
    return float(-eigs[eigs < 0.0].sum())


def conditional_env_state(pair: PropagatorPair, R0: EnvDensity, branch: int,
                          t: float) -> np.ndarray:
    """Environment state conditioned on the qubit branch: w_i R(0) w_i+."""
    w = pair.branch_unitary(branch, t)
    return w @ R0.R @ dagger(w)


def pure_entanglement_entropy(rho) -> float:
    """Normalized von Neumann entropy of a reduced qubit state, in [0, 1].

    Only meaningful when the joint state is pure (pure environment
    preparation); the caller asserts that.  Computed from the two
    eigenvalues with 0 log 0 = 0.
    """
    r = np.asarray(rho, dtype=np.complex128)
    if r.shape != (2, 2):
        raise ValueError(f"reduced qubit state must be 2x2, got {r.shape}")
    eigs = np.linalg.eigvalsh(r)
    if eigs[0] < -1e-10:
        raise ValueError(
            f"reduced state has eigenvalue {eigs[0]:.3e}; not positive "
            f"semidefinite"
        )
    eigs = np.clip(eigs, 0.0, 1.0)
    ent = -sum(float(p) * float(np.log2(p)) for p in eigs if p > 0.0)
    return float(min(max(ent, 0.0), 1.0))


def entropy_closed_form(a: complex, b: complex, W: complex) -> float:
    """Entropy from the closed form through Delta = 1 - 4|a|^2|b|^2 (1 - |W|^2)."""
    delta = 1.0 - 4.0 * abs(a) ** 2 * abs(b) ** 2 * (1.0 - abs(W) ** 2)
    delta = min(max(delta, 0.0), 1.0)
    root = np.sqrt(delta)
    eigs = (0.5 * (1.0 + root), 0.5 * (1.0 - root))
    ent = -sum(p * np.log2(p) for p in eigs if p > 0.0)
    return float(min(max(ent, 0.0), 1.0))


def cross_validate(verdict: SeparabilityVerdict, neg: float,
                   dead_band=NEG_DEAD_BAND) -> str:
    """Compare a commutator verdict with a negativity: agree / disagree / inconclusive."""
    lo, hi = dead_band
    if neg < lo:
        return "agree" if verdict.separable else "disagree"
    if neg > hi:
        return "disagree" if verdict.separable else "agree"
    return "inconclusive"


def classify_scan(pair: PropagatorPair, a: complex, b: complex, R0: EnvDensity,
                  tau_grid, tol: Optional[float] = None):
    """Classify every grid point; returns ``(records, summary)``.

    The summary lists all grid points that are separable before the pulse
    yet entangled after the echo (echo-induced points), plus verdict counts
    and criterion/negativity cross-validation tallies.  Entropies are
    reported only for a pure environment preparation.
    """
    taus = np.asarray(tau_grid, dtype=float).reshape(-1)
    if taus.size == 0:
        raise ValueError("tau grid must be nonempty")
    if taus.size > 1 and np.any(np.diff(taus) <= 0):
        raise ValueError("tau grid must be strictly increasing")
    pure_env = R0.is_pure()
    records = []
    tallies = {"agree": 0, "disagree": 0, "inconclusive": 0}
    for tau in taus:
        v_pre = prepulse_separability(pair, R0, tau, tol)
        v_echo = echoed_separability(pair, R0, tau, tol)
        s_pre = joint_state(pair, a, b, R0, tau)
        s_echo = echoed_joint_state(pair, a, b, R0, tau)
        n_pre = negativity(s_pre)
        n_echo = negativity(s_echo)
        w_pre = coherence(pair, R0, tau)
        w_echo = echoed_coherence(pair, R0, tau)
        e_pre = e_echo = None
        if pure_env:
            e_pre = pure_entanglement_entropy(reduce_qubit(s_pre).rho)
            e_echo = pure_entanglement_entropy(reduce_qubit(s_echo).rho)
        tallies[cross_validate(v_pre, n_pre)] += 1
        tallies[cross_validate(v_echo, n_echo)] += 1
        records.append(EchoRecord(
            tau=float(tau), W_pre=w_pre, W_echo=w_echo,
            verdict_pre=v_pre, verdict_echo=v_echo,
            negativity_pre=n_pre, negativity_echo=n_echo,
            entropy_pre=e_pre, entropy_echo=e_echo,
        ))
    flagged = [i for i, r in enumerate(records) if r.flag_echo_induced]
    summary = {
        "points": int(taus.size),
        "pure_environment": bool(pure_env),
        "echo_induced": [
            {"index": i, "tau": records[i].tau,
             "comm_pre": records[i].verdict_pre.commutator_norm,
             "comm_echo": records[i].verdict_echo.commutator_norm}
            for i in flagged
        ],
        "counts": {
            "pre_separable": sum(r.verdict_pre.separable for r in records),
            "pre_entangled": sum(not r.verdict_pre.separable for r in records),
            "echo_separable": sum(r.verdict_echo.separable for r in records),
            "echo_entangled": sum(not r.verdict_echo.separable for r in records),
        },
        "cross_validation": {
            **tallies,
            "dead_band": list(NEG_DEAD_BAND),
        },
    }
    return records, summary


def isolation_refinement(pair: PropagatorPair, a: complex, b: complex,
                         R0: EnvDensity, interval, levels: int,
                         base_points: int = 101,
                         tol: Optional[float] = None):
    """Fraction of echo-induced grid points under successive grid halving.

    For evolutions where echoed entanglement can only emerge from a
    separable pre-pulse state at isolated times, the flagged fraction must
    decay toward zero as the grid is refined; the run-length diagnostic
    exposes any interval of consecutive flagged points.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not 0.0 <= lo < hi:
        raise ValueError(f"invalid interval {interval!r}")
    if levels < 2:
        raise ValueError(f"need at least 2 refinement levels, got {levels}")
    out = []
    for level in range(levels):
        n = (base_points - 1) * 2 ** level + 1
        grid = np.linspace(lo, hi, n)
        records, _ = classify_scan(pair, a, b, R0, grid, tol)
        flags = np.array([r.flag_echo_induced for r in records])
        flagged = int(flags.sum())
        max_run = 0
        run = 0
        for f in flags:
            run = run + 1 if f else 0
            max_run = max(max_run, run)
        out.append({
            "level": level,
            "points": n,
            "spacing": (hi - lo) / (n - 1),
            "flagged": flagged,
            "fraction": flagged / n,
            "max_run": max_run,
        })
    return out


def refine_point(pair: PropagatorPair, R0: EnvDensity, bracket,
                 iterations: int = 200):
    """Golden-section polish of an isolated echo-induced time.

    Minimizes the pre-pulse commutator norm inside the bracket; returns
    ``(tau_star, norm_at_tau_star)``.  Optional: scans report grid points,
    this narrows one of them.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError(f"invalid bracket {bracket!r}")

    def norm_at(t):
        return prepulse_separability(pair, R0, t).commutator_norm

    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = norm_at(x1), norm_at(x2)
    for _ in range(iterations):
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = norm_at(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = norm_at(x2)
        if hi - lo < 1e-14 * max(1.0, abs(hi)):
            break
    t_star = 0.5 * (lo + hi)
    return t_star, norm_at(t_star)


def _fmt(x) -> str:
    return "" if x is None else f"{x:.16e}"


def scan_records_to_csv(records) -> str:
    """Render scan records with the fixed column contract.

    17 significant digits, '.' decimal separator, newline line endings;
    entropy fields are empty when the environment is mixed.
    """
    lines = [",".join(SCAN_CSV_COLUMNS)]
    for r in records:
        lines.append(",".join([
            _fmt(r.tau),
            _fmt(r.W_pre.real), _fmt(r.W_pre.imag),
            _fmt(r.W_echo.real), _fmt(r.W_echo.imag),
            _fmt(r.verdict_pre.commutator_norm),
            _fmt(r.verdict_echo.commutator_norm),
            _fmt(r.negativity_pre), _fmt(r.negativity_echo),
            _fmt(r.entropy_pre), _fmt(r.entropy_echo),
            str(int(r.flag_echo_induced)),
        ]))
    return "\n".join(lines) + "\n"
