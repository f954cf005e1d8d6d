"""Dense complex linear algebra on small operator matrices.

All physics modules in this package work on plain ``numpy`` arrays of
``complex128``.  This module provides the validated primitives they share:
Hermitian eigendecomposition with a reproducible eigenvector phase
convention, unitary exponentials of Hermitian generators, partial trace and
partial transpose over a bipartite factorization, and commutator norms with
a scale-aware zero threshold.

Matrix exponentials are computed exclusively through the Hermitian
eigendecomposition (never Pade / scaling-and-squaring): every generator in
scope is Hermitian, so this route is exactly unitary up to eigensolver
accuracy.  Storage is dense only; environments are capped at dimension
``MAX_ENV_DIM`` by the model layer.
"""

from __future__ import annotations

import numpy as np

# Desk-scale guard: environment dimensions beyond this are out of scope.
MAX_ENV_DIM = 64

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-12
# Commutator "zero" threshold is COMM_TOL_BASE * (|A|_F * |B|_F + 1).
COMM_TOL_BASE = 1e-10


def dagger(m):
    """Conjugate transpose."""
    return np.conjugate(np.transpose(m))


def frobenius(m) -> float:
    return float(np.linalg.norm(m))


def as_complex_matrix(m, name="matrix") -> np.ndarray:
    """Coerce to a 2-d complex array with finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def hermiticity_defect(m) -> float:
    """Largest entrywise deviation |M - M^dagger|."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def require_hermitian(m, tol: float = HERMITIAN_TOL, name="matrix") -> np.ndarray:
    a = as_complex_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    defect = hermiticity_defect(a)
    if defect > tol:
        raise ValueError(
            f"{name} is not Hermitian: max |M - M^dagger| entry is "
            f"{defect:.3e}, allowed {tol:.1e}"
        )
    return a


def unitarity_defect(u) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))))


def require_unitary(u, tol: float = UNITARY_TOL, name="matrix") -> np.ndarray:
    a = as_complex_matrix(u, name)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    defect = unitarity_defect(a)
    if defect > tol:
        raise ValueError(
            f"{name} is not unitary: max |U^dagger U - 1| entry is "
            f"{defect:.3e}, allowed {tol:.1e}"
        )
    return a


def check_env_dim(n: int) -> int:
    n = int(n)
    if not 1 <= n <= MAX_ENV_DIM:
        raise ValueError(
            f"environment dimension {n} outside supported range "
            f"[1, {MAX_ENV_DIM}] (dense desk-scale scope)"
        )
    return n


def eig_hermitian(m, tol: float = HERMITIAN_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(values, vectors)`` with real eigenvalues in ascending order
    and eigenvectors as the columns of a unitary matrix.  Each column is
    phase-fixed so that its largest-magnitude component is real and
    positive, which makes downstream output files reproducible.
    """
    a = require_hermitian(m, tol)
    values, vectors = np.linalg.eigh(a)
    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        j = int(np.argmax(np.abs(col)))
        pivot = col[j]
        mag = abs(pivot)
        if mag > 0.0:
            vectors[:, k] = col * (np.conjugate(pivot) / mag)
    return values, vectors


def expm_hermitian_generator(h, t: float, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Unitary exp(-i H t) for Hermitian H, via spectral decomposition."""
    if not np.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    values, vectors = eig_hermitian(h, tol)
    phases = np.exp(-1j * values * float(t))
    return (vectors * phases) @ dagger(vectors)


def _check_bipartite(s, dims, name="matrix"):
    a = as_complex_matrix(s, name)
    da, db = int(dims[0]), int(dims[1])
    if da < 1 or db < 1:
        raise ValueError(f"subsystem dimensions must be positive, got {dims}")
    if a.shape != (da * db, da * db):
        raise ValueError(
            f"{name} has shape {a.shape}, expected "
            f"({da * db}, {da * db}) for subsystem dimensions ({da}, {db})"
        )
    return a, da, db


def partial_trace(s, dims, over: str) -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    ``dims = (d_A, d_B)`` gives the factor dimensions; ``over`` names the
    subsystem to trace out, ``"A"`` or ``"B"``.  The total trace is
    preserved and Hermiticity is preserved for Hermitian input.
    """
    a, da, db = _check_bipartite(s, dims)
    r = a.reshape(da, db, da, db)
    if over == "B":
        return np.einsum("ijkj->ik", r)
    if over == "A":
        return np.einsum("ijil->jl", r)
    raise ValueError(f"subsystem label must be 'A' or 'B', got {over!r}")


def partial_transpose(s, dims, on: str) -> np.ndarray:
    """Transpose one factor of a bipartite operator (an involution)."""
    a, da, db = _check_bipartite(s, dims)
    r = a.reshape(da, db, da, db)
    if on == "A":
        out = r.transpose(2, 1, 0, 3)
    elif on == "B":
        out = r.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"subsystem label must be 'A' or 'B', got {on!r}")
    return out.reshape(da * db, da * db)


def comm_norm(a, b) -> float:
    """Frobenius norm of the commutator AB - BA.

    Basis independent and cheap; zero exactly when the operators commute.
    Compare against :func:`comm_tol` for a scale-aware zero test.
    """
    a = as_complex_matrix(a, "A")
    b = as_complex_matrix(b, "B")
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError(
            f"commutator needs equal square shapes, got {a.shape} and {b.shape}"
        )
    return frobenius(a @ b - b @ a)


def comm_tol(a, b, base: float = COMM_TOL_BASE) -> float:
    """Scale-aware threshold below which a commutator norm counts as zero."""
    return base * (frobenius(a) * frobenius(b) + 1.0)
