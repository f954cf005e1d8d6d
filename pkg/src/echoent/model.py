"""Pure-dephasing models, environment states, and conditional propagators.

The joint Hamiltonian is

    H = eps0 |0><0| + eps1 |1><1| + H_E + |0><0| x V0 + |1><1| x V1

with hbar = 1, so all energies are angular frequencies.  Because the
interaction is diagonal in the qubit basis, the joint evolution splits into
two conditional environment propagators

    w_i(t) = exp(-i eps_i t) * exp(-i (H_E + V_i) t),   i in {0, 1}.

Propagators come in two flavours: generated from a model as above, or
spectrally specified as w_i(t) = sum_k exp(+i omega_k t) |psi_k><psi_k|.
The spectral form keeps the +i sign convention of its frequency data as
written; it is the generated form with H_i = -sum_k omega_k P_k and
eps_i = 0.

Everything here is an immutable value; construction and evaluation are pure
and safe to share across concurrent scans.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import (
    UNITARY_TOL,
    as_complex_matrix,
    check_env_dim,
    dagger,
    eig_hermitian,
    require_hermitian,
)

DENSITY_TRACE_TOL = 1e-12
DENSITY_EIG_FLOOR = -1e-10


def _frozen_array(a) -> np.ndarray:
    out = np.array(a, dtype=np.complex128)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PureDephasingModel:
    """Qubit splittings plus the three environment operators of the model."""

    epsilon0: float
    epsilon1: float
    H_E: np.ndarray
    V0: np.ndarray
    V1: np.ndarray

    def __post_init__(self):
        h = require_hermitian(self.H_E, name="H_E")
        v0 = require_hermitian(self.V0, name="V0")
        v1 = require_hermitian(self.V1, name="V1")
        n = check_env_dim(h.shape[0])
        if v0.shape != (n, n) or v1.shape != (n, n):
            raise ValueError(
                f"environment operators disagree in dimension: "
                f"H_E {h.shape}, V0 {v0.shape}, V1 {v1.shape}"
            )
        object.__setattr__(self, "H_E", _frozen_array(h))
        object.__setattr__(self, "V0", _frozen_array(v0))
        object.__setattr__(self, "V1", _frozen_array(v1))
        object.__setattr__(self, "epsilon0", float(self.epsilon0))
        object.__setattr__(self, "epsilon1", float(self.epsilon1))

    @property
    def env_dim(self) -> int:
        return self.H_E.shape[0]

    def rotating_frame(self) -> "PureDephasingModel":
        """Copy with both qubit splittings zeroed.

        Removes the trivial exp(i (eps1 - eps0) t) phase from the pre-pulse
        coherence, which otherwise obscures environmental dephasing in
        output files.  The echoed coherence is unaffected either way.
        """
        return PureDephasingModel(0.0, 0.0, self.H_E, self.V0, self.V1)


@dataclass(frozen=True, eq=False)
class EnvDensity:
    """Environment density matrix with a tag recording how it was built."""

    R: np.ndarray
    kind: str = "generic"
    beta: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        r = require_hermitian(self.R, name="environment density matrix")
        check_env_dim(r.shape[0])
        tr = np.trace(r).real
        if abs(tr - 1.0) > DENSITY_TRACE_TOL:
            raise ValueError(
                f"environment density matrix trace is {tr!r}, must be 1 "
                f"within {DENSITY_TRACE_TOL:.1e}"
            )
        eigs = np.linalg.eigvalsh(r)
        if eigs[0] < DENSITY_EIG_FLOOR:
            raise ValueError(
                f"environment density matrix has eigenvalue {eigs[0]:.3e} "
                f"below {DENSITY_EIG_FLOOR:.1e}; not positive semidefinite"
            )
        object.__setattr__(self, "R", _frozen_array(r))

    @property
    def dim(self) -> int:
        return self.R.shape[0]

    def is_pure(self, tol: float = 1e-10) -> bool:
        return float(np.trace(self.R @ self.R).real) >= 1.0 - tol

    @classmethod
    def pure(cls, vector) -> "EnvDensity":
        v = np.asarray(vector, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError("pure environment state needs a nonzero vector")
        v = v / norm
        return cls(R=np.outer(v, v.conj()), kind="pure")

    @classmethod
    def diagonal(cls, probs) -> "EnvDensity":
        p = np.asarray(probs, dtype=float).reshape(-1)
        if np.any(p < -1e-12):
            raise ValueError(f"diagonal weights must be nonnegative, got {p}")
        if abs(p.sum() - 1.0) > DENSITY_TRACE_TOL:
            raise ValueError(f"diagonal weights sum to {p.sum()!r}, must be 1")
        return cls(R=np.diag(np.clip(p, 0.0, None).astype(np.complex128)),
                   kind="diagonal")

    @classmethod
    def thermal(cls, H_E, beta: float) -> "EnvDensity":
        return thermal_state(H_E, beta)

    @classmethod
    def random_full_rank(cls, n: int, seed: int) -> "EnvDensity":
        """Seeded random full-rank state, R = G G^dagger / tr(G G^dagger)."""
        check_env_dim(n)
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        r = g @ dagger(g)
        r = r / np.trace(r).real
        return cls(R=r, kind="random", seed=int(seed))


def thermal_state(H_E, beta: float) -> EnvDensity:
    """Gibbs state exp(-beta H_E) / Z.

    ``beta = 0`` gives the completely mixed state; ``beta = inf`` is
    accepted as a distinguished value and gives the (possibly degenerate)
    ground-space projector, normalized.
    """
    h = require_hermitian(H_E, name="H_E")
    beta = float(beta)
    if beta < 0.0 or np.isnan(beta):
        raise ValueError(f"inverse temperature must be >= 0, got {beta}")
    values, vectors = eig_hermitian(h)
    if np.isinf(beta):
        weights = (values <= values[0] + 1e-12).astype(float)
    else:
        weights = np.exp(-beta * (values - values.min()))
    weights = weights / weights.sum()
    r = (vectors * weights) @ dagger(vectors)
    return EnvDensity(R=r, kind="thermal", beta=beta)


class PropagatorPair:
    """Common interface for the two conditional environment propagators."""

    @property
    def env_dim(self) -> int:
        raise NotImplementedError

    def branch_unitary(self, branch: int, t: float) -> np.ndarray:
        raise NotImplementedError

    def _check_branch(self, branch) -> int:
        if branch not in (0, 1):
            raise ValueError(f"branch index must be 0 or 1, got {branch!r}")
        return int(branch)


class GeneratedPropagators(PropagatorPair):
    """Propagators generated by a model, w_i(t) = e^{-i eps_i t} e^{-i H_i t}.

    The eigendecompositions of H_E + V0 and H_E + V1 are cached at
    construction, so evaluating a time sweep costs one recombination per
    point.
    """

    def __init__(self, model: PureDephasingModel):
        self.model = model
        self._phases = (model.epsilon0, model.epsilon1)
        self._eigs = tuple(
            eig_hermitian(model.H_E + v) for v in (model.V0, model.V1)
        )

    @property
    def env_dim(self) -> int:
        return self.model.env_dim

    def branch_unitary(self, branch: int, t: float) -> np.ndarray:
        branch = self._check_branch(branch)
        if not np.isfinite(t):
            raise ValueError(f"time must be finite, got {t}")
        values, vectors = self._eigs[branch]
        u = (vectors * np.exp(-1j * values * t)) @ dagger(vectors)
        return np.exp(-1j * self._phases[branch] * t) * u


class SpectralPropagators(PropagatorPair):
    """Propagators given by frequencies and projector vectors per branch.

    Each branch is a sequence of ``(omega, vector)`` pairs and evaluates to
    w_i(t) = sum_k exp(+i omega_k t) |psi_k><psi_k|.  The vectors of each
    branch must form a complete orthonormal set, which makes every
    evaluation exactly unitary.
    """

    def __init__(self, branch0, branch1):
        self._data = []
        for label, entries in (("branch 0", branch0), ("branch 1", branch1)):
            omegas = np.array([float(om) for om, _ in entries])
            vecs = np.column_stack(
                [np.asarray(v, dtype=np.complex128).reshape(-1) for _, v in entries]
            )
            n = vecs.shape[0]
            if vecs.shape[1] != n:
                raise ValueError(
                    f"{label}: {vecs.shape[1]} projector vectors cannot be a "
                    f"complete set in dimension {n}"
                )
            gram_defect = float(np.max(np.abs(dagger(vecs) @ vecs - np.eye(n))))
            if gram_defect > UNITARY_TOL:
                raise ValueError(
                    f"{label}: projector vectors are not orthonormal, "
                    f"max Gram defect {gram_defect:.3e}"
                )
            self._data.append((omegas, vecs))
        if self._data[0][1].shape[0] != self._data[1][1].shape[0]:
            raise ValueError("both branches must share the environment dimension")
        check_env_dim(self._data[0][1].shape[0])

    @property
    def env_dim(self) -> int:
        return self._data[0][1].shape[0]

    def branch_unitary(self, branch: int, t: float) -> np.ndarray:
        branch = self._check_branch(branch)
        if not np.isfinite(t):
            raise ValueError(f"time must be finite, got {t}")
        omegas, vecs = self._data[branch]
        return (vecs * np.exp(1j * omegas * t)) @ dagger(vecs)


def conditional_propagator(pair: PropagatorPair, branch: int, t: float) -> np.ndarray:
    """Evaluate one conditional environment propagator at time t."""
    return pair.branch_unitary(branch, t)


@dataclass(frozen=True, eq=False)
class BiasedCoupling:
    """Coupling of the form (lam/2) (eta + 1) V on branch 0, (lam/2) (eta - 1) V on branch 1.

    ``lam`` is a dimensionless strength, ``eta`` the bias; eta = 0 is the
    unbiased coupling, eta = -1 leaves branch 0 uncoupled.
    """

    lam: float
    eta: float
    V: np.ndarray

    def __post_init__(self):
        v = require_hermitian(self.V, name="V")
        object.__setattr__(self, "V", _frozen_array(v))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "eta", float(self.eta))


def expand_biased(coupling: BiasedCoupling, epsilon0: float, epsilon1: float,
                  H_E) -> PureDephasingModel:
    """Build the full model from a biased coupling."""
    h = require_hermitian(H_E, name="H_E")
    if h.shape != coupling.V.shape:
        raise ValueError(
            f"H_E shape {h.shape} does not match coupling shape {coupling.V.shape}"
        )
    v0 = 0.5 * coupling.lam * (coupling.eta + 1.0) * coupling.V
    v1 = 0.5 * coupling.lam * (coupling.eta - 1.0) * coupling.V
    return PureDephasingModel(epsilon0, epsilon1, h, v0, v1)


def gue_matrix(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """Hermitian matrix with independent complex Gaussian off-diagonals."""
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (x + dagger(x))


def random_model(n: int, seed: int, scale: float = 1.0) -> PureDephasingModel:
    """Seeded random model; generic, with no accidental symmetries."""
    n = int(n)
    if not 2 <= n <= 64:
        raise ValueError(f"random model dimension must be in [2, 64], got {n}")
    rng = np.random.default_rng(seed)
    h_e = gue_matrix(rng, n, scale)
    v0 = gue_matrix(rng, n, scale)
    v1 = gue_matrix(rng, n, scale)
    return PureDephasingModel(0.0, 0.0, h_e, v0, v1)


# ---------------------------------------------------------------------------
# JSON model schema
#
# {"env_dim": N, "epsilon": [e0, e1], "H_E": [[[re, im], ...], ...],
#  "V0": ..., "V1": ..., "R0": {"kind": ...}}
#
# Matrices are row-major arrays of [re, im] pairs.  Unknown keys are
# rejected.
# ---------------------------------------------------------------------------

_MODEL_KEYS = {"env_dim", "epsilon", "H_E", "V0", "V1", "R0"}
_R0_KEYS = {
    "thermal": {"kind", "beta"},
    "pure": {"kind", "vector"},
    "diagonal": {"kind", "probs"},
    "random": {"kind", "seed"},
}


def matrix_to_json(m) -> list:
    a = as_complex_matrix(m)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def matrix_from_json(obj, name="matrix") -> np.ndarray:
    try:
        a = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{name}: malformed matrix data ({exc})") from None
    if a.ndim != 3 or a.shape[2] != 2:
        raise ValueError(
            f"{name}: expected a row-major array of [re, im] pairs, "
            f"got shape {a.shape}"
        )
    return a[..., 0] + 1j * a[..., 1]


def _vector_from_json(obj, name="vector") -> np.ndarray:
    a = np.asarray(obj, dtype=float)
    if a.ndim != 2 or a.shape[1] != 2:
        raise ValueError(f"{name}: expected an array of [re, im] pairs")
    return a[:, 0] + 1j * a[:, 1]


def env_density_from_json(obj, H_E) -> EnvDensity:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError('R0 must be an object with a "kind" key')
    kind = obj["kind"]
    if kind not in _R0_KEYS:
        raise ValueError(
            f"unknown R0 kind {kind!r}; expected one of {sorted(_R0_KEYS)}"
        )
    extra = set(obj) - _R0_KEYS[kind]
    if extra:
        raise ValueError(f"unknown keys in R0: {sorted(extra)}")
    missing = _R0_KEYS[kind] - set(obj)
    if missing:
        raise ValueError(f"missing keys in R0: {sorted(missing)}")
    if kind == "thermal":
        return thermal_state(H_E, float(obj["beta"]))
    if kind == "pure":
        return EnvDensity.pure(_vector_from_json(obj["vector"], "R0.vector"))
    if kind == "diagonal":
        return EnvDensity.diagonal(obj["probs"])
    return EnvDensity.random_full_rank(np.asarray(H_E).shape[0], int(obj["seed"]))


def model_from_json(data: dict):
    """Parse the model schema; returns ``(model, env_density)``."""
    if not isinstance(data, dict):
        raise ValueError("model file must hold a JSON object")
    extra = set(data) - _MODEL_KEYS
    if extra:
        raise ValueError(f"unknown keys in model: {sorted(extra)}")
    missing = _MODEL_KEYS - set(data)
    if missing:
        raise ValueError(f"missing keys in model: {sorted(missing)}")
    n = int(data["env_dim"])
    eps = list(data["epsilon"])
    if len(eps) != 2:
        raise ValueError("epsilon must be a pair [e0, e1]")
    h_e = matrix_from_json(data["H_E"], "H_E")
    v0 = matrix_from_json(data["V0"], "V0")
    v1 = matrix_from_json(data["V1"], "V1")
    for name, m in (("H_E", h_e), ("V0", v0), ("V1", v1)):
        if m.shape != (n, n):
            raise ValueError(
                f"{name} has shape {m.shape}, expected ({n}, {n}) from env_dim"
            )
    model = PureDephasingModel(float(eps[0]), float(eps[1]), h_e, v0, v1)
    r0 = env_density_from_json(data["R0"], model.H_E)
    if r0.dim != n:
        raise ValueError(f"R0 has dimension {r0.dim}, expected {n}")
    return model, r0


def model_to_json(model: PureDephasingModel, r0: EnvDensity) -> dict:
    """Serialize a model; the R0 slot records constructor data when known."""
    if r0.kind == "thermal" and r0.beta is not None:
        r0_obj = {"kind": "thermal", "beta": r0.beta}
    elif r0.kind == "random" and r0.seed is not None:
        r0_obj = {"kind": "random", "seed": r0.seed}
    elif r0.kind == "diagonal":
        r0_obj = {"kind": "diagonal",
                  "probs": [float(x.real) for x in np.diag(r0.R)]}
    elif r0.kind == "pure":
        vals, vecs = eig_hermitian(r0.R)
        vec = vecs[:, -1]
        r0_obj = {"kind": "pure",
                  "vector": [[float(z.real), float(z.imag)] for z in vec]}
    else:
        raise ValueError(f"cannot serialize R0 of kind {r0.kind!r}")
    return {
        "env_dim": model.env_dim,
        "epsilon": [model.epsilon0, model.epsilon1],
        "H_E": matrix_to_json(model.H_E),
        "V0": matrix_to_json(model.V0),
        "V1": matrix_to_json(model.V1),
        "R0": r0_obj,
    }
