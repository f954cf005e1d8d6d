"""Pure-dephasing qubit-environment dynamics, spin echo, and entanglement criteria.

The library simulates a qubit coupled to a finite environment through an
interaction diagonal in the qubit basis, evaluates the echo pulse sequence,
decides qubit-environment separability through commutator criteria
cross-validated by negativity, and provides the second-order
attenuation/phase-shift description of the echo signal together with the
phase-shift entanglement witness.
"""

from .linalg import (
    comm_norm,
    comm_tol,
    dagger,
    eig_hermitian,
    expm_hermitian_generator,
    partial_trace,
    partial_transpose,
)
from .model import (
    BiasedCoupling,
    EnvDensity,
    GeneratedPropagators,
    PropagatorPair,
    PureDephasingModel,
    SpectralPropagators,
    conditional_propagator,
    expand_biased,
    model_from_json,
    model_to_json,
    random_model,
    thermal_state,
)
from .dynamics import (
    JointState,
    QubitState,
    coherence,
    echoed_coherence,
    echoed_joint_state,
    joint_state,
    reduce_qubit,
)
from .entanglement import (
    EchoRecord,
    SeparabilityVerdict,
    classify_scan,
    conditional_env_state,
    echoed_separability,
    entropy_closed_form,
    isolation_refinement,
    negativity,
    prepulse_separability,
    pure_entanglement_entropy,
    scan_records_to_csv,
)
from .spectral import (
    AnalyticPSD,
    BohrSpectrum,
    HypothesisError,
    SecondOrderResult,
    bohr_spectrum,
    chi_echo,
    chi_time_domain,
    correlation,
    echo_filter,
    phi_echo,
    phi_stationary,
    phi_time_domain,
    response,
    second_order_W,
    witness,
)
from .scenarios import (
    Scenario,
    commuting_family,
    fig1_model,
    nonevolving_env,
    perfect_echo_entangling,
    random_scenario,
    sec4b_snapshot,
)

__version__ = "0.1.0"
