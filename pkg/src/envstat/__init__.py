"""Envariance, exact degeneracy counting and Boltzmann-Gibbs equilibrium."""
from .qstate import (
    DensityMatrix,
    PureState,
    SchmidtDecomposition,
    UnitaryOp,
    ValidationError,
    apply_local,
    bell_state,
    fidelity,
    mutual_information,
    partial_trace,
    random_haar_unitary,
    random_state,
    reduced_matrix,
    schmidt,
    state_from_schmidt,
    von_neumann_entropy,
)
from .envariance import (
    EnvarianceVerdict,
    EquiprobabilityReport,
    NotEnvariantError,
    construct_restoring,
    equiprobability,
    is_envariant,
    is_maximally_envariant,
    schmidt_swap,
    swap_unitary,
)
from .microcanonical import (
    Hamiltonian,
    MicrocanonicalState,
    build_microcanonical,
    degenerate_shell,
    internal_energy,
    verify_microcanonical,
)
from .counting import (
    BathSpec,
    Spectrum,
    accessibility_ratio,
    bath_degeneracy,
    brute_force_count,
    degeneracy_table,
    enumerate_occupations,
    log_count_stirling,
    multinomial,
    qubit_bath,
)
from .canonical import (
    CanonicalSolution,
    argmax_occupation,
    solve_boltzmann_gibbs,
    zeroth_law_check,
)
from .thermo import (
    bath_inverse_temperature,
    bath_temperature,
    boltzmann_entropy,
    canonical_weight,
    entropy_additivity_check,
    generalized_canonical_weight,
    mutual_info_identity_check,
    thermo_report,
)

__version__ = "0.1.0"
