"""Two-level atom coupled to a single quantized mode beyond the RWA.

Simulation and analysis toolkit for the quantum Rabi model in the strong
coupling regime: dressed-band structure built on displaced number states,
closed-form interband/intraband Rabi frequencies with their Bessel-function
large-photon-number limits, and an exact truncated-Hilbert-space propagator
serving as the numerical oracle for every analytic result.
"""

__version__ = "0.1.0"

from .dressed import (
    BandDecomposition,
    DressedFrame,
    band_eigenstate,
    band_energy,
    decompose,
    default_band_nmax,
    free_energy,
    initial_amplitudes,
    recompose,
    u_free_propagate,
)
from .dynamics import (
    FrequencyEstimate,
    IntegratorConfig,
    TimeGrid,
    TimeSeries,
    amplitudes_to_state,
    band_populations,
    build_hamiltonian,
    extract_oscillation_frequency,
    populations,
    propagate_amplitudes,
    propagate_full,
)
from .errors import (
    FrequencyExtractionError,
    NormDriftError,
    QrabiError,
    SpecfunOverflowError,
    TruncationLeakageError,
    ValidationError,
)
from .fock import (
    SpinFockVector,
    displaced_matrix_element,
    displaced_number_state,
    displacement,
    displacement_element_matrix,
    guard_for,
    ladder,
)
from .model import BandLabel, ModelParams, TruncationConfig, default_guard
from .rabi import (
    INTERBAND,
    INTRABAND,
    RabiResult,
    TransitionSpec,
    detuning,
    rabi_asymptotic,
    rabi_frequency,
    rwa_pair_evolution,
    transition_table,
)
from .specfun import (
    PolyEvalReport,
    assoc_laguerre,
    assoc_laguerre_report,
    bessel_j,
    bessel_j_report,
    laguerre,
    laguerre_bessel_limit_error,
    laguerre_report,
    log_factorial,
)

__all__ = [
    "__version__",
    "BandDecomposition",
    "BandLabel",
    "DressedFrame",
    "FrequencyEstimate",
    "FrequencyExtractionError",
    "INTERBAND",
    "INTRABAND",
    "IntegratorConfig",
    "ModelParams",
    "NormDriftError",
    "PolyEvalReport",
    "QrabiError",
    "RabiResult",
    "SpecfunOverflowError",
    "SpinFockVector",
    "TimeGrid",
    "TimeSeries",
    "TransitionSpec",
    "TruncationConfig",
    "TruncationLeakageError",
    "ValidationError",
    "amplitudes_to_state",
    "assoc_laguerre",
    "assoc_laguerre_report",
    "band_eigenstate",
    "band_energy",
    "band_populations",
    "bessel_j",
    "bessel_j_report",
    "build_hamiltonian",
    "decompose",
    "default_band_nmax",
    "default_guard",
    "detuning",
    "displaced_matrix_element",
    "displaced_number_state",
    "displacement",
    "displacement_element_matrix",
    "extract_oscillation_frequency",
    "free_energy",
    "guard_for",
    "initial_amplitudes",
    "laguerre",
    "laguerre_bessel_limit_error",
    "laguerre_report",
    "ladder",
    "log_factorial",
    "populations",
    "propagate_amplitudes",
    "propagate_full",
    "rabi_asymptotic",
    "rabi_frequency",
    "recompose",
    "rwa_pair_evolution",
    "transition_table",
    "u_free_propagate",
]
