"""Security analysis toolkit for time-coded quantum key distribution.

The package covers the chain from abstract attack analysis to concrete
link engineering: collective-attack entropies and secret-key rates,
QBER thresholds, secure fiber length, faint-pulse and decoy-state
source models, and a pulse-level Monte Carlo that cross-checks the
closed-form channel model.
"""

from .attack import (
    AttackOptimum,
    AttackParams,
    SecurityPoint,
    ThreeStateAttackGeometry,
    gamma_eigenvalues,
    holevo_chi_ae,
    max_qber,
    mutual_info_ab,
    optimize_attack_bruteforce,
    rho_ab_projected,
    s_rho_e_max,
    secret_rate,
)
from .channel import ChannelParams, bob_visibility, depolarize, qber, transmission
from .errors import ConfigError, EstimationError, ValidationError
from .linalg import (
    binary_entropy,
    eigvals_hermitian,
    entropy_of_spectrum,
    partial_trace,
    von_neumann_entropy,
)
from .montecarlo import (
    USING_COMPILED_KERNEL,
    AttackKind,
    ComparisonRow,
    SimConfig,
    SimResult,
    compare_to_analytic,
    intercept_resend,
    run_simulation,
)
from .protocol import (
    AliceSymbol,
    ProtocolKind,
    encode_pulse,
    interferometer_intensities,
    interferometer_output,
    joint_state,
    symbol_probabilities,
    visibility_from_counts,
)
from .rates import (
    GainErrorPoint,
    SourceMode,
    coherent_detection_probs,
    gain_and_qber_mu,
    multiphoton_fraction,
    optimize_faint_mu,
    rate_decoy,
    rate_faint,
    rate_single_photon,
)
from .solver import (
    CutoffResult,
    RateCurve,
    qber_sweep,
    rate_cutoff,
    secure_distance,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AliceSymbol",
    "AttackKind",
    "AttackOptimum",
    "AttackParams",
    "ChannelParams",
    "ComparisonRow",
    "ConfigError",
    "CutoffResult",
    "EstimationError",
    "GainErrorPoint",
    "ProtocolKind",
    "RateCurve",
    "SecurityPoint",
    "SimConfig",
    "SimResult",
    "SourceMode",
    "ThreeStateAttackGeometry",
    "USING_COMPILED_KERNEL",
    "ValidationError",
    "binary_entropy",
    "bob_visibility",
    "coherent_detection_probs",
    "compare_to_analytic",
    "depolarize",
    "eigvals_hermitian",
    "encode_pulse",
    "entropy_of_spectrum",
    "gain_and_qber_mu",
    "gamma_eigenvalues",
    "holevo_chi_ae",
    "intercept_resend",
    "interferometer_intensities",
    "interferometer_output",
    "joint_state",
    "max_qber",
    "multiphoton_fraction",
    "mutual_info_ab",
    "optimize_attack_bruteforce",
    "optimize_faint_mu",
    "partial_trace",
    "qber",
    "qber_sweep",
    "rate_cutoff",
    "rate_decoy",
    "rate_faint",
    "rate_single_photon",
    "rho_ab_projected",
    "run_simulation",
    "s_rho_e_max",
    "secret_rate",
    "secure_distance",
    "sweep",
    "symbol_probabilities",
    "transmission",
    "visibility_from_counts",
    "von_neumann_entropy",
]
