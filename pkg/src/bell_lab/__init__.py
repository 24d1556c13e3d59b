"""Bell-type inequalities under local hidden-variable and quantum models."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    Axis,
    HiddenDistribution,
    InvalidArgument,
    ModelInvariantError,
    Outcome,
    PremiseViolation,
    UnsupportedDistribution,
    axis_from_planar_angle,
    dot,
    make_stream,
    sample_hidden,
)
from .correlator import (  # noqa: E402
    CorrelationEstimate,
    QuadratureSpec,
    anticorrelation_check,
    correlation_exact,
    correlation_mc,
    mc_convergence_scan,
)
from .inequalities import (  # noqa: E402
    audit_bell_derivation,
    audit_chsh_derivation,
    bell_functional,
    chsh_functional,
)
from .models import (  # noqa: E402
    DeterministicLocalModel,
    QuantumSingletReference,
    StochasticLocalModel,
    get_model,
    lift_deterministic,
    make_local_noise_model,
    make_sign_sphere_model,
    mean_value,
    quantum_correlation,
    quantum_sample_pair,
)
from .search import ScenarioSpec, angle_sweep, enumerate_local_bound, optimize_quantum_chsh  # noqa: E402
