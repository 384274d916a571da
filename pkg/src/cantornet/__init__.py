"""A chaotic discrete-time Hopfield network with a Cantor attractor."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CantorNetError,
    CaptureError,
    ConvergenceError,
    DomainError,
    NotOnLineError,
    ParameterError,
)
from .fibodelta import DeltaParams, compute_delta, fib_digit, fib_prefix_morphism, fib_word  # noqa: E402
from .spectral import (  # noqa: E402
    PerronPair,
    ValidationReport,
    WeightMatrix,
    gen_weight_matrix,
    perron_eigenpair,
    validate_weights,
)
from .netcore import NetworkParams, Orbit, activation, build_network, network_map, simulate, step  # noqa: E402
from .linedyn import ScalarOrbit, diagram_residual, embed, g, g_orbit, g_tilde, project  # noqa: E402
from .chaoslab import (  # noqa: E402
    AttractorApprox,
    RotationMap,
    SensitivityReport,
    attractor_estimate,
    box_count,
    hausdorff_distance,
    itinerary_frequency,
    network_witness,
    omega_limit_check,
    rotation_step,
    sensitivity_probe,
)
