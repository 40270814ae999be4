"""Axisymmetric volume-constrained anisotropic curvature flow of a trapped drop.

Library plus CLI for evolving the profile r(z) of a drop of anisotropic
surface energy held between two horizontal plates, using a semi-implicit
clamped-cubic-spline scheme, with energy/volume/pinch diagnostics.
"""

__version__ = "0.1.0"

from .anisotropy import (  # noqa: E402
    AnisotropyModel,
    cahn_hoffman,
    check_convexity,
    check_curvature_condition,
    gamma,
    gamma_d1,
    gamma_d2,
    mu1,
    mu2,
)
from .errors import PinchError, SingularSystemError  # noqa: E402
from .experiments import (  # noqa: E402
    CosineInitial,
    FlowConfig,
    HermiteInitial,
    HorizonReached,
    PRESET_NAMES,
    Pinched,
    RunHistory,
    SteadyCylinder,
    cosine_initial,
    hermite_initial,
    preset,
    run,
    write_outputs,
)
from .geometry import (  # noqa: E402
    IntegralReport,
    ProfilePoint,
    average_curvature,
    integrals,
    lambda_pointwise,
    omega,
    pinching_bound,
    stability_threshold,
)
from .numerics import BandedSystem, QuadratureRule, integrate, solve  # noqa: E402
from .spline import ClampedSpline  # noqa: E402
from .stepper import (  # noqa: E402
    FlowState,
    StepCoefficients,
    assemble,
    compute_coefficients,
    reference_explicit_step,
    scheme_residual,
    step,
)
