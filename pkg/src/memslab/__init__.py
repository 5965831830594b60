"""memslab: numerical laboratory for coupled MEMS pull-in models.

Builds discrete balls and rectangles, computes minimal deflection pairs of
the coupled singular source problem by monotone iteration, traces the
critical existence curve in the parameter quadrant, classifies stability
through the principal eigenvalue of the coupled linearization, and checks
the analytic bounds that frame all of it.
"""

from .exceptions import (
    ConfigurationError,
    ConvergenceError,
    HypothesisError,
    NumericsError,
    PreconditionError,
    UnboundedRayError,
)
from .mesh import (
    EigenPair,
    Mesh,
    build_radial,
    build_rect,
    integrate,
    principal_eigenpair,
    solve_poisson,
    unit_ball_volume,
)

__all__ = [
    "ConfigurationError",
    "ConvergenceError",
    "HypothesisError",
    "NumericsError",
    "PreconditionError",
    "UnboundedRayError",
    "EigenPair",
    "Mesh",
    "build_radial",
    "build_rect",
    "integrate",
    "principal_eigenpair",
    "solve_poisson",
    "unit_ball_volume",
]
