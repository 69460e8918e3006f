"""Numerical edge-of-the-wedge machinery.

Contour quadrature, the sphere-Laplace smoothing kernel, cone/carrier/tube
geometry, boundary-value functionals, and the analytic-continuation drivers
built from them, exposed as a FastAPI service with a thin CLI client.
"""

__version__ = "0.1.0"

from .errors import (
    AccuracyError,
    DomainError,
    EvaluationError,
    InvalidArgument,
    PoleError,
)

__all__ = [
    "AccuracyError",
    "DomainError",
    "EvaluationError",
    "InvalidArgument",
    "PoleError",
    "__version__",
]
