"""Nonlinear spectral gaps, Poincare-type inequalities and average-distortion embeddings."""

__version__ = "0.1.0"

from nsgap.errors import (
    BudgetExceeded,
    DegenerateConfiguration,
    NonConvergence,
    ValidationError,
)

__all__ = [
    "__version__",
    "BudgetExceeded",
    "DegenerateConfiguration",
    "NonConvergence",
    "ValidationError",
]
