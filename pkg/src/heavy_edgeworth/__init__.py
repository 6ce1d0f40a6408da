"""Corrected Edgeworth density expansions for sums of heavy-tailed increments."""
from .errors import DomainError, InsufficientCumulants, MomentDiverges, QuadratureNonConvergence
from .parity import INTEGER_TOL, Parity, ParityClass

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "InsufficientCumulants",
    "MomentDiverges",
    "QuadratureNonConvergence",
    "INTEGER_TOL",
    "Parity",
    "ParityClass",
    "__version__",
]
