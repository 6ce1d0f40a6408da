"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is defined."""


class MomentDiverges(ArithmeticError):
    """Requested moment order is at or beyond the tail index."""


class InsufficientCumulants(ValueError):
    """An Edgeworth order needs cumulants that do not exist."""


class QuadratureNonConvergence(RuntimeError):
    """Adaptive quadrature exhausted its panel budget."""
