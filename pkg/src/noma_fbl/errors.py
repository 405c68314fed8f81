"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature exhausted its subdivision budget or failed to converge."""


class SeriesDivergenceError(RuntimeError):
    """A truncated series was still growing when the term budget ran out."""


class LogArgumentError(RuntimeError):
    """The argument of a logarithm collapsed to a non-positive value.

    Only reachable through numerical cancellation in an alternating sum;
    raised with diagnostics instead of silently returning NaN.
    """
