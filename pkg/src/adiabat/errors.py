"""Exception hierarchy.  ``step`` names the pipeline stage for CLI reports."""


class AdiabatError(Exception):
    step = "general"


class DomainError(AdiabatError, ValueError):
    """A point or curve lies outside the working rectangle."""

    step = "domain"


class SignScanError(AdiabatError, ValueError):
    """The eliminated-variable partial vanishes or changes sign on the domain."""

    step = "sign-scan"

    def __init__(self, message, region=None):
        super().__init__(message)
        self.region = region


class InversionError(AdiabatError, ArithmeticError):
    step = "inversion"


class QuadratureError(AdiabatError, ArithmeticError):
    step = "quadrature"


class RootError(AdiabatError, ArithmeticError):
    step = "inversion"


class CurveError(AdiabatError, ValueError):
    step = "curve"


class GraphError(AdiabatError, ValueError):
    """Transformed adiabat is not a single-valued graph over the temperature axis."""

    step = "graph"


class OutOfRangeError(AdiabatError, ValueError):
    """Evaluation requested outside the valid temperature band (no extrapolation)."""

    step = "range"


class CrossingError(AdiabatError, ValueError):
    step = "graph"
