"""Reconstruct entropy and adiabats from isotherms by area-preserving straightening."""

__version__ = "0.1.0"

from .calibrated import CurveSpec, EntropyField, build_graph, entropy_at, level_curves, reconstruct, sample_curve
from .expr import Expression, ScalarFunction1D, differentiate, evaluate, parse
from .graph import GraphFunction
from .transform import Domain, TildePoint, TransformContext
from .uncalibrated import RecalibrationResult, reconstruct_uncalibrated

__all__ = [
    "CurveSpec",
    "Domain",
    "EntropyField",
    "Expression",
    "GraphFunction",
    "RecalibrationResult",
    "ScalarFunction1D",
    "TildePoint",
    "TransformContext",
    "build_graph",
    "differentiate",
    "entropy_at",
    "evaluate",
    "level_curves",
    "parse",
    "reconstruct",
    "reconstruct_uncalibrated",
    "sample_curve",
]
