"""Adiabats and temperature recalibration from uncalibrated isotherms plus two adiabats.

Both adiabats are straightened into graphs ``f0`` and ``f1`` over the
empirical temperature.  Their vertical gap integrates to the recalibration
``phi``; the quotient ``(Yt - f0) / (f1 - f0)`` labels the adiabat family.
The quotient is an empirical entropy (a monotone relabeling), not the
absolute one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calibrated import DEFAULT_SAMPLES, CurveSpec, build_graph, sample_curve
from .errors import CrossingError, GraphError, OutOfRangeError
from .graph import GraphFunction
from .numerics import adaptive_simpson
from .transform import Domain, TransformContext

__all__ = [
    "NormalizedEntropyField",
    "RecalibrationResult",
    "normalized_entropy_at",
    "recalibrated_temperature_at",
    "reconstruct_uncalibrated",
]

PHI_NODES = 257


@dataclass(frozen=True, eq=False)
class NormalizedEntropyField:
    """``(Yt - f0(Xt)) / (f1(Xt) - f0(Xt))``: 0 on the first adiabat, 1 on the second."""

    ctx: TransformContext
    f0: GraphFunction
    f1: GraphFunction
    band: tuple[float, float]
    mode: str = "uncalibrated"
    gauge: str = "0 on the first adiabat, 1 on the second; monotone relabeling of entropy"

    @property
    def domain(self) -> Domain:
        return self.ctx.domain

    @property
    def valid_band(self) -> tuple[float, float]:
        return self.band

    def from_tilde(self, Xt: float, Yt: float) -> float:
        lo, hi = self.band
        if not (lo <= Xt <= hi):
            raise OutOfRangeError(f"temperature {Xt!r} outside the adiabats' common band [{lo!r}, {hi!r}]")
        a = self.f0(Xt)
        return (Yt - a) / (self.f1(Xt) - a)

    def __call__(self, x: float, y: float) -> float:
        X, _ = self.ctx.forward_XY(x, y)
        lo, hi = self.band
        if not (lo <= X <= hi):
            raise OutOfRangeError(f"temperature {X!r} outside the adiabats' common band [{lo!r}, {hi!r}]")
        p = self.ctx.forward_tilde(x, y)
        return self.from_tilde(p.X, p.Y)


@dataclass(frozen=True, eq=False)
class RecalibrationResult:
    ctx: TransformContext
    f0: GraphFunction
    f1: GraphFunction
    phi: GraphFunction
    entropy: NormalizedEntropyField

    @property
    def band(self) -> tuple[float, float]:
        return self.entropy.band

    def temperature(self, x: float, y: float) -> float:
        """Recalibrated temperature ``phi(f(x, y))``, zero at the band's left end."""
        if not self.ctx.domain.contains(x, y):
            raise OutOfRangeError(f"point ({x!r}, {y!r}) outside the domain")
        return self.phi(self.ctx.f(x, y))

    def gap(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return self.f1.values(X) - self.f0.values(X)

    def fit_exponent(self, n: int = 201) -> tuple[float, float]:
        """Least-squares ``(p, c)`` for ``|f1 - f0| ~ c * Xt**p`` on the common band."""
        lo, hi = self.band
        if lo <= 0:
            raise ValueError("power-law fit needs a positive temperature band")
        X = np.geomspace(lo, hi, n)
        p, logc = np.polyfit(np.log(X), np.log(np.abs(self.gap(X))), 1)
        return float(p), float(np.exp(logc))


def reconstruct_uncalibrated(
    ctx: TransformContext, a0: CurveSpec, a1: CurveSpec, n: int = DEFAULT_SAMPLES
) -> RecalibrationResult:
    f0 = build_graph(sample_curve(a0, ctx, n), ctx)
    f1 = build_graph(sample_curve(a1, ctx, n), ctx)
    lo, hi = max(f0.lo, f1.lo), min(f0.hi, f1.hi)
    if not hi > lo:
        raise GraphError(
            f"the adiabats share no temperature band: [{f0.lo}, {f0.hi}] vs [{f1.lo}, {f1.hi}]"
        )
    nodes = np.union1d(np.linspace(lo, hi, PHI_NODES), f0.xs[(f0.xs > lo) & (f0.xs < hi)])
    nodes = np.union1d(nodes, f1.xs[(f1.xs > lo) & (f1.xs < hi)])
    gap = f1.values(nodes) - f0.values(nodes)
    if np.any(gap == 0) or not (np.all(gap > 0) or np.all(gap < 0)):
        raise CrossingError("the two adiabats cross inside their common temperature band")

    def integrand(X):
        return f1(X) - f0(X)

    phi_nodes = np.linspace(lo, hi, PHI_NODES)
    phi_vals = np.zeros_like(phi_nodes)
    for k in range(1, len(phi_nodes)):
        phi_vals[k] = phi_vals[k - 1] + adaptive_simpson(
            integrand, phi_nodes[k - 1], phi_nodes[k], ctx.quad_tol, ctx.max_depth
        )
    phi = GraphFunction.fit(phi_nodes, phi_vals)
    field = NormalizedEntropyField(ctx, f0, f1, (float(lo), float(hi)))
    return RecalibrationResult(ctx, f0, f1, phi, field)


def normalized_entropy_at(res: RecalibrationResult, x: float, y: float) -> float:
    return res.entropy(x, y)


def recalibrated_temperature_at(res: RecalibrationResult, x: float, y: float) -> float:
    return res.temperature(x, y)
