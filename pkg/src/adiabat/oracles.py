"""Closed-form and brute-force references for tests and ``adiabat check``.

Nothing here calls the straightening transform: the references must stay
independent of the code they check.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .calibrated import CurveSpec
from .config import ModelConfig, load_config
from .errors import DomainError
from .expr import Expression
from .transform import Domain

__all__ = [
    "Fixture",
    "adiabat_ode_trace",
    "fixtures_dir",
    "gradient_parallelism",
    "hausdorff",
    "ideal_gas_entropy",
    "densify",
    "load_fixture",
    "numerical_gradient",
]


def ideal_gas_entropy(gamma: float, x: float, y: float) -> float:
    """``ln(x y^gamma) / (gamma - 1)``."""
    if x <= 0 or y <= 0:
        raise ValueError(f"ideal-gas entropy needs x, y > 0, got ({x}, {y})")
    if gamma == 1:
        raise ValueError("gamma must differ from 1")
    return (math.log(x) + gamma * math.log(y)) / (gamma - 1.0)


def fixtures_dir() -> Path:
    env = os.environ.get("ADIABAT_FIXTURES")
    if env:
        return Path(env)
    return Path(__file__).resolve().parents[2] / "fixtures"


@dataclass(frozen=True, eq=False)
class Fixture:
    name: str
    config: ModelConfig
    f: Expression
    adiabats: tuple[CurveSpec, ...]
    entropy: Expression | None
    domain: Domain

    @classmethod
    def from_config(cls, cfg: ModelConfig) -> "Fixture":
        registry = cfg.build_functions()
        ent = cfg.oracle.get("entropy")
        return cls(
            cfg.name,
            cfg,
            cfg.parse(cfg.f, registry),
            tuple(cfg.build_curves()),
            cfg.parse(ent, registry) if ent else None,
            cfg.build_domain(),
        )

    @property
    def entropy_gradient(self) -> Callable[[float, float], tuple[float, float]]:
        if self.entropy is None:
            raise ValueError(f"fixture {self.name!r} has no closed-form entropy")
        sx, sy = self.entropy.diff("x"), self.entropy.diff("y")
        return lambda x, y: (sx(x, y), sy(x, y))


def load_fixture(name: str) -> Fixture:
    return Fixture.from_config(load_config(fixtures_dir() / f"{name}.json"))


# ---------------------------------------------------------------------------
# level-curve ODE


def _rk4(fn, p, h):
    k1 = fn(p)
    k2 = fn(p + 0.5 * h * k1)
    k3 = fn(p + 0.5 * h * k2)
    k4 = fn(p + h * k3)
    return p + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def adiabat_ode_trace(
    fixture: Fixture,
    start: tuple[float, float],
    span: float,
    step: float | None = None,
    tol: float = 1e-12,
    clip: bool = False,
) -> np.ndarray:
    """Integrate the level curve of the fixture's closed-form entropy through ``start``.

    Arc-length parametrization along ``(S_y, -S_x) / |grad S|``; ``span`` is the
    signed arc length.  Each RK4 step is compared with two half steps and
    halved until they agree to ``tol``.  Leaving the domain raises
    :class:`DomainError`, or ends the trace at the boundary when ``clip``.
    """
    dom = fixture.domain
    grad = fixture.entropy_gradient
    sgn = 1.0 if span >= 0 else -1.0

    def direction(p):
        gx, gy = grad(p[0], p[1])
        norm = math.hypot(gx, gy)
        return sgn * np.array([gy, -gx]) / norm

    p = np.array(start, dtype=float)
    if not dom.contains(*p, slack=0.0):
        raise DomainError(f"start {start} outside the domain")
    out = [p.copy()]
    remaining = abs(span)
    h0 = step or 1e-3 * dom.scale
    while remaining > 0:
        h = min(h0, remaining)
        while True:
            full = _rk4(direction, p, h)
            half = _rk4(direction, _rk4(direction, p, 0.5 * h), 0.5 * h)
            if np.max(np.abs(full - half)) <= tol or h < 1e-10 * dom.scale:
                break
            h *= 0.5
        nxt = half + (half - full) / 15.0
        if not dom.contains(*nxt, slack=0.0):
            if not clip:
                raise DomainError(f"trace leaves the domain near {tuple(nxt)}")
            lo, hi = 0.0, h
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if dom.contains(*_rk4(direction, p, mid), slack=0.0):
                    lo = mid
                else:
                    hi = mid
            if lo > 0:
                out.append(_rk4(direction, p, lo))
            break
        p = nxt
        out.append(p.copy())
        remaining -= h
    return np.array(out)


# ---------------------------------------------------------------------------
# level-family comparisons


def numerical_gradient(field: Callable[[float, float], float], x: float, y: float, h: float) -> np.ndarray:
    return np.array(
        [
            (field(x + h, y) - field(x - h, y)) / (2 * h),
            (field(x, y + h) - field(x, y - h)) / (2 * h),
        ]
    )


def gradient_parallelism(
    field_a: Callable[[float, float], float],
    field_b: Callable[[float, float], float],
    pts: Iterable[tuple[float, float]],
    h: float = 1e-4,
) -> float:
    """Max over ``pts`` of ``|ga x gb| / (|ga| |gb|)`` for central-difference gradients."""
    worst = 0.0
    for x, y in pts:
        ga = numerical_gradient(field_a, x, y, h)
        gb = numerical_gradient(field_b, x, y, h)
        cross = abs(ga[0] * gb[1] - ga[1] * gb[0])
        worst = max(worst, cross / (np.linalg.norm(ga) * np.linalg.norm(gb)))
    return float(worst)


def densify(polyline: np.ndarray, spacing: float) -> np.ndarray:
    """Points along a polyline no more than ``spacing`` apart, vertices included."""
    pl = np.asarray(polyline, dtype=float)
    out = [pl[:1]]
    for p, q in zip(pl[:-1], pl[1:]):
        k = max(1, int(np.ceil(np.hypot(*(q - p)) / spacing)))
        t = np.arange(1, k + 1)[:, None] / k
        out.append(p + t * (q - p))
    return np.vstack(out)


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two point sets (brute force)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(-1))
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
