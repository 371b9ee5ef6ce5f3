"""Area-preserving straightening of the isotherms.

Two coordinate changes are composed.  The first keeps one state variable
(``x`` by default) and replaces the other by the temperature ``X = f(x, y)``;
the second replaces the kept variable by

    Psi(X, Y) = -int_{Y_ref}^{Y} dY' / f_v(x(X, Y'), y(X, Y'))

where ``f_v`` is the partial of ``f`` in the eliminated variable.  In the
resulting ``(Xt, Yt) = (X, Psi)`` plane isotherms are vertical lines and the
map from ``(x, y)`` has unit Jacobian (``-1`` for the x-solve orientation).
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, InversionError, RootError, SignScanError
from .expr import EvaluationError, Expression
from .numerics import adaptive_simpson

__all__ = ["Domain", "TildePoint", "TransformContext"]

Y_SOLVE = "y-solve"
X_SOLVE = "x-solve"


class TildePoint(NamedTuple):
    X: float
    Y: float


@dataclass(frozen=True)
class Domain:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        vals = (self.x_min, self.x_max, self.y_min, self.y_max)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("domain bounds must be finite")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise DomainError(f"empty domain {vals}")

    @property
    def scale(self) -> float:
        return max(self.x_max - self.x_min, self.y_max - self.y_min)

    def contains(self, x: float, y: float, slack: float = 1e-12) -> bool:
        ex = slack * (self.x_max - self.x_min)
        ey = slack * (self.y_max - self.y_min)
        return (self.x_min - ex <= x <= self.x_max + ex) and (self.y_min - ey <= y <= self.y_max + ey)

    def grid(self, nx: int, ny: int) -> tuple[np.ndarray, np.ndarray]:
        return np.linspace(self.x_min, self.x_max, nx), np.linspace(self.y_min, self.y_max, ny)

    def random_points(self, n: int, rng: np.random.Generator, margin: float = 0.0) -> np.ndarray:
        mx = margin * (self.x_max - self.x_min)
        my = margin * (self.y_max - self.y_min)
        xs = rng.uniform(self.x_min + mx, self.x_max - mx, n)
        ys = rng.uniform(self.y_min + my, self.y_max - my, n)
        return np.column_stack([xs, ys])

    def as_dict(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "y_min": self.y_min, "y_max": self.y_max}


def _scan_partial(fv, u_range, v_range, n, label):
    """Sign of ``fv`` on an ``n x n`` grid, or raise with the offending cell."""
    us = np.linspace(*u_range, n)
    vs = np.linspace(*v_range, n)
    sign = 0.0
    for u in us:
        for v in vs:
            try:
                val = fv(u, v)
            except EvaluationError as exc:
                raise SignScanError(f"{label} not evaluable at ({u:g}, {v:g}): {exc}", (u, v)) from None
            s = math.copysign(1.0, val) if val != 0.0 else 0.0
            if s == 0.0 or (sign and s != sign):
                what = "vanishes" if s == 0.0 else "changes sign"
                raise SignScanError(f"{label} {what} near ({u:g}, {v:g})", (u, v))
            sign = s
    return sign


@dataclass(frozen=True, eq=False)
class TransformContext:
    """Straightening transform for the equation of state ``f`` on ``domain``.

    ``orientation="y-solve"`` keeps ``x`` (``Y = x``) and eliminates ``y``;
    ``"x-solve"`` swaps the roles.  ``y_ref`` anchors the quadrature on the
    kept axis (defaults to the lower end of its range).  Inversions search
    the eliminated variable on the domain range widened by ``solve_margin``
    (multiplicatively for positive ranges), shrunk automatically when the
    partial is not single-signed on the widened box.
    """

    f: Expression
    domain: Domain
    orientation: str = Y_SOLVE
    y_ref: float | None = None
    root_tol: float = 1e-12
    quad_tol: float = 1e-10
    max_depth: int = 40
    scan_points: int = 33
    solve_margin: float = 16.0
    f_partial: Expression = field(init=False)
    sign: float = field(init=False)
    anchor: float = field(init=False)
    solve_range: tuple[float, float] = field(init=False)

    def __post_init__(self):
        if self.orientation not in (Y_SOLVE, X_SOLVE):
            raise ValueError(f"orientation must be {Y_SOLVE!r} or {X_SOLVE!r}")
        if not (self.quad_tol >= 0 and self.root_tol >= 0):
            raise ValueError("tolerances must be non-negative")
        d = self.domain
        set_ = object.__setattr__
        set_(self, "f_partial", self.f.diff(self.eliminated))
        u_range = self.kept_range
        v_range = (d.y_min, d.y_max) if self.orientation == Y_SOLVE else (d.x_min, d.x_max)
        label = f"d f/d{self.eliminated}"
        try:
            sign = _scan_partial(self._fv, u_range, v_range, self.scan_points, label)
        except SignScanError as exc:
            other = X_SOLVE if self.orientation == Y_SOLVE else Y_SOLVE
            raise SignScanError(
                f"{exc}; trim the domain or try orientation {other!r}", exc.region
            ) from None
        set_(self, "sign", sign)
        anchor = u_range[0] if self.y_ref is None else float(self.y_ref)
        if not (u_range[0] <= anchor <= u_range[1]):
            raise DomainError(f"quadrature anchor {anchor} outside [{u_range[0]}, {u_range[1]}]")
        set_(self, "anchor", anchor)
        set_(self, "solve_range", self._widened(u_range, v_range, label))

    def _widened(self, u_range, v_range, label):
        lo, hi = v_range
        m = self.solve_margin
        while m > 1.0 + 1e-9:
            if lo > 0:
                cand = (lo / m, hi * m)
            else:
                w = (m - 1.0) * (hi - lo)
                cand = (lo - w, hi + w)
            try:
                s = _scan_partial(self._fv, u_range, cand, 2 * self.scan_points, label)
                if s == self.sign:
                    return cand
            except SignScanError:
                pass
            m = math.sqrt(m)
        return v_range

    # ------------------------------------------------------------------
    # variable bookkeeping: u is the kept variable (Y = u), v the eliminated one

    @property
    def eliminated(self) -> str:
        return "y" if self.orientation == Y_SOLVE else "x"

    @property
    def kept_range(self) -> tuple[float, float]:
        d = self.domain
        return (d.x_min, d.x_max) if self.orientation == Y_SOLVE else (d.y_min, d.y_max)

    @property
    def jacobian_sign(self) -> float:
        """Determinant of d(Xt, Yt)/d(x, y): +1 for y-solve, -1 for x-solve."""
        return 1.0 if self.orientation == Y_SOLVE else -1.0

    @property
    def scale(self) -> float:
        return self.domain.scale

    def _xy(self, u, v):
        return (u, v) if self.orientation == Y_SOLVE else (v, u)

    def _uv(self, x, y):
        return (x, y) if self.orientation == Y_SOLVE else (y, x)

    def _f(self, u, v):
        x, y = self._xy(u, v)
        return self.f(x, y)

    def _fv(self, u, v):
        x, y = self._xy(u, v)
        return self.f_partial(x, y)

    def _check(self, x, y):
        if not self.domain.contains(x, y):
            raise DomainError(f"point ({x!r}, {y!r}) outside domain {self.domain.as_dict()}")

    # ------------------------------------------------------------------
    # isotherms to vertical lines

    def forward_XY(self, x: float, y: float) -> tuple[float, float]:
        self._check(x, y)
        u, _ = self._uv(x, y)
        return self.f(x, y), u

    def _solve_v(self, X: float, u: float) -> float:
        lo, hi = self.solve_range
        try:
            glo = self._f(u, lo) - X
            ghi = self._f(u, hi) - X
        except EvaluationError as exc:
            raise InversionError(f"equation of state not evaluable on the solve bracket: {exc}") from None
        if glo == 0.0:
            return lo
        if ghi == 0.0:
            return hi
        if glo * ghi > 0:
            raise InversionError(
                f"temperature {X!r} not attained on the {self.eliminated}-segment at {self.kept_name()}={u!r}"
            )
        try:
            v = brentq(lambda s: self._f(u, s) - X, lo, hi, xtol=1e-15 * self.scale, rtol=8.9e-16, maxiter=200)
        except (EvaluationError, RuntimeError) as exc:
            raise InversionError(str(exc)) from None
        resid = abs(self._f(u, v) - X)
        if resid > self.root_tol * max(1.0, abs(X)):
            raise InversionError(f"inversion residual {resid:g} exceeds root_tol at X={X!r}, Y={u!r}")
        return v

    def kept_name(self) -> str:
        return "x" if self.orientation == Y_SOLVE else "y"

    def invert_XY(self, X: float, Y: float) -> tuple[float, float]:
        lo, hi = self.kept_range
        if not (lo <= Y <= hi):
            raise InversionError(f"Y={Y!r} outside the kept-variable range [{lo}, {hi}]")
        return self._xy(Y, self._solve_v(X, Y))

    # ------------------------------------------------------------------
    # area-preserving straightening

    def _solve_v_near(self, X: float, u: float, guess: float) -> float:
        """Newton from a nearby solution; falls back to the bracketed solve."""
        lo, hi = self.solve_range
        v = guess
        try:
            for _ in range(8):
                step = (self._f(u, v) - X) / self._fv(u, v)
                v_new = v - step
                if not (lo < v_new < hi) or not math.isfinite(v_new):
                    break
                v = v_new
                if abs(step) <= 1e-12 * max(abs(v), self.scale):
                    if abs(self._f(u, v) - X) <= self.root_tol * max(1.0, abs(X)):
                        return v
                    break
        except (EvaluationError, ZeroDivisionError):
            pass
        return self._solve_v(X, u)

    def _integrand(self, X):
        last = []

        def g(u):
            # successive nodes lie on one isotherm, so the previous root is a good start
            v = self._solve_v_near(X, u, last[0]) if last else self._solve_v(X, u)
            last[:] = [v]
            return -1.0 / self._fv(u, v)

        return g

    def psi(self, X: float, Y: float) -> float:
        """``-int dY / f_v`` along the isotherm ``X`` from the anchor to ``Y``."""
        lo, hi = self.kept_range
        if not (lo <= Y <= hi):
            raise InversionError(f"Y={Y!r} outside the kept-variable range [{lo}, {hi}]")
        return adaptive_simpson(self._integrand(X), self.anchor, Y, self.quad_tol, self.max_depth)

    def forward_tilde(self, x: float, y: float) -> TildePoint:
        X, Y = self.forward_XY(x, y)
        return TildePoint(X, self.psi(X, Y))

    def invert_tilde(self, p: TildePoint) -> tuple[float, float]:
        """Solve ``Psi(Xt, Y) = Yt`` by safeguarded Newton from the anchor, then invert ``X``.

        Psi is strictly monotone in ``Y`` with known slope ``-1/f_v``, so Newton
        steps are exact in direction; steps that leave the solve region or the
        current bracket are halved or replaced by bisection.
        """
        Xt, Yt = p
        column = _PsiColumn(self, Xt)
        lo_k, hi_k = self.kept_range
        increasing = self.sign < 0
        u = self.anchor
        try:
            r = column(u) - Yt
        except InversionError as exc:
            raise InversionError(f"isotherm X={Xt!r} does not cross the anchor line: {exc}") from None
        left, right = lo_k, hi_k
        tol = 1e-15 * self.scale
        for _ in range(200):
            if r == 0.0:
                break
            if (r < 0) == increasing:
                left = u
            else:
                right = u
            step = -r / column.g(u)
            cand = u + step
            if not (left < cand < right):
                cand = 0.5 * (left + right)
            for _ in range(60):
                try:
                    r_c = column(cand) - Yt
                    break
                except InversionError:
                    if cand > u:
                        right = cand
                    else:
                        left = cand
                    cand = 0.5 * (u + cand)
            else:
                raise RootError(f"cannot reach Yt={Yt!r} on isotherm X={Xt!r}")
            moved = abs(cand - u)
            u, r = cand, r_c
            if moved <= tol * max(1.0, abs(u)) or right - left <= tol:
                break
        else:
            raise RootError(f"no convergence solving for Yt={Yt!r} on isotherm X={Xt!r}")
        if abs(r) > 1e3 * self.quad_tol * max(1.0, abs(Yt)):
            raise RootError(f"Yt={Yt!r} not reached on isotherm X={Xt!r} within the domain")
        return self.invert_XY(Xt, u)

    # ------------------------------------------------------------------
    # audits

    def jacobian_det(self, x: float, y: float, h: float | None = None) -> float:
        """Central-difference determinant of d(Xt, Yt)/d(x, y)."""
        h = 1e-4 * self.scale if h is None else h
        for px, py in ((x + h, y), (x - h, y), (x, y + h), (x, y - h)):
            if not self.domain.contains(px, py, slack=0.0):
                raise DomainError(f"stencil point ({px!r}, {py!r}) outside domain")
        xp, xm = self.forward_tilde(x + h, y), self.forward_tilde(x - h, y)
        yp, ym = self.forward_tilde(x, y + h), self.forward_tilde(x, y - h)
        a = (xp.X - xm.X) / (2 * h)
        b = (yp.X - ym.X) / (2 * h)
        c = (xp.Y - xm.Y) / (2 * h)
        d = (yp.Y - ym.Y) / (2 * h)
        return a * d - b * c

    def describe(self) -> dict:
        return {
            "f": str(self.f),
            "domain": self.domain.as_dict(),
            "orientation": self.orientation,
            "y_ref": self.anchor,
            "root_tol": self.root_tol,
            "quad_tol": self.quad_tol,
            "max_depth": self.max_depth,
            "solve_range": list(self.solve_range),
            "partial_sign": self.sign,
        }


class _PsiColumn:
    """Psi along one isotherm, integrated incrementally from the nearest known node."""

    def __init__(self, ctx: TransformContext, X: float):
        self.ctx = ctx
        self.g = ctx._integrand(X)
        self.us = [ctx.anchor]
        self.vals = [0.0]

    def __call__(self, u: float) -> float:
        i = bisect_left(self.us, u)
        if i < len(self.us) and self.us[i] == u:
            return self.vals[i]
        cands = [j for j in (i - 1, i) if 0 <= j < len(self.us)]
        j = min(cands, key=lambda k: abs(self.us[k] - u))
        val = self.vals[j] + adaptive_simpson(self.g, self.us[j], u, self.ctx.quad_tol, self.ctx.max_depth)
        self.us.insert(i, u)
        self.vals.insert(i, val)
        return val
