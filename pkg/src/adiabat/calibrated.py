"""Entropy reconstruction from the equation of state plus one adiabat.

The given adiabat is mapped into the straightened plane, where it becomes
the graph ``Yt = F(Xt)``; every other adiabat is a vertical translate of it,
so ``S = Yt - F(Xt)`` (up to the orientation sign) is an entropy function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .contour import marching_squares
from .errors import AdiabatError, CurveError, DomainError, GraphError, OutOfRangeError
from .expr import BinOp, EvaluationError, Expression, Var
from .graph import GraphFunction
from .numerics import find_root, sign_changes
from .transform import Domain, TransformContext

__all__ = [
    "CurveSpec",
    "EntropyField",
    "build_graph",
    "entropy_at",
    "evaluate_grid",
    "level_curves",
    "reconstruct",
    "sample_curve",
]

DEFAULT_SAMPLES = 129
_Y_SCAN = 96


@dataclass(frozen=True, eq=False)
class CurveSpec:
    """An adiabat: ``{g = 0}``, ``{y = h(x)}`` or an ordered point list."""

    kind: str
    expr: Expression | None = None
    points: tuple[tuple[float, float], ...] = ()
    x_range: tuple[float, float] | None = None

    @classmethod
    def implicit(cls, g: Expression) -> "CurveSpec":
        return cls("implicit", expr=g)

    @classmethod
    def explicit(cls, h: Expression, x_range: tuple[float, float] | None = None) -> "CurveSpec":
        if "y" in h.variables:
            raise CurveError("explicit curve y = h(x) must not depend on y")
        return cls("explicit", expr=h, x_range=x_range)

    @classmethod
    def from_points(cls, pts) -> "CurveSpec":
        pts = tuple((float(x), float(y)) for x, y in pts)
        if len(pts) < 4:
            raise CurveError(f"point lists need at least 4 points, got {len(pts)}")
        return cls("points", points=pts)


# ---------------------------------------------------------------------------
# curve sampling


def _safe(fn, *args):
    try:
        return fn(*args)
    except EvaluationError:
        return math.nan


class _Tracer:
    """Solves an implicit curve along stations of one axis (``axis`` = station variable)."""

    def __init__(self, g: Expression, domain: Domain, axis: str):
        self.axis = axis
        if axis == "x":
            self.g = lambda s, r: g(s, r)
            self.s_range = (domain.x_min, domain.x_max)
            self.r_range = (domain.y_min, domain.y_max)
        else:
            self.g = lambda s, r: g(r, s)
            self.s_range = (domain.y_min, domain.y_max)
            self.r_range = (domain.x_min, domain.x_max)
        self.rs = np.linspace(*self.r_range, _Y_SCAN + 1)

    def roots(self, s: float) -> list[float]:
        vals = [_safe(self.g, s, r) for r in self.rs]
        out = []
        for i in sign_changes(vals):
            a, b = vals[i], vals[i + 1]
            if math.isnan(a) or math.isnan(b):
                continue
            out.append(float(find_root(lambda r: self.g(s, r), self.rs[i], self.rs[i + 1], glo=a, ghi=b)))
        return out

    def root(self, s: float) -> float | None:
        rs = self.roots(s)
        if len(rs) > 1:
            raise CurveError(
                f"ambiguous branch: {len(rs)} roots at {self.axis} = {s!r}; restrict the domain to one branch"
            )
        return rs[0] if rs else None

    def edge(self, s_out: float, s_in: float) -> tuple[float, float]:
        """Where the curve leaves through an r-boundary between a rootless and a rooted station."""
        for bound in self.r_range:
            h = lambda s: self.g(s, bound)  # noqa: E731
            a, b = _safe(h, s_out), _safe(h, s_in)
            if not (math.isnan(a) or math.isnan(b)) and (a * b <= 0):
                return float(find_root(h, s_out, s_in, glo=a, ghi=b)), bound
        # fall back to bisection on "has a root"
        lo, hi = s_out, s_in
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if self.root(mid) is None:
                lo = mid
            else:
                hi = mid
        return float(hi), self.root(hi)

    def trace(self, n: int) -> list[tuple[float, float]] | None:
        stations = np.linspace(*self.s_range, max(n, 65))
        found = [self.root(s) for s in stations]
        hits = [i for i, r in enumerate(found) if r is not None]
        if not hits:
            return None
        first, last = hits[0], hits[-1]
        if len(hits) != last - first + 1:
            raise CurveError(f"curve leaves and re-enters the domain along {self.axis}; restrict the domain")
        if first > 0:
            s_a, r_a = self.edge(stations[first - 1], stations[first])
        else:
            s_a, r_a = float(stations[0]), found[0]
        if last < len(stations) - 1:
            s_b, r_b = self.edge(stations[last + 1], stations[last])
        else:
            s_b, r_b = float(stations[-1]), found[-1]
        if not s_b > s_a:
            return None
        out = [(s_a, r_a)]
        for s in np.linspace(s_a, s_b, n)[1:-1]:
            r = self.root(s)
            if r is None:
                raise CurveError(f"lost the curve at {self.axis} = {s!r}")
            out.append((float(s), r))
        out.append((s_b, r_b))
        return out if self.axis == "x" else [(r, s) for s, r in out]


def _explicit_extent(h: Expression, domain: Domain, n: int) -> tuple[float, float]:
    tracer = _Tracer(Expression(BinOp("-", Var("y"), h.root)), domain, "x")
    pts = tracer.trace(n)
    if pts is None:
        raise CurveError("explicit curve does not intersect the domain")
    return pts[0][0], pts[-1][0]


def sample_curve(spec: CurveSpec, ctx: TransformContext, n: int = DEFAULT_SAMPLES) -> list[tuple[float, float]]:
    """``n`` points of the adiabat inside the context's domain, ordered along the curve."""
    if n < 4:
        raise CurveError(f"need at least 4 samples, got {n}")
    domain = ctx.domain
    if spec.kind == "points":
        pts = sorted(spec.points)
        xs = [p[0] for p in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise CurveError("point list x-coordinates must be strictly monotone")
        for x, y in pts:
            if not domain.contains(x, y):
                raise DomainError(f"curve point ({x}, {y}) outside the domain")
        return pts
    if spec.kind == "explicit":
        if spec.x_range is None:
            xa, xb = _explicit_extent(spec.expr, domain, n)
        else:
            xa, xb = spec.x_range
        pts = []
        for x in np.linspace(xa, xb, n):
            try:
                y = spec.expr(float(x))
            except EvaluationError as exc:
                raise CurveError(f"explicit curve not evaluable at x = {x!r}: {exc}") from None
            if not domain.contains(float(x), y):
                raise DomainError(f"curve point ({x}, {y}) outside the domain")
            pts.append((float(x), y))
        return pts
    if spec.kind == "implicit":
        for axis in ("x", "y"):
            pts = _Tracer(spec.expr, domain, axis).trace(n)
            if pts is not None:
                return pts
        raise CurveError(f"curve {spec.expr} = 0 does not intersect the domain")
    raise CurveError(f"unknown curve kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# graph of the transformed adiabat


def build_graph(pts: Sequence[tuple[float, float]], ctx: TransformContext) -> GraphFunction:
    """Map curve samples into the straightened plane and fit ``Yt = F(Xt)``."""
    if len(pts) < 4:
        raise GraphError(f"need at least 4 curve points, got {len(pts)}")
    tilde = []
    for x, y in pts:
        p = ctx.forward_tilde(x, y)
        if tilde and p == tilde[-1]:
            continue
        tilde.append(p)
    Xs = np.array([p.X for p in tilde])
    Ys = np.array([p.Y for p in tilde])
    span = float(np.ptp(Xs)) if len(Xs) else 0.0
    tol = 1e-12 * max(span, np.max(np.abs(Xs)) if len(Xs) else 1.0)
    order = np.argsort(Xs, kind="stable")
    Xs, Ys = Xs[order], Ys[order]
    keep = [0]
    for i in range(1, len(Xs)):
        if Xs[i] - Xs[keep[-1]] <= tol:
            if abs(Ys[i] - Ys[keep[-1]]) > 1e-9 * max(1.0, abs(Ys[i])):
                raise GraphError(
                    f"adiabat meets the isotherm X = {Xs[i]!r} twice; it is not a graph over temperature"
                )
            continue
        keep.append(i)
    Xs, Ys = Xs[keep], Ys[keep]
    if len(Xs) < 4:
        raise GraphError(f"fewer than 4 distinct temperatures on the adiabat ({len(Xs)})")
    # along the curve, temperature must be monotone, otherwise two branches interleave
    along = np.array([p.X for p in tilde])
    steps = np.diff(along)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise GraphError("temperature is not monotone along the adiabat; it is not a graph over temperature")
    return GraphFunction.fit(Xs, Ys)


# ---------------------------------------------------------------------------
# entropy


@dataclass(frozen=True, eq=False)
class EntropyField:
    """``S(x, y) = sign * (Yt - F(Xt))``; zero on the input adiabat by construction.

    ``sign`` is the Jacobian sign of the straightening, so the map
    ``(x, y) -> (T, S)`` is always orientation preserving.
    """

    ctx: TransformContext
    F: GraphFunction
    mode: str = "calibrated"
    gauge: str = "S = 0 on the input adiabat"

    @property
    def domain(self) -> Domain:
        return self.ctx.domain

    @property
    def valid_band(self) -> tuple[float, float]:
        return self.F.lo, self.F.hi

    def __call__(self, x: float, y: float) -> float:
        X, _ = self.ctx.forward_XY(x, y)
        if not self.F.contains(X):
            # refuse before paying for the quadrature
            raise OutOfRangeError(f"temperature {X!r} outside the valid band [{self.F.lo!r}, {self.F.hi!r}]")
        p = self.ctx.forward_tilde(x, y)
        return self.ctx.jacobian_sign * (p.Y - self.F(p.X))

    def from_tilde(self, Xt: float, Yt: float) -> float:
        return self.ctx.jacobian_sign * (Yt - self.F(Xt))


def entropy_at(field: EntropyField, x: float, y: float) -> float:
    return field(x, y)


def reconstruct(ctx: TransformContext, adiabat: CurveSpec, n: int = DEFAULT_SAMPLES) -> EntropyField:
    """Sample the adiabat, straighten it, fit its graph and wrap the entropy field."""
    return EntropyField(ctx, build_graph(sample_curve(adiabat, ctx, n), ctx))


def evaluate_grid(
    fn: Callable[[float, float], float], domain: Domain, nx: int, ny: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``fn`` on an ``nx x ny`` grid; failed evaluations are NaN (masked)."""
    xs, ys = domain.grid(nx, ny)
    vals = np.full((nx, ny), np.nan)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            try:
                vals[i, j] = fn(float(x), float(y))
            except (AdiabatError, EvaluationError):
                pass
    return xs, ys, vals


def _try(fn, x: float, y: float) -> float | None:
    try:
        v = fn(x, y)
    except (AdiabatError, EvaluationError):
        return None
    return v if math.isfinite(v) else None


def mask_cuts(
    fn: Callable[[float, float], float], xs: np.ndarray, ys: np.ndarray, vals: np.ndarray, steps: int = 12
) -> dict:
    """Last evaluable point on every grid edge with exactly one masked end.

    Bisection from the finite end locates where evaluation starts failing to
    ``2**-steps`` of the edge; every returned value is a genuine evaluation.
    """
    cuts = {}
    nx, ny = vals.shape
    ok = np.isfinite(vals)
    for kind, di, dj in (("h", 1, 0), ("v", 0, 1)):
        for a in range(nx - di):
            for b in range(ny - dj):
                if ok[a, b] == ok[a + di, b + dj]:
                    continue
                (p, q) = ((a, b), (a + di, b + dj)) if ok[a, b] else ((a + di, b + dj), (a, b))
                x0, y0 = float(xs[p[0]]), float(ys[p[1]])
                x1, y1 = float(xs[q[0]]), float(ys[q[1]])
                lo, hi, best = 0.0, 1.0, float(vals[p])
                for _ in range(steps):
                    mid = 0.5 * (lo + hi)
                    v = _try(fn, x0 + mid * (x1 - x0), y0 + mid * (y1 - y0))
                    if v is None:
                        hi = mid
                    else:
                        lo, best = mid, v
                if lo > 0:
                    cuts[(kind, a, b)] = ((x0 + lo * (x1 - x0), y0 + lo * (y1 - y0)), best)
    return cuts


def level_curves(
    field: Callable[[float, float], float],
    levels: Sequence[float],
    grid: tuple[int, int] = (64, 64),
    domain: Domain | None = None,
    values: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None,
    refine_mask: bool = True,
) -> dict[float, list[np.ndarray]]:
    """Marching-squares polylines for each level; levels outside the range give ``[]``.

    With ``refine_mask`` the edge of the evaluable region is located on grid
    edges, so contours run up to it instead of stopping a cell short.
    """
    nx, ny = grid
    if nx < 16 or ny < 16:
        raise ValueError("grid must be at least 16 x 16")
    if any(not math.isfinite(lv) for lv in levels):
        raise ValueError("levels must be finite")
    if values is None:
        domain = domain or field.domain
        values = evaluate_grid(field, domain, nx, ny)
    xs, ys, vals = values
    cuts = mask_cuts(field, xs, ys, vals) if refine_mask else None
    return {float(lv): marching_squares(xs, ys, vals, lv, cuts) for lv in levels}
