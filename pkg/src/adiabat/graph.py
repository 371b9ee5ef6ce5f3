"""Shape-preserving cubic interpolant over a bounded range.

Node slopes come from the quartic through each node and its four nearest
neighbours, then pass through Hyman's monotonicity filter, so the cubic is
fourth-order accurate on smooth data and never overshoots its breakpoints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraphError, OutOfRangeError

__all__ = ["GraphFunction", "monotone_slopes"]


def _stencil_slopes(xs: np.ndarray, ys: np.ndarray, width: int = 5) -> np.ndarray:
    """Derivative at each node of the polynomial through ``width`` neighbouring nodes."""
    n = len(xs)
    width = min(width, n)
    d = np.empty(n)
    for i in range(n):
        j0 = min(max(i - width // 2, 0), n - width)
        idx = range(j0, j0 + width)
        xi = xs[i]
        total = 0.0
        for k in idx:
            if k == i:
                w = sum(1.0 / (xi - xs[m]) for m in idx if m != i)
            else:
                num = np.prod([xi - xs[m] for m in idx if m not in (k, i)])
                den = np.prod([xs[k] - xs[m] for m in idx if m != k])
                w = num / den
            total += w * ys[k]
        d[i] = total
    return d


def monotone_slopes(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    h = np.diff(xs)
    delta = np.diff(ys) / h
    n = len(xs)
    if n == 2:
        return np.full(2, delta[0])
    d = _stencil_slopes(xs, ys)

    # Hyman filter: zero slope at local extrema, else clip into the
    # Fritsch-Carlson region |d| <= 3 min(|delta_left|, |delta_right|)
    for i in range(n):
        left = delta[i - 1] if i > 0 else delta[0]
        right = delta[i] if i < n - 1 else delta[-1]
        if left * right <= 0.0:
            d[i] = 0.0
            continue
        s = np.sign(right)
        bound = 3.0 * min(abs(left), abs(right))
        d[i] = s * min(max(0.0, s * d[i]), bound)
    return d


@dataclass(frozen=True, eq=False)
class GraphFunction:
    """Monotone-cubic interpolant ``Y = F(X)`` valid on ``[lo, hi]`` only."""

    xs: np.ndarray
    ys: np.ndarray
    slopes: np.ndarray

    @classmethod
    def fit(cls, xs, ys) -> "GraphFunction":
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.shape != ys.shape or xs.ndim != 1:
            raise GraphError("breakpoints and values must be 1-D arrays of equal length")
        if len(xs) < 2:
            raise GraphError("need at least two breakpoints")
        if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(ys)):
            raise GraphError("non-finite breakpoint data")
        if np.any(np.diff(xs) <= 0):
            raise GraphError("breakpoints must be strictly increasing")
        xs.flags.writeable = False
        ys.flags.writeable = False
        slopes = monotone_slopes(xs, ys)
        slopes.flags.writeable = False
        return cls(xs, ys, slopes)

    @property
    def lo(self) -> float:
        return float(self.xs[0])

    @property
    def hi(self) -> float:
        return float(self.xs[-1])

    def contains(self, X: float) -> bool:
        return self.lo <= X <= self.hi

    def __call__(self, X: float) -> float:
        if not (self.lo <= X <= self.hi):
            raise OutOfRangeError(f"{X!r} outside valid range [{self.lo!r}, {self.hi!r}]")
        return float(self._eval(np.asarray([X], dtype=float))[0])

    def derivative(self, X: float) -> float:
        if not (self.lo <= X <= self.hi):
            raise OutOfRangeError(f"{X!r} outside valid range [{self.lo!r}, {self.hi!r}]")
        return float(self._eval(np.asarray([X], dtype=float), deriv=True)[0])

    def values(self, X) -> np.ndarray:
        """Vectorized evaluation; entries outside the range come back as NaN."""
        X = np.asarray(X, dtype=float)
        out = np.full(X.shape, np.nan)
        ok = (X >= self.lo) & (X <= self.hi)
        out[ok] = self._eval(X[ok])
        return out

    def _eval(self, X: np.ndarray, deriv: bool = False) -> np.ndarray:
        xs, ys, d = self.xs, self.ys, self.slopes
        i = np.clip(np.searchsorted(xs, X, side="right") - 1, 0, len(xs) - 2)
        h = xs[i + 1] - xs[i]
        s = (X - xs[i]) / h
        y0, y1, d0, d1 = ys[i], ys[i + 1], d[i] * h, d[i + 1] * h
        if deriv:
            return (
                (6 * s**2 - 6 * s) * y0
                + (3 * s**2 - 4 * s + 1) * d0
                + (-6 * s**2 + 6 * s) * y1
                + (3 * s**2 - 2 * s) * d1
            ) / h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s**2 * (3 - 2 * s)
        h11 = s**2 * (s - 1)
        return h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1

    def to_dict(self) -> dict:
        return {"x": self.xs.tolist(), "y": self.ys.tolist()}
