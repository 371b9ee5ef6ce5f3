"""Scalar numerical kernels: adaptive Simpson quadrature and bracketed roots."""

from __future__ import annotations

import math
from typing import Callable

from scipy.optimize import brentq

from .errors import QuadratureError, RootError

__all__ = ["QuadratureError", "RootError", "adaptive_simpson", "find_root", "sign_changes"]


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_depth: int = 40,
) -> float:
    """Integrate ``f`` over ``[a, b]`` by adaptive Simpson with Richardson correction.

    ``tol`` is used as both absolute and relative tolerance: a panel is
    accepted when ``|S2 - S1| <= 15 * max(tol_panel, tol * |S2|)``.
    Raises :class:`QuadratureError` if ``max_depth`` is reached first.
    """
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_simpson(f, b, a, tol, max_depth)
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    # explicit stack keeps deep refinement off the Python recursion limit
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        both = left + right
        delta = both - s
        if abs(delta) <= 15.0 * max(eps, tol * abs(both)) or (depth > 4 and lm == lo):
            total += both + delta / 15.0
            continue
        if depth >= max_depth:
            raise QuadratureError(f"tolerance {tol:g} not reached on [{lo}, {hi}] at depth {max_depth}")
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    return total


def find_root(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 1e-14,
    glo: float | None = None,
    ghi: float | None = None,
) -> float:
    """Root of ``g`` inside a sign-changing bracket (Brent's method)."""
    glo = g(lo) if glo is None else glo
    ghi = g(hi) if ghi is None else ghi
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if math.copysign(1.0, glo) == math.copysign(1.0, ghi):
        raise RootError(f"no sign change on [{lo}, {hi}]")
    return brentq(g, lo, hi, xtol=xtol, rtol=8.9e-16, maxiter=200)


def sign_changes(values) -> list[int]:
    """Indices ``i`` whose interval ``[i, i+1]`` holds a root of the sampled values.

    Exact zeros count once, attached to the interval on their left when one exists.
    """
    n = len(values)
    out: list[int] = []
    for i in range(n - 1):
        a, b = values[i], values[i + 1]
        if a * b < 0:
            out.append(i)
        elif b == 0.0 or (a == 0.0 and i == 0):
            if not out or out[-1] != i - 1 or values[i] != 0.0:
                out.append(i)
    return out
