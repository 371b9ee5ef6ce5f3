import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from adiabat.errors import QuadratureError, RootError
from adiabat.numerics import adaptive_simpson, find_root, sign_changes


@pytest.mark.parametrize(
    "f, a, b, exact",
    [
        (lambda t: 1.0 / t, 1.0, 2.0, math.log(2.0)),
        (math.exp, 0.0, 1.0, math.e - 1.0),
        (lambda t: t**3 - t, -1.0, 3.0, 16.0),
        (math.sin, 0.0, math.pi, 2.0),
        (lambda t: 1.0 / (1.0 + t * t), 0.0, 10.0, math.atan(10.0)),
    ],
)
def test_simpson_closed_forms(f, a, b, exact):
    assert adaptive_simpson(f, a, b, tol=1e-10) == pytest.approx(exact, abs=1e-10)


def test_simpson_orientation_and_empty():
    assert adaptive_simpson(math.exp, 1.0, 0.0) == pytest.approx(1.0 - math.e, abs=1e-10)
    assert adaptive_simpson(math.exp, 2.0, 2.0) == 0.0


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.1, 3.0), st.floats(-2.0, 2.0))
def test_simpson_agrees_with_quadpack(a, b, c):
    def f(t):
        return math.exp(c * t) / (1.0 + t)

    ref, _ = quad(f, a, b, epsabs=1e-13, epsrel=1e-13)
    assert adaptive_simpson(f, a, b, tol=1e-11) == pytest.approx(ref, abs=1e-9 * (1 + abs(ref)))


def test_simpson_depth_limit():
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda t: 1.0 if t > 0.3 else 0.0, 0.0, 1.0, tol=1e-14, max_depth=5)


def test_find_root():
    r = find_root(lambda t: t * t - 2.0, 0.0, 2.0)
    assert r == pytest.approx(math.sqrt(2.0), abs=1e-14)
    with pytest.raises(RootError):
        find_root(lambda t: t * t + 1.0, -1.0, 1.0)


def test_find_root_endpoint():
    assert find_root(lambda t: t - 1.0, 1.0, 2.0) == 1.0


@pytest.mark.parametrize(
    "values, expected",
    [
        ([1, 2, 3], []),
        ([1, -1, 2], [0, 1]),
        ([0, 1, 2], [0]),
        ([1, 0, 1], [0]),
        ([1, 2, 0], [1]),
    ],
)
def test_sign_changes(values, expected):
    assert sign_changes(values) == expected
