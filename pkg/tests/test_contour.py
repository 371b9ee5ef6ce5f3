import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adiabat.contour import marching_squares
from adiabat.oracles import densify


def _grid(n=21):
    xs = np.linspace(-1, 1, n)
    ys = np.linspace(-1, 1, n)
    return xs, ys, np.meshgrid(xs, ys, indexing="ij")


def test_plane_gives_straight_line():
    xs, ys, (X, Y) = _grid()
    lines = marching_squares(xs, ys, X + 2 * Y, 0.3)
    assert len(lines) == 1
    x, y = lines[0].T
    assert np.max(np.abs(x + 2 * y - 0.3)) <= 1e-12


def test_circle_closed():
    xs, ys, (X, Y) = _grid(41)
    lines = marching_squares(xs, ys, X**2 + Y**2, 0.25)
    assert len(lines) == 1
    loop = lines[0]
    assert np.array_equal(loop[0], loop[-1])
    assert np.max(np.abs(np.hypot(*loop.T) - 0.5)) <= 5e-3


def test_level_out_of_range():
    xs, ys, (X, Y) = _grid()
    assert marching_squares(xs, ys, X, 5.0) == []


def test_masked_cells_skipped_without_cuts():
    xs, ys, (X, Y) = _grid()
    vals = X + Y
    vals[:, 15:] = np.nan
    for line in marching_squares(xs, ys, vals, 0.0):
        assert np.all(line[:, 1] <= ys[15] + 1e-12)


def test_cuts_extend_to_mask_boundary():
    # field defined only for y <= 0.33; the mask boundary sits inside a grid row
    xs, ys, (X, Y) = _grid()
    vals = np.where(Y <= 0.33, X - Y, np.nan)
    cuts = {}
    j = np.searchsorted(ys, 0.33) - 1
    for a in range(len(xs)):
        cuts[("v", a, j)] = ((xs[a], 0.33), xs[a] - 0.33)
    plain = np.vstack(marching_squares(xs, ys, vals, 0.0))
    refined = np.vstack(marching_squares(xs, ys, vals, 0.0, cuts))
    assert plain[:, 1].max() <= ys[j] + 1e-12
    assert refined[:, 1].max() == pytest.approx(0.33, abs=1e-12)
    assert np.max(np.abs(refined[:, 0] - refined[:, 1])) <= 1e-12


def test_single_masked_corner_uses_triangle():
    xs, ys, (X, Y) = _grid(5)
    vals = X.copy()
    vals[3, 3] = np.nan
    lines = marching_squares(xs, ys, vals, 0.0)
    pts = np.vstack(lines)
    assert np.all(np.abs(pts[:, 0]) <= 1e-12)
    assert pts[:, 1].min() == -1 and pts[:, 1].max() == 1


def test_densify():
    pl = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    d = densify(pl, 0.1)
    assert np.max(np.hypot(*np.diff(d, axis=0).T)) <= 0.1 + 1e-12
    assert np.array_equal(d[0], pl[0]) and np.array_equal(d[-1], pl[-1])


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-0.8, 0.8))
def test_contour_points_interpolate_level(a, b, level):
    """Every contour vertex of a bilinear-free (affine) field lies exactly on the level."""
    xs, ys, (X, Y) = _grid(17)
    vals = a * X + b * Y
    for line in marching_squares(xs, ys, vals, level):
        assert np.allclose(a * line[:, 0] + b * line[:, 1], level, atol=1e-9)
