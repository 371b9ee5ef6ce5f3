import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adiabat import CurveSpec, Domain, TransformContext, parse, reconstruct, reconstruct_uncalibrated
from adiabat.calibrated import evaluate_grid, level_curves, sample_curve
from adiabat.errors import CrossingError, GraphError, OutOfRangeError
from adiabat.oracles import hausdorff, ideal_gas_entropy, load_fixture
from adiabat.uncalibrated import normalized_entropy_at, recalibrated_temperature_at

from conftest import GAMMA, UNIT

WIDE = Domain(0.25, 4.0, 0.25, 4.0)
A0 = CurveSpec.implicit(parse("x*y^(5/3) - 1"))
A1 = CurveSpec.implicit(parse("x*y^(5/3) - exp(1)"))


def _run(name):
    fx = load_fixture(name)
    return reconstruct_uncalibrated(fx.config.build_context(), *fx.adiabats)


@pytest.fixture(scope="module")
def ideal_res():
    return _run("ideal_gas_two_adiabats")


@pytest.fixture(scope="module")
def x2y2_res():
    return _run("miscalibrated_x2y2")


def _band_points(res, n, seed):
    lo, hi = res.band
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        x, y = WIDE.random_points(1, rng, 0.02)[0]
        if lo + 0.02 * (hi - lo) < res.ctx.f(x, y) < hi - 0.02 * (hi - lo):
            out.append((float(x), float(y)))
    return out


def _correlation(res, n=20):
    xs, ys = res.ctx.domain.grid(n, n)
    T, P = [], []
    for x in xs:
        for y in ys:
            try:
                T.append(res.temperature(float(x), float(y)))
            except OutOfRangeError:
                continue
            P.append(x * y)
    return float(np.corrcoef(T, P)[0, 1]), len(T)


class TestNormalizedEntropy:
    @pytest.mark.parametrize("which", ["ideal", "x2y2"])
    def test_zero_and_one_on_adiabats(self, ideal_res, x2y2_res, which):
        res = ideal_res if which == "ideal" else x2y2_res
        lo, hi = res.band
        for spec, target in ((A0, 0.0), (A1, 1.0)):
            for x, y in sample_curve(spec, res.ctx, 65):
                if lo <= res.ctx.f(x, y) <= hi:
                    assert normalized_entropy_at(res, x, y) == pytest.approx(target, abs=1e-7)

    def test_ideal_gas_is_scaled_entropy(self, ideal_res):
        # the two adiabats sit at S = 0 and S = 3/2
        for x, y in _band_points(ideal_res, 30, 1):
            assert ideal_res.entropy(x, y) == pytest.approx(ideal_gas_entropy(GAMMA, x, y) / 1.5, abs=1e-7)

    def test_outside_band_refused(self, ideal_res):
        with pytest.raises(OutOfRangeError):
            ideal_res.entropy(0.3, 0.3)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.0, 1.0), st.floats(-3.0, 3.0), st.floats(0.01, 2.0))
    def test_monotone_relabeling(self, x2y2_res, s, Y, dY):
        lo, hi = x2y2_res.band
        X = lo + s * (hi - lo)
        f = x2y2_res.entropy.from_tilde
        assert f(X, Y + dY) != f(X, Y)
        assert np.sign(f(X, Y + dY) - f(X, Y)) == np.sign(x2y2_res.f1(X) - x2y2_res.f0(X))

    def test_midpoint_not_entropy_midpoint_claimed(self, x2y2_res):
        # the quotient is a relabeling: its level curves are adiabats, but its values are not
        # calibrated entropy, so only the family (not the spacing) is compared anywhere
        assert x2y2_res.entropy.gauge.startswith("0 on the first adiabat")


class TestRecalibration:
    def test_gap_exponent(self, x2y2_res):
        p, c = x2y2_res.fit_exponent()
        assert abs(p + 0.5) <= 1e-3
        assert c > 0

    def test_ideal_gap_constant(self, ideal_res):
        lo, hi = ideal_res.band
        gap = ideal_res.gap(np.linspace(lo, hi, 50))
        assert np.ptp(gap) <= 1e-6
        assert gap[0] == pytest.approx(1.5, abs=1e-6)

    @pytest.mark.parametrize("which", ["ideal", "x2y2"])
    def test_temperature_affine_in_xy(self, ideal_res, x2y2_res, which):
        r, count = _correlation(ideal_res if which == "ideal" else x2y2_res)
        assert count >= 20
        assert r >= 1 - 1e-6

    def test_x2y2_square_root(self, x2y2_res):
        # the gap ~ c X^-1/2 integrates to 2 c (sqrt(X) - sqrt(lo)) = 2 c (xy - sqrt(lo))
        p, c = x2y2_res.fit_exponent()
        lo, _ = x2y2_res.band
        for x, y in _band_points(x2y2_res, 10, 2):
            assert x2y2_res.temperature(x, y) == pytest.approx(2 * c * (x * y - math.sqrt(lo)), rel=1e-4, abs=1e-6)

    def test_phi_strictly_monotone(self, x2y2_res, ideal_res):
        for res in (x2y2_res, ideal_res):
            steps = np.diff(res.phi.ys)
            assert np.all(steps > 0) or np.all(steps < 0)

    def test_anchor(self, x2y2_res):
        lo, _ = x2y2_res.band
        x = 1.0
        y = math.sqrt(lo) / x  # f = x^2 y^2 = lo
        assert recalibrated_temperature_at(x2y2_res, x, y) == pytest.approx(0.0, abs=1e-12)
        assert x2y2_res.phi(lo) == 0.0

    def test_temperature_outside(self, x2y2_res):
        with pytest.raises(OutOfRangeError):
            x2y2_res.temperature(0.26, 0.26)


class TestErrors:
    def test_crossing_adiabats(self):
        ctx = TransformContext(parse("x*y"), UNIT, y_ref=1.0)
        with pytest.raises(CrossingError):
            reconstruct_uncalibrated(ctx, A0, CurveSpec.implicit(parse("y - 1")))

    def test_empty_overlap(self):
        ctx = TransformContext(parse("x*y"), UNIT, y_ref=1.0)
        with pytest.raises(GraphError, match="share no"):
            reconstruct_uncalibrated(ctx, A0, A1)


def test_two_modes_agree(ideal_res):
    """Level curves through the same points coincide for one- and two-adiabat reconstructions."""
    ctx = ideal_res.ctx
    single = reconstruct(ctx, A0)
    nx = ny = 40
    xs, ys, s_vals = evaluate_grid(single, WIDE, nx, ny)
    _, _, n_vals = evaluate_grid(ideal_res.entropy, WIDE, nx, ny)
    dead = ~(np.isfinite(s_vals) & np.isfinite(n_vals))
    s_vals[dead] = np.nan
    n_vals[dead] = np.nan
    cell = max(np.diff(xs).max(), np.diff(ys).max())
    for x, y in _band_points(ideal_res, 20, 5):
        ls, ln = single(x, y), ideal_res.entropy(x, y)
        cs = level_curves(single, [ls], (nx, ny), values=(xs, ys, s_vals), refine_mask=False)[ls]
        cn = level_curves(ideal_res.entropy, [ln], (nx, ny), values=(xs, ys, n_vals), refine_mask=False)[ln]
        if not cs and not cn:
            continue
        assert hausdorff(np.vstack(cs), np.vstack(cn)) <= 2 * cell
