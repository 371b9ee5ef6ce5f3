"""One test per acceptance criterion, each printing a PASS/FAIL line."""

import math

import numpy as np
import pytest

from adiabat import parse, reconstruct, reconstruct_uncalibrated
from adiabat.calibrated import evaluate_grid, level_curves, sample_curve
from adiabat.cli import main
from adiabat.errors import OutOfRangeError
from adiabat.oracles import adiabat_ode_trace, densify, gradient_parallelism, hausdorff, ideal_gas_entropy, load_fixture

from conftest import FIXTURES, GAMMA, valid_points

STRAIGHTENING = ("ideal_gas", "x2y2", "phi_gas")
SHIPPED = sorted(p.stem for p in FIXTURES.glob("*.json"))
GOOD = [n for n in SHIPPED if not n.startswith("broken")]


def _contexts(names):
    return {n: load_fixture(n).config.build_context() for n in names}


def test_1_ideal_gas_oracle(ideal_field, verdict):
    xs, ys, vals = evaluate_grid(ideal_field, ideal_field.domain, 30, 30)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    live = np.isfinite(vals)
    diff = vals[live] - 1.5 * np.log(X[live] * Y[live] ** GAMMA)
    sd = float(np.std(diff))
    assert verdict(
        "1 ideal-gas entropy vs closed form, stddev of difference",
        f"{sd:.3e} over {live.sum()} evaluable nodes of 30x30",
        "1e-6",
        sd <= 1e-6 and live.sum() >= 200,
    )


def test_2_area_preservation(verdict):
    worst = {}
    for name, ctx in _contexts(STRAIGHTENING).items():
        h = 1e-4 * ctx.scale
        pts = ctx.domain.random_points(100, np.random.default_rng(2024), margin=0.01)
        worst[name] = max(abs(ctx.jacobian_det(x, y, h) - 1.0) for x, y in pts)
    top = max(worst.values())
    assert verdict(
        "2 area preservation, max |det - 1| at 100 points per fixture",
        ", ".join(f"{k} {v:.2e}" for k, v in worst.items()),
        "1e-5",
        top <= 1e-5,
    )


def test_3_round_trip(verdict):
    worst = {}
    for name, ctx in _contexts(GOOD).items():
        pts = ctx.domain.random_points(200, np.random.default_rng(7))
        err = 0.0
        for x, y in pts:
            bx, by = ctx.invert_tilde(ctx.forward_tilde(x, y))
            err = max(err, abs(bx - x), abs(by - y))
        worst[name] = err
    assert verdict(
        "3 round trip, max coordinate error at 200 points per fixture",
        ", ".join(f"{k} {v:.1e}" for k, v in worst.items()),
        "1e-7",
        max(worst.values()) <= 1e-7,
    )


def test_4_gauge(verdict):
    worst = {}
    for name in STRAIGHTENING:
        fx = load_fixture(name)
        ctx = fx.config.build_context()
        field = reconstruct(ctx, fx.adiabats[0])
        pts = sample_curve(fx.adiabats[0], ctx, 129)
        worst[name] = max(abs(field(x, y)) for x, y in pts)
    assert verdict(
        "4 gauge, max |S| on 129 input-adiabat samples",
        ", ".join(f"{k} {v:.1e}" for k, v in worst.items()),
        "1e-7",
        max(worst.values()) <= 1e-7,
    )


def test_5_feynman_gas(feynman, feynman_field, verdict):
    s = parse("x*y^(1 + 1/(1 + x*y))")
    pts = valid_points(feynman_field, 50, seed=50)
    par = gradient_parallelism(feynman_field, lambda x, y: s(x, y), pts, h=1e-4 * feynman.domain.scale)
    ok_par = verdict("5a Feynman gas gradient parallelism at 50 points", f"{par:.3e}", "1e-5", par <= 1e-5)

    xs, ys, vals = evaluate_grid(feynman_field, feynman.domain, 60, 60)
    cell = max(np.diff(xs).max(), np.diff(ys).max())
    lines = level_curves(feynman_field, [0.0], (60, 60), values=(xs, ys, vals))[0.0]
    contour = np.vstack([densify(pl, 0.05 * cell) for pl in lines])
    trace = np.vstack(
        [
            adiabat_ode_trace(feynman, (1.0, 1.0), -10.0, clip=True)[::-1],
            adiabat_ode_trace(feynman, (1.0, 1.0), 10.0, clip=True),
        ]
    )
    dist = hausdorff(contour, trace) / cell
    ok_h = verdict(
        "5b Feynman gas ODE trace vs level-0 contour, Hausdorff in cells (60x60)",
        f"{dist:.4f} over {len(lines)} polyline(s)",
        "2",
        dist <= 2.0,
    )
    assert ok_par and ok_h


def test_6_uncalibrated(verdict):
    fx = load_fixture("miscalibrated_x2y2")
    res = reconstruct_uncalibrated(fx.config.build_context(), *fx.adiabats)
    p, _ = res.fit_exponent()
    ok_p = verdict("6a gap power-law exponent", f"{p:.7f}", "-0.5 +- 1e-3", abs(p + 0.5) <= 1e-3)
    xs, ys = res.ctx.domain.grid(20, 20)
    T, P = [], []
    for x in xs:
        for y in ys:
            try:
                T.append(res.temperature(float(x), float(y)))
            except OutOfRangeError:
                continue
            P.append(x * y)
    r = float(np.corrcoef(T, P)[0, 1])
    ok_r = verdict(
        "6b Pearson correlation of recalibrated T with xy",
        f"1 - {1 - r:.1e} over {len(T)} in-band nodes of 20x20",
        ">= 1 - 1e-6",
        r >= 1 - 1e-6 and len(T) >= 20,
    )
    assert ok_p and ok_r


@pytest.mark.parametrize("which", ["ideal_gas", "phi_gas"])
def test_7_maxwell(which, ideal_field, feynman_field, verdict):
    field = ideal_field if which == "ideal_gas" else feynman_field
    f = field.ctx.f
    h = 1e-4 * field.ctx.scale
    worst = 0.0
    for x, y in valid_points(field, 100, seed=77):
        Tx = (f(x + h, y) - f(x - h, y)) / (2 * h)
        Ty = (f(x, y + h) - f(x, y - h)) / (2 * h)
        Sx = (field(x + h, y) - field(x - h, y)) / (2 * h)
        Sy = (field(x, y + h) - field(x, y - h)) / (2 * h)
        worst = max(worst, abs(Tx * Sy - Ty * Sx - 1.0))
    assert verdict(f"7 Maxwell determinant, {which}, max |det - 1| at 100 points", f"{worst:.2e}", "1e-4", worst <= 1e-4)


def test_8_cli(tmp_path, verdict, capsys):
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["reconstruct", str(FIXTURES / "ideal_gas.json"), "-o", str(out)]) == 0
        outs.append(out)
    names = ("entropy_grid.csv", "adiabats.json", "report.json")
    same = all((outs[0] / n).read_bytes() == (outs[1] / n).read_bytes() for n in names)
    codes = {n: main(["check", str(FIXTURES / f"{n}.json")]) for n in SHIPPED}
    capsys.readouterr()
    want = {n: (2 if n.startswith("broken") else 0) for n in SHIPPED}
    ok_d = verdict("8a reconstruct twice, byte-identical outputs", str(same), "True", same)
    ok_c = verdict("8b check exit codes", str(codes), str(want), codes == want)
    assert ok_d and ok_c
