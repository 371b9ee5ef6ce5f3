"""Temperature-dependent adiabatic index: reconstruct S for T = phi(xy) and audit it.

Compares the reconstructed level family with s = x y^g(xy), g(t) = 1 + 1/(1 + t),
through gradient parallelism and an independently integrated level curve.

    python3 scripts/feynman_gas.py [--points 50] [--grid 60]
"""

import argparse

import numpy as np

from adiabat import reconstruct
from adiabat.calibrated import evaluate_grid, level_curves
from adiabat.oracles import adiabat_ode_trace, densify, gradient_parallelism, hausdorff, load_fixture


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=50)
    ap.add_argument("--grid", type=int, default=60)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    fx = load_fixture("phi_gas")
    ctx = fx.config.build_context()
    field = reconstruct(ctx, fx.adiabats[0])
    lo, hi = field.valid_band
    print(f"valid temperature band [{lo:.6f}, {hi:.6f}]")

    rng = np.random.default_rng(args.seed)
    pts = []
    while len(pts) < args.points:
        x, y = fx.domain.random_points(1, rng, 0.02)[0]
        if lo < ctx.f(x, y) < hi:
            pts.append((x, y))
    par = gradient_parallelism(field, fx.entropy, pts, h=1e-4 * ctx.scale)
    print(f"max normalized gradient cross product over {len(pts)} points: {par:.3e}")

    xs, ys, S = evaluate_grid(field, fx.domain, args.grid, args.grid)
    cell = max(np.diff(xs).max(), np.diff(ys).max())
    for start in [(1.0, 1.0), (1.3, 0.9), (0.8, 1.4)]:
        level = field(*start)
        lines = level_curves(field, [level], (args.grid, args.grid), values=(xs, ys, S))[level]
        contour = np.vstack([densify(pl, 0.05 * cell) for pl in lines])
        trace = np.vstack(
            [adiabat_ode_trace(fx, start, -10.0, clip=True)[::-1], adiabat_ode_trace(fx, start, 10.0, clip=True)]
        )
        # the closed-form family extends past the valid band; keep the part the field covers
        T = np.array([ctx.f(x, y) for x, y in trace])
        trace = trace[(T >= lo) & (T <= hi)]
        print(f"level {level:+.5f} through {start}: Hausdorff {hausdorff(contour, trace) / cell:.4f} cells")


if __name__ == "__main__":
    main()
