"""Reconstruct ideal-gas entropy from T = xy and one adiabat; compare with the closed form.

    python3 scripts/ideal_gas_demo.py [--grid 30] [--out runs/ideal_gas]
"""

import argparse
import json
from pathlib import Path

import numpy as np

from adiabat import CurveSpec, Domain, TransformContext, parse, reconstruct
from adiabat.calibrated import evaluate_grid, level_curves
from adiabat.oracles import ideal_gas_entropy
from adiabat.svg import render_levels

GAMMA = 5.0 / 3.0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=30)
    ap.add_argument("--out", type=Path, default=Path("runs/ideal_gas"))
    args = ap.parse_args()

    ctx = TransformContext(parse("x*y"), Domain(0.5, 2.0, 0.5, 2.0), y_ref=1.0)
    field = reconstruct(ctx, CurveSpec.explicit(parse("x^(-0.6)")))
    xs, ys, S = evaluate_grid(field, ctx.domain, args.grid, args.grid)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    live = np.isfinite(S)
    ref = np.vectorize(lambda x, y: ideal_gas_entropy(GAMMA, x, y))(X[live], Y[live])
    diff = S[live] - ref

    summary = {
        "valid_band": field.valid_band,
        "evaluable_nodes": int(live.sum()),
        "nodes": int(S.size),
        "mean_offset": float(diff.mean()),
        "stddev_offset": float(diff.std()),
        "max_abs_offset": float(np.abs(diff).max()),
    }
    print(json.dumps(summary, indent=2))

    args.out.mkdir(parents=True, exist_ok=True)
    levels = [-0.8, -0.4, 0.0, 0.4, 0.8]
    curves = level_curves(field, levels, (args.grid, args.grid), values=(xs, ys, S))
    payload = [{"level": lv, "polylines": [pl.tolist() for pl in lines]} for lv, lines in curves.items()]
    (args.out / "levels.svg").write_text(render_levels(payload, (0.5, 2.0, 0.5, 2.0), title="ideal gas adiabats"))
    (args.out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")


if __name__ == "__main__":
    main()
