"""Recover the temperature scale from isotherms labelled T = x^2 y^2 and two adiabats.

Prints the fitted power law of the adiabat gap and the correlation of the
recalibrated temperature with xy, then tabulates phi against sqrt(X).

    python3 scripts/miscalibrated_recalibration.py [--grid 20]
"""

import argparse

import numpy as np

from adiabat import reconstruct_uncalibrated
from adiabat.errors import OutOfRangeError
from adiabat.oracles import load_fixture


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=20)
    ap.add_argument("--fixture", default="miscalibrated_x2y2")
    args = ap.parse_args()

    fx = load_fixture(args.fixture)
    res = reconstruct_uncalibrated(fx.config.build_context(), *fx.adiabats)
    lo, hi = res.band
    p, c = res.fit_exponent()
    print(f"common band [{lo:.6f}, {hi:.6f}]")
    print(f"gap f1 - f0 ~ {c:.6f} * X^{p:.7f}")

    xs, ys = res.ctx.domain.grid(args.grid, args.grid)
    T, P = [], []
    for x in xs:
        for y in ys:
            try:
                T.append(res.temperature(x, y))
            except OutOfRangeError:
                continue
            P.append(x * y)
    r = np.corrcoef(T, P)[0, 1]
    print(f"corr(T*, xy) = 1 - {1 - r:.2e} over {len(T)} in-band nodes")

    print(f"{'X':>10} {'phi':>12} {'2c(sqrt X - sqrt lo)':>22}")
    for X in np.linspace(lo, hi, 7):
        print(f"{X:10.5f} {res.phi(X):12.8f} {2 * c * (np.sqrt(X) - np.sqrt(lo)):22.8f}")


if __name__ == "__main__":
    main()
