"""``adiabat`` command line: reconstruct, recalibrate, check, plot.

Exit codes: 0 success, 1 configuration error, 2 numerical failure or a
violated invariant.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .calibrated import evaluate_grid, level_curves, reconstruct
from .config import ConfigError, ModelConfig, load_config
from .errors import AdiabatError
from .expr import ExpressionError
from .svg import render_levels
from .uncalibrated import reconstruct_uncalibrated

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


def _num(v: float) -> str:
    # shortest round-trip decimal; masked cells are empty
    return "" if not np.isfinite(v) else repr(float(v))


def _write_grid(path: Path, xs, ys, vals, name: str) -> None:
    lines = [f"x,y,{name}"]
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            lines.append(f"{_num(x)},{_num(y)},{_num(vals[i, j])}")
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _levels_payload(curves: dict) -> list[dict]:
    return [
        {"level": lv, "polylines": [[[float(x), float(y)] for x, y in pl] for pl in lines]}
        for lv, lines in sorted(curves.items())
    ]


def _default_levels(vals: np.ndarray, anchors: list[float]) -> list[float]:
    finite = vals[np.isfinite(vals)]
    if finite.size == 0:
        return list(anchors)
    lo, hi = float(finite.min()), float(finite.max())
    inner = [float(v) for v in np.linspace(lo, hi, 9)[1:-1]]
    return sorted(set(anchors) | set(inner))


def _overrides(cfg: ModelConfig, args, tol_keys: tuple[str, ...]) -> ModelConfig:
    kw: dict = {}
    if getattr(args, "grid", None):
        try:
            nx, ny = (int(v) for v in args.grid.lower().split("x"))
        except ValueError:
            raise ConfigError(f"--grid expects NxM, got {args.grid!r}") from None
        kw["grid"] = (nx, ny)
    if getattr(args, "levels", None):
        try:
            kw["levels"] = [float(v) for v in args.levels.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"--levels expects comma-separated numbers, got {args.levels!r}") from None
    if getattr(args, "tol", None) is not None:
        kw["tolerances"] = {k: args.tol for k in tol_keys}
    return cfg.with_overrides(**kw)


def _report_base(cfg: ModelConfig, ctx, command: str, levels: list[float]) -> dict:
    # echo the effective configuration, with computed defaults filled in
    effective = replace(cfg, levels=levels, y_ref=ctx.anchor)
    return {
        "command": command,
        "version": __version__,
        "config": effective.to_dict(),
        "transform": ctx.describe(),
    }


def cmd_reconstruct(config: str | Path, out_dir: str | Path, args=None) -> int:
    cfg = _overrides(load_config(config), args, ("quad_tol",)) if args else load_config(config)
    if cfg.mode != "calibrated":
        raise ConfigError("reconstruct needs mode 'calibrated' with one adiabat; use recalibrate for two")
    curves = cfg.build_curves()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ctx = cfg.build_context()
    field = reconstruct(ctx, curves[0], cfg.samples)
    nx, ny = cfg.grid
    xs, ys, vals = evaluate_grid(field, ctx.domain, nx, ny)
    levels = [float(v) for v in cfg.levels] if cfg.levels is not None else _default_levels(vals, [0.0])
    curves_out = level_curves(field, levels, (nx, ny), values=(xs, ys, vals))
    _write_grid(out / "entropy_grid.csv", xs, ys, vals, "S")
    _write_json(out / "adiabats.json", {"quantity": "S", "domain": ctx.domain.as_dict(), "levels": _levels_payload(curves_out)})
    report = _report_base(cfg, ctx, "reconstruct", levels)
    lo, hi = field.valid_band
    report.update(
        {
            "valid_band": {"min": lo, "max": hi},
            "gauge": field.gauge,
            "mode": field.mode,
            "levels": levels,
            "masked_cells": int(np.sum(~np.isfinite(vals))),
            "adiabat_graph": field.F.to_dict(),
        }
    )
    _write_json(out / "report.json", report)
    print(f"valid temperature band [{lo!r}, {hi!r}]; wrote {out}")
    return EXIT_OK


def cmd_recalibrate(config: str | Path, out_dir: str | Path, args=None) -> int:
    cfg = _overrides(load_config(config), args, ("quad_tol",)) if args else load_config(config)
    if cfg.mode != "uncalibrated":
        raise ConfigError("recalibrate needs mode 'uncalibrated' with two adiabats")
    a0, a1 = cfg.build_curves()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ctx = cfg.build_context()
    res = reconstruct_uncalibrated(ctx, a0, a1, cfg.samples)
    nx, ny = cfg.grid
    xs, ys, vals = evaluate_grid(res.entropy, ctx.domain, nx, ny)
    _, _, temps = evaluate_grid(res.temperature, ctx.domain, nx, ny)
    levels = [float(v) for v in cfg.levels] if cfg.levels is not None else _default_levels(vals, [0.0, 0.5, 1.0])
    curves_out = level_curves(res.entropy, levels, (nx, ny), values=(xs, ys, vals))
    _write_grid(out / "entropy_grid.csv", xs, ys, vals, "S")
    _write_grid(out / "temperature_grid.csv", xs, ys, temps, "T")
    rows = ["X_tilde,phi"] + [f"{_num(x)},{_num(p)}" for x, p in zip(res.phi.xs, res.phi.ys)]
    (out / "recalibration.csv").write_text("\n".join(rows) + "\n")
    _write_json(out / "adiabats.json", {"quantity": "S_normalized", "domain": ctx.domain.as_dict(), "levels": _levels_payload(curves_out)})
    report = _report_base(cfg, ctx, "recalibrate", levels)
    lo, hi = res.band
    p, c = res.fit_exponent() if lo > 0 else (None, None)
    report.update(
        {
            "valid_band": {"min": lo, "max": hi},
            "gauge": res.entropy.gauge,
            "mode": res.entropy.mode,
            "levels": levels,
            "masked_cells": int(np.sum(~np.isfinite(vals))),
            "gap_power_law": {"exponent": p, "coefficient": c},
            "phi_anchor": "phi = 0 at the left end of the common band",
        }
    )
    _write_json(out / "report.json", report)
    print(f"common temperature band [{lo!r}, {hi!r}]; gap exponent {p!r}; wrote {out}")
    return EXIT_OK


def cmd_check(config: str | Path, args=None) -> int:
    cfg = load_config(config)
    if args is not None:
        cfg = _overrides(cfg, args, ("jacobian_tol", "roundtrip_tol"))
    rows: list[tuple[str, str, str, bool]] = []
    tol = cfg.tolerances

    def table():
        print(f"{'check':<24}{'value':>24}{'limit':>14}  status")
        for name, value, limit, ok in rows:
            print(f"{name:<24}{value:>24}{limit:>14}  {'ok' if ok else 'FAIL'}")

    try:
        ctx = cfg.build_context()
    except AdiabatError as exc:
        if isinstance(exc, ConfigError):
            raise
        rows.append(("f partial sign scan", "failed", "-", False))
        table()
        print(f"error [{exc.step}]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    rows.append(("f partial sign scan", "+1" if ctx.sign > 0 else "-1", "const", True))

    rng = np.random.default_rng(cfg.seed)
    h = 1e-4 * ctx.scale
    pts = ctx.domain.random_points(cfg.check_points, rng, margin=0.01)
    jac = max(abs(ctx.jacobian_det(x, y, h) - ctx.jacobian_sign) for x, y in pts)
    rows.append(("max |jacobian - sign|", f"{jac:.3e}", f"{tol.jacobian_tol:.1e}", jac <= tol.jacobian_tol))
    rt = 0.0
    for x, y in pts:
        bx, by = ctx.invert_tilde(ctx.forward_tilde(x, y))
        rt = max(rt, abs(bx - x), abs(by - y))
    rows.append(("max round-trip error", f"{rt:.3e}", f"{tol.roundtrip_tol:.1e}", rt <= tol.roundtrip_tol))
    table()
    failed = [r for r in rows if not r[3]]
    if failed:
        print(f"error [audit]: {failed[0][0]} = {failed[0][1]} exceeds {failed[0][2]}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_plot(out_dir: str | Path) -> int:
    out = Path(out_dir)
    src = out / "adiabats.json"
    if not src.exists():
        raise ConfigError(f"missing {src}")
    data = json.loads(src.read_text())
    dom = data.get("domain")
    if dom:
        bounds = (dom["x_min"], dom["x_max"], dom["y_min"], dom["y_max"])
    else:
        pts = [p for e in data["levels"] for pl in e["polylines"] for p in pl] or [[0, 0], [1, 1]]
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        bounds = (min(xs), max(xs), min(ys), max(ys))
    svg = render_levels(data["levels"], bounds, title=f"level curves of {data.get('quantity', 'S')}")
    (out / "adiabats.svg").write_text(svg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adiabat", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("reconstruct", "entropy and adiabats from the equation of state plus one adiabat"),
        ("recalibrate", "adiabats and recalibrated temperature from isotherms plus two adiabats"),
    ):
        s = sub.add_parser(name, help=help_)
        s.add_argument("config")
        s.add_argument("-o", "--out", required=True, help="output directory")
        s.add_argument("--tol", type=float, help="quadrature tolerance")
        s.add_argument("--grid", help="output grid as NxM")
        s.add_argument("--levels", help="comma-separated levels")
    s = sub.add_parser("check", help="audit area preservation and round trips")
    s.add_argument("config")
    s.add_argument("--tol", type=float, help="audit tolerance for Jacobian and round trip")
    s = sub.add_parser("plot", help="render adiabats.json in a directory to adiabats.svg")
    s.add_argument("dir")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "reconstruct":
            return cmd_reconstruct(args.config, args.out, args)
        if args.command == "recalibrate":
            return cmd_recalibrate(args.config, args.out, args)
        if args.command == "check":
            return cmd_check(args.config, args)
        return cmd_plot(args.dir)
    except (ConfigError, ExpressionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AdiabatError as exc:
        print(f"error [{exc.step}]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
