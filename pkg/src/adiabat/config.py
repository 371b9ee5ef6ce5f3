"""Model configuration: one JSON document per experiment."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

from .calibrated import DEFAULT_SAMPLES, CurveSpec
from .errors import AdiabatError, CurveError
from .expr import ExpressionError, ScalarFunction1D, function_from_text, parse
from .transform import Domain, TransformContext

__all__ = ["ConfigError", "ModelConfig", "Tolerances", "load_config"]

MODES = ("calibrated", "uncalibrated")


class ConfigError(AdiabatError, ValueError):
    step = "config"


@dataclass(frozen=True)
class Tolerances:
    root_tol: float = 1e-12
    quad_tol: float = 1e-10
    jacobian_tol: float = 1e-5
    roundtrip_tol: float = 1e-7


@dataclass(frozen=True)
class ModelConfig:
    f: str
    domain: dict
    adiabats: list
    mode: str = "calibrated"
    name: str = "model"
    description: str = ""
    functions: dict = field(default_factory=dict)
    orientation: str = "y-solve"
    y_ref: float | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    samples: int = DEFAULT_SAMPLES
    grid: tuple[int, int] = (41, 41)
    levels: list | None = None
    check_points: int = 40
    seed: int = 0
    oracle: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("f", "domain", "adiabats"):
            if key not in data:
                raise ConfigError(f"missing required key {key!r}")
        data = dict(data)
        tol = data.get("tolerances", {})
        try:
            data["tolerances"] = Tolerances(**{k: float(v) for k, v in tol.items()})
        except TypeError as exc:
            raise ConfigError(f"bad tolerances: {exc}") from None
        if "grid" in data:
            data["grid"] = tuple(int(g) for g in data["grid"])
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        want = 1 if self.mode == "calibrated" else 2
        if len(self.adiabats) != want:
            raise ConfigError(f"mode {self.mode!r} needs exactly {want} adiabat(s), got {len(self.adiabats)}")
        if len(self.grid) != 2 or min(self.grid) < 16:
            raise ConfigError("grid must be two counts, each at least 16")
        if self.samples < 4:
            raise ConfigError("samples must be at least 4")
        if self.levels is not None and not all(math.isfinite(float(v)) for v in self.levels):
            raise ConfigError("levels must be finite numbers")
        for key in ("x_min", "x_max", "y_min", "y_max"):
            if key not in self.domain:
                raise ConfigError(f"domain is missing {key!r}")
        d = self.domain
        if not (d["x_max"] > d["x_min"] and d["y_max"] > d["y_min"]):
            raise ConfigError("domain must be nonempty")

    def with_overrides(self, **kw) -> "ModelConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        tol = kw.pop("tolerances", None)
        cfg = replace(self, **kw)
        if tol:
            cfg = replace(cfg, tolerances=replace(cfg.tolerances, **tol))
        cfg.validate()
        return cfg

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["grid"] = list(self.grid)
        return out

    # ------------------------------------------------------------------
    # builders

    def build_functions(self) -> dict[str, ScalarFunction1D]:
        registry: dict[str, ScalarFunction1D] = {}
        for name, spec in self.functions.items():
            if isinstance(spec, str):
                spec = {"expr": spec}
            try:
                dom = spec.get("domain")
                registry[name] = function_from_text(
                    name,
                    spec["expr"],
                    derivative=spec.get("derivative"),
                    domain=tuple(dom) if dom else None,
                    monotone=bool(spec.get("monotone", False)),
                    functions=registry,
                )
            except (ExpressionError, KeyError) as exc:
                raise ConfigError(f"function {name!r}: {exc}") from None
        return registry

    def parse(self, text: str, registry=None):
        try:
            return parse(text, registry if registry is not None else self.build_functions())
        except ExpressionError as exc:
            raise ConfigError(f"expression {text!r}: {exc}") from None

    def build_domain(self) -> Domain:
        d = self.domain
        return Domain(float(d["x_min"]), float(d["x_max"]), float(d["y_min"]), float(d["y_max"]))

    def build_context(self) -> TransformContext:
        registry = self.build_functions()
        return TransformContext(
            self.parse(self.f, registry),
            self.build_domain(),
            orientation=self.orientation,
            y_ref=self.y_ref,
            root_tol=self.tolerances.root_tol,
            quad_tol=self.tolerances.quad_tol,
        )

    def build_curves(self) -> list[CurveSpec]:
        registry = self.build_functions()
        out = []
        for spec in self.adiabats:
            try:
                out.append(self._curve(spec, registry))
            except (CurveError, KeyError, TypeError) as exc:
                raise ConfigError(f"adiabat {spec!r}: {exc}") from None
        return out

    def _curve(self, spec, registry) -> CurveSpec:
        if not isinstance(spec, dict):
            raise ConfigError(f"adiabat descriptors must be objects, got {spec!r}")
        kind = spec.get("kind")
        if kind == "implicit":
            return CurveSpec.implicit(self.parse(spec["expr"], registry))
        if kind == "explicit":
            rng = spec.get("x_range")
            return CurveSpec.explicit(self.parse(spec["expr"], registry), tuple(rng) if rng else None)
        if kind == "points":
            return CurveSpec.from_points(spec["points"])
        raise ConfigError(f"unknown adiabat kind {kind!r}")


def load_config(path: str | Path) -> ModelConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    return ModelConfig.from_dict(data)
