import math
from pathlib import Path

import numpy as np
import pytest

from adiabat import CurveSpec, Domain, TransformContext, parse, reconstruct
from adiabat.expr import function_from_text
from adiabat.oracles import load_fixture

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
UNIT = Domain(0.5, 2.0, 0.5, 2.0)
GAMMA = 5.0 / 3.0


def phi_registry():
    return {"phi": function_from_text("phi", "t + t^2/2", domain=(-0.5, 100.0), monotone=True)}


@pytest.fixture(scope="session")
def ideal_ctx():
    return TransformContext(parse("x*y"), UNIT, y_ref=1.0)


@pytest.fixture(scope="session")
def x2y2_ctx():
    return TransformContext(parse("x^2*y^2"), UNIT, y_ref=1.0)


@pytest.fixture(scope="session")
def phi_ctx():
    return TransformContext(parse("phi(x*y)", phi_registry()), UNIT, y_ref=1.0)


@pytest.fixture(scope="session")
def contexts(ideal_ctx, x2y2_ctx, phi_ctx):
    return {"ideal": ideal_ctx, "x2y2": x2y2_ctx, "phi": phi_ctx}


@pytest.fixture(scope="session")
def ideal_field(ideal_ctx):
    return reconstruct(ideal_ctx, CurveSpec.explicit(parse("x^(-0.6)")))


@pytest.fixture(scope="session")
def feynman():
    return load_fixture("phi_gas")


@pytest.fixture(scope="session")
def feynman_field(feynman):
    ctx = feynman.config.build_context()
    return reconstruct(ctx, feynman.adiabats[0])


def valid_points(field, n, seed, margin=0.02):
    """Random interior points whose temperature lies inside the field's valid band."""
    rng = np.random.default_rng(seed)
    lo, hi = field.valid_band
    span = hi - lo
    out = []
    while len(out) < n:
        x, y = field.domain.random_points(1, rng, margin)[0]
        X = field.ctx.f(x, y)
        if lo + margin * span < X < hi - margin * span:
            out.append((float(x), float(y)))
    return out


def close(a, b, tol):
    return math.isclose(a, b, rel_tol=0, abs_tol=tol)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def verdict():
    """Record one acceptance line; printed now and again in the terminal summary."""

    def record(criterion: str, measured: str, limit: str, ok: bool) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {measured} (limit {limit})"
        print(line)
        _ACCEPTANCE.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
