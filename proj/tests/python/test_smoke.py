import math

import numpy as np
import pytest
from scipy.integrate import quad

import fhnstrip as fs

BENCH = """
params: {epsilon: 0.1, a: 0.25, b: 1, beta: 0.8, L: 1}
T: 1
u0: {kind: cosine, coeffs: [0, 0.1]}
v0: 0
grid: {nx: 17, nt: 21}
"""


def test_kernel_matches_closed_laplace_transform():
    ctx = fs.KernelContext(fs.ModelParams(1, 2, 1, 1, 1))
    num = quad(lambda t: math.exp(-t) * float(fs.eval_K(1.0, t, ctx)), 0, np.inf, epsabs=1e-12, epsrel=1e-10)[0]
    assert num == pytest.approx(fs.laplace_K_closed(1.0, 1.0, ctx), rel=1e-6)


def test_derived_constants():
    ctx = fs.KernelContext(fs.ModelParams(1, 2, 1, 1, 1))
    assert ctx.omega == 1.0
    assert ctx.beta0 == pytest.approx(2.16608, abs=1e-5)
    unit = fs.KernelContext(fs.ModelParams(1, 1, 1, 1, 1))
    sigma0 = math.sqrt(2.0)
    assert fs.steady_profile(0.0, unit) == pytest.approx(1 / (2 * sigma0 * math.tanh(sigma0)), rel=1e-12)
    assert unit.C0 is None


def test_solvers_agree():
    ie = fs.solve_ie(BENCH)
    fd = fs.solve_fd(BENCH, ["fd.dt=0.0025"])
    assert ie["u"].shape == (17, 21)
    assert np.array_equal(ie["t"], fd["t"])
    assert np.max(np.abs(ie["u"] - fd["u"])) < 1e-3
    assert ie["report"]["method"] != fd["report"]["method"]


def test_parse_error_names_field():
    with pytest.raises(fs.ParseError, match="params.L"):
        fs.solve_ie(BENCH.replace("L: 1", "L: -1"))


def test_verify_reports():
    reports = fs.verify(["steady_limit", "theta_decay"])
    assert [r["name"] for r in reports] == ["steady_limit", "theta_decay"]
    assert all(r["passed"] for r in reports)
    assert "steady_limit" in fs.check_names()
    assert math.isfinite(reports[0]["worst_margin"])
