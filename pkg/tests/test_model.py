import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radcurv.constants import c_main
from radcurv.errors import OutOfDomain, ParamRange
from radcurv.funcspec import constant, make_radial
from radcurv.model import model_area, model_volume, solve_warp, space_form

SOLVES = {}


def solved(src, T):
    key = (src, T)
    if key not in SOLVES:
        SOLVES[key] = solve_warp(make_radial(src), T=T)
    return SOLVES[key]


def max_rel(ms, exact, a, b, count=2001):
    t = np.linspace(a, b, count)[1:]
    return float(np.max(np.abs(ms.f(t) - exact(t)) / np.abs(exact(t))))


def test_flat_model_is_identity():
    ms = solved("0", 10.0)
    assert max_rel(ms, lambda t: t, 0, 10) <= 1e-8
    assert math.isinf(ms.l) and math.isinf(ms.t0)


def test_hyperbolic_model_is_sinh():
    ms = solved("-1", 5.0)
    assert max_rel(ms, np.sinh, 0, 5) <= 1e-8


def test_spherical_model_zeros():
    ms = solved("1", 5.0)
    assert max_rel(ms, np.sin, 0, 0.99 * math.pi) <= 1e-8
    assert ms.l == pytest.approx(math.pi, abs=1e-8)
    assert ms.t0 == pytest.approx(math.pi / 2, abs=1e-8)


def test_euler_comparison_function():
    ms = solved("1/(4*(t+1)^2)", 10.0)
    exact = lambda t: np.sqrt(t + 1) * np.log1p(t)
    assert max_rel(ms, exact, 0, 10) <= 1e-7
    assert math.isinf(ms.l)


def test_volume_oracles():
    assert model_volume(solved("0", 10.0), 2, 1.0) == pytest.approx(math.pi, rel=1e-10)
    assert model_volume(solved("-1", 5.0), 2, 1.0) == pytest.approx(2 * math.pi * (math.cosh(1) - 1), rel=1e-9)
    assert model_volume(solved("-1", 5.0), 3, 0.0) == 0.0


def test_area_oracle_and_coarea():
    ms = solved("0", 10.0)
    assert model_area(ms, 3, 2.0) == pytest.approx(16 * math.pi, rel=1e-12)
    ms = solved("-(0.3 + 0.2*t^2)", 4.0)
    for r in (0.5, 1.3, 2.7):
        h = 1e-4
        fd = (model_volume(ms, 3, r + h) - model_volume(ms, 3, r - h)) / (2 * h)
        assert fd == pytest.approx(model_area(ms, 3, r), rel=1e-6)


def test_volume_outside_horizon_raises():
    with pytest.raises(OutOfDomain):
        model_volume(solved("1", 5.0), 2, 4.0)


def test_tolerance_range_is_checked():
    with pytest.raises(ParamRange):
        solve_warp(constant(0.0), T=1.0, tol=1e-2)


def test_space_form_negative_curvature():
    ms = space_form(-4.0)
    t = np.linspace(0.1, 3, 30)
    np.testing.assert_allclose(ms.f(t), np.sinh(2 * t) / 2, rtol=1e-14)


def test_space_form_oracle_runtime():
    start = time.perf_counter()
    for src in ("0", "-1", "1"):
        solve_warp(make_radial(src), T=5.0)
    assert time.perf_counter() - start < 1.0


def test_solver_is_deterministic():
    a = solve_warp(make_radial("-(0.4 + 0.1*t^2)"), T=3.0)
    b = solve_warp(make_radial("-(0.4 + 0.1*t^2)"), T=3.0)
    assert np.array_equal(a.sol.t, b.sol.t) and np.array_equal(a.sol.f, b.sol.f)


lam_coeffs = st.tuples(st.floats(0.0, 1.0), st.floats(0.0, 0.5))


@settings(max_examples=15, deadline=None, derandomize=True)
@given(lam_coeffs)
def test_nonpositive_lambda_invariants(c):
    ms = solve_warp(make_radial(f"-({c[0]!r} + {c[1]!r}*t^2)"), T=3.0)
    assert ms.sol.max_residual <= 1e-7
    t = ms.sol.t
    assert np.all(ms.sol.f >= t * (1 - 1e-12))
    assert np.all(ms.sol.df >= 1 - 1e-12)
    r = np.linspace(0.1, 3.0, 12)
    for n in (2, 3, 4):
        w = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
        assert np.all(ms.volume(n, r) >= w * r ** n / n * (1 - 1e-12))


@settings(max_examples=15, deadline=None, derandomize=True)
@given(st.sampled_from([(2, 1.5), (2, 4.0), (3, 2.0), (3, 6.0), (4, 2.5), (4, 8.0)]), st.floats(0.1, 3.0))
def test_main_constant_finite(np_, R):
    n, p = np_
    ms = solved("-0.5", 4.0)
    c = c_main(ms, n, p, R)
    assert math.isfinite(c) and c > 0


def test_signed_lambda_residual():
    ms = solved("sin(t)", 10.0)
    assert ms.sol.max_residual <= 1e-7
    assert ms.f(0.0) == 0.0
