import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radcurv.errors import BadCurvatureRange, OutOfDomain
from radcurv.funcspec import make_radial
from radcurv.manifold import (RotSymManifold, annulus_volume, ball_volume, euclidean, from_expression, hyperbolic,
                              radial_ricci, radial_sectional, round_sphere, spaceform_tube_volume, sphere_area,
                              sphere_mean_curvature)
from radcurv.model import solve_warp


def test_radial_curvatures():
    assert radial_ricci(euclidean(3), 1.3) == 0.0
    assert radial_ricci(hyperbolic(3), 1.0) == pytest.approx(-2.0, rel=1e-13)
    assert radial_ricci(round_sphere(2), 1.0) == pytest.approx(1.0, rel=1e-13)
    M = from_expression(3, "sinh(2*t)/2")
    assert radial_sectional(M, 0.7) == pytest.approx(-4.0, rel=1e-12)
    assert radial_sectional(round_sphere(3), 0.3) == pytest.approx(1.0, rel=1e-13)


def test_curvature_domain():
    M = hyperbolic(3)
    with pytest.raises(OutOfDomain):
        radial_ricci(M, 0.0)
    with pytest.raises(OutOfDomain):
        radial_sectional(round_sphere(2), math.pi)


def test_volume_oracles():
    assert ball_volume(euclidean(3), 1.0) == pytest.approx(4 * math.pi / 3, rel=1e-12)
    assert annulus_volume(hyperbolic(3), 0.7, 0.7) == 0.0
    S = round_sphere(2)
    assert S.closed
    assert ball_volume(S, math.pi) == pytest.approx(4 * math.pi, rel=1e-12)


def test_tube_oracles():
    assert spaceform_tube_volume(0.0, 3, 1.0, 1.0) == pytest.approx(math.pi, rel=1e-14)
    assert spaceform_tube_volume(-1.0, 3, 1.0, 0.0) == 0.0
    expected = 2 * 4 * math.pi * math.sinh(1.0) ** 3 / 3
    assert spaceform_tube_volume(-1.0, 4, 2.0, 1.0) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(BadCurvatureRange):
        spaceform_tube_volume(1.0, 3, 1.0, 2.0)


def test_mean_curvature_of_spheres():
    assert sphere_mean_curvature(euclidean(3), 2.0) == pytest.approx(0.5)
    assert sphere_mean_curvature(round_sphere(3), math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert sphere_mean_curvature(hyperbolic(3), 1.0) == pytest.approx(1 / math.tanh(1.0), rel=1e-13)


def test_warping_must_start_like_identity():
    with pytest.raises(Exception):
        RotSymManifold.from_warp(2, make_radial("2*t"))


warps = st.sampled_from(["t", "sinh(t)", "sin(t)", "t*(1 + 0.2*t^2)", "t*exp(-0.1*t^2)"])


@settings(max_examples=40, deadline=None, derandomize=True)
@given(warps, st.integers(2, 5), st.floats(0.2, 1.4))
def test_coarea_and_ricci_sectional(expr, n, r):
    M = from_expression(n, expr, L=1.5)
    h = 1e-4
    fd = (ball_volume(M, r + h) - ball_volume(M, r - h)) / (2 * h)
    assert fd == pytest.approx(sphere_area(M, r), rel=1e-6)
    assert radial_ricci(M, r) == pytest.approx((n - 1) * radial_sectional(M, r), rel=1e-13, abs=1e-15)


@settings(max_examples=10, deadline=None, derandomize=True)
@given(st.floats(0.0, 1.0), st.floats(0.0, 0.5), st.integers(2, 4))
def test_self_model_satisfies_jacobi_equation(b0, b1, n):
    ms = solve_warp(make_radial(f"-({b0!r} + {b1!r}*t^2)"), T=3.0, n=n)
    M = RotSymManifold.from_model(n, ms)
    t = np.linspace(0.05, 2.9, 50)
    ric = np.array([radial_ricci(M, x) for x in t])
    f, f2 = ms.f(t), M.g.d2(t)
    assert np.max(np.abs(f2 + ric / (n - 1) * f)) <= 1e-7
