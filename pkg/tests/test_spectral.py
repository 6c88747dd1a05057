import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import eigh_tridiagonal

from radcurv import spectral as S
from radcurv.constants import c8
from radcurv.errors import LadderTooShort, NotIntegrable, ParamRange
from radcurv.manifold import euclidean, from_expression, hyperbolic

J01_SQ = 2.404825557695773 ** 2


def test_unit_disk_bessel_oracle():
    est = S.dirichlet_eigenvalue(euclidean(2, L=2.0), 1.0, grid_size=10 ** 4)
    assert abs(est.value - J01_SQ) / J01_SQ <= 1e-4
    assert est.residual < 1e-6


def test_second_order_convergence():
    E = euclidean(2, L=2.0)
    errs = [abs(S.dirichlet_eigenvalue(E, 1.0, N).value - J01_SQ) for N in (250, 500, 1000)]
    for a, b in zip(errs, errs[1:]):
        assert a / b == pytest.approx(4.0, rel=0.05)
    est = S.dirichlet_eigenvalue(E, 1.0, 1000)
    # the Richardson residual estimates the actual error of the fine grid
    assert est.residual == pytest.approx(errs[-1], rel=0.05)


def test_three_ball_oracle():
    est = S.dirichlet_eigenvalue(euclidean(3, L=2.0), 1.0, 4000)
    assert est.value == pytest.approx(math.pi ** 2, rel=1e-6)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_scaling(n):
    E = euclidean(n, L=5.0)
    a = S.dirichlet_eigenvalue(E, 1.0, 800).value
    b = S.dirichlet_eigenvalue(E, 2.0, 800).value
    assert b == pytest.approx(a / 4, rel=1e-6)


@settings(max_examples=10, deadline=None, derandomize=True)
@given(st.floats(0.3, 2.0), st.floats(1.05, 2.0), st.sampled_from(["t", "sinh(t)", "t*(1 + 0.1*t^2)"]))
def test_domain_monotonicity(R, grow, g):
    M = from_expression(3, g, L=5.0)
    assert S.dirichlet_eigenvalue(M, R, 600).value >= S.dirichlet_eigenvalue(M, R * grow, 600).value


@settings(max_examples=10, deadline=None, derandomize=True)
@given(st.floats(0.5, 3.0), st.integers(2, 4), st.integers(50, 400))
def test_sturm_bisection_matches_library(R, n, N):
    M = hyperbolic(n, L=5.0)
    d, e, _, _ = S._tridiagonal(M, R, N)
    mine = S.smallest_eigenvalue(d, e)
    ref = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 0))[0]
    assert mine == pytest.approx(ref, rel=1e-10)


def test_ground_state_is_positive():
    for M in (euclidean(2, L=2.0), hyperbolic(3, L=5.0)):
        _, u = S.ground_state(M, 1.0, 1000)
        assert np.all(u > 0) and u.max() == pytest.approx(1.0)


def test_hyperbolic_plane_bottom_of_spectrum():
    est = S.lambda1_estimate(hyperbolic(2, L=50.0), 20.0, 4000)
    assert abs(est.value - 0.25) <= 0.02 * 0.25


def test_spectral_bounds_chain():
    H = hyperbolic(2, L=50.0)
    b = S.spec_upper_bound(H, 50.0, S.ladder(1.0, 5), alpha=1.0)
    lim = S.lambda1_estimate(H, 20.0, 4000)
    tol = 1e-9
    assert b.converged
    assert lim.value - lim.residual <= b.middle + tol
    assert b.middle <= b.right + tol
    assert b.right_alpha == pytest.approx(b.right, rel=1e-3)
    sharp = S.spec_upper_bound(H, 1000.0, S.ladder(1.0, 5), alpha=1.0)
    assert abs(sharp.right_alpha - 0.25) <= 0.02 * 0.25


def test_spectral_bounds_input_checks():
    with pytest.raises(LadderTooShort):
        S.spec_upper_bound(hyperbolic(2), 10.0, [1.0, 2.0])
    with pytest.raises(ParamRange):
        S.ladder(1.0, 13)


def test_p_laplacian_at_two_matches_laplacian():
    E = euclidean(2, L=2.0)
    a = S.p_laplacian_eigenvalue(E, 1.0, 2.0, 2000).value
    b = S.dirichlet_eigenvalue(E, 1.0, 2000).value
    assert abs(a - b) <= 1e-5 * b


@pytest.mark.parametrize("flat", [2.0, 3.0, 1.6])
def test_p_laplacian_dual_route(flat):
    M = hyperbolic(2, L=5.0)
    shoot = S.p_laplacian_eigenvalue(M, 1.5, flat, 200).value
    direct = S.minimize_quotient(M, 1.5, flat, 200)
    assert direct == pytest.approx(shoot, rel=1e-8)


def test_p_laplacian_hyperbolic_bounds():
    est = S.p_laplacian_lambda1_estimate(hyperbolic(2, L=50.0), 25.0, 3.0, 5000)
    lower = (1 / 3) ** 3 - 1e-3
    upper = (c8(2, 50) / 3) ** 3 + 1e-3
    assert lower <= est.value <= upper


def test_p_laplacian_continuity_at_two():
    # the flat -> 2 limit is continuous with a gap linear in |flat - 2|
    E = euclidean(2, L=2.0)
    base = S.p_laplacian_eigenvalue(E, 1.0, 2.0, 2000).value
    gaps = {}
    for eps in (0.01, 0.02):
        for sgn in (-1, 1):
            v = S.p_laplacian_eigenvalue(E, 1.0, 2.0 + sgn * eps, 2000).value
            gaps[(sgn, eps)] = abs(v - base) / base
    assert max(gaps[(s, 0.01)] for s in (-1, 1)) < 0.01
    for sgn in (-1, 1):
        assert gaps[(sgn, 0.02)] / gaps[(sgn, 0.01)] == pytest.approx(2.0, rel=0.05)


def test_p_laplacian_range():
    with pytest.raises(ParamRange):
        S.p_laplacian_eigenvalue(euclidean(2), 1.0, 1.0, 100)


def test_exponential_test_function():
    for c in (0.5, 1.0, 2.0):
        q = S.rayleigh_quotient(euclidean(3, L=40.0), c, 40.0)
        assert q.value == pytest.approx(c * c / 4, rel=1e-10)
    q = S.rayleigh_quotient(hyperbolic(2, L=40.0), 1.0, 40.0)
    assert q.value == pytest.approx(0.25, rel=1e-9)
    with pytest.raises(NotIntegrable):
        S.rayleigh_quotient(hyperbolic(2, L=40.0), 0.5, 40.0)
    above = S.rayleigh_quotient(hyperbolic(2, L=40.0), 1.2, 40.0)
    assert above.value >= 0.25 and math.isfinite(above.residual)
