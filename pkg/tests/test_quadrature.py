import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from radcurv.errors import QuadratureFailure
from radcurv.quadrature import adaptive_simpson, sign_changes


def test_polynomial_and_trig():
    assert adaptive_simpson(lambda x: x ** 3, 0, 2) == pytest.approx(4.0, rel=1e-14)
    assert adaptive_simpson(np.sin, 0, math.pi) == pytest.approx(2.0, rel=1e-11)
    assert adaptive_simpson(np.exp, 1, 0) == pytest.approx(-(math.e - 1), rel=1e-11)


def test_kink_breakpoints():
    f = lambda x: np.abs(x - 0.3)
    exact = 0.3 ** 2 / 2 + 0.7 ** 2 / 2
    assert adaptive_simpson(f, 0, 1, breakpoints=[0.3]) == pytest.approx(exact, rel=1e-14)


def test_noise_acceptance():
    rng = np.random.default_rng(0)
    jitter = lambda x: 1e-20 * rng.standard_normal(np.shape(x))
    with pytest.raises(QuadratureFailure):
        adaptive_simpson(lambda x: 1e-30 * x + jitter(x), 0, 1, rtol=1e-12, max_level=12)
    val = adaptive_simpson(lambda x: 1e-30 * x + jitter(x), 0, 1, rtol=1e-12,
                           noise=lambda x: 1e-19 * np.ones_like(x))
    assert abs(val) < 1e-18


def test_sign_changes():
    roots = sign_changes(lambda x: np.cos(x), 0, 10)
    np.testing.assert_allclose(roots, [math.pi / 2 + k * math.pi for k in range(3)], atol=1e-9)


@settings(max_examples=30, deadline=None, derandomize=True)
@given(st.floats(0.1, 5.0), st.floats(-2.0, 2.0), st.floats(0.2, 4.0))
def test_against_library_quadrature(a, b, width):
    f = lambda x: np.exp(-a * x * x) * np.cos(b * x) + x ** 2
    mine = adaptive_simpson(f, -1.0, -1.0 + width, rtol=1e-12)
    ref, _ = quad(lambda x: float(f(np.array(x))), -1.0, -1.0 + width, epsabs=0, epsrel=1e-13)
    assert mine == pytest.approx(ref, rel=1e-10)
