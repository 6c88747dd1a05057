import math

import numpy as np
import pytest

from radcurv import heat as Ht
from radcurv.errors import ParamRange, TauTooSmall
from radcurv.funcspec import constant
from radcurv.manifold import euclidean, hyperbolic
from radcurv.model import solve_warp


def test_constant_data_is_stationary_under_neumann():
    sol = Ht.solve_radial_heat(hyperbolic(3, L=5.0), 2.0, Ht.NEUMANN, lambda t: 3.0 + 0 * t, 0.5, 400)
    assert np.max(np.abs(sol.u[-1] - 3.0)) <= 1e-12


def test_dirichlet_eigenmode_decay():
    # first Dirichlet mode of the unit 3-ball: sin(pi t)/t with eigenvalue pi^2
    E = euclidean(3, L=2.0)
    u0 = lambda t: np.sin(math.pi * t) / t
    sol = Ht.solve_radial_heat(E, 1.0, Ht.DIRICHLET, u0, 0.2, 2000)
    ratio = sol.at_pole(-1) / math.pi
    assert ratio == pytest.approx(math.exp(-math.pi ** 2 * 0.2), rel=1e-4)


def test_neumann_mass_conservation_and_positivity():
    sol = Ht.heat_kernels(hyperbolic(2, L=5.0), 3.0, Ht.NEUMANN, [0.1, 0.5, 1.0], 1500)
    assert np.all(np.abs(sol.mass - 1.0) <= 1e-6)
    assert np.all(sol.u > 0)


def test_dirichlet_mass_decreases():
    sol = Ht.heat_kernels(euclidean(2, L=3.0), 1.0, Ht.DIRICHLET, [0.05, 0.1, 0.2, 0.4], 1000)
    assert np.all(np.diff(sol.mass) < 0) and sol.mass[0] <= 1.0 + 1e-9
    assert np.all(sol.u >= 0)


def test_free_kernel_on_large_ball():
    tau = 0.1
    H = Ht.heat_kernel(euclidean(2, L=6.0), 5.0, Ht.DIRICHLET, tau, 2500)
    exact = (4 * math.pi * tau) ** -1.0
    assert float(H.value(0.0)) == pytest.approx(exact, rel=0.02)
    t = np.array([0.2, 0.5])
    np.testing.assert_allclose(H.value(t), exact * np.exp(-t ** 2 / (4 * tau)), rtol=0.02)


def test_dirichlet_below_neumann():
    M = hyperbolic(3, L=5.0)
    d = Ht.heat_kernels(M, 1.0, Ht.DIRICHLET, [0.1, 0.3], 800)
    nm = Ht.heat_kernels(M, 1.0, Ht.NEUMANN, [0.1, 0.3], 800)
    assert np.all(d.u <= nm.u + 1e-12)


def test_chapman_kolmogorov():
    assert Ht.chapman_kolmogorov_defect(hyperbolic(2, L=5.0), 2.0, Ht.NEUMANN, 0.1, 0.2, 1000) <= 5e-3


def test_second_order_in_space_and_time():
    M = euclidean(3, L=5.0)
    u0 = lambda t: np.exp(-(t / 0.3) ** 2)
    ref = Ht.solve_radial_heat(M, 4.0, Ht.NEUMANN, u0, 0.2, 3200).profile()
    errs = []
    for N in (400, 800):
        sol = Ht.solve_radial_heat(M, 4.0, Ht.NEUMANN, u0, 0.2, N)
        errs.append(np.max(np.abs(sol.u[-1] - ref.value(sol.t))))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def test_self_comparison_equality():
    M = hyperbolic(3, L=5.0)
    ms = solve_warp(constant(-1.0), T=5.0, n=3)
    rep = Ht.verify_heat_kernel_comparison(M, ms_lower=ms, ms_upper=ms, R0=1.0, grid_size=600)
    assert rep.status == "satisfied"
    gaps = [float(x.split()[-1]) for x in rep.notes]
    assert max(gaps) <= 1e-3


def test_hyperbolic_below_flat_model():
    M = hyperbolic(3, L=5.0)
    flat = solve_warp(constant(0.0), T=5.0, n=3)
    rep = Ht.verify_heat_kernel_comparison(M, ms_upper=flat, R0=1.0, grid_size=600)
    assert rep.status == "satisfied"
    wrong_side = Ht.verify_heat_kernel_comparison(M, ms_lower=flat, R0=1.0, grid_size=600)
    assert wrong_side.status == "indeterminate"


def test_input_validation():
    with pytest.raises(TauTooSmall):
        Ht.heat_kernels(euclidean(2), 1.0, Ht.DIRICHLET, [1e-4], 1000)
    with pytest.raises(ParamRange):
        Ht.solve_radial_heat(euclidean(2), 1.0, Ht.DIRICHLET, lambda t: t, 0.0, 100)
    with pytest.raises(ParamRange):
        Ht.verify_heat_kernel_comparison(euclidean(2))
