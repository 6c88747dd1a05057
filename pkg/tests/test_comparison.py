import json
import math

import numpy as np
import pytest

from radcurv import comparison as V
from radcurv._common import sphere_measure
from radcurv.errors import LadderTooShort, ParamRange
from radcurv.funcspec import constant, make_radial
from radcurv.manifold import RotSymManifold, euclidean, from_expression, hyperbolic, round_sphere
from radcurv.model import solve_warp
from radcurv.serialize import dumps, plain

FLAT = solve_warp(constant(0.0), T=10.0)


def all_hyps_pass(rep):
    return all(h["passed"] for h in rep.hypothesis_checks)


def self_model(lam_src, n, T=3.0):
    ms = solve_warp(make_radial(lam_src), T=T, n=n)
    return RotSymManifold.from_model(n, ms), ms


def test_volume_ratio_self_model_is_tight():
    M, ms = self_model("-(0.4 + 0.3*t^2)", 3)
    rep = V.verify_volume_ratio(M, ms, 2.0, 0.5, 2.0)
    assert rep.status == "satisfied"
    assert rep.grid["k_minus"] <= 1e-9
    assert abs(rep.slack) <= 1e-8


def test_volume_ratio_hyperbolic_plane_against_flat():
    M = hyperbolic(2, L=5.0)
    rep = V.verify_volume_ratio(M, FLAT, 2.0, 0.5, 2.0)
    assert rep.status == "satisfied" and rep.slack > 0
    # independent midpoint oracle for the ratio increment
    N = 200000
    def vol(r):
        t = (np.arange(N) + 0.5) * (r / N)
        return 2 * math.pi * np.sum(np.sinh(t)) * (r / N)
    inc = (vol(2.0) / (math.pi * 4)) ** 0.25 - (vol(0.5) / (math.pi * 0.25)) ** 0.25
    increment = next(c for c in rep.checks if c["name"] == "ratio increment")
    assert increment["lhs"] == pytest.approx(inc, rel=1e-8)


def test_volume_ratio_positive_lambda_beyond_t0_is_indeterminate():
    ms = solve_warp(constant(1.0), T=4.0)
    M = from_expression(2, "t", L=4.0)
    rep = V.verify_volume_ratio(M, ms, 2.0, 0.5, 2.0)
    assert rep.status == "indeterminate" and rep.satisfied is None
    rep = V.verify_volume_ratio(M, ms, 2.0, 0.5, 1.5)
    assert all_hyps_pass(rep)


def test_bishop_gromov_sphere_against_plane():
    S = round_sphere(2)
    rep = V.verify_bishop_gromov(S, FLAT, np.linspace(0.2, 3.0, 15))
    assert rep.status == "satisfied"
    ratios = rep.grid["ratios"]
    assert all(b < a for a, b in zip(ratios, ratios[1:])) and max(ratios) <= 1


def test_bishop_gromov_self_model_constant_ratio():
    M, ms = self_model("-1", 3, T=4.0)
    rep = V.verify_bishop_gromov(M, ms, np.linspace(0.5, 3.5, 7))
    assert rep.status == "satisfied"
    assert np.allclose(rep.grid["ratios"], 1.0, atol=1e-10)


def test_bishop_gromov_flags_curvature_deficit():
    rep = V.verify_bishop_gromov(hyperbolic(2, L=5.0), FLAT, [0.5, 1.0, 2.0])
    assert rep.status == "indeterminate"


def test_volume_doubling():
    M, ms = self_model("-0.5", 3, T=2.0)
    rep = V.verify_volume_doubling(M, ms, 2.0, 2.0, 0.5)
    assert rep.status == "satisfied" and rep.slack >= 0
    g = from_expression(3, "t*(1 + 0.001*t^2)", L=2.0)
    rep = V.verify_volume_doubling(g, ms, 2.0, 2.0, 0.5)
    assert rep.status == "satisfied"
    g = from_expression(3, "t*(1 + 0.5*t^2)", L=2.0)
    rep = V.verify_volume_doubling(g, solve_warp(constant(0.0), T=2.0), 2.0, 2.0, 0.5)
    assert rep.status == "indeterminate"


def test_local_volume_ratio():
    rep = V.verify_local_volume_ratio(euclidean(3, L=5.0), 3.0, 0.99, 0.5, 1.0, 1.0)
    assert rep.status == "satisfied"
    assert rep.checks[0]["rhs"] == pytest.approx(0.125, rel=1e-12)
    H = hyperbolic(2, L=5.0)
    R_star = V.local_ratio_threshold_radius(H, 3.0, 0.9, 1.0)
    assert 0 < R_star < 0.3
    inside = V.verify_local_volume_ratio(H, 3.0, 0.9, 0.5 * R_star, 0.9 * R_star, 0.95 * R_star)
    assert inside.status == "satisfied"
    outside = V.verify_local_volume_ratio(H, 3.0, 0.9, 0.1, 0.2, 0.3)
    assert outside.status == "indeterminate"


@pytest.mark.parametrize("n", [3, 4, 5])
def test_geodesic_tube_flat_equality_and_hyperbolic_slack(n):
    rep = V.verify_geodesic_tube(0.0, n, n + 0.5, 1.0, 1.0)
    assert abs(rep.lhs - rep.rhs) <= 1e-6 * rep.lhs
    rep = V.verify_geodesic_tube(-1.0, n, float(n), 1.0, 1.0)
    assert rep.status == "satisfied" and rep.slack > 0
    rep = V.verify_geodesic_tube(-1.0, n, float(n), 1.0, 0.0)
    assert rep.lhs == 0 and rep.rhs == 0


def test_geodesic_tube_model_bound():
    rep = V.verify_geodesic_tube_model(-1.0, 4, 4.0, 1.0, 1.0)
    assert rep.status == "satisfied"
    assert rep.grid["other_reading"] == "n-delta"
    flat = V.verify_geodesic_tube_model(0.0, 3, 3.0, 1.0, 1.0)
    assert flat.status == "satisfied"


def test_cone_volume_self_model():
    M, ms = self_model("-0.7", 3)
    rep = V.verify_cone_volume(M, 2.0, ms.lam, 2.0)
    assert rep.status == "satisfied"
    rep = V.verify_cone_volume(euclidean(2, L=3.0), 1.5, constant(0.0), 2.0, vol_Shat=math.pi)
    assert rep.status == "satisfied"


def test_hypersurface_tube():
    rep = V.verify_hypersurface_tube(hyperbolic(3, L=5.0), 2.0, constant(-1.0), 1.0, 0.5)
    assert rep.grid["k_minus"] == 0
    assert rep.status == "satisfied"
    rep = V.verify_hypersurface_tube(hyperbolic(3, L=5.0), 2.0, constant(0.0), 1.0, 0.5)
    assert rep.status == "indeterminate"


def test_volume_growth_euclidean():
    p = 2.0
    rep = V.verify_volume_growth(euclidean(3, L=1001.0), p, [10.0, 100.0, 1000.0])
    assert rep.status == "satisfied"
    # vol^{1/2p}/R decays like R^{3/2p - 1}
    assert np.allclose(rep.grid["loglog_slope_q1"], 3 / (2 * p) - 1, atol=1e-9)
    assert rep.grid["q1"][-1] < rep.grid["q1"][0]


def test_volume_growth_flags_unbounded_deficiency():
    rep = V.verify_volume_growth(hyperbolic(2, L=20.0), 2.0, [5.0, 10.0, 20.0])
    assert rep.status == "indeterminate"
    with pytest.raises(LadderTooShort):
        V.verify_volume_growth(euclidean(2), 2.0, [1.0, 2.0])


def test_volume_growth_nonnegative_ricci_model():
    # f = sqrt(t+1) log(1+t) has Ric >= 0, so the deficiency against 0 vanishes
    M, _ = self_model("1/(4*(t+1)^2)", 2, T=200.0)
    rep = V.verify_volume_growth(M, 2.0, [25.0, 50.0, 100.0, 200.0])
    assert rep.grid["k_minus"] == [0.0] * 4
    assert rep.status == "satisfied"
    assert rep.grid["q1"][-1] < rep.grid["q1"][0] and rep.grid["q2"][-1] < rep.grid["q2"][0]


def test_isoperimetric_constant_euclidean():
    rep = V.verify_isoperimetric_constant(euclidean(3, L=10.0), 3.0, 1.0, 1.0)
    assert rep.grid["eta"] == pytest.approx(1.0, rel=1e-12)
    assert rep.grid["r2"] == pytest.approx(0.5, rel=1e-12)
    assert rep.status == "satisfied"


def test_isoperimetric_quantity_round_sphere():
    S = round_sphere(2)
    for p in (1.5, 3.0, 10.0):
        e = 1 - 1 / (2 * p)
        expected = 2 * math.pi * (2 * math.pi) ** (-e) * (4 * math.pi) ** (-1 / (2 * p))
        assert V.isoperimetric_quantity_radial(S, p) == pytest.approx(expected, rel=1e-6)
    rep = V.verify_isoperimetric_quantity(S, 2.0, constant(-0.1), math.pi)
    assert rep.status == "satisfied"
    assert all(c["slack"] >= -c["tol"] for c in rep.checks)
    with pytest.raises(ParamRange):
        V.isoperimetric_quantity_radial(euclidean(2), 2.0)


def test_shortest_geodesic_bound():
    n, p, w, D = 4, 4.0, 2.0, 1.5
    expected = w * (n - 1) / (sphere_measure(n - 1) * D ** (n - 1))
    assert V.shortest_geodesic_bound(n, p, constant(0.0), w, D, 0.0) == pytest.approx(expected, rel=1e-12)
    small = [V.shortest_geodesic_bound(n, p, constant(0.0), x, D, 0.0) for x in (1.0, 1e-3, 1e-6)]
    assert all(b < a for a, b in zip(small, small[1:])) and small[-1] < 1e-5
    det = V.geodesic_bound_details(4, 4.0, constant(-1.0), 1.0, 2.0, 0.01)
    assert det["delta"] > 0 and abs(det["residual"]) <= 1e-10


def test_divider_area():
    M, ms = self_model("-0.3", 3)
    rep = V.verify_divider_area(M, ms, 2.0, 0.0, 2.0, 0.5, 1.5)
    assert rep.grid["c14"] == 0.0
    assert rep.status == "satisfied"
    rep = V.verify_divider_area(euclidean(3, L=3.0), solve_warp(constant(0.0), T=3.0), 2.0, 0.0, 2.0, 0.5, 1.5)
    assert rep.status == "satisfied"
    rep = V.verify_divider_area(euclidean(3, L=3.0), solve_warp(constant(0.0), T=3.0), 2.0, 0.0, 2.0, 0.01, 0.3)
    assert rep.status == "indeterminate"


def test_psi_differential_inequality():
    M = from_expression(3, "t*(1 + 0.2*t^2 - 0.05*t^3)", L=1.5)
    ms = solve_warp(make_radial("-(0.2 + 0.1*t^2)"), T=1.5, n=3)
    res = V.psi_ode_residuals(M, ms, 2.0, np.linspace(0.2, 1.4, 7))
    assert np.all(res <= 1e-7)


def test_fuzz_suite_all_satisfied_and_deterministic():
    reports = V.fuzz_suite(42, 60)
    by_status = {r.status for r in reports}
    assert by_status <= {"satisfied"}
    for r in reports:
        assert r.slack >= -1e-9 * (1 + abs(r.rhs))
        if r.inputs["self_model"] and r.theorem_id == "volume_ratio":
            assert abs(r.slack) <= 1e-8
    again = V.fuzz_suite(42, 60)
    assert dumps({"r": [plain(r) for r in reports]}) == dumps({"r": [plain(r) for r in again]})


def test_fuzz_positive_lambda_is_indeterminate():
    reports = V.fuzz_suite(5, 20, {"inject_positive_lambda": True})
    assert not any(r.status == "violated" for r in reports)
    injected = [r for r in reports if r.case_id in ("case0009", "case0019")]
    assert injected and any(r.status == "indeterminate" for r in injected)


def test_fuzz_cases_are_order_independent():
    a = V.fuzz_cases(7, 30)
    b = V.fuzz_cases(7, 10)
    assert a[:10] == b
