"""Theorem verifiers producing VerificationReports, plus the seeded fuzz family.

Every verifier evaluates both sides of one inequality on a rotationally
symmetric manifold. Failed hypotheses make a report ``indeterminate``; only a
negative slack beyond ``tol_slack = 1e-9 (1 + |rhs|)`` with all hypotheses
passing makes it ``violated``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import constants as C
from ._common import sphere_measure
from .curvature import (GeodesicSphere, Segment, deficiency_integral, integral_curvature,
                        psi_integral, tube_integral_curvature)
from .errors import NoRoot, ParamRange
from .funcspec import RadialFunction, constant, make_radial
from .manifold import (RotSymManifold, annulus_volume, ball_volume, spaceform_tube_volume,
                       sphere_area, sphere_mean_curvature)
from .model import ModelSpace, solve_warp
from .quadrature import sign_changes

SLACK_RTOL = 1e-9
LAMBDA_GRID = 2001


def tol_slack(rhs: float) -> float:
    return SLACK_RTOL * (1.0 + abs(rhs)) if math.isfinite(rhs) else 0.0


@dataclass
class VerificationReport:
    theorem_id: str
    inputs: dict
    hypothesis_checks: list
    lhs: float | None
    rhs: float | None
    slack: float | None
    status: str
    satisfied: bool | None
    tol_slack: float
    relation: str = "<="
    checks: list = field(default_factory=list)
    grid: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    seed: int | None = None
    case_id: str | None = None

    def as_dict(self):
        return asdict(self)


def hyp(name: str, passed: bool, detail: str = "") -> dict:
    return {"name": name, "passed": bool(passed), "detail": detail}


def check(lhs: float, rhs: float, relation: str = "<=", **extra) -> dict:
    lhs, rhs = float(lhs), float(rhs)
    if relation == "<=":
        slack = rhs - lhs
        ref = rhs
    else:
        slack = lhs - rhs
        ref = rhs
    if math.isnan(slack):
        slack = math.inf if (math.isinf(rhs) and relation == "<=") else slack
    out = {"lhs": lhs, "rhs": rhs, "relation": relation, "slack": slack, "tol": tol_slack(ref)}
    out.update(extra)
    return out


def finish(theorem_id: str, inputs: dict, hyps: list, checks: list, grid=None, notes=None,
           relation="<=") -> VerificationReport:
    hyp_ok = all(h["passed"] for h in hyps)
    if checks:
        worst = min(checks, key=lambda c: c["slack"] + c["tol"])
        lhs, rhs, slack, tol = worst["lhs"], worst["rhs"], worst["slack"], worst["tol"]
        relation = worst["relation"]
        ok = all(c["slack"] >= -c["tol"] for c in checks)
    else:
        lhs = rhs = slack = None
        tol = 0.0
        ok = True
    if not hyp_ok:
        status, satisfied = "indeterminate", None
    else:
        status, satisfied = ("satisfied", True) if ok else ("violated", False)
    return VerificationReport(theorem_id=theorem_id, inputs=inputs, hypothesis_checks=hyps,
                              lhs=lhs, rhs=rhs, slack=slack, status=status, satisfied=satisfied,
                              tol_slack=tol, relation=relation, checks=checks,
                              grid=grid or {}, notes=notes or [])


def _lam_range(lam: RadialFunction, a: float, b: float):
    x = np.linspace(a, b, LAMBDA_GRID)
    v = np.asarray(lam.value(x), dtype=float)
    return float(v.min()), float(v.max())


def _lambda_gate(lam: RadialFunction, ms: ModelSpace, R: float) -> list:
    """lambda <= 0 on [0, R] or, failing that, R <= t0."""
    lo, hi = _lam_range(lam, 0.0, R)
    if hi <= 0.0:
        return [hyp("lambda<=0", True, f"max lambda on [0,R] = {hi!r}")]
    return [hyp("lambda<=0 or R<=t0", R <= ms.t0,
                f"max lambda on [0,R] = {hi!r}, t0 = {ms.t0!r}")]


def _manifold_inputs(M: RotSymManifold) -> dict:
    return {"n": M.n, "g": M.g.describe(), "L": M.L, "closed": M.closed}


def _ratio(M, ms, r):
    if r == 0:
        return 1.0
    return ball_volume(M, r) / ms.volume(M.n, r)


# -- volume comparison ------------------------------------------------------

def verify_volume_ratio(M: RotSymManifold, ms: ModelSpace, p: float, r: float, R: float,
                  tol: float = SLACK_RTOL) -> VerificationReport:
    n = M.n
    inputs = {**_manifold_inputs(M), "lambda": ms.lam.describe(), "p": p, "r": r, "R": R}
    hyps = [hyp("p>n/2", p > n / 2), hyp("0<=r<R", 0 <= r < R),
            hyp("R<=L", R <= M.L * (1 + 1e-12), f"L = {M.L!r}"),
            hyp("R<=l", R <= ms.extent * (1 + 1e-12), f"model extent = {ms.extent!r}")]
    if not all(h["passed"] for h in hyps):
        return finish("volume_ratio", inputs, hyps, [])
    hyps += _lambda_gate(ms.lam, ms, R)
    k = integral_curvature(M, ms.lam, p, R, "k_minus").value
    c = C.c_main(ms, n, p, R)
    yR, yr = _ratio(M, ms, R), _ratio(M, ms, r)
    e = 1.0 / (2 * p)
    checks = [
        check(yR ** e - yr ** e, c * math.sqrt(k), name="ratio increment"),
        check(ball_volume(M, R), (1 + c * math.sqrt(k)) ** (2 * p) * ms.volume(n, R), name="volume bound (r=0)"),
    ]
    rep = finish("volume_ratio", inputs, hyps, checks, grid={"k_minus": k, "c": c})
    return rep


def verify_psi_bound(M: RotSymManifold, ms: ModelSpace, p: float, r: float) -> VerificationReport:
    """int_0^r psi^{2p} g^{n-1} <= c2 int_0^r rho^p g^{n-1}."""
    n = M.n
    inputs = {**_manifold_inputs(M), "lambda": ms.lam.describe(), "p": p, "r": r}
    hyps = [hyp("p>n/2", p > n / 2), hyp("r<=min(L,l)", r <= min(M.L, ms.extent) * (1 + 1e-12))]
    if not all(h["passed"] for h in hyps):
        return finish("psi_bound", inputs, hyps, [])
    hyps += _lambda_gate(ms.lam, ms, r)
    lhs = psi_integral(M, ms, p, r)
    rhs = C.c2(n, p) * deficiency_integral(M, ms.lam, p, 0.0, r, "k_minus")
    return finish("psi_bound", inputs, hyps, [check(lhs, rhs, name="psi vs rho")])


def psi_ode_residuals(M: RotSymManifold, ms: ModelSpace, p: float, r_grid) -> np.ndarray:
    """y'(r) - c1 y^{1-1/2p} (int_B psi^{2p})^{1/2p} vol_model^{-1/2p} with y'(r) by central differences."""
    n = M.n
    wn = sphere_measure(n)
    out = []
    for r in r_grid:
        h = 1e-4 * max(r, 1.0)
        dy = (_ratio(M, ms, r + h) - _ratio(M, ms, r - h)) / (2 * h)
        y = _ratio(M, ms, r)
        psi_term = (wn * psi_integral(M, ms, p, r)) ** (1 / (2 * p))
        bound = C.c1(ms, n, r) * y ** (1 - 1 / (2 * p)) * psi_term * ms.volume(n, r) ** (-1 / (2 * p))
        out.append(dy - bound)
    return np.array(out)


def verify_bishop_gromov(M: RotSymManifold, ms: ModelSpace, r_grid, p: float | None = None) -> VerificationReport:
    n = M.n
    p = float(n) if p is None else p
    r_grid = sorted(float(r) for r in r_grid)
    Rmax = r_grid[-1]
    inputs = {**_manifold_inputs(M), "lambda": ms.lam.describe(), "r_grid": r_grid, "p": p}
    k = integral_curvature(M, ms.lam, p, Rmax, "k_minus").value
    hyps = [hyp("k_minus<=1e-12", k <= 1e-12, f"k_minus = {k!r}")]
    ratios = [_ratio(M, ms, r) for r in r_grid]
    checks = [check(ratios[i + 1], ratios[i], name=f"monotone at r={r_grid[i + 1]!r}")
              for i in range(len(ratios) - 1)]
    checks += [check(y, 1.0, name=f"ratio<=1 at r={r!r}") for r, y in zip(r_grid, ratios)]
    return finish("bishop_gromov", inputs, hyps, checks, grid={"ratios": ratios})


def verify_volume_doubling(M: RotSymManifold, ms: ModelSpace, p: float, D: float, alpha: float,
                  r_grid=None) -> VerificationReport:
    n = M.n
    inputs = {**_manifold_inputs(M), "lambda": ms.lam.describe(), "p": p, "D": D, "alpha": alpha}
    hyps = [hyp("L<=D", M.L <= D * (1 + 1e-12)), hyp("0<alpha<1", 0 < alpha < 1),
            hyp("p>n/2", p > n / 2), hyp("D<=l", D <= ms.extent * (1 + 1e-12))]
    if not all(h["passed"] for h in hyps):
        return finish("volume_doubling", inputs, hyps, [])
    hi = _lam_range(ms.lam, 0.0, D)[1]
    hyps.append(hyp("lambda<=0", hi <= 0.0, f"max lambda = {hi!r}"))
    VD = ms.volume(n, D)
    c = C.c_main(ms, n, p, D)
    eps = ((1 - alpha) ** (2 * p) / VD) ** (1 / p) / c ** 2
    volM = ball_volume(M, M.L)
    kbar = integral_curvature(M, ms.lam, p, M.L, "k_minus", averaged=True).value
    hyps.append(hyp("kbar_minus<=eps", kbar <= eps, f"kbar = {kbar!r}, eps = {eps!r}"))
    if r_grid is None:
        r_grid = np.linspace(0, D, 41)[1:-1]
    checks = [check(alpha * ms.volume(n, r) / VD, ball_volume(M, min(r, M.L)) / volM, name=f"r={float(r)!r}")
              for r in r_grid]
    return finish("volume_doubling", inputs, hyps, checks, grid={"eps": eps, "kbar": kbar, "c": c})


def local_ratio_epsilon(n: int, p: float, alpha: float) -> float:
    return ((2 * p - n) / (2 * n * C.c2(n, p))) ** 2 * (1 - alpha ** (1 / (2 * p))) ** 2


def verify_local_volume_ratio(M: RotSymManifold, p: float, alpha: float, r1: float, r2: float, R: float) -> VerificationReport:
    n = M.n
    inputs = {**_manifold_inputs(M), "p": p, "alpha": alpha, "r1": r1, "r2": r2, "R": R}
    hyps = [hyp("0<r1<r2<=R<=L", 0 < r1 < r2 <= R <= M.L * (1 + 1e-12)),
            hyp("0<alpha<1", 0 < alpha < 1), hyp("p>n/2", p > n / 2)]
    if not all(h["passed"] for h in hyps):
        return finish("local_volume_ratio", inputs, hyps, [])
    eps = local_ratio_epsilon(n, p, alpha)
    kbar = integral_curvature(M, constant(0.0), p, R, "k_minus", averaged=True).value
    hyps.append(hyp("R^2*kbar<eps", R * R * kbar < eps, f"R^2 kbar = {R * R * kbar!r}, eps = {eps!r}"))
    chk = check(alpha * (r1 / r2) ** n, ball_volume(M, r1) / ball_volume(M, r2), name="volume ratio")
    return finish("local_volume_ratio", inputs, hyps, [chk], grid={"eps": eps, "kbar": kbar})


def local_ratio_threshold_radius(M: RotSymManifold, p: float, alpha: float, R_max: float) -> float:
    """Largest R (by bisection) with R^2 kbar(p,q,0,R) < eps; R_max if never reached."""
    eps = local_ratio_epsilon(M.n, p, alpha)
    q = lambda R: R * R * integral_curvature(M, constant(0.0), p, R, "k_minus", averaged=True).value - eps
    if q(R_max) < 0:
        return R_max
    lo, hi = 0.0, R_max
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mid == 0 or q(mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo


def verify_geodesic_tube(k_curv: float, n: int, p: float, L_N: float, R: float) -> VerificationReport:
    inputs = {"k": k_curv, "n": n, "p": p, "L_N": L_N, "R": R}
    hyps = [hyp("n>2", n > 2), hyp("p>n-1", p > n - 1)]
    if k_curv > 0:
        hyps.append(hyp("R<pi/(2 sqrt k)", R < math.pi / (2 * math.sqrt(k_curv))))
    if not all(h["passed"] for h in hyps):
        return finish("geodesic_tube", inputs, hyps, [])
    lhs = spaceform_tube_volume(k_curv, n, L_N, R)
    kps = tube_integral_curvature(Segment(k_curv, n, L_N), constant(0.0), p, R, "k_plus_star").value if R > 0 else 0.0
    rhs = C.tube_bound_geodesic(n, p, L_N, kps, R)
    return finish("geodesic_tube", inputs, hyps, [check(lhs, rhs, name="tube volume")], grid={"k_plus_star": kps})


def verify_geodesic_tube_model(k_curv: float, n: int, p: float, L_N: float, R: float, lambda_inf: float | None = None,
                  beta_reading: str = "n-1-delta") -> VerificationReport:
    lam_inf = min(k_curv, 0.0) if lambda_inf is None else lambda_inf
    inputs = {"k": k_curv, "n": n, "p": p, "L_N": L_N, "R": R, "lambda_inf": lam_inf,
              "beta_reading": beta_reading}
    hyps = [hyp("n>2", n > 2), hyp("p>n-1", p > n - 1), hyp("lambda_inf<=0", lam_inf <= 0)]
    if k_curv > 0:
        hyps.append(hyp("R<pi/(2 sqrt k)", R < math.pi / (2 * math.sqrt(k_curv))))
    if not all(h["passed"] for h in hyps):
        return finish("geodesic_tube_model", inputs, hyps, [])
    lhs = spaceform_tube_volume(k_curv, n, L_N, R)
    kps = tube_integral_curvature(Segment(k_curv, n, L_N), constant(lam_inf), p, R, "k_plus_star").value if R > 0 else 0.0
    rhs = C.tube_bound_F(n, p, L_N, lam_inf, kps, R, beta_reading=beta_reading)
    other = "n-delta" if beta_reading == "n-1-delta" else "n-1-delta"
    alt = C.tube_bound_F(n, p, L_N, lam_inf, kps, R, beta_reading=other)
    return finish("geodesic_tube_model", inputs, hyps, [check(lhs, rhs, name="tube volume")],
                  grid={"k_plus_star": kps, "rhs_other_reading": alt, "other_reading": other})


def verify_cone_volume(M: RotSymManifold, p: float, lam: RadialFunction, R: float,
                   vol_Shat: float | None = None, beta_reading: str = "n-delta") -> VerificationReport:
    n = M.n
    vol_Shat = sphere_measure(n) if vol_Shat is None else vol_Shat
    inputs = {**_manifold_inputs(M), "lambda": lam.describe(), "p": p, "R": R, "vol_Shat": vol_Shat}
    hyps = [hyp("p>n/2", p > n / 2), hyp("R<=L", R <= M.L * (1 + 1e-12)),
            hyp("0<vol_Shat<=w_n", 0 < vol_Shat <= sphere_measure(n) * (1 + 1e-12))]
    if not all(h["passed"] for h in hyps):
        return finish("cone_volume", inputs, hyps, [])
    lam_inf, lam_sup = _lam_range(lam, 0.0, R)
    hyps.append(hyp("lambda<=0", lam_sup <= 0.0, f"max lambda = {lam_sup!r}"))
    lhs = vol_Shat * ball_volume(M, R) / sphere_measure(n)
    k_lam = integral_curvature(M, lam, p, R, "k_minus").value
    k_zero = integral_curvature(M, constant(0.0), p, R, "k_minus").value
    rhs = C.cone_bound_G(n, p, vol_Shat, min(lam_inf, 0.0), k_lam, R, k_minus_zero=k_zero,
                         beta_reading=beta_reading)
    return finish("cone_volume", inputs, hyps, [check(lhs, rhs, name="cone volume")],
                  grid={"k_minus": k_lam, "k_minus_zero": k_zero, "lambda_inf": lam_inf})


def verify_hypersurface_tube(M: RotSymManifold, p: float, lam: RadialFunction, t0: float, R: float) -> VerificationReport:
    n = M.n
    inputs = {**_manifold_inputs(M), "lambda": lam.describe(), "p": p, "t0": t0, "R": R}
    hyps = [hyp("p>n/2", p > n / 2), hyp("0<t0<L", 0 < t0 < M.L), hyp("R>0", R > 0)]
    if not all(h["passed"] for h in hyps):
        return finish("hypersurface_tube", inputs, hyps, [])
    lam_inf, lam_sup = _lam_range(lam, 0.0, R)
    hyps += [hyp("lambda_inf<0", lam_inf < 0, f"lambda_inf = {lam_inf!r}"),
             hyp("lambda<=0 along the hypersurface", lam_sup <= 0.0, f"max lambda = {lam_sup!r}")]
    if lam_inf >= 0:
        return finish("hypersurface_tube", inputs, hyps, [])
    lo, hi = max(0.0, t0 - R), min(M.L, t0 + R)
    lhs = annulus_volume(M, lo, hi)
    vol_N = sphere_area(M, t0)
    H = sphere_mean_curvature(M, t0)
    H_int = abs(H) ** (2 * p - 1) * vol_N
    k = tube_integral_curvature(GeodesicSphere(M, t0), lam, p, R, "k_minus").value
    rhs = C.hypersurface_tube_bound(n, p, lam_inf, R, vol_N, H_int, k)
    return finish("hypersurface_tube", inputs, hyps, [check(lhs, rhs, name="tube volume")],
                  grid={"k_minus": k, "vol_N": vol_N, "H": H, "tube": [lo, hi]})


def verify_volume_growth(M: RotSymManifold, p: float, R_ladder, s: float | None = None) -> VerificationReport:
    """Asymptotics of ball volumes along a radius ladder (N = pole).

    Claim (1) needs bounded k_minus(p,q,0,R) along the ladder; it is judged by
    the tail of the quotients being nonincreasing. Claim (2) is judged at the
    last ladder point, dropping the vanishing O-term (recorded in notes).
    """
    from .errors import LadderTooShort
    R_ladder = [float(R) for R in R_ladder]
    if len(R_ladder) < 3:
        raise LadderTooShort("need at least three ladder radii")
    n = M.n
    inputs = {**_manifold_inputs(M), "p": p, "R_ladder": R_ladder, "s": s}
    vols = [ball_volume(M, R) for R in R_ladder]
    areas = [sphere_area(M, R) for R in R_ladder]
    ks = [integral_curvature(M, constant(0.0), p, R, "k_minus").value for R in R_ladder]
    q1 = [v ** (1 / (2 * p)) / R for v, R in zip(vols, R_ladder)]
    q2 = [a / v ** (1 - 1 / (2 * p)) for a, v in zip(areas, vols)]
    k_tail = ks[-3:]
    bounded = max(k_tail) - min(k_tail) <= 1e-3 * max(1.0, max(k_tail))
    hyps = [hyp("p>n/2", p > n / 2), hyp("k_minus bounded along ladder", bounded, f"tail {k_tail!r}")]
    checks = []
    notes = []
    if bounded:
        for q, name in ((q1, "vol^(1/2p)/R"), (q2, "area/vol^(1-1/2p)")):
            checks += [check(q[i + 1], q[i], name=f"{name} nonincreasing at R={R_ladder[i + 1]!r}")
                       for i in range(len(q) - 3, len(q) - 1)]
    if s is not None:
        hyps.append(hyp("s<1/2p", s < 1 / (2 * p)))
        c8 = C.c8(n, p)
        lhs = areas[-1] / vols[-1] ** (1 - s)
        rhs = c8 * math.sqrt(ks[-1]) / vols[-1] ** (1 / (2 * p) - s)
        checks.append(check(lhs, rhs, name="claim (2) at last ladder point"))
        notes.append("claim (2) compared without its O(vol^(s-1/2p)) term")
    slopes = list(np.diff(np.log(q1)) / np.diff(np.log(R_ladder)))
    return finish("volume_growth", inputs, hyps, checks, notes=notes,
                  grid={"volumes": vols, "areas": areas, "k_minus": ks, "q1": q1, "q2": q2,
                        "loglog_slope_q1": slopes})


# -- isoperimetry ------------------------------------------------------------

def verify_isoperimetric_constant(M: RotSymManifold, p: float, tau: float, r1: float, n_candidates: int = 200) -> VerificationReport:
    n = M.n
    wn = sphere_measure(n)
    inputs = {**_manifold_inputs(M), "p": p, "tau": tau, "r1": r1}
    hyps = [hyp("p>n/2", p > n / 2), hyp("tau>0", tau > 0), hyp("0<r1<L", 0 < r1 < M.L)]
    if not all(h["passed"] for h in hyps):
        return finish("isoperimetric_constant", inputs, hyps, [])
    eta = (ball_volume(M, r1) / (wn * r1 ** n / n)) ** (-1 / n)
    r2 = eta * r1 / (1 + tau)
    reach = r1 + 2 * r2
    hyps += [hyp("r2<L", r2 < M.L), hyp("r1+2r2<=L", reach <= M.L, f"r1+2r2 = {reach!r}")]
    if not all(h["passed"] for h in hyps):
        return finish("isoperimetric_constant", inputs, hyps, [], grid={"eta": eta, "r2": r2})
    k = integral_curvature(M, constant(0.0), p, reach, "k_minus").value
    lhs_h = C.c6(n, p) * r1 ** (2 * p - n) * k ** p
    rhs_h = wn * min(tau ** (2 * p - 1) * eta ** (n - 2 * p),
                     2 * p * (n - 1) / (n * (2 * p - 1)) * tau * eta ** n / (1 + tau + eta) ** (2 * p))
    hyps.append(hyp("curvature smallness", lhs_h <= rhs_h, f"{lhs_h!r} <= {rhs_h!r}"))
    hyps.append(hyp("sup over centres approximated by the pole", True,
                    "off-pole norms are not computed"))
    radii = np.linspace(0, r2, n_candidates + 1)[1:]
    vals = [sphere_area(M, r) / ball_volume(M, r) ** ((n - 1) / n) for r in radii]
    lhs = min(vals)
    rhs = 2 ** ((n - 1) / n) * (tau * eta / (1 + tau + eta)) ** (n + 1) * C.iso_euclidean(n)[0]
    return finish("isoperimetric_constant", inputs, hyps, [check(lhs, rhs, ">=", name="candidate-family C_I")],
                  grid={"eta": eta, "r2": r2, "k_minus": k},
                  notes=["necessary-condition check over pole-centred balls"])


def _half_volume_radius(M: RotSymManifold, volM: float) -> float:
    f = lambda r: ball_volume(M, r) - volM / 2
    lo, hi = 0.0, M.L
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * M.L:
            break
    return 0.5 * (lo + hi)


def _cap_candidates(M: RotSymManifold, volM: float, count: int = 400):
    """(r, boundary area, enclosed volume) for caps B(q,r) and their complements."""
    out = []
    for r in np.linspace(0, M.L, count + 1)[1:-1]:
        a, v = sphere_area(M, r), ball_volume(M, r)
        out.append((float(r), a, v))
        out.append((float(r), a, volM - v))
    return out


def isoperimetric_quantity_radial(M: RotSymManifold, p: float) -> float:
    """Is(p) restricted to caps about the pole and their complements with vol <= vol(M)/2."""
    if not M.closed:
        raise ParamRange("Is(p) needs a closed manifold")
    volM = ball_volume(M, M.L)
    e = 1 - 1 / (2 * p)
    q = lambda a, v: a / v ** e * volM ** (-1 / (2 * p))
    vals = [(q(a, v), r) for r, a, v in _cap_candidates(M, volM) if v <= volM / 2]
    rh = _half_volume_radius(M, volM)
    vals.append((q(sphere_area(M, rh), volM / 2), rh))
    best, r_best = min(vals)
    # polish inside the admissible side of the best grid radius
    if abs(r_best - rh) > 1e-12:
        side_small = ball_volume(M, r_best) <= volM / 2
        def obj(r):
            v = ball_volume(M, r)
            v = v if side_small else volM - v
            return q(sphere_area(M, r), v) if v <= volM / 2 else math.inf
        step = M.L / 400
        res = minimize_scalar(obj, bounds=(max(r_best - step, 1e-12), min(r_best + step, M.L - 1e-12)),
                              method="bounded", options={"xatol": 1e-12})
        best = min(best, float(res.fun))
    return best


def verify_isoperimetric_quantity(M: RotSymManifold, p: float, lam: RadialFunction, D: float) -> VerificationReport:
    n = M.n
    inputs = {**_manifold_inputs(M), "lambda": lam.describe(), "p": p, "D": D}
    hyps = [hyp("closed", M.closed), hyp("p>n/2", p > n / 2), hyp("D>=L", D >= M.L * (1 - 1e-12))]
    if not all(h["passed"] for h in hyps):
        return finish("isoperimetric_quantity", inputs, hyps, [])
    lam_inf, _ = _lam_range(lam, 0.0, M.L)
    hyps.append(hyp("lambda_inf<0", lam_inf < 0, f"lambda_inf = {lam_inf!r}"))
    if lam_inf >= 0:
        return finish("isoperimetric_quantity", inputs, hyps, [])
    volM = ball_volume(M, M.L)
    rh = _half_volume_radius(M, volM)
    k = tube_integral_curvature(GeodesicSphere(M, rh), lam, p, D, "k_minus").value
    kk = C.c7(n, p) * math.sqrt(-lam_inf)
    lhs_h = ((n - 1) * math.sqrt(-lam_inf)) ** (-p) * k ** p
    rhs_h = volM / 2 / math.expm1(kk * D)
    hyps.append(hyp("curvature smallness", lhs_h <= rhs_h, f"{lhs_h!r} <= {rhs_h!r}"))
    c10 = C.c10(n, p, lam_inf, D)
    e = 1 - 1 / (2 * p)
    checks = []
    for r, a, v in _cap_candidates(M, volM, count=200):
        frac = min(v, volM - v) / volM
        checks.append(check(a / volM, c10 * frac ** e, ">=", name=f"cap r={r!r}"))
    return finish("isoperimetric_quantity", inputs, hyps, checks, grid={"c10": c10, "k_minus": k, "half_radius": rh},
                  notes=["necessary-condition check over caps about the pole"])


# -- dividing hypersurfaces --------------------------------------------------

def _lambda_inf_of(lam, D):
    if isinstance(lam, RadialFunction):
        return _lam_range(lam, 0.0, D)[0]
    return float(lam)


def geodesic_bound_details(n: int, p: float, lam, w: float, D: float, epsilon: float,
                           beta_reading: str = "n-1-delta") -> dict:
    """Solve bound(l) = w for the shortest closed geodesic length l.

    With lambda_inf < 0 the bound is tube_bound_F. With lambda_inf = 0 the
    geodesic-tube bound (a+b)^{n-2} int((e^{bt}-1)/b)^{n-2} with k = epsilon is
    used instead; tube_bound_F is infinite there whenever epsilon > 0.
    """
    if not (n > 2 and p > n - 1):
        raise ParamRange("needs n > 2 and p > n - 1")
    if not w > 0:
        raise ParamRange("w must be positive")
    lam_inf = min(_lambda_inf_of(lam, D), 0.0)
    if lam_inf == 0:
        bound = lambda l: C.tube_bound_geodesic(n, p, l, epsilon, D)
        used = "geodesic tube bound (lambda_inf = 0)"
    else:
        bound = lambda l: C.tube_bound_F(n, p, l, lam_inf, epsilon, D, beta_reading=beta_reading)
        used = f"F ({beta_reading})"
    b0 = bound(0.0)
    if b0 >= w:
        return {"delta": 0.0, "flag": "bound at zero length already exceeds w", "bound": used, "residual": b0 - w}
    hi = 1.0
    while bound(hi) < w:
        hi *= 2
        if hi > 1e300:
            raise NoRoot("bound never reaches w")
    lo = 0.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if bound(mid) < w:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4e-16 * hi:
            break
    d = 0.5 * (lo + hi)
    return {"delta": d, "flag": "", "bound": used, "residual": bound(d) - w}


def shortest_geodesic_bound(n, p, lam, w, D, epsilon, beta_reading="n-1-delta") -> float:
    return geodesic_bound_details(n, p, lam, w, D, epsilon, beta_reading)["delta"]


def verify_divider_area(M: RotSymManifold, ms: ModelSpace, p: float, K: float, R: float, alpha: float,
                  s_divider: float) -> VerificationReport:
    n = M.n
    inputs = {**_manifold_inputs(M), "lambda": ms.lam.describe(), "p": p, "K": K, "R": R,
              "alpha": alpha, "s_divider": s_divider}
    hyps = [hyp("p>n/2", p > n / 2), hyp("0<alpha<1", 0 < alpha < 1),
            hyp("R<=min(L,l)", R <= min(M.L, ms.extent) * (1 + 1e-12)),
            hyp("0<s<R", 0 < s_divider < R)]
    if not all(h["passed"] for h in hyps):
        return finish("divider_area", inputs, hyps, [])
    k = integral_curvature(M, ms.lam, p, R, "k_minus").value
    hyps.append(hyp("k_minus<=K", k <= K * (1 + 1e-12) + 1e-15, f"k_minus = {k!r}"))
    v1 = ball_volume(M, s_divider)
    v2 = annulus_volume(M, s_divider, R)
    half = R / 2
    in1 = min(v1, ball_volume(M, min(s_divider, half)))
    in2 = annulus_volume(M, s_divider, half) if s_divider < half else 0.0
    ok1, ok2 = in1 <= alpha * v1, in2 <= alpha * v2
    hyps.append(hyp("inner-ball volume condition for D1 or D2", ok1 or ok2, f"D1: {ok1}, D2: {ok2}"))
    lhs = sphere_area(M, s_divider)
    best = None
    for t in C.candidate_ts(R):
        cc = C.c13_c14(ms, n, p, K, R, alpha, t)
        val = cc["c13"] * min(v1, v2) - cc["c14"]
        if best is None or val > best[0]:
            best = (val, cc)
    rhs, cc = best
    return finish("divider_area", inputs, hyps, [check(lhs, rhs, ">=", name="divider area")],
                  grid={"k_minus": k, **cc}, notes=["radial divider only"])


# -- fuzz family ----------------------------------------------------------------

@dataclass(frozen=True)
class FuzzCase:
    case_id: str
    n: int
    p: float
    r: float
    R: float
    g_expr: str | None
    lam_expr: str
    self_model: bool
    seed: int


def _g_expression(rng, R):
    coeffs = rng.uniform(-0.5, 0.5, size=3)
    x = np.linspace(0, R, 401)
    while True:
        poly = 1 + coeffs[0] * x ** 2 / 2 + coeffs[1] * x ** 3 / 6 + coeffs[2] * x ** 4 / 24
        if poly.min() > 0.1:
            break
        coeffs = coeffs * 0.5
    a2, a3, a4 = (float(c) for c in coeffs)
    return f"t*(1 + {a2!r}*t^2/2 + {a3!r}*t^3/6 + {a4!r}*t^4/24)"


def fuzz_cases(seed: int, n_cases: int, family_params: dict | None = None) -> list:
    fp = {"self_model_every": 5, "inject_positive_lambda": False, "R_range": (0.5, 2.0)}
    fp.update(family_params or {})
    streams = np.random.SeedSequence(seed).spawn(n_cases)
    cases = []
    for i, ss in enumerate(streams):
        rng = np.random.Generator(np.random.PCG64(ss))
        n = int(rng.choice([2, 3, 4]))
        p = float(rng.choice([n / 2 + 0.5, 2.0 * n]))
        R = float(rng.uniform(*fp["R_range"]))
        r = float(rng.uniform(0.05, 0.9) * R)
        b0, b1 = float(rng.uniform(0, 1)), float(rng.uniform(0, 0.5))
        lam_expr = f"-({b0!r} + {b1!r}*t^2)"
        g_expr = _g_expression(rng, R)
        self_model = fp["self_model_every"] > 0 and i % fp["self_model_every"] == fp["self_model_every"] - 1
        if fp["inject_positive_lambda"] and i % 10 == 9:
            lam_expr = repr(float(rng.uniform(1.0, 2.0)))
            R = max(R, 1.6)
            r = 0.5 * R
            self_model = False
        cases.append(FuzzCase(case_id=f"case{i:04d}", n=n, p=p, r=r, R=R,
                              g_expr=None if self_model else g_expr, lam_expr=lam_expr,
                              self_model=self_model, seed=seed))
    return cases


def run_case(case: FuzzCase) -> list:
    lam = make_radial(case.lam_expr)
    ms = solve_warp(lam, T=case.R * 1.05 + 0.01, n=case.n)
    if case.self_model:
        M = RotSymManifold.from_model(case.n, ms)
    else:
        M = RotSymManifold.from_warp(case.n, make_radial(case.g_expr), L=case.R * 1.05 + 0.01)
    R = min(case.R, ms.extent, M.L)
    reports = [verify_volume_ratio(M, ms, case.p, case.r, R), verify_psi_bound(M, ms, case.p, R),
               verify_cone_volume(M, case.p, lam, R)]
    if case.self_model:
        reports.append(verify_bishop_gromov(M, ms, np.linspace(0, R, 9)[1:], p=case.p))
    for rep in reports:
        rep.seed = case.seed
        rep.case_id = case.case_id
        rep.inputs = {**rep.inputs, "self_model": case.self_model}
    return reports


def fuzz_suite(seed: int, n_cases: int, family_params: dict | None = None) -> list:
    reports = []
    for case in fuzz_cases(seed, n_cases, family_params):
        reports.extend(run_case(case))
    return reports
