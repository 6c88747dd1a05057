"""First Dirichlet eigenvalues of the Laplacian and the p-Laplacian on geodesic balls
about the pole, and the volume-growth upper bounds for the bottom of the spectrum.

Radial functions reduce both operators to a weighted one-dimensional problem with
weight ``w = g^{n-1}``. The discretisation is finite-volume: cell centres at
``(i + 1/2) h``, face weights ``w`` at ``i h`` (zero at the pole, which gives the
regularity condition ``u'(0) = 0``), and a half cell next to the Dirichlet end.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.linalg import solveh_banded

from . import constants as C
from .curvature import integral_curvature
from .errors import (EigensolveFailure, LadderTooShort, NotIntegrable, OptimizerStalled,
                     OutOfDomain, ParamRange)
from .funcspec import constant
from .manifold import RotSymManifold, ball_volume, sphere_area
from .quadrature import adaptive_simpson

LAPLACIAN = "laplacian"
P_LAPLACIAN = "p_laplacian"
FD_EIGENSOLVE = "finite-difference eigensolve"
RAYLEIGH_MIN = "Rayleigh minimization"
EXP_TEST = "exponential test function"


@dataclass(frozen=True)
class SpectralEstimate:
    value: float
    operator: str
    R: float
    grid_size: int
    method: str
    residual: float
    flat: float = 2.0
    notes: tuple = ()

    def as_dict(self):
        return asdict(self)


# -- discretisation ---------------------------------------------------------

def _check_ball(M: RotSymManifold, R: float, grid_size: int):
    if not 0 < R < M.L * (1 + 1e-12) or (M.closed and R >= M.L):
        raise OutOfDomain("need 0 < R < L")
    if grid_size < 100:
        raise ParamRange("grid_size must be at least 100")


def _weights(M: RotSymManifold, R: float, N: int):
    """Cell weights V (length N) and face weights G (length N + 1), scaled by max V."""
    h = R / N
    centres = (np.arange(N) + 0.5) * h
    faces = np.arange(N + 1) * h
    m = M.n - 1
    with np.errstate(over="ignore"):
        V = np.abs(np.asarray(M.g.value(centres), dtype=float)) ** m
        G = np.abs(np.asarray(M.g.value(faces), dtype=float)) ** m
    scale = max(float(V.max()), float(G.max()))
    if not math.isfinite(scale) or scale <= 0:
        raise EigensolveFailure("radial weight overflowed or vanished")
    return h, centres, V / scale, G / scale


def _tridiagonal(M, R, N):
    """Symmetric form V^{-1/2} A V^{-1/2} of the discrete Dirichlet problem."""
    h, centres, V, G = _weights(M, R, N)
    cond = G[1:].copy()                   # face i+1/2 between cells i and i+1
    cond[-1] *= 2.0                       # half cell to the Dirichlet end
    diag = (G[:-1] + cond) / h ** 2
    off = -G[1:-1] / h ** 2
    s = 1.0 / np.sqrt(V)
    if np.any(V <= 0):
        raise EigensolveFailure("degenerate weight inside the ball")
    return diag * s * s, off * s[:-1] * s[1:], centres, V


def sturm_count(diag, off, x: float) -> int:
    """Number of eigenvalues of the symmetric tridiagonal matrix below ``x``."""
    count = 0
    q = 1.0
    b2 = [0.0] + [float(b) * float(b) for b in off]
    tiny = 1e-300
    for a, bb in zip(diag.tolist(), b2):
        q = a - x - (bb / q if bb else 0.0)
        if q == 0.0:
            q = -tiny
        if q < 0:
            count += 1
    return count


def smallest_eigenvalue(diag, off, rtol: float = 1e-14) -> float:
    """Lowest eigenvalue by bisection on Sturm counts."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    ab = np.abs(off)
    radius = np.zeros_like(diag)
    radius[:-1] += ab
    radius[1:] += ab
    lo = float(np.min(diag - radius))
    hi = float(np.min(diag + radius))
    hi = max(hi, float(diag.min()))
    if sturm_count(diag, off, hi) == 0:
        hi = float(np.max(diag + radius))
    for _ in range(400):
        if hi - lo <= rtol * max(abs(hi), abs(lo), 1e-300):
            break
        mid = 0.5 * (lo + hi)
        if sturm_count(diag, off, mid) >= 1:
            hi = mid
        else:
            lo = mid
    else:
        raise EigensolveFailure("Sturm bisection did not converge")
    return 0.5 * (lo + hi)


def _fd_eigen(M, R, N):
    d, e, _, _ = _tridiagonal(M, R, N)
    lam = smallest_eigenvalue(d, e)
    if not math.isfinite(lam) or lam <= 0:
        raise EigensolveFailure("nonpositive Dirichlet eigenvalue")
    return lam


def dirichlet_eigenvalue(M: RotSymManifold, R: float, grid_size: int = 4000) -> SpectralEstimate:
    """First Dirichlet eigenvalue of the ball B(pole, R).

    ``residual`` is the Richardson error estimate |lam_N - lam_{N/2}| / 3.
    """
    _check_ball(M, R, grid_size)
    fine = _fd_eigen(M, R, grid_size)
    coarse = _fd_eigen(M, R, grid_size // 2)
    return SpectralEstimate(value=fine, operator=LAPLACIAN, R=float(R), grid_size=grid_size,
                            method=FD_EIGENSOLVE, residual=abs(fine - coarse) / 3.0)


def ground_state(M: RotSymManifold, R: float, grid_size: int = 4000):
    """(cell centres, eigenfunction normalised to max 1) by shifted inverse iteration."""
    _check_ball(M, R, grid_size)
    d, e, centres, V = _tridiagonal(M, R, grid_size)
    lam = smallest_eigenvalue(d, e)
    shift = lam * (1 - 1e-9) - 1e-300
    ab = np.zeros((2, d.size))
    ab[0, 1:] = e
    ab[1] = d - shift
    y = np.ones(d.size)
    for _ in range(4):
        y = solveh_banded(ab, y)
        y /= np.max(np.abs(y))
    u = y / np.sqrt(V)
    u /= u[np.argmax(np.abs(u))]
    return centres, u


def lambda1_estimate(M: RotSymManifold, R: float, grid_size: int = 4000) -> SpectralEstimate:
    """Estimate of lim_{R->inf} of the ball eigenvalue from the balls of radius R/2 and R.

    The ball eigenvalue approaches its limit like C / R^2 on manifolds with a
    spectral gap, so one Richardson step in 1/R^2 removes the leading term.
    ``residual`` is the size of that correction.
    """
    full = dirichlet_eigenvalue(M, R, grid_size)
    half = dirichlet_eigenvalue(M, R / 2, max(100, grid_size // 2))
    est = (4.0 * full.value - half.value) / 3.0
    return SpectralEstimate(value=est, operator=LAPLACIAN, R=float(R), grid_size=grid_size,
                            method=FD_EIGENSOLVE, residual=abs(full.value - est),
                            notes=(f"ball eigenvalue at R: {full.value!r}",
                                   f"ball eigenvalue at R/2: {half.value!r}",
                                   "extrapolated in 1/R^2"))


# -- p-Laplacian ------------------------------------------------------------

def _shoot(lam, h, V, G, flat):
    """March the discrete Euler-Lagrange equation from the pole with u(0)=1.

    Returns True when ``lam`` is at or above the discrete eigenvalue, i.e. the
    profile reaches zero before the boundary.
    """
    q = 1.0 / (flat - 1.0)
    e = flat - 1.0
    u = 1.0
    F = 0.0
    N = len(V)
    hl = h * lam
    for i in range(N - 1):
        F -= hl * V[i] * u ** e
        u -= h * (-F / G[i + 1]) ** q
        if u <= 0.0:
            return True
    F -= hl * V[N - 1] * u ** e
    return u - 0.5 * h * (-F / G[N]) ** q <= 0.0


def _plap_discrete(M, R, N, flat):
    h, _, V, G = _weights(M, R, N)
    V, G = V.tolist(), G.tolist()
    lo, hi = 0.0, 1.0
    for _ in range(200):
        if _shoot(hi, h, V, G, flat):
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise OptimizerStalled("could not bracket the p-Laplacian eigenvalue")
    for _ in range(200):
        if hi - lo <= 1e-13 * hi:
            break
        mid = 0.5 * (lo + hi)
        if _shoot(mid, h, V, G, flat):
            hi = mid
        else:
            lo = mid
    lam = 0.5 * (lo + hi)
    if not math.isfinite(lam) or lam <= 0:
        raise OptimizerStalled("nonpositive p-Laplacian eigenvalue")
    return lam


def discrete_quotient(u, M: RotSymManifold, R: float, flat: float):
    """Discrete Rayleigh quotient sum G |du/h|^flat / sum V |u|^flat on the cell grid."""
    N = len(u)
    h, _, V, G = _weights(M, R, N)
    u = np.asarray(u, dtype=float)
    du = np.empty(N)
    du[:-1] = (u[1:] - u[:-1]) / h
    du[-1] = -u[-1] / (0.5 * h)
    width = np.full(N, h)
    width[-1] = 0.5 * h
    num = float(np.sum(G[1:] * np.abs(du) ** flat * width))
    den = float(np.sum(V * np.abs(u) ** flat) * h)
    return num / den


def p_laplacian_eigenvalue(M: RotSymManifold, R: float, flat: float, grid_size: int = 4000) -> SpectralEstimate:
    """First Dirichlet eigenvalue of the flat-Laplacian on B(pole, R).

    The minimiser of the discrete quotient is positive and satisfies the
    discrete Euler-Lagrange equation, a two-term recurrence from the pole; the
    eigenvalue is the parameter at which that profile first touches zero at R,
    found by bisection.
    """
    _check_ball(M, R, grid_size)
    if not 1 < flat <= 10:
        raise ParamRange("flat must lie in (1, 10]")
    fine = _plap_discrete(M, R, grid_size, flat)
    coarse = _plap_discrete(M, R, grid_size // 2, flat)
    return SpectralEstimate(value=fine, operator=P_LAPLACIAN, R=float(R), grid_size=grid_size,
                            method=RAYLEIGH_MIN, residual=abs(fine - coarse) / 3.0, flat=float(flat))


def p_laplacian_lambda1_estimate(M: RotSymManifold, R: float, flat: float,
                                 grid_size: int = 4000) -> SpectralEstimate:
    """Large-ball limit estimate, extrapolated in 1/R^2 from R/2 and R."""
    full = p_laplacian_eigenvalue(M, R, flat, grid_size)
    half = p_laplacian_eigenvalue(M, R / 2, flat, max(100, grid_size // 2))
    est = (4.0 * full.value - half.value) / 3.0
    return SpectralEstimate(value=est, operator=P_LAPLACIAN, R=float(R), grid_size=grid_size,
                            method=RAYLEIGH_MIN, residual=abs(full.value - est), flat=float(flat),
                            notes=(f"ball eigenvalue at R: {full.value!r}",
                                   f"ball eigenvalue at R/2: {half.value!r}",
                                   "extrapolated in 1/R^2"))


def minimize_quotient(M: RotSymManifold, R: float, flat: float, grid_size: int = 400,
                      u0=None, max_iter: int = 20000) -> float:
    """Direct quasi-Newton minimisation of the discrete quotient (independent route)."""
    from scipy.optimize import minimize

    h, centres, V, G = _weights(M, R, grid_size)
    width = np.full(grid_size, h)
    width[-1] = 0.5 * h
    Gf = G[1:]

    def fun(u):
        du = np.empty_like(u)
        du[:-1] = (u[1:] - u[:-1]) / h
        du[-1] = -u[-1] / (0.5 * h)
        a = np.abs(du)
        num = np.sum(Gf * a ** flat * width)
        den = np.sum(V * np.abs(u) ** flat) * h
        dnum_ddu = flat * Gf * a ** (flat - 1) * np.sign(du) * width
        gnum = np.zeros_like(u)
        gnum[:-1] -= dnum_ddu[:-1] / h
        gnum[1:] += dnum_ddu[:-1] / h
        gnum[-1] -= dnum_ddu[-1] / (0.5 * h)
        gden = flat * V * np.abs(u) ** (flat - 1) * np.sign(u) * h
        return num / den, (gnum * den - num * gden) / den ** 2

    if u0 is None:
        u0 = np.cos(0.5 * math.pi * centres / R)
    res = minimize(fun, np.asarray(u0, dtype=float), jac=True, method="L-BFGS-B",
                   options={"maxiter": max_iter, "ftol": 1e-15, "gtol": 1e-12, "maxcor": 30})
    if not math.isfinite(res.fun):
        raise OptimizerStalled("quotient minimisation produced a non-finite value")
    return float(res.fun)


# -- bounds for the bottom of the spectrum ----------------------------------

@dataclass
class SpectralBounds:
    flat: float
    p: float
    ladder: list
    growth_ratios: list
    averaged_deficiency: list
    growth_limsup: float
    deficiency_limsup: float
    middle: float
    right: float
    right_alpha: float | None
    converged: bool
    notes: list = field(default_factory=list)

    def as_dict(self):
        return asdict(self)


def ladder(R0: float, k: int) -> list:
    """Geometric ladder R0 * 2^j, j = 0..k (k <= 12)."""
    if not 0 <= k <= 12:
        raise ParamRange("ladder length k must be in [0, 12]")
    return [R0 * 2.0 ** j for j in range(k + 1)]


def tail_limsup(values, window: int = 3):
    """Running max of the last ``window`` values and whether they agree to 1e-3 relative."""
    tail = [float(v) for v in values[-window:]]
    top = max(tail)
    spread = top - min(tail)
    return top, bool(spread <= 1e-3 * max(abs(top), 1e-300))


def _bounds(M: RotSymManifold, p: float, flat: float, R_ladder, alpha):
    R_ladder = [float(r) for r in R_ladder]
    if len(R_ladder) < 3:
        raise LadderTooShort("need at least three ladder radii")
    if any(b <= a for a, b in zip(R_ladder, R_ladder[1:])):
        raise ParamRange("ladder must be increasing")
    if R_ladder[-1] > M.L * (1 + 1e-12):
        raise OutOfDomain("ladder exceeds the manifold")
    n = M.n
    zero = constant(0.0)
    ratios, kbars = [], []
    for R in R_ladder:
        ratios.append(sphere_area(M, R) / ball_volume(M, R))
        kbars.append(integral_curvature(M, zero, p, R, "k_minus", averaged=True).value)
    growth, conv_g = tail_limsup(ratios)
    kbar, conv_k = tail_limsup(kbars)
    c8 = C.c8(n, p)
    middle = (growth / flat) ** flat
    right = (c8 / (flat * math.sqrt(n - 1)) * math.sqrt(kbar)) ** flat
    notes = []
    right_alpha = None
    if alpha is not None:
        lam = constant(-float(alpha) ** 2)
        ks = [integral_curvature(M, lam, p, R, "k_minus").value for R in R_ladder]
        _, conv_a = tail_limsup(ks)
        if conv_a:
            right_alpha = (c8 * float(alpha) / flat) ** flat
        else:
            notes.append("curvature deficiency below -alpha^2 not settled along the ladder")
    return SpectralBounds(flat=float(flat), p=float(p), ladder=R_ladder, growth_ratios=ratios,
                          averaged_deficiency=kbars, growth_limsup=growth, deficiency_limsup=kbar,
                          middle=middle, right=right, right_alpha=right_alpha,
                          converged=conv_g and conv_k, notes=notes)


def spec_upper_bound(M: RotSymManifold, p: float, R_ladder, alpha: float | None = None) -> SpectralBounds:
    """Upper bounds for inf spec of the Laplacian from volume growth and from
    the averaged Ricci deficiency below 0, both as ladder-tail limsups."""
    return _bounds(M, p, 2.0, R_ladder, alpha)


def spec_upper_bound_plap(M: RotSymManifold, p: float, flat: float, R_ladder,
                          alpha: float | None = None) -> SpectralBounds:
    if not flat > 1:
        raise ParamRange("flat must exceed 1")
    return _bounds(M, p, flat, R_ladder, alpha)


def rayleigh_quotient(M: RotSymManifold, c: float, R_max: float, flat: float = 2.0) -> SpectralEstimate:
    """Quotient of the radial test function exp(-c t / flat), truncated at R_max.

    The truncated integrals are computed by quadrature. The neglected tails are
    bounded assuming the sphere area keeps growing at most at its log-derivative
    rate at R_max; ``residual`` bounds the change of the quotient from them.
    When ``c`` equals that rate the tails are not summable, but the truncated
    quotient still converges as R_max grows.
    """
    if not 0 < R_max <= M.L * (1 + 1e-12):
        raise OutOfDomain("need 0 < R_max <= L")
    R_max = min(R_max, M.L)
    n = M.n
    rate = (n - 1) * float(M.g.d1(R_max)) / float(M.g.value(R_max))
    if c < rate * (1 - 1e-9):
        raise NotIntegrable(f"c = {c!r} is below the area growth rate {rate!r}")
    s = c / flat
    m = n - 1

    def area_weighted(t):
        gv = np.abs(np.asarray(M.g.value(t), dtype=float))
        with np.errstate(divide="ignore"):
            return np.exp(m * np.log(np.where(gv > 0, gv, 1e-300)) - c * t) * (gv > 0)

    den = adaptive_simpson(area_weighted, 0.0, R_max, rtol=1e-12)
    num = adaptive_simpson(lambda t: s ** flat * area_weighted(t), 0.0, R_max, rtol=1e-12)
    gap = c - rate
    tail = float(area_weighted(np.array([R_max]))[0]) / gap if gap > 0 else math.inf
    q = num / den
    # truncation: numerator and denominator tails are s^flat * tail and tail
    bound = abs(s ** flat - q) * tail / (den + tail) if math.isfinite(tail) else abs(s ** flat - q)
    return SpectralEstimate(value=q, operator=LAPLACIAN if flat == 2 else P_LAPLACIAN, R=float(R_max),
                            grid_size=0, method=EXP_TEST, residual=bound, flat=float(flat),
                            notes=(f"relative tail mass bound {tail / den!r}",))
