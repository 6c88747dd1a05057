"""Pointwise curvature deficiencies, their L^p norms over balls and tubes, and the density psi."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._common import sphere_measure
from .errors import OutOfDomain, UnsupportedBase
from .funcspec import RadialFunction
from .manifold import RotSymManifold, ball_volume, fermi_element, spaceform_tube_volume, annulus_volume
from .model import ModelSpace
from .quadrature import adaptive_simpson, sign_changes

KINDS = ("k_minus", "k_minus_star", "k_plus", "k_plus_star")
RTOL = 1e-10
# pointwise density level below which an L^p integrand is treated as noise
DENSITY_FLOOR = 1e-9
# relative rounding of the interpolated log-derivatives entering psi
PSI_ROUNDING = 1e-13


def _atol(power: float, weight, a: float, b: float) -> float:
    """Absolute floor: DENSITY_FLOOR^power times the integral of the weight."""
    if b <= a:
        return 0.0
    x = np.linspace(a, b, 65)
    w = np.abs(np.asarray(weight(x), dtype=float))
    return DENSITY_FLOOR ** power * float(np.trapezoid(w, x)) + 1e-300


@dataclass(frozen=True)
class CurvatureNorm:
    kind: str
    base: str
    p: float
    R: float
    averaged: bool
    value: float
    p_above_half_dim: bool

    def as_dict(self):
        return {"kind": self.kind, "base": self.base, "p": self.p, "R": self.R,
                "averaged": self.averaged, "value": self.value,
                "p_above_half_dim": self.p_above_half_dim}


def _inner(kind: str, n: int, ratio, lam_vals):
    """Signed curvature excess whose positive or negative part is the deficiency."""
    if kind in ("k_minus", "k_minus_star"):
        return (n - 1) * ratio - (n - 1) * lam_vals
    return ratio - lam_vals


def _part(kind: str, inner):
    # k_minus: |min{0, Ric-(n-1)lam}|, k_minus_star: max part,
    # k_plus: |max{0, K-lam}|, k_plus_star: |min{0, K-lam}|
    if kind in ("k_minus", "k_plus_star"):
        return np.maximum(0.0, -inner)
    return np.maximum(0.0, inner)


def _check_kind(kind):
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")


def deficiency(M: RotSymManifold, lam: RadialFunction, t, kind: str):
    _check_kind(kind)
    M._inside(t)
    t = np.asarray(t, dtype=float)
    out = _part(kind, _inner(kind, M.n, M.curvature_ratio(t), np.asarray(lam.value(t))))
    return float(out) if out.ndim == 0 else out


def rho(M, lam, t):
    return deficiency(M, lam, t, "k_minus")


def rho_tilde(M, lam, t):
    return deficiency(M, lam, t, "k_minus_star")


def mu(M, lam, t):
    return deficiency(M, lam, t, "k_plus")


def mu_tilde(M, lam, t):
    return deficiency(M, lam, t, "k_plus_star")


def _kinks(inner_fn, a, b):
    probe = np.linspace(a, b, 257)
    scale = 1.0 + float(np.max(np.abs(inner_fn(probe))))
    return sign_changes(inner_fn, a, b, n_grid=2001, xtol=1e-10, ztol=1e-12 * scale)


def deficiency_integral(M: RotSymManifold, lam: RadialFunction, p: float, a: float, b: float, kind: str) -> float:
    """Integral of dens^p g^{n-1} dt over [a, b] (no sphere factor)."""
    _check_kind(kind)
    if b > M.L * (1 + 1e-12) or a < 0:
        raise OutOfDomain("integration range outside [0, L]")
    b = min(b, M.L)
    if b <= a:
        return 0.0
    n = M.n

    def inner(x):
        return _inner(kind, n, M.curvature_ratio(x), np.asarray(lam.value(x)))

    probe = np.linspace(a, b, 257)
    snap = 1e-12 * (1.0 + float(np.max(np.abs(inner(probe)))))

    def integrand(x):
        gv = np.abs(np.asarray(M.g.value(x), dtype=float))
        v = inner(x)
        v = np.where(np.abs(v) <= snap, 0.0, v)
        return _part(kind, v) ** p * gv ** (n - 1)

    atol = _atol(p, lambda x: np.asarray(M.g.value(x), dtype=float) ** (n - 1), a, b)
    return adaptive_simpson(integrand, a, b, rtol=RTOL, atol=atol, breakpoints=_kinks(inner, a, b))


def integral_curvature(M: RotSymManifold, lam: RadialFunction, p: float, R: float,
                       kind: str = "k_minus", averaged: bool = False) -> CurvatureNorm:
    if not 0 < R <= M.L * (1 + 1e-12):
        raise OutOfDomain("need 0 < R <= L")
    R = min(R, M.L)
    total = sphere_measure(M.n) * deficiency_integral(M, lam, p, 0.0, R, kind)
    if averaged:
        total /= ball_volume(M, R)
    return CurvatureNorm(kind=kind, base="pole", p=p, R=R, averaged=averaged,
                         value=total ** (1.0 / p), p_above_half_dim=p > M.n / 2)


def psi(M: RotSymManifold, ms: ModelSpace, t):
    """max{0, (n-1)(g'/g - f'/f)}; taken as 0 for t < 1e-6 where it vanishes linearly."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > min(M.L, ms.extent) * (1 + 1e-12)):
        raise OutOfDomain("radius outside (0, min(L, l))")
    out = _psi_raw(M, ms, t)
    return float(out) if out.ndim == 0 else out


def _psi_raw(M, ms, t):
    t = np.asarray(t, dtype=float)
    safe = np.where(t < 1e-6, 1.0, t)
    with np.errstate(all="ignore"):
        diff = np.asarray(M.g.d1(safe)) / np.asarray(M.g.value(safe)) - ms.df(safe) / ms.f(safe)
    return np.where(t < 1e-6, 0.0, np.maximum(0.0, (M.n - 1) * diff))


def psi_integral(M: RotSymManifold, ms: ModelSpace, p: float, r: float) -> float:
    """Integral of psi^{2p} g^{n-1} over [0, r]."""
    if r <= 0:
        return 0.0
    n = M.n

    def logderivs(x):
        x = np.maximum(x, 1e-6)
        return np.asarray(M.g.d1(x)) / np.asarray(M.g.value(x)), ms.df(x) / ms.f(x)

    def inner(x):
        a, b = logderivs(x)
        return np.where(x < 1e-6, 0.0, a - b)

    def integrand(x):
        return _psi_raw(M, ms, x) ** (2 * p) * np.abs(np.asarray(M.g.value(x))) ** (n - 1)

    def noise(x):
        # psi is a difference of two log-derivatives of size ~1/t
        a, b = logderivs(x)
        dpsi = (n - 1) * PSI_ROUNDING * (np.abs(a) + np.abs(b))
        ps = _psi_raw(M, ms, x)
        return 2 * p * (ps + dpsi) ** (2 * p - 1) * dpsi * np.abs(np.asarray(M.g.value(x))) ** (n - 1)

    atol = _atol(2 * p, lambda x: np.asarray(M.g.value(x), dtype=float) ** (n - 1), 0.0, r)
    return adaptive_simpson(integrand, 0.0, r, rtol=RTOL, atol=atol, noise=noise,
                            breakpoints=_kinks(inner, 1e-6, r))


# -- tube bases -------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    """Geodesic segment of length L_N in the space form of curvature k."""
    k: float
    n: int
    L_N: float


@dataclass(frozen=True)
class GeodesicSphere:
    """The sphere of radius t0 about the pole of M."""
    M: RotSymManifold
    t0: float


def tube_integral_curvature(base, lam: RadialFunction, p: float, R: float, kind: str,
                            averaged: bool = False) -> CurvatureNorm:
    _check_kind(kind)
    if isinstance(base, Segment):
        n = base.n
        if n < 3:
            raise UnsupportedBase("segment tubes need n >= 3")
        elem = fermi_element(base.k, n)

        def inner(s):
            return _inner(kind, n, np.full_like(np.asarray(s, dtype=float), base.k), np.asarray(lam.value(s)))

        def integrand(s):
            return _part(kind, inner(s)) ** p * elem(s)

        if R <= 0:
            total = 0.0
        else:
            total = base.L_N * sphere_measure(n - 1) * adaptive_simpson(
                integrand, 0.0, R, rtol=RTOL, atol=_atol(p, elem, 0.0, R),
                breakpoints=_kinks(inner, 0.0, R))
        vol = spaceform_tube_volume(base.k, n, base.L_N, R) if averaged else 1.0
        label = f"segment(k={base.k!r}, L_N={base.L_N!r})"
    elif isinstance(base, GeodesicSphere):
        M, t0 = base.M, base.t0
        n = M.n
        lo, hi = max(0.0, t0 - R), min(M.L, t0 + R)

        def inner(t):
            return _inner(kind, n, M.curvature_ratio(t), np.asarray(lam.value(np.abs(t - t0))))

        def integrand(t):
            return _part(kind, inner(t)) ** p * np.abs(np.asarray(M.g.value(t))) ** (n - 1)

        if hi <= lo:
            total = 0.0
        else:
            bps = _kinks(inner, lo, hi) + [t0]
            atol = _atol(p, lambda x: np.asarray(M.g.value(x), dtype=float) ** (n - 1), lo, hi)
            total = sphere_measure(n) * adaptive_simpson(integrand, lo, hi, rtol=RTOL, atol=atol,
                                                         breakpoints=bps)
        vol = annulus_volume(M, lo, hi) if averaged else 1.0
        label = f"sphere(t0={t0!r})"
    else:
        raise UnsupportedBase(f"unsupported base {type(base).__name__}")
    value = (total / vol) ** (1.0 / p) if total > 0 else 0.0
    return CurvatureNorm(kind=kind, base=label, p=p, R=R, averaged=averaged, value=value,
                         p_above_half_dim=p > n / 2)
