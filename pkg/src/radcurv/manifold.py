"""Rotationally symmetric test manifolds [0, L) x_g S^{n-1} and space-form tube oracles."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._common import sphere_measure
from .errors import BadCurvatureRange, OutOfDomain, ParamRange
from .funcspec import RadialFunction, make_radial, radial_from_text
from .model import ModelSpace
from .quadrature import adaptive_simpson, sign_changes

POLE_EPS = 1e-8


@dataclass(frozen=True)
class RotSymManifold:
    n: int
    g: RadialFunction
    L: float
    closed: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ParamRange("n must be at least 2")
        if not self.L > 0:
            raise ParamRange("L must be positive")

    @classmethod
    def from_warp(cls, n: int, g: RadialFunction | str, L: float | None = None,
                  horizon: float = 50.0) -> "RotSymManifold":
        """Build from a warping; L defaults to the first zero of g (closed) or the horizon."""
        if isinstance(g, str):
            g = radial_from_text(g)
        if abs(float(g.value(0.0))) > 1e-9 or abs(float(g.d1(0.0)) - 1.0) > 1e-9:
            raise ParamRange("warping must satisfy g(0)=0 and g'(0)=1")
        if L is None:
            L = g.L if math.isfinite(g.L) else _first_zero(g, horizon)
        closed = math.isfinite(L) and abs(float(g.value(L))) <= 1e-9
        if not math.isfinite(L):
            L = horizon
        return cls(n=n, g=g, L=float(L), closed=closed)

    @classmethod
    def from_model(cls, n: int, ms: ModelSpace) -> "RotSymManifold":
        """The model itself as a test manifold (g = f)."""
        closed = ms.l_bounded
        return cls(n=n, g=ms.as_radial(), L=float(ms.extent), closed=closed)

    def _inside(self, t, allow_end=False):
        t = np.asarray(t, dtype=float)
        bad = (t <= 0) | ((t > self.L) if allow_end else (t >= self.L))
        if np.any(bad):
            raise OutOfDomain("radius outside (0, L)")
        return t

    def curvature_ratio(self, t):
        """-g''/g with the pole limit -g'''(0) where |g| < 1e-8."""
        t = np.asarray(t, dtype=float)
        gv = np.asarray(self.g.value(t), dtype=float)
        small = np.abs(gv) < POLE_EPS
        with np.errstate(all="ignore"):
            out = -np.asarray(self.g.d2(t), dtype=float) / gv
        if np.any(small):
            if self.g.d3 is not None:
                limit = -float(np.asarray(self.g.d3(0.0)))
                out = np.where(small & (t < 0.5 * self.L), limit, out)
            out = np.where(np.isfinite(out), out, 0.0)
        return out


def _first_zero(g: RadialFunction, horizon: float) -> float:
    roots = sign_changes(lambda x: g.value(x), 1e-6, horizon, n_grid=20001, xtol=1e-13)
    return roots[0] if roots else math.inf


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def radial_sectional(M: RotSymManifold, t):
    M._inside(t)
    return _scalar(M.curvature_ratio(t))


def radial_ricci(M: RotSymManifold, t):
    M._inside(t)
    return _scalar((M.n - 1) * M.curvature_ratio(t))


def _density(M: RotSymManifold):
    m = M.n - 1
    return lambda x: np.abs(np.asarray(M.g.value(x), dtype=float)) ** m


def ball_volume(M: RotSymManifold, r: float, rtol: float = 1e-11) -> float:
    if r < 0 or r > M.L * (1 + 1e-12):
        raise OutOfDomain("radius outside [0, L]")
    r = min(r, M.L)
    return sphere_measure(M.n) * adaptive_simpson(_density(M), 0.0, r, rtol=rtol)


def sphere_area(M: RotSymManifold, r: float) -> float:
    if r < 0 or r > M.L * (1 + 1e-12):
        raise OutOfDomain("radius outside [0, L]")
    return sphere_measure(M.n) * abs(float(M.g.value(min(r, M.L)))) ** (M.n - 1)


def annulus_volume(M: RotSymManifold, r1: float, r2: float, rtol: float = 1e-11) -> float:
    if not 0 <= r1 <= r2 <= M.L * (1 + 1e-12):
        raise OutOfDomain("need 0 <= r1 <= r2 <= L")
    return sphere_measure(M.n) * adaptive_simpson(_density(M), r1, min(r2, M.L), rtol=rtol)


def sphere_mean_curvature(M: RotSymManifold, t0: float) -> float:
    M._inside(t0)
    return float(M.g.d1(t0)) / float(M.g.value(t0))


def fermi_element(k: float, n: int):
    """Volume element of the tube around a geodesic in constant curvature k, per unit length
    and per unit normal-sphere measure: sn_k(s)^{n-2} cs_k(s)."""
    if k > 0:
        a = math.sqrt(k)
        return lambda s: (np.sin(a * s) / a) ** (n - 2) * np.cos(a * s)
    if k == 0:
        return lambda s: np.asarray(s, dtype=float) ** (n - 2)
    a = math.sqrt(-k)
    return lambda s: (np.sinh(a * s) / a) ** (n - 2) * np.cosh(a * s)


def spaceform_tube_volume(k: float, n: int, L_N: float, R: float) -> float:
    """Exact volume of the radius-R tube around a geodesic segment of length L_N."""
    if n < 3:
        raise ParamRange("tubes around geodesics need n >= 3")
    if k > 0 and R >= math.pi / (2 * math.sqrt(k)):
        raise BadCurvatureRange("need R < pi / (2 sqrt(k)) for k > 0")
    if R < 0 or L_N < 0:
        raise ParamRange("L_N and R must be nonnegative")
    if R == 0:
        return 0.0
    base = L_N * sphere_measure(n - 1)
    if k == 0:
        return base * R ** (n - 1) / (n - 1)
    # sn^{n-2} cs integrates to sn^{n-1}/(n-1)
    a = math.sqrt(abs(k))
    sn = math.sin(a * R) / a if k > 0 else math.sinh(a * R) / a
    return base * sn ** (n - 1) / (n - 1)


def euclidean(n: int, L: float = 50.0) -> RotSymManifold:
    return RotSymManifold.from_warp(n, "euclidean", L=L)


def hyperbolic(n: int, a: float = 1.0, L: float = 50.0) -> RotSymManifold:
    return RotSymManifold.from_warp(n, f"hyperbolic({a!r})", L=L)


def round_sphere(n: int) -> RotSymManifold:
    return RotSymManifold.from_warp(n, "sphere")


def from_expression(n: int, expr: str, L: float | None = None, horizon: float = 50.0) -> RotSymManifold:
    return RotSymManifold.from_warp(n, make_radial(expr), L=L, horizon=horizon)
