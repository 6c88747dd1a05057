"""Comparison model spaces [0, l) x_f S^{n-1} with f'' + lambda f = 0, f(0)=0, f'(0)=1."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._common import sphere_measure
from .errors import DomainEmpty, OutOfDomain, ParamRange, SolverDiverged
from .funcspec import RadialFunction, constant, make_radial

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
OVERFLOW_CAP = 1e150


def _hermite(x, t, y, dy):
    """Cubic Hermite interpolation of nodal (y, dy) at points x."""
    k = np.clip(np.searchsorted(t, x, side="right") - 1, 0, t.size - 2)
    h = t[k + 1] - t[k]
    s = (x - t[k]) / h
    s2, s3 = s * s, s * s * s
    return ((2 * s3 - 3 * s2 + 1) * y[k] + (s3 - 2 * s2 + s) * h * dy[k]
            + (-2 * s3 + 3 * s2) * y[k + 1] + (s3 - s2) * h * dy[k + 1])


@dataclass
class WarpSolution:
    """Nodal values of f and f' with dense output.

    ``f_exact``/``df_exact`` are set for closed-form space forms; otherwise f is
    interpolated from (f, f') and f' from (f', -lambda f).
    """

    t: np.ndarray
    f: np.ndarray
    df: np.ndarray
    lam: RadialFunction
    f_exact: object = None
    df_exact: object = None
    max_residual: float = 0.0
    _ddf: np.ndarray = field(default=None, repr=False)
    _cum: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._ddf = -np.asarray(self.lam.value(self.t)) * self.f

    @property
    def end(self) -> float:
        return float(self.t[-1])

    def value(self, x):
        x = np.asarray(x, dtype=float)
        if self.f_exact is not None:
            return self.f_exact(x)
        return _hermite(x, self.t, self.f, self.df)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        if self.df_exact is not None:
            return self.df_exact(x)
        return _hermite(x, self.t, self.df, self._ddf)

    def cumulative(self, n: int) -> np.ndarray:
        """Node-wise integral of f^{n-1} from 0 (composite Simpson per cell)."""
        if n not in self._cum:
            mid = 0.5 * (self.t[:-1] + self.t[1:])
            m = n - 1
            cell = np.diff(self.t) / 6.0 * (self.f[:-1] ** m + 4.0 * self.value(mid) ** m + self.f[1:] ** m)
            self._cum[n] = np.concatenate([[0.0], np.cumsum(cell)])
        return self._cum[n]

    def integral_power(self, n: int, r):
        """Integral of f^{n-1} over [0, r] for scalar or array r."""
        r = np.asarray(r, dtype=float)
        cum = self.cumulative(n)
        k = np.clip(np.searchsorted(self.t, r, side="right") - 1, 0, self.t.size - 1)
        a = self.t[k]
        half = 0.5 * (r - a)
        pts = a[..., None] + half[..., None] * (_GL_X + 1.0)
        part = half * np.sum(_GL_W * self.value(pts) ** (n - 1), axis=-1)
        return cum[k] + part


@dataclass
class ModelSpace:
    lam: RadialFunction
    sol: WarpSolution
    l: float
    t0: float
    horizon: float
    n: int | None = None
    tol: float = 1e-8
    closed_form: str | None = None

    @property
    def l_bounded(self) -> bool:
        return math.isfinite(self.l)

    @property
    def extent(self) -> float:
        """Largest radius on which f is available."""
        return min(self.l, self.horizon)

    def f(self, t):
        return self.sol.value(t)

    def df(self, t):
        return self.sol.deriv(t)

    def _check(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0) or np.any(r > self.extent * (1 + 1e-12)):
            raise OutOfDomain(f"radius outside [0, {self.extent}]")
        return np.minimum(r, self.extent)

    def volume(self, n: int, r):
        r = self._check(r)
        out = sphere_measure(n) * self.sol.integral_power(n, r)
        return float(out) if out.ndim == 0 else out

    def area(self, n: int, r):
        r = self._check(r)
        out = sphere_measure(n) * self.f(r) ** (n - 1)
        return float(out) if np.ndim(out) == 0 else out

    def as_radial(self) -> RadialFunction:
        """The warping f as a RadialFunction (f'' = -lambda f)."""
        lam = self.lam

        def d2(t):
            return -np.asarray(lam.value(t)) * self.f(t)

        def d3(t):
            return -(np.asarray(lam.d1(t)) * self.f(t) + np.asarray(lam.value(t)) * self.df(t))

        return RadialFunction(source=f"model[{lam.describe()}]", value=self.f, d1=self.df,
                              d2=d2, d3=d3, L=self.extent)


def step_size(T: float, tol: float = 1e-8) -> float:
    # 0.1 * tol^(1/4) equals 1e-3 at the default tolerance
    return min(1e-3, T / 1e4, 0.1 * tol ** 0.25)


def _grid(T, tol):
    h0 = step_size(T, tol)
    N = int(math.ceil(T / h0 - 1e-9))
    return np.linspace(0.0, T, N + 1)


def _first_zero(t, y, dy, start=1):
    """First sign change of nodal y after index ``start``; bisection on the Hermite interpolant."""
    s = np.sign(y[start:])
    idx = np.nonzero(s[1:] * s[:-1] <= 0)[0]
    idx = idx[s[idx] != 0]
    if idx.size == 0:
        zeros = np.nonzero(y[start:] == 0)[0]
        return float(t[start + zeros[0]]) if zeros.size else math.inf
    k = start + int(idx[0])
    lo, hi = float(t[k]), float(t[k + 1])
    tt, yy, dd = t[k:k + 2], y[k:k + 2], dy[k:k + 2]
    ylo = float(_hermite(np.array([lo]), tt, yy, dd)[0])
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        ym = float(_hermite(np.array([mid]), tt, yy, dd)[0])
        if ym == 0.0:
            return mid
        if (ym > 0) == (ylo > 0):
            lo, ylo = mid, ym
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_warp(lam: RadialFunction, T: float = 50.0, tol: float = 1e-8, n: int | None = None) -> ModelSpace:
    """Integrate f'' + lambda f = 0 with fixed-step RK4 after a fifth-order Taylor start on [0, h].

    Integration stops at the first zero l of f. If |f| exceeds 1e150 the
    horizon is cut at the last node below the cap.
    """
    if not (0 < tol <= 1e-4):
        raise ParamRange("tol must lie in (0, 1e-4]")
    if not T > 0:
        raise ParamRange("T must be positive")
    t = _grid(T, tol)
    h = float(t[1] - t[0])
    N = t.size - 1
    half = np.linspace(0.0, T, 2 * N + 1)
    lam_half = np.asarray(lam.value(half), dtype=float)
    if not np.all(np.isfinite(lam_half)):
        raise DomainEmpty("lambda is not finite on [0, T]")
    lh = lam_half.tolist()
    f = [0.0] * (N + 1)
    g = [0.0] * (N + 1)
    l0 = lh[0]
    try:
        l1, l2 = (float(np.asarray(d(0.0))) for d in (lam.d1, lam.d2))
    except (ArithmeticError, ValueError):
        l1 = l2 = 0.0
    if not (math.isfinite(l1) and math.isfinite(l2)):
        l1 = l2 = 0.0
    # series f = t + a3 t^3 + a4 t^4 + a5 t^5 of f'' = -lambda f
    a3, a4, a5 = -l0 / 6.0, -l1 / 12.0, l0 * l0 / 120.0 - l2 / 40.0
    f[0], g[0] = 0.0, 1.0
    f[1] = h + a3 * h ** 3 + a4 * h ** 4 + a5 * h ** 5
    g[1] = 1.0 + 3 * a3 * h * h + 4 * a4 * h ** 3 + 5 * a5 * h ** 4
    last = N
    h2, h6 = h / 2.0, h / 6.0
    for k in range(1, N):
        y, v = f[k], g[k]
        a1, a2, a3 = lh[2 * k], lh[2 * k + 1], lh[2 * k + 2]
        k1y, k1v = v, -a1 * y
        y2, v2 = y + h2 * k1y, v + h2 * k1v
        k2y, k2v = v2, -a2 * y2
        y3, v3 = y + h2 * k2y, v + h2 * k2v
        k3y, k3v = v3, -a2 * y3
        y4, v4 = y + h * k3y, v + h * k3v
        k4y, k4v = v4, -a3 * y4
        yn = y + h6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        vn = v + h6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if not (math.isfinite(yn) and math.isfinite(vn)):
            raise SolverDiverged(f"non-finite state at t={t[k + 1]}")
        if abs(yn) > OVERFLOW_CAP or abs(vn) > OVERFLOW_CAP:
            last = k
            break
        f[k + 1], g[k + 1] = yn, vn
        if yn <= 0.0:
            last = k + 1
            break
    tt = t[:last + 1]
    ff = np.array(f[:last + 1])
    gg = np.array(g[:last + 1])
    sol = WarpSolution(tt, ff, gg, lam)
    l_root = _first_zero(tt, ff, gg)
    t0 = _first_zero(tt, gg, sol._ddf, start=0)
    if math.isfinite(l_root):
        if math.isfinite(t0) and t0 > l_root:
            t0 = math.inf
        horizon = l_root
    else:
        horizon = float(tt[-1])
    sol.max_residual = _residual(sol)
    return ModelSpace(lam=lam, sol=sol, l=l_root, t0=t0, horizon=horizon, n=n, tol=tol)


def _residual(sol: WarpSolution) -> float:
    """max |f'' + lambda f| / (1 + |f|) at cell midpoints, f'' from differenced f'.

    Interior cells use the fourth-order stencil (f'_{k-1} - 27 f'_k + 27 f'_{k+1} - f'_{k+2}) / 24h
    and the end cells its one-sided analogues, so the estimator's own truncation
    error stays far below the solver's.
    """
    t = sol.t
    if t.size < 2:
        return 0.0
    h = np.diff(t)
    mid = 0.5 * (t[:-1] + t[1:])
    fmid = _hermite(mid, t, sol.f, sol.df)
    ddf = np.diff(sol.df) / h
    d = sol.df
    if t.size >= 4:
        ddf[1:-1] = (d[:-3] - 27 * d[1:-2] + 27 * d[2:-1] - d[3:]) / (24 * h[1:-1])
        # one-sided fourth-order stencils at the two end cells (uniform grid)
        ddf[0] = (-23 * d[0] + 21 * d[1] + 3 * d[2] - d[3]) / (24 * h[0])
        ddf[-1] = (23 * d[-1] - 21 * d[-2] - 3 * d[-3] + d[-4]) / (24 * h[-1])
    lam_mid = np.asarray(sol.lam.value(mid))
    return float(np.max(np.abs(ddf + lam_mid * fmid) / (1.0 + np.abs(fmid))))


def space_form(k: float, n: int | None = None, T: float = 50.0) -> ModelSpace:
    """Closed-form model of constant curvature k (no ODE solve)."""
    k = float(k)
    if k > 0:
        a = math.sqrt(k)
        l = math.pi / a
        t0 = math.pi / (2 * a)
        f_exact = lambda x: np.sin(a * x) / a
        df_exact = lambda x: np.cos(a * x)
        end = l
        tag = f"sin({a!r}*t)/{a!r}"
    elif k == 0:
        l = t0 = math.inf
        f_exact = lambda x: np.asarray(x, dtype=float) * 1.0
        df_exact = lambda x: np.ones_like(np.asarray(x, dtype=float))
        end = T
        tag = "t"
    else:
        a = math.sqrt(-k)
        l = t0 = math.inf
        f_exact = lambda x: np.sinh(a * x) / a
        df_exact = lambda x: np.cosh(a * x)
        end = min(T, math.asinh(OVERFLOW_CAP * a) / a)
        tag = f"sinh({a!r}*t)/{a!r}"
    t = _grid(end, 1e-8)
    sol = WarpSolution(t, f_exact(t), df_exact(t), constant(k), f_exact=f_exact, df_exact=df_exact)
    ms = ModelSpace(lam=constant(k), sol=sol, l=l, t0=t0, horizon=end, n=n, closed_form=tag)
    return ms


def model_volume(ms: ModelSpace, n: int, r):
    return ms.volume(n, r)


def model_area(ms: ModelSpace, n: int, r):
    return ms.area(n, r)


def lam_from_text(text: str) -> RadialFunction:
    return make_radial(text)
