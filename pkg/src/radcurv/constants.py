"""Explicit constants and composite bound functions."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._common import sphere_measure
from .errors import ParamRange
from .model import ModelSpace
from .quadrature import adaptive_simpson

__all__ = [
    "sphere_measure", "delta", "delta_hat", "c1", "c2", "c_main", "c4", "c5", "c6", "c7", "c8",
    "c9", "c10", "c13_c14", "tube_bound_F", "tube_bound_geodesic", "cone_bound_G",
    "hypersurface_tube_bound", "iso_euclidean", "ball_isoperimetric_ratio", "ConstantTable",
    "constant_table",
]

SINGULAR_SPLIT = 1e-3
BETA_READINGS = ("n-1-delta", "n-delta")


def _need(cond, msg):
    if not cond:
        raise ParamRange(msg)


def delta(n, p):
    return (2 * p - n + 1) / (2 * p - 1)


def delta_hat(n, p):
    return (2 * p - n) / (2 * p - 1)


def c1(ms: ModelSpace, n: int, r: float) -> float:
    """max over t in (0, r] of t f^{n-1}(t) / int_0^t f^{n-1}; equals n at r = 0."""
    _need(r >= 0, "r must be nonnegative")
    if r > ms.extent * (1 + 1e-12):
        from .errors import OutOfDomain
        raise OutOfDomain("r beyond the model's domain")
    if r == 0:
        return float(n)
    sol = ms.sol
    nodes = sol.t[(sol.t > 0) & (sol.t < r)]
    t = np.concatenate([nodes, [min(r, ms.extent)]])
    cum = sol.integral_power(n, t)
    vals = t * ms.f(t) ** (n - 1) / cum
    return float(max(n, np.max(vals)))


def c2(n: int, p: float) -> float:
    _need(p > n / 2, "c2 needs p > n/2")
    return (1.0 / (n - 1) - 1.0 / (2 * p - 1)) ** (-p)


def model_volume_integral(ms: ModelSpace, n: int, p: float, R: float) -> float:
    """int_0^R vol_model(s)^{-1/2p} ds with the s^{-n/2p} singularity handled in closed form."""
    _need(p > n / 2, "the integral converges only for p > n/2")
    if R <= 0:
        return 0.0
    wn = sphere_measure(n)
    e = n / (2 * p)
    s0 = min(SINGULAR_SPLIT, R)
    head = (n / wn) ** (1 / (2 * p)) * s0 ** (1 - e) / (1 - e)
    if R <= s0:
        return head
    tail = adaptive_simpson(lambda s: ms.volume(n, s) ** (-1 / (2 * p)), s0, R, rtol=1e-10)
    return head + tail


def c_main(ms: ModelSpace, n: int, p: float, R: float) -> float:
    """(1/2p) c1(n,R) c2(n,p) int_0^R vol_model(s)^{-1/2p} ds."""
    return c1(ms, n, R) * c2(n, p) * model_volume_integral(ms, n, p, R) / (2 * p)


def c4(n: int, p: float) -> float:
    _need(n > 2 and p > n - 1, "c4 needs n > 2 and p > n - 1")
    lead = ((2 * p - 1) ** p * (p - 1) ** p) / ((n - 2) ** p * p ** p * (2 * p - n + 1) ** (p - 1))
    return lead * (2 * ((2 * p - 1) / (p + 1 - n)) ** p + 1)


def c5(n: int, p: float) -> float:
    return 2 ** (p - 1) * c4(n, p)


def c6(n: int, p: float) -> float:
    _need(p > n / 2, "c6 needs p > n/2")
    return (2 - 1 / p) ** p * ((p - 1) / (2 * p - n)) ** (p - 1)


def c7(n: int, p: float) -> float:
    _need(p > n / 2, "c7 needs p > n/2")
    return (((2 * p - 1) / p) ** 0.5 * (n - 1) ** ((2 * p - 1) / (2 * p))
            * ((2 * p - 2) / (2 * p - n)) ** ((p - 1) / (2 * p)))


def c8(n: int, p: float) -> float:
    _need(p > n / 2, "c8 needs p > n/2")
    return (2 ** (1 - 1 / (2 * p)) * (n - 1) ** ((2 * p - 1) / (2 * p))
            * (p * (p - 1) / ((2 * p - 1) * (2 * p - n))) ** ((p - 1) / (2 * p)))


def c9(n: int, p: float, tau: float) -> float:
    _need(tau > 0, "tau must be positive")
    return (1 + 1 / tau) ** (2 * p - 1) * (2 * p - 1) / (2 * p * (n - 1)) * c6(n, p)


def c10(n: int, p: float, lambda_inf: float, D: float) -> float:
    _need(lambda_inf < 0, "c10 needs lambda_inf < 0")
    _need(D > 0, "D must be positive")
    k = c7(n, p) * math.sqrt(-lambda_inf)
    return k * min(2 ** (-1 / (2 * p - 1)), 0.25 / math.expm1(k * D))


def c13_c14(ms: ModelSpace, n: int, p: float, K: float, R: float, alpha: float, t: float | None = None):
    """Constants of the lower bound for the area of a dividing sphere.

    If ``t`` is None it is chosen from 20 points in (0, R/2) to maximise c13
    (the caller may re-optimise against the full right-hand side).
    Returns a dict with c13, c14, alpha1, alpha2, t.
    """
    _need(0 < alpha < 1, "alpha must lie in (0, 1)")
    _need(K >= 0, "K must be nonnegative")
    if t is None:
        best = None
        for tt in candidate_ts(R):
            cand = c13_c14(ms, n, p, K, R, alpha, tt)
            if best is None or cand["c13"] > best["c13"]:
                best = cand
        return best
    _need(0 < t < R / 2, "t must lie in (0, R/2)")
    V = lambda s: ms.volume(n, s)
    VR, VR2, Vt = V(R), V(R / 2), V(t)
    a1 = (VR - VR2) / (VR2 - Vt)
    cm = c_main(ms, n, p, R)
    a2 = 2 * c2(n, p) ** (1 / (2 * p)) * (1 + cm * math.sqrt(K)) ** (2 * p - 1) \
        * VR ** (1 - 1 / (2 * p)) * math.sqrt(K) * a1
    area_t = ms.f(t) ** (n - 1)
    lead = area_t / (VR - Vt)
    c13 = lead * (1 - alpha * (1 + a1))
    c14 = lead * a2 * R + a2 / (2 * a1)
    return {"c13": float(c13), "c14": float(c14), "alpha1": float(a1), "alpha2": float(a2), "t": float(t)}


def candidate_ts(R: float, count: int = 20):
    return [(R / 2) * (i + 1) / (count + 1) for i in range(count)]


def _exp_profile(gamma, alpha, beta, R):
    """(alpha gamma + beta)/gamma^2 (e^{gamma R}-1) - beta R/gamma, stable as gamma -> 0."""
    x = gamma * R
    if abs(x) < 1e-4:
        e1 = R * (1 + x / 2 + x * x / 6 + x ** 3 / 24)
        e2 = R * R * (0.5 + x / 6 + x * x / 24)
    else:
        e1 = math.expm1(x) / gamma
        e2 = (math.expm1(x) - x) / (gamma * gamma)
    return alpha * e1 + beta * e2


def tube_bound_F(n: int, p: float, L_N: float, lambda_inf: float, k_plus_star: float, R: float,
                 beta_reading: str = "n-1-delta") -> float:
    """Closed-form tube volume bound around a closed geodesic of length L_N.

    ``beta_reading`` selects the exponent denominator used for beta; see
    ``BETA_READINGS``. With lambda_inf = 0 and k > 0 the bound is +inf.
    """
    _need(n > 2 and p > n - 1, "bound needs n > 2 and p > n - 1")
    _need(lambda_inf <= 0, "bound needs lambda_inf <= 0")
    _need(beta_reading in BETA_READINGS, f"beta_reading must be one of {BETA_READINGS}")
    _need(L_N >= 0 and k_plus_star >= 0 and R >= 0, "L_N, k and R must be nonnegative")
    d = delta(n, p)
    e = (n - 2) / (n - 1 - d)
    a = (L_N * sphere_measure(n - 1)) ** (1 / (n - 2))
    bt = c5(n, p) * abs(lambda_inf) ** p
    ct = c5(n, p) * k_plus_star ** p
    ae = a ** e
    if ct == 0:
        extra = 0.0
    elif bt == 0:
        return math.inf
    else:
        extra = ((2 * p - 1) / (2 * p * bt)) ** e * ct
    alpha = ae + extra
    beta = ae if beta_reading == "n-1-delta" else a ** ((n - 2) / (n - d))
    gamma = ae + ((2 * p - 1) / (2 * p)) ** e * bt ** ((1 - d) / (n - 1 - d))
    return _exp_profile(gamma, alpha, beta, R)


def _expm1_over(b, t):
    """(e^{bt}-1)/b with a 4-term Taylor series for |b| < 1e-8."""
    if abs(b) < 1e-8:
        bt = b * t
        return t * (1 + bt / 2 + bt * bt / 6 + bt ** 3 / 24)
    return np.expm1(b * t) / b


def tube_bound_geodesic(n: int, p: float, L_N: float, k_plus_star_zero: float, R: float) -> float:
    """(a+b)^{n-2} int_0^R ((e^{bt}-1)/b)^{n-2} dt for a geodesic segment of length L_N."""
    _need(n > 2 and p > n - 1, "bound needs n > 2 and p > n - 1")
    if R <= 0:
        return 0.0
    a = (L_N * sphere_measure(n - 1)) ** (1 / (n - 2))
    b = c4(n, p) ** (1 / (2 * p - 1)) * k_plus_star_zero ** (p / (2 * p - 1))
    if b == 0:
        integral = R ** (n - 1) / (n - 1)
    else:
        integral = adaptive_simpson(lambda t: _expm1_over(b, t) ** (n - 2), 0.0, R, rtol=1e-12)
    return (a + b) ** (n - 2) * integral


def cone_bound_G(n: int, p: float, vol_Shat: float, lambda_inf: float, k_minus: float, R: float,
                 k_minus_zero: float | None = None, beta_reading: str = "n-delta") -> float:
    """Cone volume bound.

    ``k_minus`` is the norm against lambda; ``k_minus_zero`` the norm against 0
    (defaults to ``k_minus``, exact when lambda = 0). ``beta_reading`` chooses
    delta ("n-delta", as printed) or delta_hat ("n-delta_hat") in beta's exponent.
    """
    _need(p > n / 2, "bound needs p > n/2")
    _need(lambda_inf <= 0, "bound needs lambda_inf <= 0")
    _need(beta_reading in ("n-delta", "n-delta_hat"), "beta_reading must be 'n-delta' or 'n-delta_hat'")
    _need(vol_Shat >= 0 and k_minus >= 0 and R >= 0, "inputs must be nonnegative")
    kz = k_minus if k_minus_zero is None else k_minus_zero
    dh = delta_hat(n, p)
    d = delta(n, p)
    e = (n - 1) / (n - dh)
    a1 = vol_Shat ** (1 / (n - 1))
    C6 = c6(n, p)
    if k_minus == 0:
        extra = 0.0
    elif kz == 0:
        return math.inf
    else:
        # logs avoid underflow of b1 = (c6 kz^p)^{1/(2p-1)} for tiny norms
        log_b1 = (math.log(C6) + p * math.log(kz)) / (2 * p - 1)
        extra = math.exp((p - 1) * math.log(2) + math.log(C6) + e * (math.log((2 * p - 1) / (2 * p)) - log_b1)
                         + p * math.log(k_minus))
    ae = a1 ** e
    alpha = ae + extra
    beta = a1 ** ((n - 1) / (n - d)) if beta_reading == "n-delta" else ae
    gamma = ae + ((2 * p - 1) / (2 * p)) ** e * (2 ** (p - 1) * C6 * abs(lambda_inf) ** p) ** ((1 - dh) / (n - dh))
    return _exp_profile(gamma, alpha, beta, R)


def hypersurface_tube_bound(n: int, p: float, lambda_inf: float, R: float, vol_N: float,
                            H_integral: float, k_minus: float) -> float:
    """(e^{kR}-1)[2 vol(N)/k + (n-1)^{2p-1} int|H|^{2p-1} / k^{2p} + ((n-1) sqrt|lam|)^{-p} k_-^p], k = c7 sqrt|lam|."""
    _need(lambda_inf < 0, "bound needs lambda_inf < 0")
    s = math.sqrt(-lambda_inf)
    k = c7(n, p) * s
    bracket = (2 / k * vol_N + (n - 1) ** (2 * p - 1) / k ** (2 * p) * H_integral
               + ((n - 1) * s) ** (-p) * k_minus ** p)
    return math.expm1(k * R) * bracket


def iso_euclidean(n: int):
    """(C_I, C_S) with C_I = w_n / w_{n+1}^{(n-1)/n} and C_S = 4((n-1)/(n-2))^2 C_I^{-2}."""
    _need(n >= 2, "n must be at least 2")
    ci = sphere_measure(n) / sphere_measure(n + 1) ** ((n - 1) / n)
    if n == 2:
        return ci, None
    return ci, 4 * ((n - 1) / (n - 2)) ** 2 * ci ** -2


def ball_isoperimetric_ratio(n: int) -> float:
    """area / vol^{(n-1)/n} of any Euclidean ball: n^{(n-1)/n} w_n^{1/n}."""
    return n ** ((n - 1) / n) * sphere_measure(n) ** (1 / n)


@dataclass
class ConstantTable:
    n: int
    p: float
    values: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)

    def as_dict(self):
        return asdict(self)


def constant_table(n: int, p: float, R: float | None = None, ms: ModelSpace | None = None,
                   tau: float = 1.0, lambda_inf: float | None = None, D: float | None = None) -> ConstantTable:
    """Evaluate every constant whose parameter range admits (n, p); others are listed with the reason."""
    table = ConstantTable(n=n, p=p)
    jobs = {
        "w_n": lambda: sphere_measure(n),
        "delta": lambda: delta(n, p),
        "delta_hat": lambda: delta_hat(n, p),
        "c2": lambda: c2(n, p),
        "c4": lambda: c4(n, p),
        "c5": lambda: c5(n, p),
        "c6": lambda: c6(n, p),
        "c7": lambda: c7(n, p),
        "c8": lambda: c8(n, p),
        "c9": lambda: c9(n, p, tau),
        "C_I": lambda: iso_euclidean(n)[0],
        "C_S": lambda: _require(iso_euclidean(n)[1], "C_S needs n >= 3"),
    }
    if ms is not None and R is not None:
        jobs["c1"] = lambda: c1(ms, n, R)
        jobs["c"] = lambda: c_main(ms, n, p, R)
    if lambda_inf is not None and D is not None:
        jobs["c10"] = lambda: c10(n, p, lambda_inf, D)
    for name, job in jobs.items():
        try:
            table.values[name] = float(job())
        except ParamRange as exc:
            table.skipped[name] = str(exc)
    return table


def _require(x, msg):
    if x is None:
        raise ParamRange(msg)
    return x
