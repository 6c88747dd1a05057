"""Level-synchronous adaptive Simpson quadrature and kink location."""
from __future__ import annotations

import numpy as np

from .errors import QuadratureFailure


def adaptive_simpson(f, a, b, rtol=1e-10, atol=1e-300, breakpoints=(), min_panels=16, max_level=40,
                     noise=None):
    """Integrate a vectorised ``f`` over ``[a, b]``.

    All pending panels of one refinement level are evaluated in a single call
    to ``f``. ``breakpoints`` inside ``(a, b)`` become panel edges so that
    integrands with kinks are smooth on every panel.

    ``noise``, if given, is a vectorised bound on the pointwise rounding error
    of ``f``; a panel whose error estimate is within that noise is accepted,
    since refining it further cannot help.
    """
    a, b = float(a), float(b)
    if b == a:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, rtol, atol, breakpoints, min_panels, max_level, noise)
    edges = [a] + sorted(x for x in set(float(x) for x in breakpoints) if a < x < b) + [b]
    lo, hi = _initial_panels(edges, min_panels)
    mid = 0.5 * (lo + hi)
    fl, fm, fh = _eval(f, lo), _eval(f, mid), _eval(f, hi)
    whole = (hi - lo) / 6.0 * (fl + 4 * fm + fh)
    estimate = abs(whole.sum())
    target = max(atol, rtol * estimate)
    total_len = b - a
    total = 0.0
    for _ in range(max_level):
        ml = 0.5 * (lo + mid)
        mr = 0.5 * (mid + hi)
        fml, fmr = _eval(f, ml), _eval(f, mr)
        left = (mid - lo) / 6.0 * (fl + 4 * fml + fm)
        right = (hi - mid) / 6.0 * (fm + 4 * fmr + fh)
        two = left + right
        err = np.abs(two - whole)
        budget = 15.0 * target * (hi - lo) / total_len
        ok = err <= budget
        if noise is not None:
            pts = np.stack([lo, ml, mid, mr, hi])
            nz = np.abs(np.asarray(noise(pts), dtype=float)).max(axis=0)
            ok |= err <= 2.0 * nz * (hi - lo)
        total += float(np.sum((two + (two - whole) / 15.0)[ok]))
        if ok.all():
            return total
        keep = ~ok
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        fl, fm, fh = fl[keep], fm[keep], fh[keep]
        ml, mr, fml, fmr = ml[keep], mr[keep], fml[keep], fmr[keep]
        left, right = left[keep], right[keep]
        lo = np.concatenate([lo, mid])
        hi_new = np.concatenate([mid, hi])
        mid = np.concatenate([ml, mr])
        fl, fh = np.concatenate([fl, fm]), np.concatenate([fm, fh])
        fm = np.concatenate([fml, fmr])
        whole = np.concatenate([left, right])
        hi = hi_new
        if lo.size > 2_000_000:
            break
    raise QuadratureFailure(f"adaptive Simpson did not converge on [{a}, {b}]")


def _initial_panels(edges, min_panels):
    span = edges[-1] - edges[0]
    lo, hi = [], []
    for x0, x1 in zip(edges[:-1], edges[1:]):
        k = max(1, int(np.ceil(min_panels * (x1 - x0) / span)))
        g = np.linspace(x0, x1, k + 1)
        lo.append(g[:-1])
        hi.append(g[1:])
    return np.concatenate(lo), np.concatenate(hi)


def _eval(f, x):
    y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape).astype(float)
    if not np.all(np.isfinite(y)):
        raise QuadratureFailure("integrand is not finite on the quadrature grid")
    return y


def sign_changes(h, a, b, n_grid=2001, xtol=1e-10, ztol=0.0):
    """Roots of a vectorised ``h`` on ``(a, b)``: sign changes between sampled
    nonzero values, refined by bisection. Values with ``|h| <= ztol`` count as zero
    and never produce roots on their own.
    """
    if b <= a:
        return []
    x = np.linspace(a, b, n_grid)
    y = np.asarray(h(x), dtype=float)
    y = np.where(np.abs(y) <= ztol, 0.0, y)
    nz = np.nonzero(y)[0]
    if nz.size < 2:
        return []
    s = np.sign(y[nz])
    flip = np.nonzero(s[:-1] != s[1:])[0]
    if flip.size == 0:
        return []
    lo, hi = x[nz[flip]].copy(), x[nz[flip + 1]].copy()
    slo = s[flip].copy()
    while np.max(hi - lo) > xtol:
        m = 0.5 * (lo + hi)
        ym = np.asarray(h(m), dtype=float)
        ym = np.where(np.abs(ym) <= ztol, 0.0, ym)
        same = np.sign(ym) == slo
        lo = np.where(same, m, lo)
        hi = np.where(same, hi, m)
    return sorted(float(r) for r in 0.5 * (lo + hi))


def gauss_legendre(f, a, b, order=8):
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (b - a)
    return float(half * np.sum(w * f(a + half * (x + 1.0))))
