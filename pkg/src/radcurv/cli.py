"""Command line entry point: ``radcurv <subcommand> [options]``.

Exit codes: 0 success, 1 a violated report, 2 configuration or expression
error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import comparison as V
from . import constants as C
from . import heat as Ht
from . import spectral as S
from .config import THEOREMS, Manifest, load_manifest
from .curvature import KINDS, integral_curvature
from .errors import ConfigError, ExpressionSyntaxError, NumericError, UnknownIdentifier
from .funcspec import radial_from_text
from .manifold import RotSymManifold
from .model import solve_warp
from .serialize import document, dumps, markdown, plain, reports_csv, rows_to_csv

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


# -- building objects from a manifest ----------------------------------------

def build(m: Manifest):
    lam = radial_from_text(m.lam)
    g = radial_from_text(m.g)
    M = RotSymManifold.from_warp(m.n, g, L=m.L, horizon=m.T)
    ms = solve_warp(lam, T=m.T, n=m.n)
    return M, ms, lam


def _grid_values(m: Manifest, key):
    vals = getattr(m, key)
    return vals if vals else [None]


def run_theorem(tid: str, m: Manifest, M, ms, lam) -> list:
    P = m.params
    out = []
    combos = itertools.product(_grid_values(m, "p"), _grid_values(m, "r"), _grid_values(m, "R"))
    seen = set()
    needs = THEOREMS[tid]
    for p, r, R in combos:
        key = tuple(v if k in needs else None for k, v in (("p", p), ("r", r), ("R", R)))
        if key in seen:
            continue
        seen.add(key)
        out.append(_one(tid, m, M, ms, lam, p, r, R, P))
    return out


def _one(tid, m, M, ms, lam, p, r, R, P):
    beta = m.beta_reading
    if tid == "volume_ratio":
        return V.verify_volume_ratio(M, ms, p, r, R)
    if tid == "psi_bound":
        return V.verify_psi_bound(M, ms, p, R)
    if tid == "bishop_gromov":
        return V.verify_bishop_gromov(M, ms, np.linspace(0, R, 9)[1:])
    if tid == "volume_doubling":
        return V.verify_volume_doubling(M, ms, p, P["D"], P["alpha"])
    if tid == "local_volume_ratio":
        return V.verify_local_volume_ratio(M, p, P["alpha"], P["r1"], P["r2"], R)
    if tid == "geodesic_tube":
        return V.verify_geodesic_tube(P["k"], m.n, p, P["L_N"], R)
    if tid == "geodesic_tube_model":
        return V.verify_geodesic_tube_model(P["k"], m.n, p, P["L_N"], R, P.get("lambda_inf"),
                                            beta_reading=beta or "n-1-delta")
    if tid == "cone_volume":
        return V.verify_cone_volume(M, p, lam, R, beta_reading=beta or "n-delta")
    if tid == "hypersurface_tube":
        return V.verify_hypersurface_tube(M, p, lam, P["t0"], R)
    if tid == "volume_growth":
        return V.verify_volume_growth(M, p, m.ladder)
    if tid == "isoperimetric_constant":
        return V.verify_isoperimetric_constant(M, p, P["tau"], P["r1"])
    if tid == "isoperimetric_quantity":
        return V.verify_isoperimetric_quantity(M, p, lam, P["D"])
    if tid == "divider_area":
        return V.verify_divider_area(M, ms, p, P["K"], R, P["alpha"], P["s_divider"])
    if tid == "heat_kernel_comparison":
        side = m.heat.side
        lower = ms if side in ("lower", "both") else None
        upper = ms if side in ("upper", "both") else None
        return Ht.verify_heat_kernel_comparison(M, lower, upper, R0=R, tau_grid=m.heat.taus,
                                                grid_size=m.heat.grid_size, bc=m.heat.bc)
    raise ConfigError(f"unknown theorem id {tid!r}")


# -- subcommands --------------------------------------------------------------

def cmd_model(m: Manifest, args):
    lam = radial_from_text(m.lam)
    ms = solve_warp(lam, T=m.T, n=m.n)
    res = {"lambda": lam.describe(), "T": m.T, "l": ms.l, "t0": ms.t0, "horizon": ms.horizon,
           "extent": ms.extent, "max_residual": ms.sol.max_residual, "steps": int(ms.sol.t.size - 1)}
    rows = zip(ms.sol.t, ms.sol.f, ms.sol.df)
    return [], res, rows_to_csv(["t", "f", "df"], rows)


def cmd_curvature(m: Manifest, args):
    M, ms, lam = build(m)
    values = []
    for p in m.p or [2.0 * m.n]:
        for R in m.R or [min(1.0, M.L)]:
            for kind in KINDS:
                for averaged in (False, True):
                    values.append(integral_curvature(M, lam, p, R, kind, averaged).as_dict())
    rows = [(v["kind"], v["p"], v["R"], v["averaged"], v["value"]) for v in values]
    return [], {"norms": values}, rows_to_csv(["kind", "p", "R", "averaged", "value"], rows)


def cmd_constants(m: Manifest, args):
    ms = solve_warp(radial_from_text(m.lam), T=m.T, n=m.n)
    tables = []
    for p in m.p or [m.n / 2 + 0.5]:
        R = (m.R or [None])[0]
        tables.append(C.constant_table(m.n, p, R=R, ms=ms if R is not None else None).as_dict())
    return [], {"tables": tables}, None


def cmd_verify(m: Manifest, args):
    ids = [args.theorem] if args.theorem else m.theorems
    if not ids:
        raise ConfigError("no theorem selected (use --theorem or [run] theorems)")
    for tid in ids:
        if tid not in THEOREMS:
            raise ConfigError(f"unknown theorem id {tid!r}; known: {', '.join(THEOREMS)}")
    M, ms, lam = build(m)
    reports = []
    for tid in ids:
        try:
            reports.extend(run_theorem(tid, m, M, ms, lam))
        except KeyError as exc:
            raise ConfigError(f"{tid} needs [run] {exc.args[0]}") from exc
    return reports, None, reports_csv(reports)


def _fuzz_case(case):
    try:
        return V.run_case(case)
    except NumericError as exc:
        raise type(exc)(f"{case.case_id}: {exc}") from exc


def cmd_fuzz(m: Manifest, args):
    seed = args.seed if args.seed is not None else m.seed
    n_cases = args.cases if args.cases is not None else m.cases
    cases = V.fuzz_cases(seed, n_cases)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            chunks = list(pool.map(_fuzz_case, cases))
    else:
        chunks = [_fuzz_case(c) for c in cases]
    reports = [r for chunk in chunks for r in chunk]      # case-id order
    return reports, {"seed": seed, "cases": n_cases}, reports_csv(reports)


def cmd_spectrum(m: Manifest, args):
    M, _, _ = build(m)
    sp = m.spectrum
    flat = args.flat if args.flat is not None else sp.flat
    R0, k = sp.ladder_R0, sp.ladder_k
    if args.ladder:
        try:
            a, b = args.ladder.split(",")
            R0, k = float(a), int(b)
        except ValueError as exc:
            raise ConfigError("--ladder expects R0,k") from exc
    ladder = S.ladder(R0, k)
    estimates = []
    for R in ladder:
        if R >= M.L:
            break
        if flat == 2:
            estimates.append(S.dirichlet_eigenvalue(M, R, sp.grid_size))
        else:
            estimates.append(S.p_laplacian_eigenvalue(M, R, flat, sp.grid_size))
    if len(estimates) < 2:
        raise ConfigError("ladder needs at least two radii inside the manifold")
    if flat == 2:
        lim = S.lambda1_estimate(M, estimates[-1].R, sp.grid_size)
        bounds = S.spec_upper_bound(M, sp.p, [e.R for e in estimates], alpha=sp.alpha)
    else:
        lim = S.p_laplacian_lambda1_estimate(M, estimates[-1].R, flat, sp.grid_size)
        bounds = S.spec_upper_bound_plap(M, sp.p, flat, [e.R for e in estimates], alpha=sp.alpha)
    tol = 1e-9 * (1 + abs(bounds.right))
    chain_ok = bool(lim.value - lim.residual <= bounds.middle + tol and bounds.middle <= bounds.right + tol)
    res = {"estimates": [e.as_dict() for e in estimates], "limit_estimate": lim.as_dict(),
           "bounds": bounds.as_dict(), "chain_ok": chain_ok}
    rows = [(e.R, e.value, e.residual, g, kb) for e, g, kb in
            zip(estimates, bounds.growth_ratios, bounds.averaged_deficiency)]
    return [], res, rows_to_csv(["R", "eigenvalue", "residual", "area_over_volume", "kbar_minus"], rows)


def cmd_heat(m: Manifest, args):
    M, _, _ = build(m)
    h = m.heat
    taus = [float(x) for x in args.tau.split(",")] if args.tau else h.taus
    bc = args.bc or h.bc
    sol = Ht.heat_kernels(M, h.R, bc, taus, h.grid_size)
    rows = [(float(t), float(tau), float(u)) for j, tau in enumerate(sol.tau)
            for t, u in zip(sol.t, sol.u[j])]
    res = {"bc": bc, "R": h.R, "tau": sol.tau, "mass": sol.mass, "pole_value": [sol.at_pole(j) for j in range(len(sol.tau))]}
    return [], res, rows_to_csv(["t", "tau", "u"], rows)


COMMANDS = {"model": cmd_model, "curvature": cmd_curvature, "constants": cmd_constants,
            "verify": cmd_verify, "fuzz": cmd_fuzz, "spectrum": cmd_spectrum, "heat": cmd_heat}


# -- plumbing -----------------------------------------------------------------

def _parser():
    ap = argparse.ArgumentParser(prog="radcurv", description="Volume, spectral and heat-kernel comparison "
                                 "checks on rotationally symmetric manifolds.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="manifest file")
    common.add_argument("--out", metavar="DIR", help="write artifacts into DIR instead of stdout")
    common.add_argument("--no-timestamp", action="store_true", help="omit the generation time from JSON")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", help="JSON output (default)")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv", help="CSV plot data")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("model", "curvature", "constants"):
        sub.add_parser(name, parents=[common])
    v = sub.add_parser("verify", parents=[common])
    v.add_argument("--theorem", metavar="ID", help=f"one of: {', '.join(THEOREMS)}")
    f = sub.add_parser("fuzz", parents=[common])
    f.add_argument("--seed", type=int)
    f.add_argument("--cases", type=int)
    f.add_argument("--jobs", type=int, default=1, help="worker processes")
    s = sub.add_parser("spectrum", parents=[common])
    s.add_argument("--flat", type=float)
    s.add_argument("--ladder", metavar="R0,k")
    h = sub.add_parser("heat", parents=[common])
    h.add_argument("--tau", metavar="T1,T2,...")
    h.add_argument("--bc", choices=["dirichlet", "neumann"])
    r = sub.add_parser("report", help="convert a JSON run document to Markdown")
    r.add_argument("input", help="JSON file written by another subcommand")
    r.add_argument("--out", metavar="FILE")
    return ap


def _emit(text: str, args, filename: str):
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, filename)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        return path
    sys.stdout.write(text)
    return None


def _summary_table(reports) -> str:
    lines = [f"{'case':<10} {'theorem':<24} {'status':<14} slack"]
    for r in reports:
        d = plain(r)
        lines.append(f"{(d.get('case_id') or '-'):<10} {d['theorem_id']:<24} {d['status']:<14} {d['slack']}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "report":
            with open(args.input, encoding="utf-8") as fh:
                doc = json.load(fh)
            text = markdown(doc)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        m = load_manifest(args.config) if args.config else Manifest()
        if args.out is None and m.output.directory:
            args.out = m.output.directory
        fmt = args.fmt or ("csv" if m.output.csv else "json")
        reports, results, csv_text = COMMANDS[args.command](m, args)
        stamp = None if args.no_timestamp else _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        if fmt == "csv" and csv_text is not None:
            _emit(csv_text, args, f"{args.command}.csv")
        else:
            doc = document(args.command, reports, manifest=m, results=results, timestamp=stamp)
            _emit(dumps(doc), args, f"{args.command}.json")
        if reports:
            (sys.stdout if args.out else sys.stderr).write(_summary_table(reports))
        return EXIT_VIOLATION if any(r.status == "violated" for r in reports) else EXIT_OK
    except (ConfigError, ExpressionSyntaxError, UnknownIdentifier) as exc:
        offset = getattr(exc, "offset", None)
        where = f" (offset {offset})" if offset is not None else ""
        sys.stderr.write(f"radcurv: configuration error{where}: {exc}\n")
        return EXIT_CONFIG
    except NumericError as exc:
        sys.stderr.write(f"radcurv: numerical failure ({type(exc).__name__}): {exc}\n")
        return EXIT_NUMERIC
    except OSError as exc:
        sys.stderr.write(f"radcurv: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
