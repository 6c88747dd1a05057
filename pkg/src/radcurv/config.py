"""Run manifests: a sectioned key-value file parsed into dataclasses.

Example::

    [manifold]
    n = 3
    g = "hyperbolic(1)"
    L = 10

    [model]
    lambda = "0"
    T = 10

    [run]
    theorems = volume_ratio, psi_bound
    p = 2.5
    r = 0.5
    R = 2.0
    seed = 7

Expression values may be quoted. Keys are case sensitive (``r`` and ``R`` differ).
Every field is validated before anything is solved and all problems are
reported together in one ``ConfigError``.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, field

from .errors import ConfigError, ExpressionSyntaxError, UnknownIdentifier
from .funcspec import radial_from_text

THEOREMS = {
    # id: extra keys required from [run] besides n, g, lambda
    "volume_ratio": ("p", "r", "R"),
    "psi_bound": ("p", "R"),
    "bishop_gromov": ("R",),
    "volume_doubling": ("p", "D", "alpha"),
    "local_volume_ratio": ("p", "alpha", "r1", "r2", "R"),
    "geodesic_tube": ("p", "k", "L_N", "R"),
    "geodesic_tube_model": ("p", "k", "L_N", "R"),
    "cone_volume": ("p", "R"),
    "hypersurface_tube": ("p", "t0", "R"),
    "volume_growth": ("p", "ladder"),
    "isoperimetric_constant": ("p", "tau", "r1"),
    "isoperimetric_quantity": ("p", "D"),
    "divider_area": ("p", "K", "R", "alpha", "s_divider"),
    "heat_kernel_comparison": ("R",),
}

_FLOAT_KEYS = ("tol", "D", "alpha", "r1", "r2", "k", "L_N", "t0", "tau", "K", "s_divider", "lambda_inf")
_LIST_KEYS = ("p", "r", "R")


@dataclass
class SpectrumConfig:
    flat: float = 2.0
    ladder_R0: float = 1.0
    ladder_k: int = 4
    grid_size: int = 2000
    p: float = 50.0
    alpha: float | None = None


@dataclass
class HeatConfig:
    R: float = 2.0
    bc: str = "dirichlet"
    taus: list = field(default_factory=lambda: [0.1])
    grid_size: int = 1000
    side: str = "both"


@dataclass
class OutputConfig:
    directory: str | None = None
    csv: bool = False


@dataclass
class Manifest:
    n: int = 2
    g: str = "euclidean"
    L: float | None = None
    lam: str = "0"
    T: float = 50.0
    theorems: list = field(default_factory=list)
    p: list = field(default_factory=list)
    r: list = field(default_factory=list)
    R: list = field(default_factory=list)
    seed: int = 0
    cases: int = 200
    tol: float = 1e-8
    params: dict = field(default_factory=dict)
    beta_reading: str | None = None
    ladder: list = field(default_factory=list)
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    heat: HeatConfig = field(default_factory=HeatConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def as_dict(self) -> dict:
        return asdict(self)


def _unquote(v: str) -> str:
    v = v.strip()
    if len(v) >= 2 and v[0] == v[-1] and v[0] in "\"'":
        return v[1:-1]
    return v


class _Collector:
    def __init__(self):
        self.problems = []

    def number(self, section, key, raw, kind=float, positive=False):
        try:
            x = kind(_unquote(raw))
        except ValueError:
            self.problems.append(f"[{section}] {key}: not a {kind.__name__}: {raw!r}")
            return None
        if kind is float and not math.isfinite(x):
            self.problems.append(f"[{section}] {key}: must be finite")
            return None
        if positive and x <= 0:
            self.problems.append(f"[{section}] {key}: must be positive")
            return None
        return x

    def numbers(self, section, key, raw, positive=False):
        out = []
        for part in _unquote(raw).split(","):
            if part.strip():
                x = self.number(section, key, part, positive=positive)
                if x is not None:
                    out.append(x)
        return out

    def expression(self, section, key, raw):
        text = _unquote(raw)
        try:
            radial_from_text(text)
        except ExpressionSyntaxError as exc:
            self.problems.append(f"[{section}] {key}: syntax error at offset {exc.offset}: {exc}")
        except UnknownIdentifier as exc:
            self.problems.append(f"[{section}] {key}: unknown identifier {exc.name!r} at offset {exc.offset}")
        except ValueError as exc:
            self.problems.append(f"[{section}] {key}: {exc}")
        return text


def parse_manifest(text: str, source: str = "<manifest>") -> Manifest:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    col = _Collector()
    m = Manifest()
    known = {"manifold", "model", "run", "spectrum", "heat", "output"}
    for sec in cp.sections():
        if sec not in known:
            col.problems.append(f"unknown section [{sec}]")

    def items(sec):
        return dict(cp.items(sec)) if cp.has_section(sec) else {}

    mf = items("manifold")
    if "n" in mf:
        n = col.number("manifold", "n", mf.pop("n"), kind=int)
        if n is not None:
            if n < 2:
                col.problems.append("[manifold] n: must be at least 2")
            m.n = n
    if "g" in mf:
        m.g = col.expression("manifold", "g", mf.pop("g"))
    if "L" in mf:
        m.L = col.number("manifold", "L", mf.pop("L"), positive=True)
    _unknown(col, "manifold", mf)

    md = items("model")
    if "lambda" in md:
        m.lam = col.expression("model", "lambda", md.pop("lambda"))
    if "T" in md:
        m.T = col.number("model", "T", md.pop("T"), positive=True) or m.T
    _unknown(col, "model", md)

    run = items("run")
    if "theorems" in run:
        ids = [x.strip() for x in _unquote(run.pop("theorems")).split(",") if x.strip()]
        for tid in ids:
            if tid not in THEOREMS:
                col.problems.append(f"[run] theorems: unknown theorem id {tid!r}")
        m.theorems = ids
    for key in _LIST_KEYS:
        if key in run:
            setattr(m, key, col.numbers("run", key, run.pop(key), positive=True))
    if "seed" in run:
        s = col.number("run", "seed", run.pop("seed"), kind=int)
        if s is not None:
            m.seed = s
    if "cases" in run:
        c = col.number("run", "cases", run.pop("cases"), kind=int, positive=True)
        if c is not None:
            m.cases = c
    if "ladder" in run:
        m.ladder = col.numbers("run", "ladder", run.pop("ladder"), positive=True)
    if "beta_reading" in run:
        m.beta_reading = _unquote(run.pop("beta_reading"))
    for key in _FLOAT_KEYS:
        if key in run:
            x = col.number("run", key, run.pop(key))
            if x is not None:
                if key == "tol":
                    m.tol = x
                else:
                    m.params[key] = x
    _unknown(col, "run", run)

    sp = items("spectrum")
    if "flat" in sp:
        x = col.number("spectrum", "flat", sp.pop("flat"), positive=True)
        if x is not None:
            if not 1 < x <= 10:
                col.problems.append("[spectrum] flat: must lie in (1, 10]")
            m.spectrum.flat = x
    if "ladder" in sp:
        R0, k = _parse_ladder(col, "spectrum", sp.pop("ladder"))
        if R0 is not None:
            m.spectrum.ladder_R0, m.spectrum.ladder_k = R0, k
    for key, kind in (("grid_size", int), ("p", float), ("alpha", float)):
        if key in sp:
            x = col.number("spectrum", key, sp.pop(key), kind=kind, positive=True)
            if x is not None:
                setattr(m.spectrum, key, x)
    _unknown(col, "spectrum", sp)

    ht = items("heat")
    if "R" in ht:
        m.heat.R = col.number("heat", "R", ht.pop("R"), positive=True) or m.heat.R
    if "bc" in ht:
        bc = _unquote(ht.pop("bc")).lower()
        if bc not in ("dirichlet", "neumann"):
            col.problems.append("[heat] bc: must be dirichlet or neumann")
        m.heat.bc = bc
    if "tau" in ht:
        m.heat.taus = col.numbers("heat", "tau", ht.pop("tau"), positive=True)
    if "grid_size" in ht:
        x = col.number("heat", "grid_size", ht.pop("grid_size"), kind=int, positive=True)
        if x is not None:
            m.heat.grid_size = x
    if "side" in ht:
        side = _unquote(ht.pop("side")).lower()
        if side not in ("lower", "upper", "both"):
            col.problems.append("[heat] side: must be lower, upper or both")
        m.heat.side = side
    _unknown(col, "heat", ht)

    out = items("output")
    if "dir" in out:
        m.output.directory = _unquote(out.pop("dir"))
    if "csv" in out:
        m.output.csv = _unquote(out.pop("csv")).lower() in ("1", "true", "yes", "on")
    _unknown(col, "output", out)

    _check_theorem_inputs(col, m)
    if col.problems:
        raise ConfigError(f"{source}: {len(col.problems)} problem(s):\n  " + "\n  ".join(col.problems))
    return m


def _parse_ladder(col, section, raw):
    parts = [x.strip() for x in _unquote(raw).split(",")]
    if len(parts) != 2:
        col.problems.append(f"[{section}] ladder: expected 'R0,k'")
        return None, None
    R0 = col.number(section, "ladder R0", parts[0], positive=True)
    k = col.number(section, "ladder k", parts[1], kind=int)
    if k is not None and not 2 <= k <= 12:
        col.problems.append(f"[{section}] ladder k: must lie in [2, 12]")
    return (R0, k) if R0 is not None and k is not None else (None, None)


def _unknown(col, section, rest):
    for key in rest:
        col.problems.append(f"[{section}] unknown key {key!r}")


def _check_theorem_inputs(col, m: Manifest):
    have = set(m.params) | {k for k in _LIST_KEYS if getattr(m, k)}
    if m.ladder:
        have.add("ladder")
    for tid in m.theorems:
        for key in THEOREMS.get(tid, ()):
            if key not in have:
                col.problems.append(f"[run] {tid} needs {key!r}")


def load_manifest(path: str) -> Manifest:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read manifest {path!r}: {exc}") from exc
    return parse_manifest(text, source=path)
