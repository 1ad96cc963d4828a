"""Plain-text ``key = value`` run configuration.

Lines are ``key = value``; ``#`` starts a comment. Lists are comma
separated. Every key is listed in :data:`SCHEMA` with its type, default and
unit; anything else is rejected before any computation starts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from ..geometry import GeometryError, HoleShape
from ..operators import DEFAULT_NT, ProblemConfig


class ConfigError(ValueError):
    pass


def _float(v):
    x = float(v)
    if not math.isfinite(x):
        raise ValueError("not a finite number")
    return x


def _int(v):
    f = float(v)
    if f != int(f):
        raise ValueError("not an integer")
    return int(f)


def _bool(v):
    s = v.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError("not a boolean")


def _list(conv):
    def parse(v):
        items = [s.strip() for s in v.split(",") if s.strip()]
        if not items:
            raise ValueError("empty list")
        return [conv(s) for s in items]
    return parse


def _str(v):
    return v.strip()


# key: (parser, default, unit / meaning)
SCHEMA = {
    "g": (_float, None, "gradient strength g > 0, in units of (cell side)^-3"),
    "q": (_float, 0.0, "y-quasimomentum, radians"),
    "p0": (_float, 0.0, "initial x-Floquet phase, radians"),
    "hole": (_str, "disk", "hole kind: none | disk | ellipse"),
    "radius": (_float, 0.25, "disk radius, cell units"),
    "semi_axis_x": (_float, 0.3, "ellipse semi-axis along x, cell units"),
    "semi_axis_y": (_float, 0.2, "ellipse semi-axis along y, cell units"),
    "N": (_int, 64, "grid points per cell side"),
    "Nt": (_int, DEFAULT_NT, "Crank-Nicolson steps per period"),
    "s": (_int, 1, "periods composed per Arnoldi application"),
    "arnoldi_m": (_int, 20, "Krylov dimension"),
    "arnoldi_tol": (_float, 1e-6, "Ritz residual tolerance (absolute, unit vectors)"),
    "nev": (_int, 6, "leading Ritz pairs whose residual is evaluated"),
    "seed": (_int, 1, "start-vector seed"),
    "solver_tol": (_float, 1e-10, "relative residual of each implicit solve"),
    "solver_maxit": (_int, 2000, "iteration cap of each implicit solve"),
    "mu_floor": (_float, 1e-14, "monodromy values below this modulus are dropped"),
    "q_values": (_list(_float), None, "sweep: explicit q list, radians"),
    "q_range": (_list(_float), None, "sweep: start, stop, count (stop excluded)"),
    "g_values": (_list(_float), None, "asymptotics: ascending g list"),
    "N_values": (_list(_int), None, "asymptotics: grid size per g (default N)"),
    "s_values": (_list(_int), None, "asymptotics: periods per g (default: smallest s with |mu|^s <= 0.1 under the Airy law)"),
    "strip_L": (_int, 4, "strip half-width in cells (2L+1 cells)"),
    "strip_T": (_float, None, "strip semigroup time (default t_g = 2 pi / g)"),
    "strip_Nt": (_int, None, "strip Crank-Nicolson steps (default Nt)"),
    "strip_m": (_int, None, "strip Krylov dimension (default arnoldi_m)"),
    "strip_tol": (_float, None, "strip Ritz tolerance (default arnoldi_tol)"),
    "crosscheck_tol": (_float, 0.05, "relative mismatch allowed modulo i g"),
    "ps_N": (_int, None, "pseudospectra grid points per cell (default N)"),
    "ps_re": (_list(_float), None, "pseudospectra Re z window: min, max"),
    "ps_im": (_list(_float), None, "pseudospectra Im z window: min, max"),
    "ps_n_re": (_int, 1, "pseudospectra samples along Re z"),
    "ps_n_im": (_int, 4, "pseudospectra samples along Im z (max excluded when periodic)"),
    "ps_tol": (_float, 1e-3, "inverse-iteration relative tolerance"),
    "ps_maxit": (_int, 200, "inverse-iteration cap"),
    "output_dir": (_str, "out", "directory for result files"),
    "plots": (_bool, False, "write SVG figures next to the tables"),
}



@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)
    source: str = ""

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        v = self.values.get(key)
        return default if v is None else v

    def shape(self) -> HoleShape:
        kind = self["hole"]
        try:
            if kind == "none":
                return HoleShape()
            if kind == "disk":
                return HoleShape.disk(self["radius"])
            if kind == "ellipse":
                return HoleShape.ellipse(self["semi_axis_x"], self["semi_axis_y"])
        except GeometryError as exc:
            raise ConfigError(str(exc)) from exc
        raise ConfigError(f"unknown hole kind {kind!r}")

    def problem(self, **overrides) -> ProblemConfig:
        v = dict(self.values)
        v.update(overrides)
        if v.get("g") is None:
            raise ConfigError("g is required")
        try:
            return ProblemConfig(
                g=v["g"], q=v["q"], p0=v["p0"], shape=self.shape(), N=v["N"], Nt=v["Nt"],
                s=v["s"], arnoldi_m=v["arnoldi_m"], arnoldi_tol=v["arnoldi_tol"],
                seed=v["seed"], solver_tol=v["solver_tol"], solver_maxit=v["solver_maxit"],
                nev=v["nev"], mu_floor=v["mu_floor"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def q_list(self):
        if self.get("q_values") is not None:
            return list(self["q_values"])
        if self.get("q_range") is not None:
            r = self["q_range"]
            if len(r) != 3 or r[2] < 1 or r[2] != int(r[2]):
                raise ConfigError("q_range needs start, stop, count")
            n = int(r[2])
            return [r[0] + (r[1] - r[0]) * k / n for k in range(n)]
        return [self["q"]]

    def resolved(self) -> dict:
        return {k: self.values.get(k) for k in SCHEMA}


def parse_config_text(text: str, source: str = "<string>", overrides=None) -> RunConfig:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        raw[key] = (val, lineno)
    values = {}
    for key, (conv, default, _) in SCHEMA.items():
        if key in raw:
            val, lineno = raw[key]
            try:
                values[key] = conv(val)
            except ValueError as exc:
                raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
        else:
            values[key] = default
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    cfg = RunConfig(values, source)
    _validate(cfg)
    return cfg


def load_config(path, overrides=None) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, str(p), overrides)


def _validate(cfg: RunConfig):
    v = cfg.values
    if v["g"] is not None and v["g"] <= 0:
        raise ConfigError(f"g must be positive, got {v['g']}")
    for key in ("N", "Nt", "s", "arnoldi_m", "nev", "solver_maxit", "ps_n_re", "ps_n_im", "ps_maxit"):
        if v[key] is not None and v[key] < 1:
            raise ConfigError(f"{key} must be positive")
    if v["N"] < 2:
        raise ConfigError("N must be at least 2")
    if v["Nt"] < 8:
        raise ConfigError("Nt must be at least 8")
    if v["strip_L"] < 0:
        raise ConfigError("strip_L must be non-negative")
    for key in ("arnoldi_tol", "solver_tol", "crosscheck_tol", "ps_tol"):
        if v[key] <= 0:
            raise ConfigError(f"{key} must be positive")
    gv = v["g_values"]
    if gv is not None:
        if any(g <= 0 for g in gv):
            raise ConfigError("g_values must be positive")
        if any(b <= a for a, b in zip(gv, gv[1:])):
            raise ConfigError("g_values must be strictly ascending")
        for key in ("N_values", "s_values"):
            if v[key] is not None and len(v[key]) != len(gv):
                raise ConfigError(f"{key} must have one entry per g")
    for key in ("ps_re", "ps_im"):
        if v[key] is not None and (len(v[key]) != 2 or v[key][1] < v[key][0]):
            raise ConfigError(f"{key} needs min, max")
    cfg.shape()


def describe_schema() -> str:
    lines = []
    for key, (_, default, doc) in SCHEMA.items():
        lines.append(f"{key:16s} default={default!s:10s} {doc}")
    return "\n".join(lines)
