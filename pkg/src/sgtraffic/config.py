"""Scenario configuration files.

INI syntax (``configparser``), all sections optional::

    [run]         scenario = steady-sweep | sigma-sweep | rarefaction | shock | custom
    [grid]        a, b, dx, t_final, cfl, bc
    [gpc]         K                       (number of basis functions, a power of two)
    [physics]     gamma, n_v, v_max, rho_max, velocity_order, radicand, v_eq_model
    [solver]      epsilon, kinetic, mc_samples, mc_sampling
    [diagnostics] n_xi, band_level, precedence
    [scenario]    rho0_grid, sigma, rho0, sigma_grid,
                  rho_left, rho_right, v_left, v_right, x_jump
    [output]      dir, snapshots

Lists are comma separated; ``start:stop:count`` expands to evenly spaced values.
A Riemann density given as two numbers ``lo, hi`` is the map xi -> lo + (hi - lo) xi.
"""
import configparser
from dataclasses import dataclass, field, fields

import numpy as np

from . import arz
from .errors import ConfigError, ContractError
from .physics import PhysicsParams

SCENARIOS = ("steady-sweep", "sigma-sweep", "rarefaction", "shock", "custom")
SWEEPS = ("steady-sweep", "sigma-sweep")

_RIEMANN_DEFAULTS = {
    "rarefaction": dict(rho_left=(0.55, 0.85), rho_right=(0.2,), v_left=0.2, v_right=0.7),
    "shock": dict(rho_left=(0.15, 0.45), rho_right=(0.75,), v_left=0.7, v_right=0.3),
}


def _linspace(start, stop, count):
    return tuple(float(v) for v in np.linspace(start, stop, int(count)))


# (section, key) -> field name; field types drive the parsing
_KEYS = {
    ("run", "scenario"): "scenario",
    ("grid", "a"): "a",
    ("grid", "b"): "b",
    ("grid", "dx"): "dx",
    ("grid", "t_final"): "t_final",
    ("grid", "cfl"): "cfl",
    ("grid", "bc"): "bc",
    ("gpc", "k"): "K",
    ("physics", "gamma"): "gamma",
    ("physics", "n_v"): "n_v",
    ("physics", "v_max"): "v_max",
    ("physics", "rho_max"): "rho_max",
    ("physics", "velocity_order"): "velocity_order",
    ("physics", "radicand"): "radicand",
    ("physics", "v_eq_model"): "v_eq_model",
    ("solver", "epsilon"): "epsilon",
    ("solver", "kinetic"): "kinetic",
    ("solver", "mc_samples"): "mc_samples",
    ("solver", "mc_sampling"): "mc_sampling",
    ("diagnostics", "n_xi"): "n_xi",
    ("diagnostics", "band_level"): "band_level",
    ("diagnostics", "precedence"): "precedence",
    ("scenario", "rho0_grid"): "rho0_grid",
    ("scenario", "sigma"): "sigma",
    ("scenario", "rho0"): "rho0",
    ("scenario", "sigma_grid"): "sigma_grid",
    ("scenario", "rho_left"): "rho_left",
    ("scenario", "rho_right"): "rho_right",
    ("scenario", "v_left"): "v_left",
    ("scenario", "v_right"): "v_right",
    ("scenario", "x_jump"): "x_jump",
    ("output", "dir"): "output_dir",
    ("output", "snapshots"): "snapshots",
}


@dataclass
class ScenarioConfig:
    scenario: str = "rarefaction"
    a: float = 0.0
    b: float = 2.0
    dx: float = 0.02
    t_final: float = 1.0
    cfl: float = 0.45
    bc: str = "outflow"
    K: int = 64
    gamma: int = 1
    n_v: int = 5
    v_max: float = 1.0
    rho_max: float = 1.0
    velocity_order: str = "descending"
    radicand: str = "previous"
    v_eq_model: str = "linear"
    epsilon: float = 1e-2
    kinetic: bool = False
    mc_samples: int = 0
    mc_sampling: str = "uniform-grid"
    n_xi: int = None
    band_level: float = 0.95
    precedence: str = "square_of_derivative"
    rho0_grid: tuple = field(default_factory=lambda: _linspace(0.1, 0.9, 81))
    sigma: float = 0.1
    rho0: tuple = (0.4, 0.6)
    sigma_grid: tuple = field(default_factory=lambda: _linspace(0.0, 0.2, 41))
    rho_left: tuple = None
    rho_right: tuple = None
    v_left: float = None
    v_right: float = None
    x_jump: float = 1.0
    output_dir: str = "output"
    snapshots: tuple = None
    n_v_list: tuple = field(default=None, repr=False)

    def __post_init__(self):
        defaults = _RIEMANN_DEFAULTS.get(self.scenario, _RIEMANN_DEFAULTS["rarefaction"])
        for key, value in defaults.items():
            if getattr(self, key) is None:
                setattr(self, key, value)
        if self.n_xi is None:
            self.n_xi = 10_000 if self.scenario in SWEEPS else 100

    @property
    def level(self):
        return int(round(np.log2(self.K))) if self.K >= 1 else -1

    @property
    def snapshot_times(self):
        if self.snapshots is None:
            return arz.default_snapshot_times(self.t_final)
        return sorted(self.snapshots)

    @property
    def n_v_values(self):
        """All n_v of a sweep; ``n_v`` may list several, e.g. ``3, 10``."""
        return self.n_v_list if self.n_v_list else (self.n_v,)

    def physics(self, n_v=None):
        return PhysicsParams(gamma=self.gamma, v_max=self.v_max, rho_max=self.rho_max,
                             n_v=self.n_v if n_v is None else n_v,
                             velocity_order=self.velocity_order, radicand=self.radicand,
                             v_eq_model=self.v_eq_model)

    def grid_values(self, name):
        return np.asarray(getattr(self, name), dtype=float)

    def initial_data(self):
        if self.scenario not in ("rarefaction", "shock", "custom"):
            raise ContractError(f"scenario {self.scenario!r} has no initial data")
        pair = lambda v: tuple(v) if len(v) == 2 else float(v[0])
        return arz.riemann(pair(self.rho_left), pair(self.rho_right), self.v_left,
                           self.v_right, self.x_jump, name=self.scenario)

    def resolved(self):
        """Plain dict of every setting, defaults included."""
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        out["snapshot_times"] = list(self.snapshot_times)
        out["n_v_values"] = list(self.n_v_values)
        return out


def _convert(name, raw, section, key):
    typ = next(f.type for f in fields(ScenarioConfig) if f.name == name)
    try:
        if typ is tuple:
            if ":" in raw:
                start, stop, count = raw.split(":")
                if not float(count).is_integer() or float(count) < 2:
                    raise ValueError("count in start:stop:count must be an integer >= 2")
                return _linspace(float(start), float(stop), float(count))
            return tuple(float(p) for p in raw.split(",") if p.strip())
        if typ is bool:
            return configparser.ConfigParser.BOOLEAN_STATES[raw.strip().lower()]
        if typ is int:
            val = float(raw)
            if not val.is_integer():
                raise ValueError(f"{raw!r} is not an integer")
            return int(val)
        if typ is float:
            return float(raw)
        return raw.strip()
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from None


def parse_config(text, source="<string>"):
    """Build a ScenarioConfig from INI text; unknown keys are errors."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            name = _KEYS.get((section.lower(), key))
            if name is None:
                raise ConfigError(f"{source}: unknown key [{section}] {key}")
            if name == "n_v" and "," in raw:
                values["n_v_list"] = tuple(_convert("n_v", r, section, key) for r in raw.split(","))
                values["n_v"] = values["n_v_list"][0]
                continue
            values[name] = _convert(name, raw, section, key)
    if "scenario" not in values or not values["scenario"]:
        raise ConfigError(f"{source}: missing [run] scenario")
    return ScenarioConfig(**values)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, source=str(path))


def _support(spec):
    return (min(spec), max(spec))


def validate_config(cfg):
    """Every violated invariant as a message; an empty list means valid."""
    out = []
    if cfg.scenario not in SCENARIOS:
        out.append(f"scenario must be one of {', '.join(SCENARIOS)}")
    if not cfg.dx > 0:
        out.append("dx must be positive")
    elif cfg.b > cfg.a:
        n = (cfg.b - cfg.a) / cfg.dx
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            out.append("dx must divide the domain length")
    if not cfg.b > cfg.a:
        out.append("domain needs b > a")
    if not cfg.t_final >= 0:
        out.append("t_final must be >= 0")
    if not 0 < cfg.cfl <= 1:
        out.append("cfl must lie in (0, 1]")
    if cfg.K < 1 or cfg.K & (cfg.K - 1):
        out.append("K must be a power of two (Haar)")
    if cfg.bc not in ("outflow", "periodic"):
        out.append("bc must be outflow or periodic")
    if not cfg.epsilon > 0:
        out.append("epsilon must be positive")
    if cfg.n_xi < 1:
        out.append("n_xi must be >= 1")
    if cfg.mc_samples < 0:
        out.append("mc_samples must be >= 0")
    if not 0 < cfg.band_level < 1:
        out.append("band_level must lie in (0, 1)")
    for nv in cfg.n_v_values:
        try:
            cfg.physics(nv)
        except ContractError as exc:
            out.append(str(exc))
    if cfg.snapshots is not None and any(t < 0 or t > cfg.t_final for t in cfg.snapshots):
        out.append("snapshot times must lie in [0, t_final]")
    lo, hi = 0.0, cfg.rho_max
    inside = lambda a, b: lo < a and b < hi
    if cfg.scenario == "steady-sweep":
        r = cfg.grid_values("rho0_grid")
        if r.size == 0 or not inside(r.min() - cfg.sigma / 2, r.max() + cfg.sigma / 2):
            out.append("density support exceeds (0,1)")
    elif cfg.scenario == "sigma-sweep":
        s = cfg.grid_values("sigma_grid")
        if s.size == 0 or s.min() < 0:
            out.append("sigma must be >= 0")
        elif not all(inside(r - s.max() / 2, r + s.max() / 2) for r in cfg.rho0):
            out.append("density support exceeds (0,1)")
    elif cfg.scenario in ("rarefaction", "shock", "custom"):
        for spec in (cfg.rho_left, cfg.rho_right):
            if len(spec) not in (1, 2):
                out.append("Riemann densities take one value or a lo, hi pair")
            elif not inside(*_support(spec)):
                out.append("density support exceeds (0,1)")
                break
        if not cfg.a < cfg.x_jump < cfg.b:
            out.append("x_jump must lie inside the domain")
    return out
