"""Declarative experiment description, parsed from JSON with a strict key schema."""
import json
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError
from .stepper import SolverOptions
from .systems import (
    DampingCase,
    KdVParams,
    gaussian_profile,
    make_burgers,
    make_kdv_h1,
    make_kdv_h2,
)
from .tableau import make_tableau

SYSTEMS = ("burgers", "kdv-h1", "kdv-h2")


@dataclass
class GridConfig:
    L: float
    dx: Optional[float] = None
    n1: Optional[int] = None

    @property
    def points(self):
        n1 = self.n1 if self.n1 is not None else int(round(2 * self.L / self.dx))
        return n1

    @property
    def spacing(self):
        return self.dx if self.dx is not None else 2 * self.L / self.n1

    def coordinates(self):
        """Grid points ``x_i = -L + i dx`` for ``i = 1..N1``."""
        return -self.L + self.spacing * np.arange(1, self.points + 1)


@dataclass
class TimeConfig:
    T: float
    dt: float


@dataclass
class SchemeConfig:
    s: int = 2
    q: int = 8
    tol: float = 1e-13
    max_iter: int = 100
    strategy: str = "fixed-point"

    def options(self):
        return SolverOptions(self.tol, self.max_iter, self.strategy)

    def tableau(self, s=None):
        return make_tableau(self.s if s is None else s, self.q)


@dataclass
class OutputConfig:
    directory: str = "out"
    stride: int = 50


@dataclass
class InitialConfig:
    kind: str = "gaussian"
    sigma: float = 1.0
    amplitude: Optional[float] = None


@dataclass
class ExperimentConfig:
    system: str
    grid: GridConfig
    time: TimeConfig
    damping: DampingCase = field(default_factory=DampingCase)
    params: Optional[KdVParams] = None
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)

    def build_system(self):
        n1, dx = self.grid.points, self.grid.spacing
        if self.system == "burgers":
            return make_burgers(n1, dx, self.damping)
        maker = make_kdv_h1 if self.system == "kdv-h1" else make_kdv_h2
        return maker(n1, dx, self.params or KdVParams(), self.damping)

    def initial_state(self):
        return gaussian_profile(self.grid.coordinates(), self.initial.sigma, self.initial.amplitude)

    def to_dict(self):
        """Plain-dict form; optional fields that were not given are omitted."""
        return _prune(asdict(self))

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2)


def _prune(d):
    out = {}
    for k, v in d.items():
        if v is None:
            continue
        if isinstance(v, dict):
            v = {kk: vv for kk, vv in v.items() if vv is not None}
        out[k] = v
    return out


_SECTIONS = {
    "grid": GridConfig,
    "time": TimeConfig,
    "damping": DampingCase,
    "params": KdVParams,
    "scheme": SchemeConfig,
    "outputs": OutputConfig,
    "initial": InitialConfig,
}
_INT_FIELDS = {"n1", "s", "q", "max_iter", "stride", "seed"}
_STR_FIELDS = {"kind", "rate", "strategy", "directory"}


def _section(name, raw):
    cls = _SECTIONS[name]
    if not isinstance(raw, dict):
        raise ConfigError(name, "expected a mapping")
    known = {f.name for f in fields(cls)}
    for key in raw:
        if key not in known:
            raise ConfigError(f"{name}.{key}", "unknown key")
    values = {}
    for key, v in raw.items():
        path = f"{name}.{key}"
        if v is None:
            continue
        if key in _STR_FIELDS:
            if not isinstance(v, str):
                raise ConfigError(path, "expected a string")
        elif key in _INT_FIELDS:
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(path, "expected an integer")
        elif isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(path, "expected a number")
        values[key] = v
    try:
        return cls(**values)
    except TypeError as exc:
        raise ConfigError(name, f"missing required field ({exc})") from None
    except ValueError as exc:
        raise ConfigError(name, str(exc)) from None


def parse_config(raw):
    """Validate a config mapping and build an :class:`ExperimentConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "expected a mapping")
    allowed = {"system"} | set(_SECTIONS)
    for key in raw:
        if key not in allowed:
            raise ConfigError(key, "unknown key")
    system = raw.get("system")
    if system not in SYSTEMS:
        raise ConfigError("system", f"expected one of {', '.join(SYSTEMS)}, got {system!r}")
    for required in ("grid", "time"):
        if required not in raw:
            raise ConfigError(required, "missing section")
    if system == "burgers" and "params" in raw:
        raise ConfigError("params", "burgers takes no parameters")
    parts = {k: _section(k, v) for k, v in raw.items() if k != "system"}
    cfg = ExperimentConfig(system=system, **parts)
    _check(cfg)
    return cfg


def _check(cfg):
    g = cfg.grid
    if g.dx is None and g.n1 is None:
        raise ConfigError("grid", "one of dx or n1 is required")
    if not g.L > 0:
        raise ConfigError("grid.L", "must be positive")
    if g.dx is not None and not g.dx > 0:
        raise ConfigError("grid.dx", "must be positive")
    if g.points < 3:
        raise ConfigError("grid", f"at least 3 grid points needed, got {g.points}")
    if not cfg.time.dt > 0:
        raise ConfigError("time.dt", "must be positive")
    if cfg.time.T < 0:
        raise ConfigError("time.T", "must be non-negative")
    if cfg.scheme.s not in (1, 2, 3, 4):
        raise ConfigError("scheme.s", "supported stage counts are 1..4")
    if cfg.scheme.q < 1:
        raise ConfigError("scheme.q", "must be >= 1")
    try:
        cfg.scheme.options()
    except ValueError as exc:
        raise ConfigError("scheme", str(exc)) from None
    if cfg.outputs.stride < 1:
        raise ConfigError("outputs.stride", "must be >= 1")
    if cfg.damping.kind == "constant-unequal" and cfg.damping.seed is None:
        raise ConfigError("damping.seed", "required for constant-unequal damping")
    if cfg.initial.kind != "gaussian":
        raise ConfigError("initial.kind", "only 'gaussian' is supported")


def preset_names():
    root = resources.files("eepc") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_config(source):
    """Load from a JSON file path or a bundled preset name."""
    path = Path(source)
    if path.is_file():
        text = path.read_text()
    elif source in preset_names():
        text = (resources.files("eepc") / "presets" / f"{source}.json").read_text()
    else:
        raise ConfigError("<file>", f"no config file or preset named {source!r}")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from None
    return parse_config(raw)
