"""Flat ``key = value`` run configuration with repeatable ``[mode]`` sections."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .core import GridSpec, SuperpositionState, UnitSystem


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ModeSpec:
    amp: float = 1.0
    phase: float = 0.0
    p: float = 0.0


@dataclass(frozen=True)
class RunConfig:
    m: float = 1.0
    c: float = 1.0
    hbar: float = 1.0
    n_points: int = 256
    length: float = 64.0
    v: float = 0.5
    dt: float = 0.0  # 0 means "pick dt so that E_max dt / hbar = 1e-3"
    t_final: float = 10.0
    steps: int = 11
    p0: float = 0.3
    sigma_p: float = 0.1
    x0: float = 0.0
    tol: float = 0.0  # 0 means "use the subcommand's default tolerance"
    seed: int = 42
    samples: int = 0  # 0 means "use the subcommand's default"
    out: str = ""
    modes: tuple[ModeSpec, ...] = field(default_factory=tuple)

    @property
    def units(self) -> UnitSystem:
        return UnitSystem(self.m, self.c, self.hbar)

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.n_points, self.length, self.hbar)

    def superposition(self) -> SuperpositionState:
        import cmath
        return SuperpositionState.from_arrays(
            [md.amp * cmath.exp(1j * md.phase) for md in self.modes],
            [md.p * self.m * self.c for md in self.modes], self.units)


_SCALAR_KEYS = {f.name: f.type for f in fields(RunConfig) if f.name != "modes"}
_INT_KEYS = {"n_points", "steps", "seed", "samples"}
_STR_KEYS = {"out"}
_MODE_KEYS = {f.name for f in fields(ModeSpec)}


def _convert(key: str, raw: str):
    try:
        if key in _STR_KEYS:
            return raw
        if key in _INT_KEYS:
            return int(raw)
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite, got {raw!r}")
    return value


def validate(cfg: RunConfig) -> RunConfig:
    """Range checks; every message starts with the offending key."""
    if cfg.m < 0:
        raise ConfigError(f"m: must be >= 0, got {cfg.m}")
    for key in ("c", "hbar", "length"):
        if getattr(cfg, key) <= 0:
            raise ConfigError(f"{key}: must be > 0, got {getattr(cfg, key)}")
    if cfg.n_points <= 0 or cfg.n_points % 2:
        raise ConfigError(f"n_points: must be a positive even integer, got {cfg.n_points}")
    if not abs(cfg.v) < cfg.c:
        raise ConfigError(f"v: must satisfy |v| < c = {cfg.c}, got {cfg.v}")
    for key in ("dt", "tol", "t_final", "samples"):
        if getattr(cfg, key) < 0:
            raise ConfigError(f"{key}: must be >= 0, got {getattr(cfg, key)}")
    if cfg.sigma_p <= 0:
        raise ConfigError(f"sigma_p: must be > 0, got {cfg.sigma_p}")
    if cfg.steps < 1:
        raise ConfigError(f"steps: must be >= 1, got {cfg.steps}")
    if cfg.seed < 0:
        raise ConfigError(f"seed: must be >= 0, got {cfg.seed}")
    for i, md in enumerate(cfg.modes):
        if md.amp < 0:
            raise ConfigError(f"amp: mode {i} has negative modulus {md.amp}")
    return cfg


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    values: dict = {}
    modes: list[dict] = []
    current: dict | None = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line != "[mode]":
                raise ConfigError(f"{line}: unknown section at {source}:{lineno}")
            current = {}
            modes.append(current)
            continue
        if "=" not in line:
            raise ConfigError(f"{line}: expected 'key = value' at {source}:{lineno}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if current is not None:
            if key not in _MODE_KEYS:
                raise ConfigError(f"{key}: unknown mode key at {source}:{lineno}")
            current[key] = _convert(key, raw)
        else:
            if key not in _SCALAR_KEYS:
                raise ConfigError(f"{key}: unknown key at {source}:{lineno}")
            values[key] = _convert(key, raw)
    cfg = RunConfig(**values, modes=tuple(ModeSpec(**md) for md in modes))
    return validate(cfg)


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config: no such file {str(path)!r}")
    return parse_config(path.read_text(encoding="utf-8"), str(path))


def fmt(value) -> str:
    """17 significant digits for floats, 0/1 for flags."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def dump_config(cfg: RunConfig) -> str:
    lines = [f"{f.name} = {fmt(getattr(cfg, f.name))}" for f in fields(cfg) if f.name != "modes"]
    for md in cfg.modes:
        lines.append("[mode]")
        lines.extend(f"{f.name} = {fmt(getattr(md, f.name))}" for f in fields(md))
    return "\n".join(lines) + "\n"


def merge(cfg: RunConfig, **overrides) -> RunConfig:
    """Apply command-line overrides; ``None`` means "not given"."""
    given = {k: v for k, v in overrides.items() if v is not None}
    return validate(replace(cfg, **given))
