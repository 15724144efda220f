"""Plain-text run configuration: one ``key = value`` per line.

The parameter space is flat, so nothing fancier is warranted.  Unknown
keys are rejected with their line number; every field has a documented
default.  Blank lines and ``#`` comments are allowed.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .fields import DomainError

__all__ = ["RunConfig", "parse_config", "ConfigError", "CONFIG_DEFAULTS"]


class ConfigError(DomainError):
    """Malformed configuration file; the message carries the line number."""


@dataclass
class RunConfig:
    # grid
    nx: int = 64
    ny: int = 64
    Lx: float = 6.283185307179586
    Ly: float = 6.283185307179586
    topology: str = "doubly_periodic"
    # model
    beta: float = 1.0
    F: float = 1.0
    # time stepping
    dt: float = 1e-2
    steps: int = 100
    scheme: str = "rk4"
    ra_filter: float = 0.01
    dealias: bool = False
    # boundary setting
    kind: str = "periodic_channel"
    L: float = 3.141592653589793
    Y: float = 3.141592653589793
    # run control
    outdir: str = "out"
    output_every: int = 0
    seed: int = 0


CONFIG_DEFAULTS = RunConfig()

_BOOL = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


def _convert(name: str, kind, raw: str, lineno: int):
    raw = raw.strip()
    try:
        if kind is bool:
            return _BOOL[raw.lower()]
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return raw
    except (ValueError, KeyError):
        raise ConfigError(
            f"line {lineno}: cannot parse {raw!r} as {kind.__name__} for key {name!r}"
        ) from None


def parse_config(path) -> RunConfig:
    types = {f.name: f.type for f in fields(RunConfig)}
    # dataclass annotations are strings under from __future__; map manually
    kinds = {
        "nx": int, "ny": int, "Lx": float, "Ly": float, "topology": str,
        "beta": float, "F": float,
        "dt": float, "steps": int, "scheme": str, "ra_filter": float,
        "dealias": bool,
        "kind": str, "L": float, "Y": float,
        "outdir": str, "output_every": int, "seed": int,
    }
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
            key, _, raw = stripped.partition("=")
            key = key.strip()
            if key not in kinds:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            values[key] = _convert(key, kinds[key], raw, lineno)
    return RunConfig(**values)
