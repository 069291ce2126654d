"""Flat ``key = value`` experiment config files.

One setting per line, ``#`` starts a comment, grids are comma separated::

    M = 2
    L = 32
    b3db_tsym = 0.3, 1.0
    ebn0_db = 0, 2, 4, 6, 8
    trials = 200
    seed = 7

Keys are the ExperimentConfig field names; unknown keys are an error.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

from .experiments import ConfigError, ExperimentConfig

_GRIDS = {"b3db_tsym", "ebn0_db"}
_INTS = {"M", "L", "trials", "target_firings_per_symbol", "dt_divisor", "seed"}
_STRS = {"snr_convention"}
KEYS = tuple(f.name for f in dataclasses.fields(ExperimentConfig))


def convert(key: str, raw: str):
    if key not in KEYS:
        raise ConfigError(f"unknown config key {key!r}")
    raw = raw.strip()
    try:
        if key in _GRIDS:
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if key in _INTS:
            return int(raw)
        if key in _STRS:
            return raw
        return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def parse_config_text(text: str, source: str = "<config>") -> dict:
    values = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected 'key = value'")
        key, raw = (p.strip() for p in line.split("=", 1))
        try:
            values[key] = convert(key, raw)
        except ConfigError as e:
            raise ConfigError(f"{source}:{n}: {e}") from None
    return values


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Build a config from an optional file plus overrides; overrides win."""
    values = {}
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read config file {p}: {e.strerror or e}") from None
        values.update(parse_config_text(text, str(p)))
    values.update(overrides or {})
    try:
        return ExperimentConfig(**values)
    except TypeError as e:
        raise ConfigError(str(e)) from None


def dump_config(cfg: ExperimentConfig) -> str:
    lines = []
    for key in KEYS:
        v = getattr(cfg, key)
        if isinstance(v, tuple):
            v = ", ".join(repr(x) for x in v)
        lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"
