"""Run configuration: INI file with a [dynamics] section plus CLI overrides.

Precedence for dynamics parameters: CLI --dyn.<name> flags beat the
config file, which beats the built-in defaults. The log directory is
special-cased per the server contract: the EVA_LOG_DIR environment
variable overrides any configured directory, including the --logs flag.
"""

from __future__ import annotations

import configparser
import dataclasses
import os
from pathlib import Path

from .dynamics import DynamicsParams

DYNAMICS_FIELDS = tuple(f.name for f in dataclasses.fields(DynamicsParams))

ENV_LOG_DIR = "EVA_LOG_DIR"
DEFAULT_LOG_DIR = "logs"


class ConfigError(Exception):
    pass


def load_dynamics(config_path: str | Path | None = None,
                  overrides: dict | None = None) -> DynamicsParams:
    """DynamicsParams from defaults, then [dynamics] file section, then
    explicit overrides (CLI flags)."""
    values: dict = {}
    if config_path is not None:
        cp = configparser.ConfigParser()
        path = Path(config_path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            cp.read_string(path.read_text("utf-8"), source=str(path))
        except configparser.Error as exc:
            raise ConfigError(f"bad config file: {exc}") from None
        if cp.has_section("dynamics"):
            for key, raw in cp.items("dynamics"):
                if key not in DYNAMICS_FIELDS:
                    raise ConfigError(
                        f"unknown dynamics parameter {key!r} in {path}")
                try:
                    values[key] = float(raw)
                except ValueError:
                    raise ConfigError(
                        f"dynamics parameter {key} = {raw!r} "
                        "is not a number") from None
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key not in DYNAMICS_FIELDS:
            raise ConfigError(f"unknown dynamics parameter {key!r}")
        values[key] = float(val)
    params = DynamicsParams(**values)
    try:
        params.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return params


def resolve_log_dir(flag_value: str | None) -> Path:
    """EVA_LOG_DIR wins over the flag, which wins over the default."""
    env = os.environ.get(ENV_LOG_DIR)
    if env:
        return Path(env)
    if flag_value:
        return Path(flag_value)
    return Path(DEFAULT_LOG_DIR)
