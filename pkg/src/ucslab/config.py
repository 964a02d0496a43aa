"""Run configuration: flags > UCSLAB_* environment > JSON config file > defaults."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields
from typing import Any, Mapping

ENV_PREFIX = "UCSLAB_"


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    max_n: int = 5
    workers: int = os.cpu_count() or 1
    out_dir: str | None = None
    checkpoint_every: int = 4
    progress_interval: float = 5.0

    def snapshot(self) -> dict[str, Any]:
        return asdict(self)


_TYPES = {f.name: f.type for f in fields(Config)}


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        return None
    try:
        if key in ("max_n", "workers", "checkpoint_every"):
            out = int(value)
            if out < 1:
                raise ValueError
            return out
        if key == "progress_interval":
            out = float(value)
            if out <= 0:
                raise ValueError
            return out
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value for {key}: {value!r}") from None


def load_config(
    flags: Mapping[str, Any] | None = None,
    env: Mapping[str, str] | None = None,
    config_path: str | None = None,
) -> Config:
    env = os.environ if env is None else env
    values: dict[str, Any] = {}
    path = config_path or env.get(ENV_PREFIX + "CONFIG")
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        unknown = set(data) - set(_TYPES)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update({k: _coerce(k, v) for k, v in data.items()})
    for key in _TYPES:
        raw = env.get(ENV_PREFIX + key.upper())
        if raw not in (None, ""):
            values[key] = _coerce(key, raw)
    for key, value in (flags or {}).items():
        if key in _TYPES and value is not None:
            values[key] = _coerce(key, value)
    cfg = Config(**values)
    if not 1 <= cfg.max_n <= 5:
        raise ConfigError(f"max_n must be in 1..5, got {cfg.max_n}")
    return cfg
