"""Runtime configuration: JSON file + HAPTICREC_* environment overrides.

Precedence: built-in defaults < config file < environment. Unknown file
keys fail fast so typos surface at startup.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

from .errors import ConfigError

ENV_PREFIX = "HAPTICREC_"


@dataclass
class AppConfig:
    addr: str = "127.0.0.1:8080"
    # Data directory: corpus.json + reviews/ + sessions/ live here. Unset
    # means fully ephemeral state seeded from the packaged fixture corpus.
    data_dir: str | None = None
    corpus_path: str | None = None  # explicit corpus file, wins over data_dir
    samples_path: str | None = None  # overrides the packaged sample queries
    provider: str = "mock"  # completion provider: mock | http
    provider_endpoint: str = ""
    provider_api_key: str = ""
    provider_model: str = "default"
    provider_timeout_s: float = 30.0
    shortlist_size: int = 5
    semantic_k: int = 10

    def host_port(self) -> tuple[str, int]:
        host, _, port = self.addr.rpartition(":")
        if not host or not port.isdigit():
            raise ConfigError(f"addr must look like host:port, got {self.addr!r}")
        return host, int(port)


_FIELDS = {f.name: f for f in dataclasses.fields(AppConfig)}


def _coerce(name: str, raw: object):
    kind = _FIELDS[name].type
    try:
        if kind == "int":
            return int(raw)  # type: ignore[arg-type]
        if kind == "float":
            return float(raw)  # type: ignore[arg-type]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config value {name}={raw!r} is not a number") from exc
    if raw is None or isinstance(raw, str):
        return raw
    raise ConfigError(f"config value {name} must be a string, got {raw!r}")


def load_config(path: str | None = None, env: dict | None = None) -> AppConfig:
    env = os.environ if env is None else env
    values: dict[str, object] = {}
    if path:
        try:
            with open(path, encoding="utf-8") as f:
                file_values = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config file {path}: {exc}") from exc
        if not isinstance(file_values, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        for key, raw in file_values.items():
            if key not in _FIELDS:
                raise ConfigError(f"unknown config key {key!r} in {path}")
            values[key] = _coerce(key, raw)
    for name in _FIELDS:
        env_key = ENV_PREFIX + name.upper()
        if env_key in env:
            values[name] = _coerce(name, env[env_key])
    return AppConfig(**values)  # type: ignore[arg-type]
