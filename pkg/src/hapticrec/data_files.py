"""Access to data files shipped inside the package (pattern tables,
lexicons, prompt templates, fixture corpus)."""

from __future__ import annotations

import json
from importlib import resources

from .errors import ConfigError

_ROOT = resources.files(__package__) / "data"


def data_text(*parts: str) -> str:
    node = _ROOT
    for part in parts:
        node = node / part
    try:
        return node.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"missing packaged data file {'/'.join(parts)}: {exc}") from exc


def data_json(*parts: str):
    text = data_text(*parts)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed packaged data file {'/'.join(parts)}: {exc}") from exc


def data_dir_names(*parts: str) -> list[str]:
    node = _ROOT
    for part in parts:
        node = node / part
    return sorted(entry.name for entry in node.iterdir())
