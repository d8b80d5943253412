"""Configuration loading: defaults, file values, env overrides, coercion."""

import json

import pytest

from hapticrec.config import AppConfig, load_config
from hapticrec.errors import ConfigError


def test_defaults_without_file_or_env():
    config = load_config(None, env={})
    assert config == AppConfig()
    assert config.addr == "127.0.0.1:8080"
    assert config.provider == "mock"
    assert config.shortlist_size == 5
    assert config.semantic_k == 10


def test_file_values_override_defaults(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"addr": "0.0.0.0:9000", "shortlist_size": 3}))
    config = load_config(str(path), env={})
    assert config.addr == "0.0.0.0:9000"
    assert config.shortlist_size == 3
    assert config.provider == "mock"  # untouched keys keep defaults


def test_env_overrides_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"addr": "0.0.0.0:9000", "provider": "http"}))
    config = load_config(
        str(path),
        env={"HAPTICREC_ADDR": "127.0.0.1:7777", "HAPTICREC_PROVIDER_TIMEOUT_S": "2.5"},
    )
    assert config.addr == "127.0.0.1:7777"  # env wins over file
    assert config.provider == "http"  # file wins over default
    assert config.provider_timeout_s == 2.5


def test_env_values_are_coerced_to_field_types():
    config = load_config(
        None,
        env={"HAPTICREC_SHORTLIST_SIZE": "7", "HAPTICREC_SEMANTIC_K": "25"},
    )
    assert config.shortlist_size == 7
    assert isinstance(config.shortlist_size, int)
    assert config.semantic_k == 25


def test_unknown_file_key_fails_fast(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"short_list_size": 3}))
    with pytest.raises(ConfigError, match="short_list_size"):
        load_config(str(path), env={})


def test_non_numeric_value_for_numeric_key_is_rejected(tmp_path):
    with pytest.raises(ConfigError, match="shortlist_size"):
        load_config(None, env={"HAPTICREC_SHORTLIST_SIZE": "five"})


def test_malformed_config_file_is_rejected(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="config.json"):
        load_config(str(path), env={})


def test_config_file_must_hold_an_object(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="JSON object"):
        load_config(str(path), env={})


def test_missing_config_file_is_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.json"), env={})


@pytest.mark.parametrize(
    "addr,expected",
    [
        ("127.0.0.1:8080", ("127.0.0.1", 8080)),
        ("0.0.0.0:80", ("0.0.0.0", 80)),
        ("[::1]:9000", ("[::1]", 9000)),
    ],
)
def test_host_port_split(addr, expected):
    assert AppConfig(addr=addr).host_port() == expected


@pytest.mark.parametrize("addr", ["localhost", ":8080", "host:", "host:port"])
def test_host_port_rejects_malformed_addr(addr):
    with pytest.raises(ConfigError, match="host:port"):
        AppConfig(addr=addr).host_port()
