# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""Tests for settings, budgets and errors."""
import pytest

from popctl.library.common import (
    Budget,
    BudgetExceededError,
    ConfigNotSupportedError,
    InputError,
    Settings,
    activate,
    active_settings,
    open_yaml,
    resolve_limit
)


def test_shipped_defaults():
    settings = Settings()
    assert settings.get_limit("decide_states") == 24
    assert settings.get_limit("witness_tokens") == 4
    assert settings.get_limit("cut_states") == 4
    assert settings.get_limit("reduction_tokens") is None
    assert settings.get_simulation("runs") == 1000
    assert settings.get_simulation("seed") == 0
    assert str(settings.get_schema_version()) == "1.0"


def test_user_file_overrides_named_keys_only(tmp_path):
    config = tmp_path / "limits.yaml"
    config.write_text("limits:\n  decide_states: 3\n", encoding="utf-8")
    settings = Settings(config)
    assert settings.get_limit("decide_states") == 3
    assert settings.get_limit("oracle_configurations") == 5000000
    assert settings.get_simulation("max_steps") == 10000


def test_empty_user_file_keeps_the_defaults(tmp_path):
    config = tmp_path / "empty.yaml"
    config.write_text("", encoding="utf-8")
    assert open_yaml(config) is None
    assert Settings(config).get_limit("decide_states") == 24


def test_unknown_limit():
    with pytest.raises(ConfigNotSupportedError):
        Settings().get_limit("no_such_limit")


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigNotSupportedError):
        Settings(tmp_path / "missing.yaml")


def test_invalid_yaml(tmp_path):
    config = tmp_path / "broken.yaml"
    config.write_text("limits: [\n", encoding="utf-8")
    with pytest.raises(ConfigNotSupportedError):
        Settings(config)


def test_newer_schema_is_rejected(tmp_path):
    config = tmp_path / "future.yaml"
    config.write_text("schema: '2.0'\n", encoding="utf-8")
    with pytest.raises(ConfigNotSupportedError):
        Settings(config)


def test_resolve_limit_follows_activated_settings(tmp_path):
    assert resolve_limit(5, "decide_states") == 5
    assert resolve_limit(None, "decide_states") == 24
    config = tmp_path / "limits.yaml"
    config.write_text("limits:\n  decide_states: 2\n", encoding="utf-8")
    activate(Settings(config))
    assert active_settings().get_limit("decide_states") == 2
    assert resolve_limit(None, "decide_states") == 2
    activate(None)
    assert resolve_limit(None, "decide_states") == 24


def test_budget():
    budget = Budget("work", 2)
    budget.charge()
    budget.charge()
    with pytest.raises(BudgetExceededError) as error:
        budget.charge(partial="so far")
    assert error.value.partial == "so far"
    assert "work" in str(error.value)


def test_unlimited_budget():
    budget = Budget("work", None)
    budget.charge(10 ** 9)
    assert budget.used == 10 ** 9


def test_input_error_carries_line():
    error = InputError("bad token", 3)
    assert isinstance(error, ValueError)
    assert error.line == 3
    assert str(error) == "line 3: bad token"
    assert str(InputError("no line")) == "no line"
