from __future__ import annotations

import os

import pytest

import config as config_module
from config import ExperimentConfig, load_experiment_config, parse_config_text, validate_config
from lib.errors import ConfigError


def test_defaults():
    cfg = ExperimentConfig()
    assert cfg.group.name == "Heisenberg"
    assert cfg.radii.ball == 8
    assert cfg.estimator.m == 8
    assert cfg.checks.pairs == 100
    assert cfg.run.seed == 0
    assert cfg.run.report_format == "csv"


def test_digest_ignores_output_dir(tmp_path):
    cfg = ExperimentConfig()
    moved = cfg.with_overrides(out=tmp_path / "elsewhere")
    assert moved.run.output_dir != cfg.run.output_dir
    assert moved.digest() == cfg.digest()
    assert cfg.with_overrides(seed=7).digest() != cfg.digest()


def test_radius_overrides_reach_the_right_section():
    cfg = ExperimentConfig().with_overrides(radius={"ball": 3})
    assert cfg.radii.ball == 3
    cfg = ExperimentConfig().with_overrides(radius={"m": 12})
    assert cfg.estimator.m == 12
    assert cfg.radii == ExperimentConfig().radii


def test_group_override_resets_params():
    cfg = parse_config_text('{group: {name: "BS1m", params: {m: 3}}}')
    assert cfg.group.params == {"m": 3}
    other = cfg.with_overrides(group="Free")
    assert other.group.name == "Free"
    assert other.group.params == {}


def test_json5_syntax_is_accepted():
    text = """
    // comentário
    {
      radii: {ball: 4,},
      run: {seed: 3, report_format: 'json'},
    }
    """
    cfg = parse_config_text(text)
    assert cfg.radii.ball == 4
    assert cfg.run.seed == 3
    assert cfg.run.report_format == "json"


def test_to_text_round_trip():
    cfg = ExperimentConfig().with_overrides(seed=11, radius={"rd": 5})
    assert parse_config_text(cfg.to_text()) == cfg


@pytest.mark.parametrize(
    "text",
    [
        "{radii: {ball: -1}}",
        "{radii: {bal: 3}}",
        "{colors: {}}",
        "{run: {report_format: 'xml'}}",
        "{thresholds: {classify_ratio: 1.5}}",
    ],
)
def test_invalid_values_have_diagnostics(text):
    with pytest.raises(ConfigError) as info:
        parse_config_text(text)
    assert info.value.diagnostics


def test_unparsable_text():
    with pytest.raises(ConfigError) as info:
        parse_config_text("{radii: ", source="broken.json5")
    assert "broken.json5" in str(info.value)


def test_top_level_must_be_an_object():
    with pytest.raises(ConfigError):
        validate_config([1, 2, 3])


def test_sections_are_frozen():
    cfg = ExperimentConfig()
    with pytest.raises(Exception):
        cfg.run.seed = 5


def test_load_from_file(tmp_path):
    assert load_experiment_config(None) == ExperimentConfig()
    path = tmp_path / "exp.json5"
    path.write_text("{estimator: {m: 4, function: 'sphere'}}", encoding="utf-8")
    cfg = load_experiment_config(path)
    assert cfg.estimator.m == 4
    assert cfg.estimator.function == "sphere"
    with pytest.raises(ConfigError):
        load_experiment_config(tmp_path / "missing.json5")


def test_env_helpers(monkeypatch):
    monkeypatch.setenv("RDLAB_TEST_INT", "42")
    monkeypatch.setenv("RDLAB_TEST_BAD", "x")
    monkeypatch.setenv("RDLAB_TEST_BOOL", "Yes")
    assert config_module._get_int("RDLAB_TEST_INT", 1) == 42
    assert config_module._get_int("RDLAB_TEST_BAD", 1) == 1
    assert config_module._get_int("RDLAB_TEST_UNSET", 9) == 9
    assert config_module._get_bool("RDLAB_TEST_BOOL") is True
    assert config_module._get_bool("RDLAB_TEST_UNSET", True) is True
    monkeypatch.setenv("RDLAB_TEST_PATH", "~/cache")
    assert config_module._get_path("RDLAB_TEST_PATH").name == "cache"
    monkeypatch.setenv("RDLAB_TEST_PATH", "  ")
    assert config_module._get_path("RDLAB_TEST_PATH") is None


def test_env_file_does_not_override_environment(tmp_path, monkeypatch):
    env = tmp_path / ".env"
    env.write_text("RDLAB_ENV_FROM_FILE=arquivo\nRDLAB_ENV_PRESET='arquivo'\n", encoding="utf-8")
    # setenv antes de delenv: o teardown remove a variável criada pelo .env
    monkeypatch.setenv("RDLAB_ENV_FROM_FILE", "x")
    monkeypatch.delenv("RDLAB_ENV_FROM_FILE")
    monkeypatch.setenv("RDLAB_ENV_PRESET", "ambiente")
    assert config_module.load_env(env)
    assert os.environ["RDLAB_ENV_FROM_FILE"] == "arquivo"
    assert os.environ["RDLAB_ENV_PRESET"] == "ambiente"
    assert not config_module.load_env(tmp_path / "missing.env")
