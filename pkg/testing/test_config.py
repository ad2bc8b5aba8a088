import pytest

from qprim.config import (ANALYSIS_DEFAULTS, RANK_ENV_VAR, load_config, load_policy,
                          policy_from_config)
from qprim.errors import ConfigurationError
from qprim.numerics import DEFAULT_POLICY


def test_missing_default_file_gives_defaults(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = load_config()
    assert config['tolerances'] == {}
    assert config['analysis'] == ANALYSIS_DEFAULTS
    assert load_policy(environ={}) == DEFAULT_POLICY


def test_missing_explicit_file_is_an_error(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(str(tmp_path / 'nope.yaml'))


def test_yaml_overrides(tmp_path):
    path = tmp_path / 'config.yaml'
    path.write_text("tolerances:\n  rank_rel: 1.0e-8\nanalysis:\n  effort: 5\n")
    config = load_config(str(path))
    assert config['analysis']['effort'] == 5
    assert config['analysis']['seed'] == 0
    pol = policy_from_config(config, environ={})
    assert pol.rank_rel == 1e-8
    assert pol.tp_abs == DEFAULT_POLICY.tp_abs


def test_environment_overrides_file(tmp_path):
    path = tmp_path / 'config.yaml'
    path.write_text("tolerances:\n  rank_rel: 1.0e-8\n")
    pol = load_policy(str(path), environ={RANK_ENV_VAR: '1e-6'})
    assert pol.rank_rel == 1e-6


@pytest.mark.parametrize("text", [
    "tolerances:\n  rank_rel: abc\n",
    "tolerances:\n  rank_rel: 5.0\n",
    "tolerances:\n  unknown_key: 1.0e-3\n",
    "tolerances: [unclosed\n",
    "- just\n- a list\n",
])
def test_invalid_configuration(tmp_path, text):
    path = tmp_path / 'config.yaml'
    path.write_text(text)
    with pytest.raises(ConfigurationError):
        load_policy(str(path), environ={})


def test_invalid_environment_value():
    with pytest.raises(ConfigurationError):
        policy_from_config({'tolerances': {}}, environ={RANK_ENV_VAR: 'tiny'})
