"""
Configuration loading and validation
"""

import pytest

from tensorproof.config import (
    THREADS_ENV,
    Activation,
    GroupBackend,
    PRESETS,
    ProverConfig,
    resolve_workers,
)
from tensorproof.errors import ConfigError


class TestProverConfig:
    def test_defaults_validate(self):
        config = ProverConfig()
        assert config.validate()
        assert config.model.activation == Activation.RELU
        assert config.commit.group == GroupBackend.BN254
        assert config.model.d_head == 16
        assert config.model.gamma == 256

    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_presets_validate(self, name):
        assert ProverConfig.preset(name).validate()

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            ProverConfig.preset("huge")

    def test_unknown_keys(self):
        with pytest.raises(ConfigError):
            ProverConfig.from_dict({"model": {"depth": 3}})

    @pytest.mark.parametrize("data", [
        {"model": {"layers": "two"}},
        {"model": {"layers": True}},
        {"model": {"activation": "tanh"}},
        {"commit": {"batch_layers": 1}},
        {"model": {"attention": {"low_radices": 4}}},
    ])
    def test_type_errors(self, data):
        with pytest.raises(ConfigError):
            ProverConfig.from_dict(data)

    def test_no_string_coercion(self):
        with pytest.raises(ConfigError, match=r"model\.layers"):
            ProverConfig.from_dict({"model": {"layers": "2"}})

    def test_error_names_every_location(self):
        with pytest.raises(ConfigError) as info:
            ProverConfig.from_dict({"model": {"vocab": "x", "attention": {"depth": 1}}, "workers": 1.5})
        message = str(info.value)
        assert "model.vocab" in message
        assert "model.attention.depth" in message
        assert "workers" in message

    def test_enums_from_strings(self):
        config = ProverConfig.from_dict({"model": {"activation": "gelu"}, "commit": {"group": "toy61"}})
        assert config.model.activation is Activation.GELU
        assert config.commit.group is GroupBackend.TOY61
        assert config.to_dict()["commit"]["group"] == "toy61"

    @pytest.mark.parametrize("model", [
        {"d_model": 48},
        {"heads": 3, "d_model": 64},
        {"max_seq": 0},
        {"gamma_log2": 12, "attention": {"theta_log2": 10}},
        {"attention": {"segments": 2}},
        {"attention": {"middle_radices": [100, 100]}},
    ])
    def test_invalid_values(self, model):
        with pytest.raises(ConfigError):
            ProverConfig.from_dict({"model": model})

    def test_file_logging_needs_path(self):
        with pytest.raises(ConfigError):
            ProverConfig.from_dict({"observability": {"logging": {"output": "file"}}})

    def test_digest_ignores_observability(self):
        a = ProverConfig.from_dict({})
        b = ProverConfig.from_dict({"observability": {"logging": {"level": "DEBUG"}}, "workers": 4})
        assert a.digest() == b.digest()
        c = ProverConfig.from_dict({"model": {"layers": 3}})
        assert c.digest() != a.digest()

    def test_to_dict_roundtrip(self):
        config = ProverConfig.preset("toy-swiglu")
        assert ProverConfig.from_dict(config.to_dict()).to_dict() == config.to_dict()
        assert config.to_dict()["model"]["activation"] == "swiglu"


class TestYaml:
    def test_preset_merge(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("preset: toy-gelu\nmodel:\n  layers: 1\ncommit:\n  group: toy61\n")
        config = ProverConfig.from_yaml(str(path))
        assert config.model.activation == Activation.GELU
        assert config.model.layers == 1
        assert config.commit.group == GroupBackend.TOY61

    def test_plain_file(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("lookup:\n  budget_bits: 8\n")
        assert ProverConfig.from_yaml(str(path)).lookup.budget_bits == 8

    def test_empty_file(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("")
        assert ProverConfig.from_yaml(str(path)).to_dict() == ProverConfig().to_dict()

    def test_not_a_mapping(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError):
            ProverConfig.from_yaml(str(path))

    def test_broken_yaml(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("model: [unclosed\n")
        with pytest.raises(ConfigError):
            ProverConfig.from_yaml(str(path))


class TestWorkers:
    def test_flag_wins(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "7")
        assert resolve_workers(3, ProverConfig()) == 3

    def test_environment(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "5")
        assert resolve_workers(None, ProverConfig()) == 5

    def test_config_fallback(self, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)
        monkeypatch.delenv(THREADS_ENV, raising=False)
        assert resolve_workers(None, ProverConfig(workers=2)) == 2

    @pytest.mark.parametrize("value", ["many", "0"])
    def test_bad_environment(self, monkeypatch, value):
        monkeypatch.setenv(THREADS_ENV, value)
        with pytest.raises(ConfigError):
            resolve_workers(None, ProverConfig())
