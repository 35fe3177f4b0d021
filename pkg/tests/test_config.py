from datetime import date
from pathlib import Path

import pytest

from src.config import (
    BACKGROUND_FACTOR,
    TOP_K,
    DecayConstants,
    apply_overrides,
    load_run_config,
    validate_run_config,
)
from src.errors import ConfigError

CONFIG = """
[paths]
taxonomy = "taxonomy.json"
corpus = "corpus.jsonl"
tweets = "tweets.jsonl"
background = "background.jsonl"

[run]
now = "2016-06-01"
seed = 3
strategies = "CFIDF-SLIDING_WINDOW-ALL,LDA-EXPONENTIAL-TITLE"

[decay]
tau_social_days = 100

[profiling]
activated_doc_freq = true
"""


@pytest.fixture
def config_dir(tmp_path):
    (tmp_path / "config.toml").write_text(CONFIG, encoding="utf-8")
    for name in ("taxonomy.json", "corpus.jsonl", "tweets.jsonl", "background.jsonl"):
        (tmp_path / name).write_text("", encoding="utf-8")
    return tmp_path


class TestLoadRunConfig:
    def test_defaults_and_resolution(self, config_dir):
        config = load_run_config(config_dir / "config.toml")
        assert config.taxonomy == config_dir.resolve() / "taxonomy.json"
        assert config.now == date(2016, 6, 1)
        assert config.k == TOP_K
        assert config.background_factor == BACKGROUND_FACTOR
        assert config.seed == 3
        assert config.strategies == ("CFIDF-SLIDING_WINDOW-ALL", "LDA-EXPONENTIAL-TITLE")
        assert config.decay == DecayConstants(tau_social_days=100)
        assert config.activated_doc_freq is True
        assert config.lda_model_all is None

    def test_missing_now(self, tmp_path):
        (tmp_path / "config.toml").write_text(CONFIG.replace('now = "2016-06-01"', ""), encoding="utf-8")
        with pytest.raises(ConfigError, match="now"):
            load_run_config(tmp_path / "config.toml")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_run_config(tmp_path / "absent.toml")

    def test_invalid_toml(self, tmp_path):
        (tmp_path / "config.toml").write_text("[paths\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_run_config(tmp_path / "config.toml")

    def test_unknown_decay_key(self, tmp_path):
        (tmp_path / "config.toml").write_text(CONFIG + "\n[lda]\nepochs = 3\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="Unknown key"):
            load_run_config(tmp_path / "config.toml")


class TestOverridesAndValidation:
    def test_overrides(self, config_dir):
        config = apply_overrides(
            load_run_config(config_dir / "config.toml"),
            seed=9,
            now="2015-01-01",
            k=10,
            strategies="HCFIDF-EXPONENTIAL-ALL",
            out_dir="elsewhere",
        )
        assert (config.seed, config.now, config.k) == (9, date(2015, 1, 1), 10)
        assert config.strategies == ("HCFIDF-EXPONENTIAL-ALL",)
        assert config.out_dir == Path("elsewhere")

    def test_valid(self, config_dir):
        config = load_run_config(config_dir / "config.toml")
        assert validate_run_config(config) is config

    def test_reports_every_problem(self, config_dir):
        (config_dir / "corpus.jsonl").unlink()
        config = apply_overrides(load_run_config(config_dir / "config.toml"), k=0, strategies="NOPE-X-Y")
        with pytest.raises(ConfigError) as info:
            validate_run_config(config)
        message = str(info.value)
        assert "k must be >= 1" in message
        assert "corpus file does not exist" in message
        assert "NOPE-X-Y" in message
