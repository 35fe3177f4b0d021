import pytest

from src.corpus.models import ContentMode
from src.errors import ConfigError
from src.profiling.profile import ProfileMethod
from src.profiling.temporal import DecayKind
from src.recommender.strategies import ALL_STRATEGIES, StrategyConfig, enumerate_strategies


class TestStrategies:
    def test_twelve_distinct(self):
        strategies = enumerate_strategies()
        assert len(strategies) == 12
        assert len({s.id for s in strategies}) == 12

    def test_canonical_order(self):
        assert enumerate_strategies()[0].id == "CFIDF-SLIDING_WINDOW-ALL"
        assert enumerate_strategies()[1].id == "CFIDF-SLIDING_WINDOW-TITLE"
        assert enumerate_strategies()[-1].id == "LDA-EXPONENTIAL-TITLE"

    @pytest.mark.parametrize("strategy", ALL_STRATEGIES, ids=str)
    def test_id_round_trip(self, strategy):
        assert StrategyConfig.parse(strategy.id) == strategy

    def test_parse_fields(self):
        strategy = StrategyConfig.parse("HCFIDF-EXPONENTIAL-TITLE")
        assert strategy.profiling is ProfileMethod.HCFIDF
        assert strategy.decay is DecayKind.EXPONENTIAL
        assert strategy.content is ContentMode.TITLE

    def test_filter_keeps_canonical_order(self):
        selected = enumerate_strategies(["LDA-EXPONENTIAL-ALL", "CFIDF-SLIDING_WINDOW-ALL"])
        assert [s.id for s in selected] == ["CFIDF-SLIDING_WINDOW-ALL", "LDA-EXPONENTIAL-ALL"]

    def test_single_filter(self):
        assert [s.id for s in enumerate_strategies(["CFIDF-SLIDING_WINDOW-ALL"])] == ["CFIDF-SLIDING_WINDOW-ALL"]

    def test_typo_lists_valid_ids(self):
        with pytest.raises(ConfigError) as info:
            enumerate_strategies(["CFIDF-SLIDINGWINDOW-ALL"])
        assert "CFIDF-SLIDING_WINDOW-ALL" in str(info.value)
