from dataclasses import dataclass
from itertools import product

from ..corpus.models import ContentMode
from ..errors import ConfigError
from ..profiling.profile import ProfileMethod
from ..profiling.temporal import DecayKind


@dataclass(frozen=True)
class StrategyConfig:
    """One cell of the profiling x decay x content experiment matrix."""

    profiling: ProfileMethod
    decay: DecayKind
    content: ContentMode

    @property
    def id(self):
        return f"{self.profiling.value}-{self.decay.value}-{self.content.value}"

    def __str__(self):
        return self.id

    @classmethod
    def parse(cls, strategy_id):
        parts = str(strategy_id).strip().split("-")
        try:
            if len(parts) != 3:
                raise ValueError(strategy_id)
            return cls(ProfileMethod(parts[0]), DecayKind(parts[1]), ContentMode(parts[2]))
        except ValueError:
            valid = ", ".join(s.id for s in ALL_STRATEGIES)
            raise ConfigError(f"Unknown strategy id '{strategy_id}'; valid ids: {valid}")


ALL_STRATEGIES = tuple(
    StrategyConfig(profiling, decay, content)
    for profiling, decay, content in product(ProfileMethod, DecayKind, ContentMode)
)


def enumerate_strategies(strategy_filter=None):
    """
    List strategies in canonical order.

    Args:
        strategy_filter (Iterable[str] | None): Strategy ids to keep; None keeps all twelve.

    Returns:
        tuple[StrategyConfig, ...]: The selected strategies, canonical order.

    Raises:
        ConfigError: On an unknown id, listing the valid ones.
    """
    if not strategy_filter:
        return ALL_STRATEGIES
    wanted = {StrategyConfig.parse(strategy_id) for strategy_id in strategy_filter}
    return tuple(strategy for strategy in ALL_STRATEGIES if strategy in wanted)
