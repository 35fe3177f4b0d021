import logging
import os
import tomllib
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path

from dotenv import load_dotenv

from .errors import ConfigError

# Load environment variables from .env file
load_dotenv()

LOG_LEVEL = os.getenv("SCIREC_LOG_LEVEL", "INFO").upper()
DEFAULT_SEED = int(os.getenv("SCIREC_SEED", "42"))

PACKAGE_DIR = Path(__file__).resolve().parent
DEFAULT_STOPWORDS_PATH = PACKAGE_DIR / "data" / "stopwords.txt"
DEFAULT_SUFFIX_RULES_PATH = PACKAGE_DIR / "data" / "suffix_rules.tsv"

# Recommendation
TOP_K = 5
BACKGROUND_FACTOR = 5.0

# Temporal decay
THRESH_SOCIAL_DAYS = 250
THRESH_DOC_YEARS = 9.04
TAU_SOCIAL_DAYS = 360
TAU_DOC_YEARS = 13.05

# Evaluation
RANKSCORE_THETA = 5

# Topic model
LDA_TOPICS = 100
LDA_ALPHA = 0.5
LDA_BETA = 0.1
LDA_ITERATIONS = 500
LDA_INFER_ITERATIONS = 200
LDA_MIN_DF = 25

# Module-level variable to store the logger instance
_logger = None


def setup_logging():
    global _logger
    if _logger is None:
        # Create logger for the application
        _logger = logging.getLogger("SciRec")
        _logger.setLevel(LOG_LEVEL)

        handler = logging.StreamHandler()
        handler.setLevel(LOG_LEVEL)
        handler.setFormatter(logging.Formatter('%(message)s'))

        _logger.addHandler(handler)
        _logger.propagate = False  # Prevent propagation to root logger

    return _logger


logger = setup_logging()


@dataclass(frozen=True)
class DecayConstants:
    thresh_social_days: float = THRESH_SOCIAL_DAYS
    thresh_doc_years: float = THRESH_DOC_YEARS
    tau_social_days: float = TAU_SOCIAL_DAYS
    tau_doc_years: float = TAU_DOC_YEARS


@dataclass(frozen=True)
class LdaSettings:
    topics: int = LDA_TOPICS
    alpha: float = LDA_ALPHA
    beta: float = LDA_BETA
    iterations: int = LDA_ITERATIONS
    infer_iterations: int = LDA_INFER_ITERATIONS
    min_df: int = LDA_MIN_DF


@dataclass(frozen=True)
class RunConfig:
    """Everything a `run` needs, resolved from the TOML file plus CLI overrides."""

    taxonomy: Path
    corpus: Path
    tweets: Path
    background: Path
    now: date
    synonyms: Path | None = None
    lda_model_all: Path | None = None
    lda_model_title: Path | None = None
    stopwords: Path = DEFAULT_STOPWORDS_PATH
    suffix_rules: Path = DEFAULT_SUFFIX_RULES_PATH
    out_dir: Path = Path("output")
    k: int = TOP_K
    background_factor: float = BACKGROUND_FACTOR
    seed: int = DEFAULT_SEED
    theta: float = RANKSCORE_THETA
    strategies: tuple[str, ...] | None = None
    activated_doc_freq: bool = False
    decay: DecayConstants = field(default_factory=DecayConstants)
    lda: LdaSettings = field(default_factory=LdaSettings)

    def input_paths(self):
        """Return the named input files of the run (optional ones only when set)."""
        paths = {
            "taxonomy": self.taxonomy,
            "corpus": self.corpus,
            "tweets": self.tweets,
            "background": self.background,
            "stopwords": self.stopwords,
            "suffix_rules": self.suffix_rules,
        }
        for name in ("synonyms", "lda_model_all", "lda_model_title"):
            value = getattr(self, name)
            if value is not None:
                paths[name] = value
        return paths


def _parse_date(value, key):
    if isinstance(value, date):
        return value
    try:
        return date.fromisoformat(str(value))
    except ValueError:
        raise ConfigError(f"'{key}' must be a YYYY-MM-DD date, got {value!r}")


def load_run_config(path):
    """
    Load a run configuration from a TOML file.

    Relative paths are resolved against the directory of the configuration file.

    Args:
        path (str | Path): Path to the TOML configuration.

    Returns:
        RunConfig: The parsed configuration (not yet validated against the filesystem).
    """
    path = Path(path)
    try:
        with open(path, "rb") as f:
            raw = tomllib.load(f)
    except FileNotFoundError:
        raise ConfigError(f"Configuration file not found: {path}")
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Configuration file {path} is not valid TOML: {e}")

    base = path.resolve().parent
    paths = raw.get("paths", {})
    run = raw.get("run", {})

    def resolve(key, required=True, default=None):
        value = paths.get(key)
        if value is None:
            if required:
                raise ConfigError(f"Missing required path '[paths] {key}' in {path}")
            return default
        candidate = Path(value)
        return candidate if candidate.is_absolute() else base / candidate

    if "now" not in run:
        raise ConfigError(f"Missing required '[run] now' in {path}")

    strategies = run.get("strategies")
    if isinstance(strategies, str):
        strategies = [s for s in strategies.split(",") if s.strip()]

    try:
        decay = DecayConstants(**raw.get("decay", {}))
        lda = LdaSettings(**raw.get("lda", {}))
    except TypeError as e:
        raise ConfigError(f"Unknown key in {path}: {e}")

    config = RunConfig(
        taxonomy=resolve("taxonomy"),
        corpus=resolve("corpus"),
        tweets=resolve("tweets"),
        background=resolve("background"),
        synonyms=resolve("synonyms", required=False),
        lda_model_all=resolve("lda_model_all", required=False),
        lda_model_title=resolve("lda_model_title", required=False),
        stopwords=resolve("stopwords", required=False, default=DEFAULT_STOPWORDS_PATH),
        suffix_rules=resolve("suffix_rules", required=False, default=DEFAULT_SUFFIX_RULES_PATH),
        out_dir=resolve("out_dir", required=False, default=base / "output"),
        now=_parse_date(run["now"], "now"),
        k=int(run.get("k", TOP_K)),
        background_factor=float(run.get("background_factor", BACKGROUND_FACTOR)),
        seed=int(run.get("seed", DEFAULT_SEED)),
        theta=float(run.get("theta", RANKSCORE_THETA)),
        strategies=tuple(s.strip() for s in strategies) if strategies else None,
        activated_doc_freq=bool(raw.get("profiling", {}).get("activated_doc_freq", False)),
        decay=decay,
        lda=lda,
    )
    logger.debug(f"[Config] Loaded run configuration from {path}")
    return config


def apply_overrides(config, seed=None, now=None, k=None, strategies=None, out_dir=None):
    """Return a copy of `config` with the given CLI flags applied."""
    changes = {}
    if seed is not None:
        changes["seed"] = int(seed)
    if now is not None:
        changes["now"] = _parse_date(now, "--now")
    if k is not None:
        changes["k"] = int(k)
    if strategies:
        if isinstance(strategies, str):
            strategies = strategies.split(",")
        changes["strategies"] = tuple(s.strip() for s in strategies if s.strip())
    if out_dir is not None:
        changes["out_dir"] = Path(out_dir)
    return replace(config, **changes) if changes else config


def validate_run_config(config):
    """
    Check a run configuration against its invariants and the filesystem.

    Args:
        config (RunConfig): The configuration to check.

    Raises:
        ConfigError: Listing every problem found.
    """
    problems = []
    if config.k < 1:
        problems.append(f"k must be >= 1, got {config.k}")
    if config.background_factor < 0:
        problems.append(f"background_factor must be >= 0, got {config.background_factor}")
    if config.theta <= 1:
        problems.append(f"theta must be > 1, got {config.theta}")
    for name, value in vars(config.decay).items():
        if value <= 0:
            problems.append(f"decay.{name} must be > 0, got {value}")
    if config.lda.topics < 1:
        problems.append(f"lda.topics must be >= 1, got {config.lda.topics}")
    if config.lda.alpha <= 0 or config.lda.beta <= 0:
        problems.append("lda.alpha and lda.beta must be > 0")
    if config.lda.iterations < 0 or config.lda.infer_iterations < 0:
        problems.append("lda iteration counts must be >= 0")
    for name, path in config.input_paths().items():
        if not Path(path).is_file():
            problems.append(f"{name} file does not exist: {path}")

    if config.strategies:
        # Imported here to keep config free of package-level import cycles
        from .recommender.strategies import StrategyConfig

        for strategy_id in config.strategies:
            try:
                StrategyConfig.parse(strategy_id)
            except ConfigError as e:
                problems.append(str(e))

    if problems:
        for problem in problems:
            logger.error(f"[Config] {problem}")
        raise ConfigError("Invalid run configuration: " + "; ".join(problems))

    logger.info(f"[Config] Configuration valid ({len(config.input_paths())} input files)")
    return config
