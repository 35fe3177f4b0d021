import json
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import pandas as pd

from ..config import RANKSCORE_THETA, TOP_K, setup_logging
from ..errors import ConfigError, EvaluationError
from ..recommender.strategies import StrategyConfig
from .metrics import METRIC_NAMES, compute_metrics

# Configure logging for the evaluation module
logger = setup_logging()

JUDGMENT_COLUMNS = ["user", "strategy", "doc_id", "rank", "relevant"]
METRIC_TABLE_COLUMNS = ["strategy", "metric", "mean", "sd", "n_users"]
FACTORS = ("profiling", "decay", "content")


@dataclass(frozen=True)
class Judgment:
    user: str
    strategy: str
    doc_id: str
    rank: int
    relevant: bool


@dataclass(frozen=True)
class MetricRow:
    strategy: str
    metric: str
    mean: float
    sd: float
    n_users: int


@dataclass(frozen=True)
class MetricTable:
    rows: tuple

    def to_frame(self):
        return pd.DataFrame([vars(row) for row in self.rows], columns=METRIC_TABLE_COLUMNS)

    def value(self, strategy, metric):
        for row in self.rows:
            if row.strategy == strategy and row.metric == metric:
                return row
        raise KeyError((strategy, metric))


def load_judgments(path):
    """
    Read judgments.csv (`user,strategy,doc_id,rank,relevant`).

    Returns:
        list[Judgment]: The judgments in file order.
    """
    frame = pd.read_csv(path, dtype={"user": str, "strategy": str, "doc_id": str}, keep_default_na=False)
    missing = [column for column in JUDGMENT_COLUMNS if column not in frame.columns]
    if missing:
        raise EvaluationError(f"Judgment file {path} lacks columns {missing}")

    judgments = []
    for row in frame.itertuples(index=False):
        if str(row.relevant) not in ("0", "1"):
            raise EvaluationError(
                f"Judgment ({row.user}, {row.strategy}, {row.rank}) has relevant={row.relevant!r}, expected 0 or 1"
            )
        judgments.append(Judgment(str(row.user), str(row.strategy), str(row.doc_id), int(row.rank), str(row.relevant) == "1"))
    logger.info(f"[Evaluation] Loaded {len(judgments)} judgments from {path}")
    return judgments


def write_judgments(path, judgments):
    frame = pd.DataFrame(
        [(j.user, j.strategy, j.doc_id, j.rank, int(j.relevant)) for j in judgments],
        columns=JUDGMENT_COLUMNS,
    )
    frame.to_csv(path, index=False)


def load_recommendations(path):
    """Read recommendations.jsonl into {(user, strategy, rank): doc_id}."""
    recommendations = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                record = json.loads(line)
                recommendations[(record["user"], record["strategy"], int(record["rank"]))] = record["doc_id"]
    logger.info(f"[Evaluation] Loaded {len(recommendations)} recommendations from {path}")
    return recommendations


def group_judgments(judgments):
    """
    Check judgment integrity and group relevance lists by (user, strategy).

    Returns:
        dict[tuple[str, str], list[bool]]: Relevance ordered by rank.

    Raises:
        EvaluationError: On a duplicate (user, strategy, rank) or a gap in ranks.
    """
    grouped = {}
    for judgment in judgments:
        ranks = grouped.setdefault((judgment.user, judgment.strategy), {})
        if judgment.rank in ranks:
            raise EvaluationError(
                f"Duplicate judgment for ({judgment.user}, {judgment.strategy}, {judgment.rank})"
            )
        ranks[judgment.rank] = judgment.relevant

    relevance = {}
    for (user, strategy), ranks in sorted(grouped.items()):
        for expected, rank in enumerate(sorted(ranks), start=1):
            if rank != expected:
                raise EvaluationError(f"Gap in ranks for ({user}, {strategy}, {expected})")
        relevance[(user, strategy)] = [ranks[rank] for rank in sorted(ranks)]
    return relevance


def per_user_metrics(judgments, k=TOP_K, theta=RANKSCORE_THETA, metrics=METRIC_NAMES):
    """
    Compute every metric for every (user, strategy) list.

    Returns:
        pd.DataFrame: Long form with columns user, strategy, metric, value.
    """
    rows = []
    for (user, strategy), relevance in group_judgments(judgments).items():
        values = compute_metrics(relevance, k, theta)
        rows.extend((user, strategy, metric, values[metric]) for metric in metrics)
    frame = pd.DataFrame(rows, columns=["user", "strategy", "metric", "value"])
    return frame.sort_values(["user", "strategy", "metric"], kind="stable").reset_index(drop=True)


def aggregate(judgments, metrics=METRIC_NAMES, k=TOP_K, theta=RANKSCORE_THETA):
    """
    Mean and population standard deviation of each metric per strategy over users.

    Args:
        judgments (Sequence[Judgment]): Recorded relevance labels.
        metrics (Sequence[str]): Metric names to report.
        k (int): Cut-off.
        theta (float): Rankscore half-life.

    Returns:
        MetricTable: Rows sorted by strategy then metric.
    """
    long_form = per_user_metrics(judgments, k, theta, metrics)
    return table_from_per_user(long_form)


def table_from_per_user(long_form):
    grouped = long_form.groupby(["strategy", "metric"], sort=True)["value"]
    summary = grouped.agg(mean="mean", sd=lambda values: values.std(ddof=0), n_users="count").reset_index()
    rows = tuple(
        MetricRow(row.strategy, row.metric, float(row.mean), float(row.sd), int(row.n_users))
        for row in summary.itertuples(index=False)
    )
    return MetricTable(rows)


def aggregate_by_factor(long_form):
    """
    Marginal means per level of each experiment factor.

    Each user's values are first averaged over the strategies sharing a factor level;
    mean and population SD are then taken over users.

    Returns:
        pd.DataFrame: Columns factor, level, metric, mean, sd, n_users.
    """
    frame = long_form.copy()
    levels = {}
    for strategy_id in frame["strategy"].unique():
        try:
            strategy = StrategyConfig.parse(strategy_id)
        except ConfigError:
            continue
        levels[strategy_id] = {
            "profiling": strategy.profiling.value,
            "decay": strategy.decay.value,
            "content": strategy.content.value,
        }
    frame = frame[frame["strategy"].isin(levels)]

    parts = []
    for factor in FACTORS:
        frame = frame.assign(level=frame["strategy"].map(lambda s: levels[s][factor]))
        per_user = frame.groupby(["level", "metric", "user"], sort=True)["value"].mean().reset_index()
        summary = per_user.groupby(["level", "metric"], sort=True)["value"].agg(
            mean="mean", sd=lambda values: values.std(ddof=0), n_users="count"
        ).reset_index()
        summary.insert(0, "factor", factor)
        parts.append(summary)
    if not parts:
        return pd.DataFrame(columns=["factor", "level", "metric", "mean", "sd", "n_users"])
    return pd.concat(parts, ignore_index=True)


def evaluate_command(recommendations_path, judgments_path, out_dir, k=TOP_K, theta=RANKSCORE_THETA):
    """
    Evaluate recorded judgments against a recommendations file and write the reports.

    Writes metrics.csv, per_user_metrics.csv, factors.csv and metrics_info.json into `out_dir`.

    Returns:
        MetricTable: The per-strategy summary.

    Raises:
        EvaluationError: If there is nothing to evaluate or a judgment matches no recommendation.
    """
    start_time = datetime.now()
    logger.info(f"[Evaluation] Starting evaluation at {start_time.strftime('%Y-%m-%d %H:%M:%S')}")

    recommendations = load_recommendations(recommendations_path)
    judgments = load_judgments(judgments_path)
    if not judgments:
        raise EvaluationError(f"No judgments to evaluate in {judgments_path}")

    for judgment in judgments:
        key = (judgment.user, judgment.strategy, judgment.rank)
        if key not in recommendations:
            raise EvaluationError(f"Judgment {key} references no recommendation")
        if recommendations[key] != judgment.doc_id:
            raise EvaluationError(
                f"Judgment {key} names document '{judgment.doc_id}' but '{recommendations[key]}' was recommended"
            )

    long_form = per_user_metrics(judgments, k, theta)
    table = table_from_per_user(long_form)
    factors = aggregate_by_factor(long_form)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table.to_frame().to_csv(out_dir / "metrics.csv", index=False, float_format="%.6f")
    long_form.to_csv(out_dir / "per_user_metrics.csv", index=False, float_format="%.6f")
    factors.to_csv(out_dir / "factors.csv", index=False, float_format="%.6f")
    with open(out_dir / "metrics_info.json", "w", encoding="utf-8") as f:
        json.dump({"k": k, "theta": theta, "sd": "population (ddof=0)", "metrics": list(METRIC_NAMES)}, f, indent=4)

    execution_time = datetime.now() - start_time
    logger.info(f"[Evaluation] Evaluated {len(long_form) // len(METRIC_NAMES)} ranked lists")
    logger.info(f"[Evaluation] Execution time: {execution_time.total_seconds():.2f} seconds")
    return table
