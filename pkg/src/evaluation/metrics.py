"""
Ranking metrics over binary relevance lists ordered by rank (index 0 is rank 1).

Every metric accepts an optional cut-off and ignores what lies beyond it.
"""
import math

from ..config import RANKSCORE_THETA, TOP_K
from ..errors import EvaluationError


def _cut(relevance, k):
    relevance = [bool(r) for r in relevance]
    return relevance if k is None else relevance[:k]


def rankscore_max(theta=RANKSCORE_THETA, k=TOP_K):
    return sum(1.0 / 2 ** ((j - 1) / (theta - 1)) for j in range(1, k + 1))


def rankscore(relevance, theta=RANKSCORE_THETA, k=TOP_K):
    """
    Half-life utility of a ranked list normalized by the perfect list.

    Args:
        relevance (Sequence[bool]): Relevance by rank.
        theta (float): Viewing half-life (> 1).
        k (int): List length the perfect score is computed for.

    Returns:
        float: In [0, 1].
    """
    if theta <= 1:
        raise EvaluationError(f"theta must be > 1, got {theta}")
    if k < 1:
        raise EvaluationError(f"k must be >= 1, got {k}")
    relevance = _cut(relevance, k)
    raw = sum(1.0 / 2 ** ((rank - 1) / (theta - 1)) for rank, hit in enumerate(relevance, start=1) if hit)
    return raw / rankscore_max(theta, k)


def precision_at_k(relevance, k=TOP_K):
    """Fraction of the k slots holding a relevant item; a short list counts its missing tail as irrelevant."""
    if k <= 0:
        raise EvaluationError(f"k must be >= 1, got {k}")
    return sum(_cut(relevance, k)) / k


def average_precision(relevance, k=None):
    """Mean of precision at each relevant rank; 0 when nothing is relevant."""
    relevance = _cut(relevance, k)
    hits = 0
    total = 0.0
    for rank, hit in enumerate(relevance, start=1):
        if hit:
            hits += 1
            total += hits / rank
    return total / hits if hits else 0.0


def reciprocal_rank(relevance, k=None):
    """1 / rank of the first relevant item; 0 when there is none."""
    for rank, hit in enumerate(_cut(relevance, k), start=1):
        if hit:
            return 1.0 / rank
    return 0.0


def dcg(relevance, k=None):
    """Discounted cumulative gain with the log2(i + 1) discount."""
    return sum(
        (2 ** int(hit) - 1) / math.log2(rank + 1)
        for rank, hit in enumerate(_cut(relevance, k), start=1)
    )


def ndcg(relevance, k=TOP_K):
    """DCG normalized by the ideal ordering with every hit first; 0 when nothing is relevant."""
    relevance = _cut(relevance, k)
    hits = sum(relevance)
    if hits == 0:
        return 0.0
    ideal = dcg([True] * hits)
    return min(1.0, dcg(relevance) / ideal)


def compute_metrics(relevance, k=TOP_K, theta=RANKSCORE_THETA):
    """All five metrics of one ranked list, keyed by metric name."""
    return {
        "rankscore": rankscore(relevance, theta, k),
        "precision": precision_at_k(relevance, k),
        "ap": average_precision(relevance, k),
        "rr": reciprocal_rank(relevance, k),
        "ndcg": ndcg(relevance, k),
    }


METRIC_NAMES = ("ap", "ndcg", "precision", "rankscore", "rr")


def random_baseline_precision(relevant_rate):
    """Expected precision@k of a random ranking when a fraction `relevant_rate` of candidates is relevant."""
    if not 0.0 <= relevant_rate <= 1.0:
        raise EvaluationError(f"relevant_rate must lie in [0, 1], got {relevant_rate}")
    return float(relevant_rate)
