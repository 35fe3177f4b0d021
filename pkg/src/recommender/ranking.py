import heapq
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from ..config import TOP_K, setup_logging
from ..errors import MethodMismatchError, NoCandidatesError, RankingError, UnservableError
from ..profiling.profile import ProfileMethod
from ..profiling.temporal import decay_document

# Configure logging for the ranking module
logger = setup_logging()


class RankedEntry(NamedTuple):
    rank: int
    doc_id: str
    score: float


@dataclass(frozen=True)
class RankedList:
    user: str
    strategy: str
    k: int
    entries: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.entries)

    @property
    def doc_ids(self):
        return [entry.doc_id for entry in self.entries]


def _check_methods(u, d):
    if u.method is not d.method:
        raise MethodMismatchError(
            f"Cannot compare a {u.method.value} profile ('{u.subject}') "
            f"with a {d.method.value} profile ('{d.subject}')"
        )


def _check_factor(factor):
    if not 0.0 <= factor <= 1.0:
        raise RankingError(f"Decay factor must lie in [0, 1], got {factor}")


def _sparse_dot(a, b):
    if len(a) > len(b):
        a, b = b, a
    return math.fsum(weight * b[key] for key, weight in a.items() if key in b)


def cosine(u, d):
    """
    Sparse cosine similarity of two profiles of the same method.

    Returns:
        float: In [0, 1]; 0 when either profile is empty.
    """
    _check_methods(u, d)
    if not u.weights or not d.weights:
        return 0.0
    numerator = _sparse_dot(u.weights, d.weights)
    if numerator == 0.0:
        return 0.0
    norm_u = math.sqrt(math.fsum(w * w for w in u.weights.values()))
    norm_d = math.sqrt(math.fsum(w * w for w in d.weights.values()))
    return min(1.0, numerator / (norm_u * norm_d))


def temporal_cosine(u, d, factor):
    """Cosine similarity scaled by the candidate document's decay factor."""
    _check_factor(factor)
    return factor * cosine(u, d)


def dot(u, d, factor):
    """Decayed dot product of two LDA topic distributions."""
    _check_methods(u, d)
    if u.method is not ProfileMethod.LDA:
        raise MethodMismatchError(f"Dot product scoring is reserved for LDA profiles, got {u.method.value}")
    _check_factor(factor)
    return factor * _sparse_dot(u.weights, d.weights)


def score(u, d, factor):
    if u.method is ProfileMethod.LDA:
        return dot(u, d, factor)
    return temporal_cosine(u, d, factor)


def rank_top_k(u, candidates, spec, k=TOP_K, user="", strategy=""):
    """
    Rank candidate documents for a user profile and keep the best k.

    Documents removed by the decay (factor 0) and documents with empty profiles are
    skipped. Scores are temporal cosine for concept profiles and decayed dot product
    for LDA; ties go to the smaller document id.

    Args:
        u (ConceptProfile): The user profile.
        candidates (Iterable[tuple[str, ConceptProfile, TimePoint]]): (doc id, profile, year).
        spec (DecaySpec): Decay applied to document years.
        k (int): Number of recommendations.
        user (str): User id recorded on the list.
        strategy (str): Strategy id recorded on the list.

    Returns:
        RankedList: Up to k entries with ranks 1..n.

    Raises:
        UnservableError: If the user profile is empty.
        NoCandidatesError: If no candidate survives filtering.
    """
    if k < 1:
        raise RankingError(f"k must be >= 1, got {k}")
    if not u.weights:
        raise UnservableError(f"User '{user or u.subject}' has an empty profile under {strategy or u.method.value}")

    scored = []
    for doc_id, profile, t_d in candidates:
        kept, factor = decay_document(profile, t_d, spec)
        if not kept or not profile.weights:
            continue
        scored.append((score(u, profile, factor), doc_id))

    if not scored:
        raise NoCandidatesError(f"No candidate documents remain for user '{user or u.subject}' under {strategy}")

    best = heapq.nsmallest(k, scored, key=lambda pair: (-pair[0], pair[1]))
    entries = tuple(RankedEntry(rank, doc_id, value) for rank, (value, doc_id) in enumerate(best, start=1))
    logger.debug(f"[Ranking] {user or u.subject} / {strategy}: {len(scored)} scored, top score {entries[0].score:.6f}")
    return RankedList(user=user or u.subject, strategy=strategy, k=k, entries=entries)
