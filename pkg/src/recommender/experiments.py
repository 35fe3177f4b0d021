"""Side experiments and run reports: K selection, background-size sweep, user and year summaries."""
from datetime import datetime

import numpy as np
import pandas as pd

from ..config import LDA_ALPHA, LDA_BETA, LDA_ITERATIONS, LDA_MIN_DF, setup_logging
from ..corpus.digest import derive_seed
from ..errors import ProfilingError
from ..profiling.profile import ConceptProfile, ProfileMethod
from ..profiling.topic_model import build_vocabulary, log_likelihood, train_lda
from ..profiling.weighting import cfidf_item_weights, compute_item_stats, sample_background
from .ranking import cosine

# Configure logging for the experiments module
logger = setup_logging()

K_GRID = (20, 50, 100, 200, 500, 1000, 5000)
BACKGROUND_FACTORS = (0, 1, 2, 3, 4, 5, 6, 8, 10)


def select_k(corpus, grid=K_GRID, alpha=LDA_ALPHA, beta=LDA_BETA, iterations=LDA_ITERATIONS, seed=0, min_df=LDA_MIN_DF):
    """
    Train one model per K and report the mean log likelihood per token.

    Args:
        corpus (Sequence[Sequence[str]]): Normalized document tokens.
        grid (Iterable[int]): Topic counts to try.

    Returns:
        pd.DataFrame: Columns n_topics, log_likelihood, log_likelihood_per_token; best K has the maximum.
    """
    vocabulary = build_vocabulary(corpus, min_df)
    rows = []
    for n_topics in grid:
        start_time = datetime.now()
        model = train_lda(
            corpus, n_topics, alpha, beta, iterations, derive_seed(seed, "select-k", n_topics), vocabulary=vocabulary
        )
        total = log_likelihood(model, corpus)
        per_token = log_likelihood(model, corpus, per_token=True)
        rows.append((n_topics, total, per_token))
        execution_time = datetime.now() - start_time
        logger.info(
            f"[Experiments] K={n_topics}: log likelihood per token {per_token:.6f} "
            f"({execution_time.total_seconds():.2f} seconds)"
        )
    return pd.DataFrame(rows, columns=["n_topics", "log_likelihood", "log_likelihood_per_token"])


def _summed_profile(subject, fragments):
    weights = {}
    for fragment in fragments:
        for concept_id, weight in fragment.weights.items():
            weights[concept_id] = weights.get(concept_id, 0.0) + weight
    return ConceptProfile(subject, ProfileMethod.CFIDF, weights)


def background_sweep(users, pool, extractor, factors=BACKGROUND_FACTORS, seed=0):
    """
    Measure how the user profile moves as the background sample grows.

    For every factor the undecayed CF-IDF profile with a background of
    ceil(factor * |I_u|) items is compared by cosine with the profile computed over
    the user's items alone. The factor where the curve flattens is a sound choice.

    Args:
        users (Mapping[str, Sequence[SocialItem]]): Items per user.
        pool (Sequence[SocialItem]): Background pool.
        extractor (ConceptExtractor): Tokenizer and label index.
        factors (Iterable[float]): Background size factors.
        seed (int): Base seed; each user's sample uses a derived seed.

    Returns:
        pd.DataFrame: Columns factor, mean_cosine, sd_cosine, n_users.
    """
    pool_counts = {item.id: extractor.counts(item.text) for item in pool}
    per_user = {}
    for user, items in users.items():
        counts = {item.id: extractor.counts(item.text) for item in items}
        own_stats = compute_item_stats(counts, {})
        reference = _summed_profile(user, [cfidf_item_weights(c, own_stats) for c in counts.values()])
        candidates = [item for item in pool if item.id not in counts and item.user != user]
        per_user[user] = (counts, reference, candidates)

    rows = []
    for factor in factors:
        values = []
        for user, (counts, reference, candidates) in per_user.items():
            try:
                background = sample_background(candidates, len(counts), factor, derive_seed(seed, "background", user))
            except ProfilingError as e:
                logger.warning(f"[Experiments] Skipping user '{user}' at factor {factor}: {e}")
                continue
            stats = compute_item_stats(counts, {item.id: pool_counts[item.id] for item in background})
            profile = _summed_profile(user, [cfidf_item_weights(c, stats) for c in counts.values()])
            values.append(cosine(profile, reference))
        if values:
            rows.append((factor, float(np.mean(values)), float(np.std(values)), len(values)))
            logger.info(f"[Experiments] Background factor {factor}: mean cosine {rows[-1][1]:.6f} over {len(values)} users")
    return pd.DataFrame(rows, columns=["factor", "mean_cosine", "sd_cosine", "n_users"])


def user_statistics(users, extractor):
    """
    Per-user counts of items and concept occurrences.

    Returns:
        pd.DataFrame: Columns user, n_items, n_concepts, concepts_per_item, pct_items_with_concept.
    """
    rows = []
    for user, items in users.items():
        totals = [extractor.counts(item.text).total for item in items]
        n_items = len(items)
        n_concepts = sum(totals)
        with_concept = sum(1 for total in totals if total > 0)
        rows.append((
            user,
            n_items,
            n_concepts,
            n_concepts / n_items if n_items else 0.0,
            100.0 * with_concept / n_items if n_items else 0.0,
        ))
    return pd.DataFrame(
        rows, columns=["user", "n_items", "n_concepts", "concepts_per_item", "pct_items_with_concept"]
    )


def recommended_year_summary(rankings, documents):
    """
    Mean and population SD of the publication years recommended under each strategy.

    Args:
        rankings (Iterable[RankedList]): Served lists.
        documents (Mapping[str, CorpusDocument]): Documents by id.

    Returns:
        pd.DataFrame: Columns strategy, mean_year, sd_year, n_recommendations.
    """
    years = {}
    for ranking in rankings:
        years.setdefault(ranking.strategy, []).extend(documents[entry.doc_id].year for entry in ranking.entries)
    rows = [
        (strategy, float(np.mean(values)), float(np.std(values)), len(values))
        for strategy, values in sorted(years.items())
        if values
    ]
    return pd.DataFrame(rows, columns=["strategy", "mean_year", "sd_year", "n_recommendations"])
