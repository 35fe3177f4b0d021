"""
Latent Dirichlet allocation by collapsed Gibbs sampling.

All randomness comes from numpy's PCG64 generator seeded explicitly, so a
(corpus, K, alpha, beta, iterations, seed) tuple fully determines a model.
"""
import json
from collections import Counter
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import numpy as np
from scipy.special import gammaln

from ..config import (
    LDA_ALPHA,
    LDA_BETA,
    LDA_INFER_ITERATIONS,
    LDA_ITERATIONS,
    LDA_MIN_DF,
    LDA_TOPICS,
    setup_logging,
)
from ..errors import TopicModelError
from .profile import ConceptProfile, ProfileMethod

# Configure logging for the topic model module
logger = setup_logging()

MODEL_FORMAT = "scirec-lda/1"


def _generator(seed):
    return np.random.Generator(np.random.PCG64(seed))


def topic_id(k):
    return f"t{k}"


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple
    min_df: int = 1

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "_index", {term: i for i, term in enumerate(self.terms)})

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self._index

    @property
    def index(self):
        return dict(self._index)

    def encode(self, tokens):
        """Map tokens to word ids, dropping out-of-vocabulary tokens."""
        return np.array([self._index[t] for t in tokens if t in self._index], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class TopicModel:
    n_topics: int
    alpha: float
    beta: float
    topic_word_counts: np.ndarray
    vocabulary: Vocabulary
    seed: int
    iterations: int = 0

    @property
    def topic_totals(self):
        return self.topic_word_counts.sum(axis=1)

    @property
    def topic_word_probs(self):
        """Beta-smoothed p(w | k), shape K x V."""
        vocab_size = len(self.vocabulary)
        return (self.topic_word_counts + self.beta) / (
            self.topic_totals[:, None] + vocab_size * self.beta
        )

    def save(self, path):
        """Write the model as a JSON document; counts are integers so the round trip is exact."""
        document = {
            "format": MODEL_FORMAT,
            "n_topics": self.n_topics,
            "alpha": self.alpha,
            "beta": self.beta,
            "seed": self.seed,
            "iterations": self.iterations,
            "min_df": self.vocabulary.min_df,
            "vocabulary": list(self.vocabulary.terms),
            "topic_word_counts": self.topic_word_counts.tolist(),
        }
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(document, f)
        logger.info(f"[TopicModel] Saved model (K={self.n_topics}, V={len(self.vocabulary)}) to {path}")

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
        if document.get("format") != MODEL_FORMAT:
            raise TopicModelError(f"{path} is not a {MODEL_FORMAT} model file")
        vocabulary = Vocabulary(tuple(document["vocabulary"]), int(document["min_df"]))
        counts = np.array(document["topic_word_counts"], dtype=np.int64).reshape(
            int(document["n_topics"]), len(vocabulary)
        )
        logger.info(f"[TopicModel] Loaded model (K={document['n_topics']}, V={len(vocabulary)}) from {path}")
        return cls(
            n_topics=int(document["n_topics"]),
            alpha=float(document["alpha"]),
            beta=float(document["beta"]),
            topic_word_counts=counts,
            vocabulary=vocabulary,
            seed=int(document["seed"]),
            iterations=int(document["iterations"]),
        )


@dataclass(frozen=True)
class TopicDistribution:
    probs: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-9:
            raise TopicModelError("Topic distribution must be nonnegative and sum to 1")
        object.__setattr__(self, "probs", probs)

    def __len__(self):
        return len(self.probs)

    def to_profile(self, subject):
        return ConceptProfile(
            subject, ProfileMethod.LDA, {topic_id(k): p for k, p in enumerate(self.probs)}
        )


def build_vocabulary(corpus, min_df=LDA_MIN_DF):
    """
    Keep the terms occurring in at least `min_df` documents.

    Args:
        corpus (Sequence[Sequence[str]]): Normalized token sequences.
        min_df (int): Document-frequency floor.

    Returns:
        Vocabulary: Lexicographically sorted terms.

    Raises:
        TopicModelError: If no term survives the floor.
    """
    doc_freq = Counter()
    for tokens in corpus:
        doc_freq.update(set(tokens))
    terms = sorted(term for term, df in doc_freq.items() if df >= min_df)
    if not terms:
        raise TopicModelError(
            f"Vocabulary is empty with min_df={min_df} over {len(corpus)} documents; "
            f"lower min_df for small corpora"
        )
    logger.info(f"[TopicModel] Vocabulary: {len(terms)} of {len(doc_freq)} terms kept (min_df={min_df})")
    return Vocabulary(tuple(terms), min_df)


def _draw(rng, weights):
    cumulative = np.cumsum(weights)
    u = rng.random() * cumulative[-1]
    return min(int(np.searchsorted(cumulative, u, side="right")), len(weights) - 1)


def train_lda(
    corpus,
    n_topics=LDA_TOPICS,
    alpha=LDA_ALPHA,
    beta=LDA_BETA,
    iterations=LDA_ITERATIONS,
    seed=0,
    min_df=LDA_MIN_DF,
    vocabulary=None,
    on_sweep=None,
):
    """
    Train LDA with collapsed Gibbs sampling.

    The full conditional is p(z=k) ∝ (n_dk + alpha)(n_kw + beta) / (n_k + V beta);
    assignments start uniformly at random and the final sweep's counts are kept.

    Args:
        corpus (Sequence[Sequence[str]]): Normalized token sequences.
        n_topics (int): K.
        alpha (float): Document-topic prior.
        beta (float): Topic-word prior.
        iterations (int): Number of Gibbs sweeps.
        seed (int): Generator seed.
        min_df (int): Vocabulary floor, used when `vocabulary` is not given.
        vocabulary (Vocabulary | None): Fixed vocabulary to use instead of building one.
        on_sweep (Callable[[int, np.ndarray], None] | None): Called after each sweep with
            the sweep number and a copy of the topic totals.

    Returns:
        TopicModel: The trained model.
    """
    if n_topics < 1:
        raise TopicModelError(f"K must be >= 1, got {n_topics}")
    if not corpus:
        raise TopicModelError("Cannot train a topic model on an empty corpus")

    start_time = datetime.now()
    vocabulary = vocabulary or build_vocabulary(corpus, min_df)
    docs = [vocabulary.encode(tokens) for tokens in corpus]
    vocab_size = len(vocabulary)
    rng = _generator(seed)

    doc_topic = np.zeros((len(docs), n_topics), dtype=np.int64)
    topic_word = np.zeros((n_topics, vocab_size), dtype=np.int64)
    topic_totals = np.zeros(n_topics, dtype=np.int64)
    assignments = []
    for d, words in enumerate(docs):
        z = rng.integers(n_topics, size=len(words))
        assignments.append(z)
        np.add.at(doc_topic[d], z, 1)
        np.add.at(topic_word, (z, words), 1)
        np.add.at(topic_totals, z, 1)

    n_tokens = int(topic_totals.sum())
    logger.info(
        f"[TopicModel] Training K={n_topics} on {len(docs)} documents, {n_tokens} tokens, "
        f"{iterations} sweeps (seed={seed})"
    )
    vocab_beta = vocab_size * beta

    for sweep in range(1, iterations + 1):
        for d, words in enumerate(docs):
            z = assignments[d]
            for i, w in enumerate(words):
                k = z[i]
                doc_topic[d, k] -= 1
                topic_word[k, w] -= 1
                topic_totals[k] -= 1

                weights = (doc_topic[d] + alpha) * (topic_word[:, w] + beta) / (topic_totals + vocab_beta)
                k = _draw(rng, weights)

                z[i] = k
                doc_topic[d, k] += 1
                topic_word[k, w] += 1
                topic_totals[k] += 1
        if on_sweep is not None:
            on_sweep(sweep, topic_totals.copy())
        if sweep % 50 == 0:
            logger.debug(f"[TopicModel] Sweep {sweep}/{iterations}")

    execution_time = datetime.now() - start_time
    logger.info(f"[TopicModel] Training finished in {execution_time.total_seconds():.2f} seconds")
    return TopicModel(
        n_topics=n_topics,
        alpha=float(alpha),
        beta=float(beta),
        topic_word_counts=topic_word,
        vocabulary=vocabulary,
        seed=seed,
        iterations=iterations,
    )


def infer(model, tokens, iterations=LDA_INFER_ITERATIONS, seed=0):
    """
    Infer the topic distribution of a new text with the topics held fixed.

    Args:
        model (TopicModel): Trained model.
        tokens (Sequence[str]): Normalized tokens; out-of-vocabulary ones are dropped.
        iterations (int): Gibbs sweeps; 0 returns the prior (uniform) estimate.
        seed (int): Generator seed.

    Returns:
        TopicDistribution: theta_k = (n_k + alpha) / (N + K alpha) from the final assignments.
    """
    n_topics = model.n_topics
    words = model.vocabulary.encode(tokens)
    if len(words) == 0 or iterations == 0:
        return TopicDistribution(tuple([1.0 / n_topics] * n_topics))

    rng = _generator(seed)
    phi = model.topic_word_probs
    z = rng.integers(n_topics, size=len(words))
    doc_topic = np.bincount(z, minlength=n_topics).astype(np.int64)

    for _ in range(iterations):
        for i, w in enumerate(words):
            doc_topic[z[i]] -= 1
            k = _draw(rng, (doc_topic + model.alpha) * phi[:, w])
            z[i] = k
            doc_topic[k] += 1

    theta = (doc_topic + model.alpha) / (len(words) + n_topics * model.alpha)
    theta = theta / theta.sum()
    return TopicDistribution(tuple(theta.tolist()))


def user_topic_profile(model, user_items, iterations=LDA_INFER_ITERATIONS, seed=0, subject=""):
    """
    Infer a user's topic profile from all their items treated as one document.

    Args:
        model (TopicModel): Trained model.
        user_items (Sequence[tuple[SocialItem, Sequence[str]]]): Items with their tokens.
        iterations (int): Inference sweeps.
        seed (int): Generator seed.
        subject (str): User id stored on the profile.

    Returns:
        ConceptProfile: LDA profile over topic ids "t0".."t{K-1}".
    """
    ordered = sorted(user_items, key=lambda pair: (pair[0].time.value, pair[0].id))
    tokens = [token for _, item_tokens in ordered for token in item_tokens]
    return infer(model, tokens, iterations, seed).to_profile(subject)


def log_likelihood(model, corpus=None, per_token=False):
    """
    Collapsed log p(w | z) of the model's assignments with beta-smoothed topics.

    log p(w|z) = K[lnΓ(Vβ) - V lnΓ(β)] + Σ_k [Σ_w lnΓ(n_kw + β) - lnΓ(n_k + Vβ)]

    Args:
        model (TopicModel): Trained model.
        corpus (Sequence[Sequence[str]] | None): The training corpus; when given its
            in-vocabulary token count must match the model's.
        per_token (bool): Return the mean per token instead of the sum.

    Returns:
        float: The log likelihood.
    """
    n_tokens = int(model.topic_totals.sum())
    if corpus is not None:
        corpus_tokens = sum(len(model.vocabulary.encode(tokens)) for tokens in corpus)
        if corpus_tokens != n_tokens:
            raise TopicModelError(
                f"Corpus has {corpus_tokens} in-vocabulary tokens but the model was trained on {n_tokens}"
            )

    vocab_size = len(model.vocabulary)
    beta = model.beta
    value = model.n_topics * (gammaln(vocab_size * beta) - vocab_size * gammaln(beta))
    value += float(gammaln(model.topic_word_counts + beta).sum())
    value -= float(gammaln(model.topic_totals + vocab_size * beta).sum())
    if per_token:
        return value / n_tokens if n_tokens else 0.0
    return float(value)


def top_words(model, k, n=10):
    """Return the `n` highest-count words of topic `k`, ties by term order."""
    counts = model.topic_word_counts[k]
    order = sorted(range(len(counts)), key=lambda w: (-counts[w], w))
    return [model.vocabulary.terms[w] for w in order[:n]]
