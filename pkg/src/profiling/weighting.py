"""
CF-IDF and HCF-IDF concept weighting for social media items and documents.

IDF uses the natural logarithm. Document frequencies for HCF-IDF count explicit
concept occurrences unless the stats were built with a taxonomy (activated mode).
"""
import math
from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from ..config import BACKGROUND_FACTOR, setup_logging
from ..errors import ProfilingError, TaxonomyError
from .profile import ConceptProfile, ProfileMethod

# Configure logging for the weighting module
logger = setup_logging()


@dataclass(frozen=True)
class ItemCorpusStats:
    n_user_items: int
    n_background: int
    doc_freq: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    @property
    def n_items(self):
        return self.n_user_items + self.n_background


@dataclass(frozen=True)
class DocCorpusStats:
    n_docs: int
    doc_freq: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))


def concept_frequency(counts):
    """
    Normalize concept counts to relative frequencies.

    Args:
        counts (ConceptCounts): Per-concept counts of one item or document.

    Returns:
        dict[str, float]: cf(c) = count(c) / total; empty when there are no counts.
    """
    total = counts.total
    if total == 0:
        return {}
    return {concept_id: count / total for concept_id, count in counts.counts.items()}


def background_size(n_user_items, factor=BACKGROUND_FACTOR):
    # round() guards against 0.1 * 30 -> 3.0000000000000004 rounding up to 4
    return math.ceil(round(factor * n_user_items, 9))


def sample_background(pool, n_user_items, factor=BACKGROUND_FACTOR, seed=0):
    """
    Draw the random background items I_r mixed into a user's IDF.

    Args:
        pool (Sequence[SocialItem]): Candidate items, disjoint from the user's items.
        n_user_items (int): |I_u|.
        factor (float): Size of I_r relative to |I_u|.
        seed (int): Seed of the sampling generator.

    Returns:
        list[SocialItem]: ceil(factor * n_user_items) items, uniformly without replacement,
        in pool order.

    Raises:
        ProfilingError: If the pool holds fewer items than required.
    """
    size = background_size(n_user_items, factor)
    if size == 0:
        return []
    if size > len(pool):
        raise ProfilingError(
            f"Background pool too small: {size} items required, {len(pool)} available"
        )
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(len(pool), size=size, replace=False))
    return [pool[int(i)] for i in chosen]


def _present_concepts(counts, taxonomy):
    present = set(counts.counts)
    if taxonomy is not None and present:
        present |= taxonomy.ancestors_of(present)
    return present


def compute_item_stats(user_items, background, taxonomy=None):
    """
    Count in how many items of I_u ∪ I_r each concept occurs.

    Args:
        user_items (Mapping[str, ConceptCounts]): The user's items by item id.
        background (Mapping[str, ConceptCounts]): Background items by item id.
        taxonomy (Taxonomy | None): When given, ancestors of occurring concepts count as present.

    Returns:
        ItemCorpusStats: Sizes and document frequencies.

    Raises:
        ProfilingError: If an item id occurs on both sides.
    """
    overlap = set(user_items) & set(background)
    if overlap:
        raise ProfilingError(
            f"Background items overlap the user's items: {sorted(overlap)[:5]}"
        )

    doc_freq = Counter()
    for counts in list(user_items.values()) + list(background.values()):
        doc_freq.update(_present_concepts(counts, taxonomy))

    return ItemCorpusStats(
        n_user_items=len(user_items),
        n_background=len(background),
        doc_freq=MappingProxyType(dict(doc_freq)),
    )


def compute_doc_stats(doc_counts, taxonomy=None):
    """
    Count in how many documents each concept occurs.

    Args:
        doc_counts (Mapping[str, ConceptCounts]): Concept counts by document id.
        taxonomy (Taxonomy | None): When given, ancestors of occurring concepts count as present.

    Returns:
        DocCorpusStats: |D| and document frequencies.
    """
    doc_freq = Counter()
    for counts in doc_counts.values():
        doc_freq.update(_present_concepts(counts, taxonomy))
    return DocCorpusStats(n_docs=len(doc_counts), doc_freq=MappingProxyType(dict(doc_freq)))


def _weigh(frequencies, n_total, doc_freq, subject, method):
    weights = {}
    for concept_id, frequency in frequencies.items():
        df = doc_freq.get(concept_id, 0)
        if df == 0:
            continue
        weight = frequency * math.log(n_total / df)
        if weight > 0:
            weights[concept_id] = weight
    return ConceptProfile(subject, method, weights)


def cfidf_item_weights(item_counts, stats, subject=""):
    """
    CF-IDF weights of one social media item against I_u ∪ I_r.

    Returns:
        ConceptProfile: w'(c, i) = cf(c, i) * ln(|I_u ∪ I_r| / df(c)); zero weights omitted.
    """
    return _weigh(concept_frequency(item_counts), stats.n_items, stats.doc_freq, subject, ProfileMethod.CFIDF)


def cfidf_doc_weights(doc_counts, stats, subject=""):
    """CF-IDF weights of one document against the document collection."""
    return _weigh(concept_frequency(doc_counts), stats.n_docs, stats.doc_freq, subject, ProfileMethod.CFIDF)


def level_damping(taxonomy, concept_id):
    """
    FL(c) = 1 / log10(nodes at the level below c).

    Returns 0 when that level holds at most one concept, where log10 would be 0 or undefined.
    """
    below = taxonomy.nodes_at_level(taxonomy.level_of(concept_id) + 1)
    if below <= 1:
        return 0.0
    return 1.0 / math.log10(below)


def belllog(counts, taxonomy):
    """
    BellLog spreading activation of concept frequencies up the taxonomy.

    BL(c) = cf(c) + FL(c) * sum of BL over the direct children of c, evaluated
    children-first over the concepts that are counted or are ancestors of counted ones.

    Args:
        counts (ConceptCounts): Explicit concept counts of one item or document.
        taxonomy (Taxonomy): The hierarchy to spread over.

    Returns:
        dict[str, float]: Activation per concept, only values > 0.

    Raises:
        TaxonomyError: If a counted concept is not in the taxonomy.
    """
    for concept_id in counts.counts:
        if concept_id not in taxonomy:
            raise TaxonomyError(f"Counted concept '{concept_id}' is not in the taxonomy", concept_id)

    frequencies = concept_frequency(counts)
    if not frequencies:
        return {}

    active = set(frequencies) | taxonomy.ancestors_of(frequencies)
    activation = {}
    for concept_id in reversed(taxonomy.topological_order):
        if concept_id not in active:
            continue
        value = frequencies.get(concept_id, 0.0)
        children = [activation[c] for c in sorted(taxonomy.children_of(concept_id)) if c in activation]
        if children:
            value = value + level_damping(taxonomy, concept_id) * sum(children)
        activation[concept_id] = value

    return {concept_id: value for concept_id, value in activation.items() if value > 0}


def hcfidf_item_weights(item_counts, stats, taxonomy, subject=""):
    """
    HCF-IDF weights of one social media item.

    Returns:
        ConceptProfile: w'(c, i) = BL(c, i) * ln(|I_u ∪ I_r| / df(c)); concepts with df 0 are skipped.
    """
    return _weigh(belllog(item_counts, taxonomy), stats.n_items, stats.doc_freq, subject, ProfileMethod.HCFIDF)


def hcfidf_doc_weights(doc_counts, stats, taxonomy, subject=""):
    """HCF-IDF weights of one document against the document collection."""
    return _weigh(belllog(doc_counts, taxonomy), stats.n_docs, stats.doc_freq, subject, ProfileMethod.HCFIDF)


def item_weights(method, item_counts, stats, taxonomy=None, subject=""):
    if method is ProfileMethod.CFIDF:
        return cfidf_item_weights(item_counts, stats, subject)
    if method is ProfileMethod.HCFIDF:
        return hcfidf_item_weights(item_counts, stats, taxonomy, subject)
    raise ProfilingError(f"Item weighting is not defined for {method.value}")


def doc_weights(method, doc_counts, stats, taxonomy=None, subject=""):
    if method is ProfileMethod.CFIDF:
        return cfidf_doc_weights(doc_counts, stats, subject)
    if method is ProfileMethod.HCFIDF:
        return hcfidf_doc_weights(doc_counts, stats, taxonomy, subject)
    raise ProfilingError(f"Document weighting is not defined for {method.value}")
