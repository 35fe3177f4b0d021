import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from ..config import setup_logging, validate_run_config
from ..corpus.corpus_io import count_corpus, load_corpus, load_item_pool, load_items, profile_corpus, save_profiles
from ..corpus.digest import calculate_file_hash, derive_seed
from ..corpus.models import ContentMode
from ..errors import NoCandidatesError, RecommenderError, UnservableError
from ..knowledge.taxonomy import load_synonym_table, load_taxonomy, merge_synonyms
from ..knowledge.text_extraction import ConceptExtractor, extract_concepts, load_stopwords, load_suffix_rules
from ..profiling.profile import ProfileMethod
from ..profiling.temporal import DecaySpec, aggregate_user_profile
from ..profiling.topic_model import TopicModel, train_lda, user_topic_profile
from ..profiling.weighting import compute_doc_stats, compute_item_stats, item_weights, sample_background
from .experiments import recommended_year_summary, user_statistics
from .ranking import rank_top_k
from .strategies import enumerate_strategies

# Configure logging for the pipeline module
logger = setup_logging()

SERVED = "served"
UNSERVABLE = "unservable"


@dataclass(frozen=True)
class PairOutcome:
    user: str
    strategy: str
    status: str
    reason: str = ""
    message: str = ""
    n_recommendations: int = 0


@dataclass
class RunResult:
    rankings: list = field(default_factory=list)
    outcomes: list = field(default_factory=list)
    manifest: dict = field(default_factory=dict)


@dataclass
class ExperimentContext:
    """Shared, read-only inputs built once before any (user, strategy) pair runs."""

    config: object
    strategies: tuple
    taxonomy: object
    extractor: ConceptExtractor
    users: dict
    pool: list
    corpora: dict
    models: dict = field(default_factory=dict)
    model_sources: dict = field(default_factory=dict)
    doc_counts: dict = field(default_factory=dict)
    candidates: dict = field(default_factory=dict)
    pool_counts: dict = field(default_factory=dict)

    def decay_spec(self, kind):
        return DecaySpec.from_constants(kind, self.config.now, self.config.decay)


def obtain_topic_model(config, content_mode, corpus, extractor):
    """
    Load the content mode's LDA model or train it from that mode's corpus.

    Returns:
        tuple[TopicModel, str]: The model and its source ("file" or "trained").
    """
    path = config.lda_model_all if content_mode is ContentMode.ALL else config.lda_model_title
    if path is not None:
        return TopicModel.load(path), "file"

    logger.info(f"[Pipeline] No LDA model configured for {content_mode.value}, training one")
    tokens = [extractor.tokens(doc.text).tokens for doc in corpus]
    model = train_lda(
        tokens,
        n_topics=config.lda.topics,
        alpha=config.lda.alpha,
        beta=config.lda.beta,
        iterations=config.lda.iterations,
        seed=derive_seed(config.seed, "lda", content_mode.value),
        min_df=config.lda.min_df,
    )
    return model, "trained"


def prepare(config):
    """
    Load every shared input and precompute document-side data in a fixed order.

    Returns:
        ExperimentContext: The immutable inputs of the run.
    """
    strategies = enumerate_strategies(config.strategies)

    taxonomy = load_taxonomy(config.taxonomy)
    if config.synonyms is not None:
        taxonomy = merge_synonyms(taxonomy, load_synonym_table(config.synonyms))
    extractor = ConceptExtractor.from_taxonomy(
        taxonomy, load_stopwords(config.stopwords), load_suffix_rules(config.suffix_rules)
    )

    users = load_items(config.tweets, now=config.now)
    needs_background = any(s.profiling.is_concept_based for s in strategies)
    pool = load_item_pool(config.background, now=config.now) if needs_background else []

    modes = sorted({s.content for s in strategies}, key=lambda mode: mode.value)
    corpora = {mode: load_corpus(config.corpus, mode, max_year=config.now.year) for mode in modes}

    context = ExperimentContext(
        config=config,
        strategies=strategies,
        taxonomy=taxonomy,
        extractor=extractor,
        users=users,
        pool=pool,
        corpora=corpora,
    )

    for mode in modes:
        corpus = corpora[mode]
        methods = sorted({s.profiling for s in strategies if s.content is mode}, key=lambda m: m.value)
        if any(m.is_concept_based for m in methods):
            context.doc_counts[mode] = count_corpus(corpus, extractor)
        for method in methods:
            if method is ProfileMethod.LDA:
                model, source = obtain_topic_model(config, mode, corpus, extractor)
                context.models[mode] = model
                context.model_sources[mode] = source
                profiles = profile_corpus(
                    corpus,
                    method,
                    extractor=extractor,
                    model=model,
                    seed=config.seed,
                    infer_iterations=config.lda.infer_iterations,
                )
            else:
                stats = compute_doc_stats(
                    context.doc_counts[mode],
                    taxonomy if method is ProfileMethod.HCFIDF and config.activated_doc_freq else None,
                )
                profiles = profile_corpus(
                    corpus, method, taxonomy=taxonomy, stats=stats, doc_counts=context.doc_counts[mode]
                )
            context.candidates[(method, mode)] = [(doc.id, profiles[doc.id], doc.time) for doc in corpus]

    if needs_background:
        context.pool_counts = {item.id: extractor.counts(item.text) for item in pool}
    return context


def build_user_profiles(context, user, items):
    """
    Build the user's profile for every selected strategy.

    Returns:
        dict[str, ConceptProfile | RecommenderError]: Profile or the error that prevented it, by strategy id.
    """
    config = context.config
    tokens = {item.id: context.extractor.tokens(item.text).tokens for item in items}
    counts = {item.id: extract_concepts(tokens[item.id], context.extractor.index) for item in items}

    fragments = {}
    concept_methods = sorted(
        {s.profiling for s in context.strategies if s.profiling.is_concept_based}, key=lambda m: m.value
    )
    if concept_methods:
        try:
            own_ids = set(counts)
            candidates = [item for item in context.pool if item.id not in own_ids and item.user != user]
            background = sample_background(
                candidates, len(items), config.background_factor, derive_seed(config.seed, "background", user)
            )
            background_counts = {item.id: context.pool_counts[item.id] for item in background}
            explicit_stats = compute_item_stats(counts, background_counts)
            for method in concept_methods:
                stats = explicit_stats
                if method is ProfileMethod.HCFIDF and config.activated_doc_freq:
                    stats = compute_item_stats(counts, background_counts, context.taxonomy)
                fragments[method] = [
                    (item_weights(method, counts[item.id], stats, context.taxonomy, subject=item.id), item.time)
                    for item in items
                ]
        except RecommenderError as e:
            logger.warning(f"[Pipeline] Concept profiling failed for user '{user}': {e}")
            for method in concept_methods:
                fragments[method] = e

    profiles = {}
    for strategy in context.strategies:
        method = strategy.profiling
        try:
            if method is ProfileMethod.LDA:
                profiles[strategy.id] = user_topic_profile(
                    context.models[strategy.content],
                    [(item, tokens[item.id]) for item in items],
                    iterations=config.lda.infer_iterations,
                    seed=derive_seed(config.seed, "user", user),
                    subject=user,
                )
            elif isinstance(fragments[method], RecommenderError):
                profiles[strategy.id] = fragments[method]
            else:
                profiles[strategy.id] = aggregate_user_profile(
                    fragments[method], context.decay_spec(strategy.decay), subject=user, method=method
                )
        except RecommenderError as e:
            profiles[strategy.id] = e
    return profiles


def _serve(context, user, strategy, profile):
    if isinstance(profile, RecommenderError):
        raise profile
    return rank_top_k(
        profile,
        context.candidates[(strategy.profiling, strategy.content)],
        context.decay_spec(strategy.decay),
        k=context.config.k,
        user=user,
        strategy=strategy.id,
    )


def build_manifest(context, outcomes):
    config = context.config
    inputs = {
        name: {"path": str(path), "sha256": calculate_file_hash(path)}
        for name, path in sorted(config.input_paths().items())
    }
    served = sum(1 for outcome in outcomes if outcome.status == SERVED)
    return {
        "parameters": {
            "now": config.now.isoformat(),
            "seed": config.seed,
            "k": config.k,
            "background_factor": config.background_factor,
            "theta": config.theta,
            "activated_doc_freq": config.activated_doc_freq,
            "decay": vars(config.decay),
            "lda": vars(config.lda),
        },
        "strategies": [strategy.id for strategy in context.strategies],
        "inputs": inputs,
        "lda_models": {
            mode.value: {"source": source, "n_topics": context.models[mode].n_topics}
            for mode, source in sorted(context.model_sources.items(), key=lambda pair: pair[0].value)
        },
        "users": len(context.users),
        "summary": {"pairs": len(outcomes), "served": served, "unservable": len(outcomes) - served},
        "pairs": [vars(outcome) for outcome in outcomes],
    }


def run_experiment(config, write=True):
    """
    Run every selected strategy for every user and optionally write the outputs.

    Pairs run independently: a failing (user, strategy) pair is recorded in the
    manifest with a reason code and the remaining pairs continue.

    Args:
        config (RunConfig): Validated run configuration.
        write (bool): Write recommendations, manifest and reports into config.out_dir.

    Returns:
        RunResult: Rankings, per-pair outcomes and the manifest.
    """
    start_time = datetime.now()
    logger.info(f"[Pipeline] Starting run at {start_time.strftime('%Y-%m-%d %H:%M:%S')}")
    validate_run_config(config)

    context = prepare(config)
    logger.info(
        f"[Pipeline] Prepared {len(context.users)} users x {len(context.strategies)} strategies"
    )

    result = RunResult()
    for user, items in context.users.items():
        profiles = build_user_profiles(context, user, items)
        for strategy in context.strategies:
            try:
                ranking = _serve(context, user, strategy, profiles[strategy.id])
                result.rankings.append(ranking)
                result.outcomes.append(PairOutcome(user, strategy.id, SERVED, n_recommendations=len(ranking)))
            except (UnservableError, NoCandidatesError) as e:
                logger.warning(f"[Pipeline] {user} / {strategy.id} un-servable: {e}")
                result.outcomes.append(PairOutcome(user, strategy.id, UNSERVABLE, e.reason, str(e)))
            except RecommenderError as e:
                logger.error(f"[Pipeline] {user} / {strategy.id} failed: {e}")
                result.outcomes.append(PairOutcome(user, strategy.id, UNSERVABLE, "error", str(e)))

    result.manifest = build_manifest(context, result.outcomes)
    if write:
        write_outputs(context, result, Path(config.out_dir))

    summary = result.manifest["summary"]
    execution_time = datetime.now() - start_time
    logger.info(f"[Pipeline] Run completed in {execution_time.total_seconds():.2f} seconds")
    logger.info(
        f"[Pipeline] Results: {summary['served']} served, {summary['unservable']} un-servable "
        f"of {summary['pairs']} (user, strategy) pairs"
    )
    return result


def write_outputs(context, result, out_dir):
    """Write recommendations.jsonl, manifest.json, reports and document profiles in a fixed order."""
    out_dir.mkdir(parents=True, exist_ok=True)

    with open(out_dir / "recommendations.jsonl", "w", encoding="utf-8") as f:
        for ranking in result.rankings:
            for entry in ranking.entries:
                record = {
                    "user": ranking.user,
                    "strategy": ranking.strategy,
                    "rank": entry.rank,
                    "doc_id": entry.doc_id,
                    "score": entry.score,
                }
                f.write(json.dumps(record) + "\n")

    with open(out_dir / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(result.manifest, f, indent=4, sort_keys=True)

    user_statistics(context.users, context.extractor).to_csv(
        out_dir / "user_stats.csv", index=False, float_format="%.6f"
    )
    documents = {doc.id: doc for corpus in context.corpora.values() for doc in corpus}
    recommended_year_summary(result.rankings, documents).to_csv(
        out_dir / "strategy_years.csv", index=False, float_format="%.6f"
    )

    for (method, mode), candidates in sorted(context.candidates.items(), key=lambda pair: (pair[0][0].value, pair[0][1].value)):
        save_profiles(
            out_dir / "profiles" / f"{method.value}-{mode.value}.jsonl",
            {doc_id: profile for doc_id, profile, _ in candidates},
        )
    for mode, source in context.model_sources.items():
        if source == "trained":
            context.models[mode].save(out_dir / f"lda_model_{mode.value}.json")

    logger.info(f"[Pipeline] Wrote {sum(len(r) for r in result.rankings)} recommendations to {out_dir}")
