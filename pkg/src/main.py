import argparse
import sys
from pathlib import Path

from .config import TOP_K, RANKSCORE_THETA, apply_overrides, load_run_config, setup_logging, validate_run_config
from .corpus.corpus_io import load_corpus, load_item_pool, load_items
from .corpus.digest import derive_seed
from .corpus.models import ContentMode
from .errors import RecommenderError
from .evaluation.judgments import evaluate_command
from .knowledge.taxonomy import load_synonym_table, load_taxonomy, merge_synonyms
from .knowledge.text_extraction import ConceptExtractor, load_stopwords, load_suffix_rules
from .profiling.topic_model import train_lda
from .recommender.experiments import BACKGROUND_FACTORS, K_GRID, background_sweep, select_k
from .recommender.pipeline import run_experiment
from .recommender.synthetic import FixtureSpec, generate_fixture, judge_command

# Set up logging for the main module
logger = setup_logging()


def _load_config(args):
    config = load_run_config(args.config)
    return apply_overrides(
        config,
        seed=getattr(args, "seed", None),
        now=getattr(args, "now", None),
        k=getattr(args, "k", None),
        strategies=getattr(args, "strategies", None),
        out_dir=getattr(args, "out", None),
    )


def _extractor(config):
    taxonomy = load_taxonomy(config.taxonomy)
    if config.synonyms is not None:
        taxonomy = merge_synonyms(taxonomy, load_synonym_table(config.synonyms))
    return ConceptExtractor.from_taxonomy(
        taxonomy, load_stopwords(config.stopwords), load_suffix_rules(config.suffix_rules)
    )


def _csv_list(value, cast):
    return [cast(part) for part in value.split(",") if part.strip()]


def command_run(args):
    config = validate_run_config(_load_config(args))
    logger.info("================ Starting recommendation run ===============")
    run_experiment(config)
    logger.info("================ Finished recommendation run ===============\n")


def command_validate(args):
    validate_run_config(_load_config(args))


def command_train_lda(args):
    config = _load_config(args)
    mode = ContentMode(args.content)
    extractor = _extractor(config)
    corpus = load_corpus(config.corpus, mode, max_year=config.now.year)

    logger.info(f"================ Starting LDA training ({mode.value}) ===============")
    model = train_lda(
        [extractor.tokens(doc.text).tokens for doc in corpus],
        n_topics=config.lda.topics,
        alpha=config.lda.alpha,
        beta=config.lda.beta,
        iterations=config.lda.iterations,
        seed=derive_seed(config.seed, "lda", mode.value),
        min_df=config.lda.min_df,
    )
    target = Path(args.model) if args.model else Path(config.out_dir) / f"lda_model_{mode.value}.json"
    model.save(target)
    logger.info(f"[Main] Saved LDA model to {target}")
    logger.info("================ Finished LDA training ===============\n")


def command_evaluate(args):
    logger.info("================ Starting evaluation ===============")
    evaluate_command(args.recommendations, args.judgments, args.out, k=args.k, theta=args.theta)
    logger.info("================ Finished evaluation ===============\n")


def command_synth(args):
    spec = FixtureSpec(
        n_subtrees=args.subtrees,
        branching=args.branching,
        depth=args.depth,
        n_docs=args.docs,
        n_users=args.users,
        items_per_user=args.items_per_user,
        pool_size=args.pool_size,
        n_stale_users=args.stale_users,
    )
    paths = generate_fixture(args.out, spec, seed=args.seed)
    logger.info(f"[Main] Fixture ready; run it with --config {paths.config}")


def command_judge(args):
    judge_command(args.recommendations, args.truth, args.out)


def command_select_k(args):
    config = _load_config(args)
    mode = ContentMode(args.content)
    extractor = _extractor(config)
    corpus = load_corpus(config.corpus, mode, max_year=config.now.year)

    logger.info("================ Starting K selection ===============")
    frame = select_k(
        [extractor.tokens(doc.text).tokens for doc in corpus],
        grid=_csv_list(args.grid, int),
        alpha=config.lda.alpha,
        beta=config.lda.beta,
        iterations=config.lda.iterations,
        seed=config.seed,
        min_df=config.lda.min_df,
    )
    Path(args.csv).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(args.csv, index=False, float_format="%.6f")
    best = frame.loc[frame["log_likelihood_per_token"].idxmax()]
    logger.info(f"[Main] Best K={int(best['n_topics'])}; table written to {args.csv}")
    logger.info("================ Finished K selection ===============\n")


def command_sweep_background(args):
    config = _load_config(args)
    extractor = _extractor(config)
    users = load_items(config.tweets, now=config.now)
    pool = load_item_pool(config.background, now=config.now)

    logger.info("================ Starting background sweep ===============")
    frame = background_sweep(users, pool, extractor, factors=_csv_list(args.factors, float), seed=config.seed)
    Path(args.csv).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(args.csv, index=False, float_format="%.6f")
    logger.info(f"[Main] Sweep table written to {args.csv}")
    logger.info("================ Finished background sweep ===============\n")


def _add_run_flags(parser):
    parser.add_argument("--config", required=True, help="TOML run configuration")
    parser.add_argument("--seed", type=int, help="Override [run] seed")
    parser.add_argument("--now", help="Override [run] now (YYYY-MM-DD)")
    parser.add_argument("--k", type=int, help="Override [run] k")
    parser.add_argument("--strategies", help="Comma-separated strategy ids")
    parser.add_argument("--out", help="Override [paths] out_dir")


def build_parser():
    parser = argparse.ArgumentParser(prog="scirec", description="Scientific publication recommender experiments")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Run the strategy matrix and write recommendations")
    _add_run_flags(run)
    run.set_defaults(handler=command_run)

    validate = subparsers.add_parser("validate", help="Check the configuration and its input files")
    _add_run_flags(validate)
    validate.set_defaults(handler=command_validate)

    train = subparsers.add_parser("train-lda", help="Train and save the LDA model of one content mode")
    _add_run_flags(train)
    train.add_argument("--content", choices=[mode.value for mode in ContentMode], default=ContentMode.ALL.value)
    train.add_argument("--model", help="Model file to write (default: <out>/lda_model_<MODE>.json)")
    train.set_defaults(handler=command_train_lda)

    evaluate = subparsers.add_parser("evaluate", help="Compute metrics from relevance judgments")
    evaluate.add_argument("--recommendations", required=True)
    evaluate.add_argument("--judgments", required=True)
    evaluate.add_argument("--out", required=True)
    evaluate.add_argument("--k", type=int, default=TOP_K)
    evaluate.add_argument("--theta", type=float, default=RANKSCORE_THETA)
    evaluate.set_defaults(handler=command_evaluate)

    defaults = FixtureSpec()
    synth = subparsers.add_parser("synth", help="Generate a planted-interest fixture")
    synth.add_argument("--out", required=True)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--subtrees", type=int, default=defaults.n_subtrees)
    synth.add_argument("--branching", type=int, default=defaults.branching)
    synth.add_argument("--depth", type=int, default=defaults.depth)
    synth.add_argument("--docs", type=int, default=defaults.n_docs)
    synth.add_argument("--users", type=int, default=defaults.n_users)
    synth.add_argument("--items-per-user", type=int, default=defaults.items_per_user)
    synth.add_argument("--pool-size", type=int, default=defaults.pool_size)
    synth.add_argument("--stale-users", type=int, default=defaults.n_stale_users)
    synth.set_defaults(handler=command_synth)

    judge = subparsers.add_parser("judge", help="Judge a fixture run against its planted subtrees")
    judge.add_argument("--recommendations", required=True)
    judge.add_argument("--truth", required=True)
    judge.add_argument("--out", required=True, help="judgments.csv to write")
    judge.set_defaults(handler=command_judge)

    choose_k = subparsers.add_parser("select-k", help="Compare LDA log likelihood over a grid of K")
    _add_run_flags(choose_k)
    choose_k.add_argument("--content", choices=[mode.value for mode in ContentMode], default=ContentMode.ALL.value)
    choose_k.add_argument("--grid", default=",".join(str(k) for k in K_GRID))
    choose_k.add_argument("--csv", default="select_k.csv")
    choose_k.set_defaults(handler=command_select_k)

    sweep = subparsers.add_parser("sweep-background", help="Profile stability over background sizes")
    _add_run_flags(sweep)
    sweep.add_argument("--factors", default=",".join(str(f) for f in BACKGROUND_FACTORS))
    sweep.add_argument("--csv", default="background_sweep.csv")
    sweep.set_defaults(handler=command_sweep_background)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.handler(args)
    except RecommenderError as e:
        logger.error(f"[Main] {type(e).__name__}: {e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
