"""
Planted-interest fixtures.

A fixture is a taxonomy of disjoint concept subtrees, a corpus whose documents each
talk about one subtree, and users whose tweets talk about one subtree. A recommended
document is relevant to a user iff both belong to the same subtree, so the expected
precision of a random ranking is known in advance.
"""
import json
from dataclasses import asdict, dataclass
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from ..config import BACKGROUND_FACTOR, setup_logging
from ..errors import ConfigError, EvaluationError
from ..evaluation.judgments import Judgment, load_recommendations, write_judgments

# Configure logging for the synthetic fixture module
logger = setup_logging()

FILLER_WORDS = tuple(f"fill{i}" for i in range(40))


@dataclass(frozen=True)
class FixtureSpec:
    n_subtrees: int = 5
    branching: int = 3
    depth: int = 3
    n_docs: int = 1000
    n_users: int = 20
    items_per_user: int = 200
    pool_size: int = 1200
    # The last users only tweet outside the sliding window
    n_stale_users: int = 1
    old_doc_rate: float = 0.2
    now: date = date(2016, 6, 1)
    lda_iterations: int = 30
    lda_infer_iterations: int = 10

    @property
    def concepts_per_subtree(self):
        return sum(self.branching ** level for level in range(self.depth + 1))

    def validate(self):
        problems = []
        for name in ("n_subtrees", "branching", "n_docs", "n_users", "items_per_user"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1")
        if self.depth < 0:
            problems.append("depth must be >= 0")
        if not 0 <= self.n_stale_users <= self.n_users:
            problems.append("n_stale_users must lie in [0, n_users]")
        if self.pool_size < int(np.ceil(BACKGROUND_FACTOR * self.items_per_user)):
            problems.append(
                f"pool_size {self.pool_size} cannot hold a background of {BACKGROUND_FACTOR} x {self.items_per_user} items"
            )
        if not 0.0 <= self.old_doc_rate <= 1.0:
            problems.append("old_doc_rate must lie in [0, 1]")
        if problems:
            raise ConfigError("Invalid fixture spec: " + "; ".join(problems))
        return self


@dataclass(frozen=True)
class FixturePaths:
    root: Path
    taxonomy: Path
    synonyms: Path
    corpus: Path
    tweets: Path
    background: Path
    truth: Path
    config: Path


def concept_id(subtree, node):
    return f"s{subtree}c{node}"


def concept_label(subtree, node):
    return f"k{subtree}n{node}"


def build_subtree_records(spec):
    """Concept records of every subtree; node 0 is the root and children are numbered breadth-first."""
    records = []
    for subtree in range(spec.n_subtrees):
        parents = {0: None}
        frontier = [0]
        next_node = 1
        for _ in range(spec.depth):
            children = []
            for parent in frontier:
                for _ in range(spec.branching):
                    parents[next_node] = parent
                    children.append(next_node)
                    next_node += 1
            frontier = children
        for node in sorted(parents):
            parent = parents[node]
            records.append({
                "id": concept_id(subtree, node),
                "pref_label": concept_label(subtree, node),
                "alt_labels": [],
                "parents": [] if parent is None else [concept_id(subtree, parent)],
            })
    return records


def _sentence(rng, spec, subtree, n_concepts, n_filler):
    nodes = rng.integers(0, spec.concepts_per_subtree, size=n_concepts)
    words = [concept_label(subtree, int(node)) for node in nodes]
    words += [FILLER_WORDS[int(i)] for i in rng.integers(0, len(FILLER_WORDS), size=n_filler)]
    rng.shuffle(words)
    return " ".join(words)


def _write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record) + "\n")


def _item(rng, spec, item_id, user, subtree, max_age, min_age=0):
    age = int(rng.integers(min_age, max_age + 1))
    # A few tweets carry no concept at all
    n_concepts = int(rng.integers(0, 3))
    return {
        "id": item_id,
        "user": user,
        "text": _sentence(rng, spec, subtree, n_concepts, int(rng.integers(3, 8))),
        "date": (spec.now - timedelta(days=age)).isoformat(),
    }


def _config_toml(spec, seed):
    return "\n".join([
        "# Generated planted-interest fixture",
        "[paths]",
        'taxonomy = "taxonomy.json"',
        'synonyms = "synonyms.tsv"',
        'corpus = "corpus.jsonl"',
        'tweets = "tweets.jsonl"',
        'background = "background.jsonl"',
        'out_dir = "output"',
        "",
        "[run]",
        f'now = "{spec.now.isoformat()}"',
        "k = 5",
        f"background_factor = {BACKGROUND_FACTOR}",
        f"seed = {seed}",
        "",
        "[lda]",
        f"topics = {spec.n_subtrees}",
        f"iterations = {spec.lda_iterations}",
        f"infer_iterations = {spec.lda_infer_iterations}",
        "min_df = 2",
        "",
    ])


def generate_fixture(out_dir, spec=None, seed=0):
    """
    Write a complete planted-interest fixture into `out_dir`.

    Args:
        out_dir (str | Path): Target directory, created if needed.
        spec (FixtureSpec | None): Sizes and dates; defaults to the desk-scale fixture.
        seed (int): Seed of the PCG64 generator driving every random choice.

    Returns:
        FixturePaths: The written files.
    """
    spec = (spec or FixtureSpec()).validate()
    rng = np.random.Generator(np.random.PCG64(seed))
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    paths = FixturePaths(
        root=root,
        taxonomy=root / "taxonomy.json",
        synonyms=root / "synonyms.tsv",
        corpus=root / "corpus.jsonl",
        tweets=root / "tweets.jsonl",
        background=root / "background.jsonl",
        truth=root / "truth.json",
        config=root / "config.toml",
    )
    logger.info(f"================ Generating fixture in {root} ===============")

    with open(paths.taxonomy, "w", encoding="utf-8") as f:
        json.dump({"concepts": build_subtree_records(spec)}, f, indent=2)
    with open(paths.synonyms, "w", encoding="utf-8") as f:
        for subtree in range(spec.n_subtrees):
            f.write(f"{concept_id(subtree, 0)}\tarea{subtree}\n")

    doc_subtrees = {}
    documents = []
    for i in range(spec.n_docs):
        doc_id = f"d{i:05d}"
        subtree = i % spec.n_subtrees
        if rng.random() < spec.old_doc_rate:
            year = spec.now.year - int(rng.integers(12, 31))
        else:
            year = spec.now.year - int(rng.integers(0, 9))
        doc_subtrees[doc_id] = subtree
        documents.append({
            "id": doc_id,
            "title": _sentence(rng, spec, subtree, 2, 3),
            "fulltext": _sentence(rng, spec, subtree, 6, 12),
            "year": year,
        })
    _write_jsonl(paths.corpus, documents)

    user_subtrees = {}
    tweets = []
    n_fresh = spec.n_users - spec.n_stale_users
    for u in range(spec.n_users):
        user = f"u{u:03d}"
        subtree = u % spec.n_subtrees
        user_subtrees[user] = subtree
        stale = u >= n_fresh
        for j in range(spec.items_per_user):
            if stale:
                item = _item(rng, spec, f"{user}t{j:04d}", user, subtree, max_age=700, min_age=300)
            else:
                item = _item(rng, spec, f"{user}t{j:04d}", user, subtree, max_age=240)
            tweets.append(item)
    _write_jsonl(paths.tweets, tweets)

    pool = [
        _item(rng, spec, f"b{i:05d}", f"bg{i % 50:02d}", int(rng.integers(0, spec.n_subtrees)), max_age=700)
        for i in range(spec.pool_size)
    ]
    _write_jsonl(paths.background, pool)

    with open(paths.truth, "w", encoding="utf-8") as f:
        json.dump(
            {"spec": {**asdict(spec), "now": spec.now.isoformat()}, "documents": doc_subtrees, "users": user_subtrees},
            f,
            indent=2,
            sort_keys=True,
        )
    with open(paths.config, "w", encoding="utf-8") as f:
        f.write(_config_toml(spec, seed))

    logger.info(
        f"[Synthetic] Wrote {len(documents)} documents, {len(tweets)} tweets of {spec.n_users} users, "
        f"{len(pool)} background items and {spec.n_subtrees * spec.concepts_per_subtree} concepts"
    )
    return paths


def load_truth(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def relevant_rate(truth):
    """Share of candidate documents relevant to an average user, the expected random-ranking precision."""
    documents = truth["documents"]
    users = truth["users"]
    if not documents or not users:
        raise EvaluationError("Fixture truth lists no documents or no users")
    per_subtree = {}
    for subtree in documents.values():
        per_subtree[subtree] = per_subtree.get(subtree, 0) + 1
    return float(np.mean([per_subtree.get(subtree, 0) / len(documents) for subtree in users.values()]))


def planted_judgments(recommendations, truth):
    """
    Judge recommendations against the planted subtrees.

    Args:
        recommendations (Mapping[tuple[str, str, int], str]): {(user, strategy, rank): doc_id}.
        truth (dict): The fixture's truth.json.

    Returns:
        list[Judgment]: Sorted by user, strategy and rank.
    """
    judgments = []
    for (user, strategy, rank), doc_id in sorted(recommendations.items()):
        if user not in truth["users"] or doc_id not in truth["documents"]:
            raise EvaluationError(f"Recommendation ({user}, {strategy}, {rank}) is not part of the fixture")
        relevant = truth["documents"][doc_id] == truth["users"][user]
        judgments.append(Judgment(user, strategy, doc_id, rank, relevant))
    return judgments


def judge_command(recommendations_path, truth_path, out_path):
    """Write judgments.csv for a run over a generated fixture."""
    judgments = planted_judgments(load_recommendations(recommendations_path), load_truth(truth_path))
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    write_judgments(out_path, judgments)
    hits = sum(1 for judgment in judgments if judgment.relevant)
    logger.info(f"[Synthetic] Wrote {len(judgments)} judgments ({hits} relevant) to {out_path}")
    return judgments
