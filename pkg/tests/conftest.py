from datetime import date

import pytest

from src.knowledge.taxonomy import build_taxonomy
from src.knowledge.text_extraction import ConceptExtractor, load_stopwords, load_suffix_rules
from src.recommender.synthetic import FixtureSpec, generate_fixture

NOW = date(2016, 6, 1)


def concept(concept_id, label, parents=(), alt_labels=()):
    return {"id": concept_id, "pref_label": label, "alt_labels": list(alt_labels), "parents": list(parents)}


# world wide web
# ├── web searching
# │   ├── social recommendation
# │   └── search engines
# └── web mining
#     ├── web log analysis
#     └── link analysis
WEB_RECORDS = [
    concept("www", "world wide web"),
    concept("ws", "web searching", ["www"]),
    concept("wm", "web mining", ["www"]),
    concept("sr", "social recommendation", ["ws"]),
    concept("se", "search engines", ["ws"]),
    concept("wla", "web log analysis", ["wm"]),
    concept("la", "link analysis", ["wm"]),
]


@pytest.fixture
def web_records():
    return [dict(record) for record in WEB_RECORDS]


@pytest.fixture
def web_taxonomy():
    return build_taxonomy(WEB_RECORDS)


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords()


@pytest.fixture(scope="session")
def suffix_rules():
    return load_suffix_rules()


@pytest.fixture
def web_extractor(web_taxonomy, stopwords, suffix_rules):
    return ConceptExtractor.from_taxonomy(web_taxonomy, stopwords, suffix_rules)


@pytest.fixture(scope="session")
def toy_lda_corpus():
    """Twenty documents, the first ten over {a, b} and the last ten over {x, y}."""
    block_ab = [["a", "b", "a", "b", "a", "b", "a", "b"] for _ in range(10)]
    block_xy = [["x", "y", "x", "y", "x", "y", "x", "y"] for _ in range(10)]
    return block_ab + block_xy


SMALL_FIXTURE = FixtureSpec(
    n_subtrees=4,
    branching=2,
    depth=2,
    n_docs=80,
    n_users=5,
    items_per_user=20,
    pool_size=150,
    n_stale_users=1,
    now=NOW,
    lda_iterations=20,
    lda_infer_iterations=5,
)


@pytest.fixture(scope="session")
def small_fixture_spec():
    return SMALL_FIXTURE


@pytest.fixture(scope="session")
def fixture_paths(tmp_path_factory):
    return generate_fixture(tmp_path_factory.mktemp("fixture"), SMALL_FIXTURE, seed=7)
