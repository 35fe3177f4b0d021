import json
from datetime import date

import pytest
from pytest import approx

from src.errors import ConfigError, EvaluationError
from src.knowledge.taxonomy import load_taxonomy
from src.recommender.synthetic import FixtureSpec, load_truth, planted_judgments, relevant_rate


class TestGenerateFixture:
    def test_taxonomy_shape(self, fixture_paths, small_fixture_spec):
        taxonomy = load_taxonomy(fixture_paths.taxonomy)
        assert len(taxonomy) == small_fixture_spec.n_subtrees * small_fixture_spec.concepts_per_subtree
        assert taxonomy.nodes_per_level == {1: 4, 2: 8, 3: 16}

    def test_record_counts(self, fixture_paths, small_fixture_spec):
        def count(path):
            return len(path.read_text(encoding="utf-8").splitlines())

        assert count(fixture_paths.corpus) == small_fixture_spec.n_docs
        assert count(fixture_paths.tweets) == small_fixture_spec.n_users * small_fixture_spec.items_per_user
        assert count(fixture_paths.background) == small_fixture_spec.pool_size

    def test_stale_user_is_outside_window(self, fixture_paths, small_fixture_spec):
        stale = f"u{small_fixture_spec.n_users - 1:03d}"
        for line in fixture_paths.tweets.read_text(encoding="utf-8").splitlines():
            record = json.loads(line)
            if record["user"] == stale:
                assert (small_fixture_spec.now - date.fromisoformat(record["date"])).days > 250

    def test_relevant_rate(self, fixture_paths):
        assert relevant_rate(load_truth(fixture_paths.truth)) == approx(0.25)

    def test_invalid_spec(self):
        with pytest.raises(ConfigError, match="pool_size"):
            FixtureSpec(items_per_user=100, pool_size=10).validate()


class TestPlantedJudgments:
    TRUTH = {"documents": {"d1": 0, "d2": 1}, "users": {"u1": 0}}

    def test_relevant_iff_same_subtree(self):
        recommendations = {("u1", "s", 1): "d2", ("u1", "s", 2): "d1"}
        judgments = planted_judgments(recommendations, self.TRUTH)
        assert [(j.rank, j.relevant) for j in judgments] == [(1, False), (2, True)]

    def test_unknown_document(self):
        with pytest.raises(EvaluationError):
            planted_judgments({("u1", "s", 1): "d9"}, self.TRUTH)
