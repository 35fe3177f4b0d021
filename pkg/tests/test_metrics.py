import math
import random
from itertools import product

import pytest
from pytest import approx

from src.errors import EvaluationError
from src.evaluation.metrics import (
    average_precision,
    compute_metrics,
    dcg,
    ndcg,
    precision_at_k,
    random_baseline_precision,
    rankscore,
    rankscore_max,
    reciprocal_rank,
)


def _oracle_rankscore(relevance, theta, k):
    raw = sum(1 / 2 ** ((j - 1) / (theta - 1)) for j in range(1, k + 1) if j <= len(relevance) and relevance[j - 1])
    best = sum(1 / 2 ** ((j - 1) / (theta - 1)) for j in range(1, k + 1))
    return raw / best


def _oracle_ap(relevance):
    precisions = [sum(relevance[:i + 1]) / (i + 1) for i, hit in enumerate(relevance) if hit]
    return sum(precisions) / len(precisions) if precisions else 0.0


def _oracle_ndcg(relevance):
    gains = [1 / math.log2(i + 2) for i, hit in enumerate(relevance) if hit]
    ideal = [1 / math.log2(i + 2) for i in range(len(gains))]
    return sum(gains) / sum(ideal) if gains else 0.0


class TestWorkedValues:
    def test_rankscore_single_hit(self):
        assert rankscore_max(5, 5) == approx(3.642607, abs=1e-6)
        assert rankscore([True, False, False, False, False], theta=5, k=5) == approx(0.274529, abs=1e-6)

    def test_rankscore_all_relevant(self):
        assert rankscore([True] * 5) == 1.0

    def test_ndcg_hits_at_one_and_three(self):
        relevance = [True, False, True, False, False]
        assert dcg(relevance) == approx(1.5)
        assert ndcg(relevance, 5) == approx(1.5 / (1 + 1 / math.log2(3)), abs=1e-9)
        assert ndcg(relevance, 5) == approx(0.919721, abs=1e-6)

    def test_average_precision(self):
        assert average_precision([True, False, True, False, False]) == approx((1 + 2 / 3) / 2)

    def test_nothing_relevant(self):
        values = compute_metrics([False] * 5)
        assert values == {"rankscore": 0.0, "precision": 0.0, "ap": 0.0, "rr": 0.0, "ndcg": 0.0}

    def test_short_list(self):
        assert precision_at_k([True, True], 5) == approx(0.4)
        assert rankscore([True], theta=5, k=5) == approx(0.274529, abs=1e-6)

    def test_cut_off(self):
        relevance = [False, False, True]
        assert reciprocal_rank(relevance) == approx(1 / 3)
        assert reciprocal_rank(relevance, k=2) == 0.0
        assert average_precision(relevance, k=2) == 0.0

    def test_invalid_parameters(self):
        with pytest.raises(EvaluationError):
            rankscore([True], theta=1)
        with pytest.raises(EvaluationError):
            precision_at_k([True], 0)


class TestOracles:
    @pytest.mark.parametrize("seed", range(10))
    def test_random_lists(self, seed):
        rng = random.Random(seed)
        for _ in range(100):
            k = rng.randint(1, 10)
            relevance = [rng.random() < 0.4 for _ in range(k)]
            values = compute_metrics(relevance, k=k, theta=5)
            assert values["rankscore"] == approx(_oracle_rankscore(relevance, 5, k), abs=1e-9)
            assert values["precision"] == approx(sum(relevance) / k, abs=1e-9)
            assert values["ap"] == approx(_oracle_ap(relevance), abs=1e-9)
            first = next((i + 1 for i, hit in enumerate(relevance) if hit), None)
            assert values["rr"] == approx(1 / first if first else 0.0, abs=1e-9)
            assert values["ndcg"] == approx(_oracle_ndcg(relevance), abs=1e-9)

    def test_random_ranking_expectation(self):
        # Every ordering of 2 relevant among 10 candidates, cut at 5
        candidates = [True, True] + [False] * 8
        total = 0.0
        count = 0
        for positions in product(range(10), repeat=2):
            if positions[0] == positions[1]:
                continue
            relevance = [False] * 10
            for p in positions:
                relevance[p] = True
            total += precision_at_k(relevance, 5)
            count += 1
        assert total / count == approx(random_baseline_precision(sum(candidates) / len(candidates)))

    def test_baseline_bounds(self):
        with pytest.raises(EvaluationError):
            random_baseline_precision(1.5)
