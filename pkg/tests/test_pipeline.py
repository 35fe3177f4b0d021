import json
import shutil

import pytest

from src.config import apply_overrides, load_run_config
from src.evaluation.judgments import evaluate_command, load_recommendations
from src.evaluation.metrics import random_baseline_precision
from src.main import main
from src.recommender.pipeline import SERVED, UNSERVABLE, run_experiment
from src.recommender.strategies import ALL_STRATEGIES
from src.recommender.synthetic import judge_command, load_truth, relevant_rate


def _files(directory):
    return {
        path.relative_to(directory).as_posix(): path.read_bytes()
        for path in sorted(directory.rglob("*"))
        if path.is_file()
    }


@pytest.fixture(scope="module")
def full_run(fixture_paths, tmp_path_factory):
    out_dir = tmp_path_factory.mktemp("run")
    config = apply_overrides(load_run_config(fixture_paths.config), out_dir=out_dir)
    return config, run_experiment(config)


class TestRunExperiment:
    def test_manifest_accounts_for_every_pair(self, full_run, small_fixture_spec):
        _, result = full_run
        manifest = result.manifest
        assert manifest["summary"]["pairs"] == small_fixture_spec.n_users * 12
        pairs = {(p["user"], p["strategy"]) for p in manifest["pairs"]}
        assert len(pairs) == small_fixture_spec.n_users * 12
        assert manifest["strategies"] == [s.id for s in ALL_STRATEGIES]
        assert set(manifest["inputs"]) >= {"taxonomy", "corpus", "tweets", "background", "synonyms"}

    def test_recommendation_rows(self, full_run):
        config, result = full_run
        lines = (config.out_dir / "recommendations.jsonl").read_text(encoding="utf-8").splitlines()
        served = [p for p in result.manifest["pairs"] if p["status"] == SERVED]
        assert len(lines) == sum(p["n_recommendations"] for p in served)
        assert all(p["n_recommendations"] <= config.k for p in served)
        first = json.loads(lines[0])
        assert list(first) == ["user", "strategy", "rank", "doc_id", "score"]

    def test_stale_user_only_served_with_exponential_decay(self, full_run, small_fixture_spec):
        _, result = full_run
        stale = f"u{small_fixture_spec.n_users - 1:03d}"
        outcomes = {o.strategy: o for o in result.outcomes if o.user == stale}
        for strategy in ALL_STRATEGIES:
            outcome = outcomes[strategy.id]
            if strategy.profiling.is_concept_based and strategy.decay.value == "SLIDING_WINDOW":
                assert outcome.status == UNSERVABLE
                assert outcome.reason == "empty_profile"
            else:
                assert outcome.status == SERVED

    def test_reports_written(self, full_run):
        config, _ = full_run
        for name in ("manifest.json", "user_stats.csv", "strategy_years.csv", "lda_model_ALL.json"):
            assert (config.out_dir / name).is_file()
        assert (config.out_dir / "profiles" / "CFIDF-TITLE.jsonl").is_file()

    def test_byte_identical_rerun(self, full_run, tmp_path):
        config, _ = full_run
        run_experiment(apply_overrides(config, out_dir=tmp_path))
        assert _files(tmp_path) == _files(config.out_dir)

    def test_planted_interest(self, full_run, fixture_paths, tmp_path):
        config, _ = full_run
        judge_command(config.out_dir / "recommendations.jsonl", fixture_paths.truth, tmp_path / "judgments.csv")
        table = evaluate_command(config.out_dir / "recommendations.jsonl", tmp_path / "judgments.csv", tmp_path)
        baseline = random_baseline_precision(relevant_rate(load_truth(fixture_paths.truth)))
        for strategy in ALL_STRATEGIES:
            if strategy.profiling.is_concept_based:
                assert table.value(strategy.id, "precision").mean >= 3 * baseline


class TestStrategyIsolation:
    def _run(self, fixture_paths, tmp_path, name, strategies):
        config = load_run_config(fixture_paths.config)
        return run_experiment(apply_overrides(config, out_dir=tmp_path / name, strategies=strategies))

    def _copy_fixture(self, fixture_paths, tmp_path):
        target = tmp_path / "fixture"
        shutil.copytree(fixture_paths.root, target, ignore=shutil.ignore_patterns("output"))
        return target

    def _rows(self, result, strategy):
        return [
            (r.user, [(e.doc_id, e.score) for e in r.entries]) for r in result.rankings if r.strategy == strategy
        ]

    def test_background_pool_does_not_touch_lda(self, fixture_paths, tmp_path):
        strategies = "LDA-EXPONENTIAL-TITLE,CFIDF-EXPONENTIAL-TITLE"
        before = self._run(fixture_paths, tmp_path, "before", strategies)

        copy = self._copy_fixture(fixture_paths, tmp_path)
        lines = (copy / "background.jsonl").read_text(encoding="utf-8").splitlines()
        (copy / "background.jsonl").write_text("\n".join(lines[::-1][: len(lines) - 5]) + "\n", encoding="utf-8")
        after = run_experiment(
            apply_overrides(load_run_config(copy / "config.toml"), out_dir=tmp_path / "after", strategies=strategies)
        )
        assert self._rows(after, "LDA-EXPONENTIAL-TITLE") == self._rows(before, "LDA-EXPONENTIAL-TITLE")

    def test_fulltext_does_not_touch_title_strategies(self, fixture_paths, tmp_path):
        strategies = "CFIDF-EXPONENTIAL-TITLE,HCFIDF-SLIDING_WINDOW-TITLE"
        before = self._run(fixture_paths, tmp_path, "before", strategies)

        copy = self._copy_fixture(fixture_paths, tmp_path)
        records = [json.loads(line) for line in (copy / "corpus.jsonl").read_text(encoding="utf-8").splitlines()]
        for record in records:
            record["fulltext"] = "fill1 fill2 " + record["title"]
        (copy / "corpus.jsonl").write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
        after = run_experiment(
            apply_overrides(load_run_config(copy / "config.toml"), out_dir=tmp_path / "after", strategies=strategies)
        )
        for strategy in strategies.split(","):
            assert self._rows(after, strategy) == self._rows(before, strategy)


class TestCommandLine:
    def test_synth_run_judge_evaluate(self, tmp_path):
        fixture = tmp_path / "fixture"
        assert main([
            "synth", "--out", str(fixture), "--seed", "1", "--subtrees", "3", "--branching", "2",
            "--depth", "1", "--docs", "30", "--users", "2", "--items-per-user", "10", "--pool-size", "60",
            "--stale-users", "0",
        ]) == 0
        out = tmp_path / "out"
        assert main([
            "run", "--config", str(fixture / "config.toml"), "--out", str(out),
            "--strategies", "CFIDF-EXPONENTIAL-ALL,HCFIDF-EXPONENTIAL-TITLE",
        ]) == 0
        assert load_recommendations(out / "recommendations.jsonl")
        assert main([
            "judge", "--recommendations", str(out / "recommendations.jsonl"),
            "--truth", str(fixture / "truth.json"), "--out", str(out / "judgments.csv"),
        ]) == 0
        assert main([
            "evaluate", "--recommendations", str(out / "recommendations.jsonl"),
            "--judgments", str(out / "judgments.csv"), "--out", str(out / "eval"),
        ]) == 0
        assert (out / "eval" / "metrics.csv").is_file()

    def test_sweep_background(self, fixture_paths, tmp_path):
        csv = tmp_path / "sweep.csv"
        assert main(["sweep-background", "--config", str(fixture_paths.config), "--factors", "0,1,5", "--csv", str(csv)]) == 0
        lines = csv.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "factor,mean_cosine,sd_cosine,n_users"
        # Without background items the profile is compared with itself
        assert lines[1].startswith("0.000000,1.000000,")

    def test_select_k(self, fixture_paths, tmp_path):
        csv = tmp_path / "k.csv"
        assert main([
            "select-k", "--config", str(fixture_paths.config), "--content", "TITLE", "--grid", "2,4", "--csv", str(csv),
        ]) == 0
        assert csv.read_text(encoding="utf-8").splitlines()[0] == "n_topics,log_likelihood,log_likelihood_per_token"

    def test_validate_failure_exit_code(self, tmp_path):
        (tmp_path / "config.toml").write_text('[run]\nnow = "2016-06-01"\n', encoding="utf-8")
        assert main(["validate", "--config", str(tmp_path / "config.toml")]) == 1

    def test_train_lda(self, fixture_paths, tmp_path):
        model = tmp_path / "model.json"
        assert main([
            "train-lda", "--config", str(fixture_paths.config), "--content", "TITLE", "--model", str(model),
        ]) == 0
        assert json.loads(model.read_text(encoding="utf-8"))["format"] == "scirec-lda/1"
