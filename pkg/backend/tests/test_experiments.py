"""Tests for experiment configs, the trial harness, CSV output and the invariant suite."""

import csv

import pytest
from pydantic import ValidationError

from app.core.errors import ExperimentIOError, UsageError
from app.core.experiments.checks import check_block_symmetry, check_front_oracle, check_lattice, run_invariant_suite
from app.core.experiments.config import build_config, load_config_file
from app.core.experiments.harness import (
    SUMMARY_COLUMNS,
    TRAJECTORY_COLUMNS,
    TRIAL_COLUMNS,
    compare_crossover,
    read_summary_csv,
    run_suite,
    run_trial,
    summarize,
)
from app.models.experiment import ConfigSummary, ExperimentConfig


def small_config(**overrides) -> ExperimentConfig:
    values = {"config_id": "small", "n": 8, "m": 2, "k": 2, "mu": 32, "pc": 0.0, "budget": 100_000, "trials": 3}
    values.update(overrides)
    return ExperimentConfig(**values)


def summary(config_id="a", median=4000.0, **overrides) -> ConfigSummary:
    values = {
        "config_id": config_id, "n": 16, "m": 2, "k": 3, "mu": 64, "pc": 0.0, "lattice_p": 108, "eps_nad": 19.0,
        "trials": 20, "successes": 20, "median_generations": median, "mean_generations": median,
        "min_generations": 1, "max_generations": 10_000,
        "median_evaluations": None if median is None else median * 64,
        "regime": True, "population_bound": True, "predicted_bound": 1.0,
    }
    values.update(overrides)
    return ConfigSummary(**values)


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


class TestExperimentConfig:
    def test_regime_defaults(self):
        config = ExperimentConfig(n=12, m=2, k=2, mu=128)
        assert config.lattice_p == 80
        assert config.eps_nad == 14.0
        assert config.budget == 10**7
        assert config.max_generations == 78_125

    def test_budget_from_environment(self, monkeypatch):
        monkeypatch.setenv("NSGA3_DEFAULT_BUDGET", "640")
        assert ExperimentConfig(n=8, m=2, k=2, mu=64).max_generations == 10

    def test_budget_rounds_up(self):
        assert small_config(budget=100).max_generations == 4

    @pytest.mark.parametrize(
        "overrides",
        [{"m": 3}, {"mu": 7}, {"pc": 1.0}, {"trials": 0}, {"k": 5}, {"lattice_p": 0}, {"master_seed": -1}],
    )
    def test_rejects_invalid(self, overrides):
        with pytest.raises(ValidationError):
            small_config(**overrides)


class TestConfigFile:
    def test_load_and_override(self, tmp_path):
        path = tmp_path / "k2.env"
        path.write_text("# small instance\nn = 8\nm = 2\nk = 2\nmu = 16\npc = 0.9  # crossover\nseed = 7\n")
        config = build_config(load_config_file(path), pc=0.0, trials=2)
        assert (config.n, config.m, config.k, config.mu) == (8, 2, 2, 16)
        assert config.pc == 0.0
        assert config.master_seed == 7
        assert config.trials == 2

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.env"
        path.write_text("n = 8\npopulation = 16\n")
        with pytest.raises(UsageError, match="unknown config keys"):
            load_config_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ExperimentIOError, match="not found"):
            load_config_file(tmp_path / "missing.env")


class TestRunTrial:
    def test_deterministic(self):
        config = small_config()
        assert run_trial(config, 1) == run_trial(config, 1)

    def test_trials_use_distinct_seeds(self):
        config = small_config()
        assert run_trial(config, 0).seed != run_trial(config, 1).seed

    def test_covers_small_instance(self):
        result = run_trial(small_config(), 0)
        assert result.success
        assert result.covered == result.front_size == 7
        assert result.evaluations == result.generations * 32
        assert result.generations_to_cover == result.generations

    def test_zero_budget(self):
        result = run_trial(small_config(budget=0), 0)
        assert result.generations == 0
        assert result.evaluations == 0
        assert result.success == (result.covered == result.front_size)

    def test_exhausted_budget_carries_budget(self):
        # two generations cannot reach both all-ones and all-zeros over a gap of 3 in 16 bits
        config = small_config(n=16, k=3, mu=64, budget=100)
        result = run_trial(config, 0)
        assert not result.success
        assert result.generations == 2
        assert result.evaluations == 100
        assert result.generations_to_cover is None
        assert result.covered < result.front_size == 13

    def test_trajectory(self):
        result = run_trial(small_config(trajectories=True), 0)
        assert [row.t for row in result.trajectory] == list(range(result.generations + 1))
        assert result.trajectory[-1].covered_front_count == 7

    def test_class_discovery(self):
        result = run_trial(small_config(trajectories=True), 0)
        found = {tuple(d.r_class): d.generation for d in result.class_discovery}
        assert set(found) == {(-1,), (0,), (1,)}
        generations = [d.generation for d in result.class_discovery]
        assert generations == sorted(generations)
        assert generations[-1] <= result.generations
        assert run_trial(small_config(), 0).class_discovery is None

    def test_negative_index(self):
        with pytest.raises(UsageError, match="trial_index"):
            run_trial(small_config(), -1)


class TestRunSuite:
    def test_writes_trials_and_summary(self, tmp_path):
        suite = run_suite([small_config()], out_dir=tmp_path)
        trials = read_rows(tmp_path / "trials.csv")
        assert trials[0] == TRIAL_COLUMNS
        assert len(trials) == 4
        assert [row[1] for row in trials[1:]] == ["0", "1", "2"]
        summary_rows = read_rows(tmp_path / "summary.csv")
        assert summary_rows[0] == SUMMARY_COLUMNS
        assert len(summary_rows) == 2
        assert suite.configs[0].successes == 3
        assert not (tmp_path / "trajectories.csv").exists()

    def test_lf_line_endings(self, tmp_path):
        run_suite([small_config(trials=1)], out_dir=tmp_path)
        data = (tmp_path / "trials.csv").read_bytes()
        assert b"\r\n" not in data
        assert data.endswith(b"\n")

    def test_two_configs_give_two_summary_rows(self, tmp_path):
        configs = [small_config(config_id="pc0", trials=2), small_config(config_id="pc09", pc=0.9, trials=2)]
        run_suite(configs, out_dir=tmp_path)
        rows = read_rows(tmp_path / "summary.csv")
        assert [row[0] for row in rows[1:]] == ["pc0", "pc09"]

    def test_byte_identical_reruns(self, tmp_path):
        config = small_config(master_seed=99)
        run_suite([config], out_dir=tmp_path / "a")
        run_suite([config], out_dir=tmp_path / "b", workers=2)
        for name in ("trials.csv", "summary.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_summary_matches_recomputation(self, tmp_path):
        run_suite([small_config(trials=4)], out_dir=tmp_path)
        trials = read_rows(tmp_path / "trials.csv")[1:]
        generations = sorted(int(row[TRIAL_COLUMNS.index("generations")]) for row in trials)
        row = read_summary_csv(tmp_path / "summary.csv").configs[0]
        assert row.min_generations == generations[0]
        assert row.max_generations == generations[-1]
        assert row.median_generations == pytest.approx((generations[1] + generations[2]) / 2, rel=1e-5)

    def test_trajectory_file(self, tmp_path):
        suite = run_suite([small_config(trials=2, trajectories=True)], out_dir=tmp_path)
        rows = read_rows(tmp_path / "trajectories.csv")
        assert rows[0] == TRAJECTORY_COLUMNS
        assert len(suite.files) == 3
        assert {row[1] for row in rows[1:]} == {"0", "1"}

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("not a directory")
        with pytest.raises(ExperimentIOError, match="blocker"):
            run_suite([small_config(trials=1)], out_dir=blocker / "out")

    def test_duplicate_ids(self, tmp_path):
        with pytest.raises(UsageError, match="unique"):
            run_suite([small_config(), small_config()], out_dir=tmp_path)

    def test_output_dir_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("NSGA3_OUTPUT_DIR", str(tmp_path / "env"))
        run_suite([small_config(trials=1)])
        assert (tmp_path / "env" / "summary.csv").exists()


class TestSummaries:
    def test_statistics_over_successes_only(self):
        config = small_config(budget=64, trials=4)
        results = [run_trial(config, i) for i in range(4)]
        summarized = summarize(config, results)
        assert summarized.trials == 4
        assert summarized.successes == sum(r.success for r in results)
        if summarized.successes == 0:
            assert summarized.median_generations is None

    def test_summary_roundtrip_keeps_missing_values(self, tmp_path):
        path = tmp_path / "summary.csv"
        path.write_text(
            ",".join(SUMMARY_COLUMNS) + "\n" + "x,8,2,2,32,0,57,10,3,0,,,,,,true,true,1.5\n"
        )
        row = read_summary_csv(path).configs[0]
        assert row.median_generations is None
        assert row.regime is True

    def test_bad_header(self, tmp_path):
        path = tmp_path / "summary.csv"
        path.write_text("config_id,n\nx,8\n")
        with pytest.raises(ExperimentIOError, match="header"):
            read_summary_csv(path)


class TestCompareCrossover:
    def test_identical(self):
        assert compare_crossover(summary("a"), summary("a")).ratio == 1.0

    def test_ratio(self):
        report = compare_crossover(summary("pc0", 4000.0), summary("pc09", 800.0, pc=0.9))
        assert report.ratio == pytest.approx(5.0)
        assert report.median_mutation_only == 4000.0
        assert report.median_crossover == 800.0

    def test_mismatched(self):
        with pytest.raises(UsageError, match="different"):
            compare_crossover(summary("a"), summary("b", mu=32))

    def test_no_successes(self):
        with pytest.raises(UsageError, match="no successful trials"):
            compare_crossover(summary("a"), summary("b", median=None))


class TestInvariantSuite:
    def test_front_oracle(self):
        outcome = check_front_oracle()
        assert outcome.passed, outcome.detail

    def test_lattice(self):
        assert check_lattice().passed

    def test_block_symmetry(self):
        outcome = check_block_symmetry(samples=20)
        assert outcome.passed, outcome.detail

    def test_quick_suite_passes(self):
        outcomes = run_invariant_suite()
        assert [o.name for o in outcomes] == [
            "front_oracle", "block_symmetry", "sort_oracle", "lattice", "monotonicity", "variation_statistics",
        ]
        assert all(o.passed for o in outcomes), [o for o in outcomes if not o.passed]


@pytest.mark.slow
class TestRuntimeTrends:
    """Desk-scale trend checks of the runtime bounds."""

    def _medians(self, tmp_path, **overrides):
        configs = [
            ExperimentConfig(config_id=f"c{i}", n=16, m=2, mu=64, trials=20, budget=10**7, **o)
            for i, o in enumerate(overrides["variants"])
        ]
        return run_suite(configs, out_dir=tmp_path).configs

    def test_crossover_speedup(self, tmp_path):
        mutation_only, crossover = self._medians(tmp_path, variants=[{"k": 3, "pc": 0.0}, {"k": 3, "pc": 0.9}])
        assert mutation_only.successes == crossover.successes == 20
        assert crossover.median_generations <= 0.5 * mutation_only.median_generations

    def test_gap_size_scaling(self, tmp_path):
        k2, k3 = self._medians(tmp_path, variants=[{"k": 2, "pc": 0.0}, {"k": 3, "pc": 0.0}])
        assert k3.median_generations >= 4 * k2.median_generations
