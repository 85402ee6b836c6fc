import pytest
from pydantic import ValidationError

from src.frozen_er import experiments
from src.frozen_er.enums import ExperimentName
from src.frozen_er.harness import run_experiment


def verdicts_by_name(result):
    return {verdict.name: verdict for verdict in result.verdicts}


def test_registry_covers_every_experiment():
    assert set(experiments.EXPERIMENTS) == set(ExperimentName)


def test_configs_forbid_unknown_keys():
    with pytest.raises(ValidationError):
        experiments.Theorem1Config(reps=10, colour="blue")
    with pytest.raises(ValidationError):
        experiments.StationarityConfig(t_first=60.0, t_second=30.0)


def test_fan_out_keeps_order():
    assert experiments.fan_out(abs, [-3, 2, -1], workers=1) == [3, 2, 1]
    assert experiments.fan_out(abs, [-3, 2, -1], workers=2) == [3, 2, 1]


def test_lemma_suite_passes():
    result = run_experiment("lemma-suite")
    assert result.passed, [v for v in result.verdicts if not v.passed]
    assert len(result.verdicts) == 5


def test_lyapunov_threshold_on_coarse_grid():
    result = run_experiment("lyapunov", {"grid_step": 2.0})
    verdicts = verdicts_by_name(result)
    assert verdicts["threshold B exists"].passed
    assert verdicts["bounded inside C"].passed
    # two rows per grid point
    assert len(result.rows) == 2 * 41


def test_coalescent_rates_structure():
    result = run_experiment("coalescent-rates", {"reps": 2000, "freeze_reps": 2000, "absorption_particles": 27, "seed": 4})
    verdicts = verdicts_by_name(result)
    assert verdicts["mass conserved"].passed
    assert verdicts["no frozen merges at p=0"].passed
    assert verdicts["all mass frozen at absorption p=1"].passed
    assert verdicts["all mass frozen at absorption p=0"].passed
    counts = [row for row in result.rows if row.observable.startswith("first_event_count")]
    # merge, two freezes, two absorptions
    assert len(counts) == 5
    assert sum(row.value for row in counts) == 2000


def test_theorem1_rows_at_small_scale():
    result = run_experiment("theorem1", {"reps": 4, "t_grid": [1.0, 2.0], "seed": 2})
    assert {row.observable for row in result.rows} == {"X", "abs_dev"}
    assert len(result.rows) == 4 * 2 * 2
    assert list(verdicts_by_name(result)) == ["median_abs_dev decreasing"]


def test_stationarity_rows_at_small_scale():
    result = run_experiment("stationarity-p0", {"reps": 20, "t_first": 2.0, "t_second": 3.0, "seed": 5})
    assert len(result.rows) == 40
    assert {row.time for row in result.rows} == {2.0, 3.0}
    # too few samples for the tail fit
    assert list(verdicts_by_name(result)) == ["ks distance between times", "tail fraction above 2", "samples finite"]
    assert verdicts_by_name(result)["samples finite"].passed


def test_discrete_limit_rows_at_small_scale():
    result = run_experiment("discrete-limit", {"n": 500, "reps": 5, "t": 1.0, "seed": 3})
    observables = [row.observable for row in result.rows]
    assert observables.count("graph_frozen_mass") == 5
    assert observables.count("limit_X") == 5
    assert [row.replica for row in result.rows] == list(range(10))


def test_special_accuracy_passes():
    result = run_experiment("special-accuracy", {"outer_step": 5.0})
    assert result.passed, [v for v in result.verdicts if not v.passed]
    assert len(result.rows) == 81 + 8


def test_martingale_rows_at_small_scale():
    result = run_experiment("martingale", {"p_values": [0.0], "reps": 4, "checkpoints": [2.0, 1.0], "delta": 0.05, "seed": 8})
    assert len(result.rows) == 4 * 2 * 2
    assert {row.observable for row in result.rows} == {"M[p=0]", "QV[p=0]"}
    assert len(result.verdicts) == 4
    assert all(row.value >= 0.0 for row in result.rows if row.observable.startswith("QV"))


def test_limit_invariants_rows_at_small_scale():
    config = {"reps": 4, "bias_reps": 4, "count_reps": 4, "t_end": 1.0, "count_t_end": 1.0, "seed": 9}
    result = run_experiment("limit-invariants", config)
    assert list(verdicts_by_name(result)) == ["thinning exactness", "small-jump bias", "jump count matches integrated rate"]
    counts = [row.value for row in result.rows if row.observable == "jump_count"]
    assert len(counts) == 4
    assert all(count == int(count) >= 0 for count in counts)


def test_martingale_cutoff_follows_p():
    config = experiments.MartingaleConfig()
    zero = experiments.martingale_limit_config(config, 0.0)
    assert zero.delta == 1e-8 and not zero.compensate_small
    half = experiments.martingale_limit_config(config, 0.5)
    assert half.delta == 1e-4 and half.compensate_small
    assert half.t_end == 10.0
    fixed = experiments.martingale_limit_config(experiments.MartingaleConfig(delta=0.05), 0.0)
    assert fixed.delta == 0.05
