import json
import math

import pytest

from src.frozen_er import __version__, harness
from src.frozen_er.constants import RESULT_HEADER
from src.frozen_er.enums import ExperimentName
from src.frozen_er.errors import ConfigurationError, ResultsIOError
from src.frozen_er.lyapunov import lyapunov_check
from src.frozen_er.schema.experiment_result import ExperimentResult, ResultRow, Verdict

SMALL_COUPLING = {"n": 300, "seeds": 3, "edge_factor": 2.0, "checkpoints": 5, "seed": 7}


def make_result(rows=None, verdicts=None) -> ExperimentResult:
    return ExperimentResult(
        name=ExperimentName.COUPLING_P1,
        seed=3,
        config_echo='{"seed":3}',
        rows=rows or [],
        verdicts=verdicts or [Verdict(name="ok", passed=True)],
    )


def test_unknown_experiment_rejected():
    with pytest.raises(ConfigurationError):
        harness.run_experiment("theorem3")


def test_schema_violations_rejected():
    with pytest.raises(ConfigurationError):
        harness.run_experiment("coupling-p1", {"n": 0})
    with pytest.raises(ConfigurationError):
        harness.run_experiment("coupling-p1", {"vertices": 100})
    with pytest.raises(ConfigurationError):
        harness.run_experiment("discrete-limit", {"t": -20.0, "limit_t0": -10.0})
    with pytest.raises(ConfigurationError):
        harness.run_experiment("coalescent-rates", {"standard": [0.5, 0.5]})


def test_small_coupling_experiment_passes():
    result = harness.run_experiment("coupling-p1", SMALL_COUPLING)
    assert result.name == ExperimentName.COUPLING_P1
    assert result.seed == 7
    assert result.passed
    names = {verdict.name for verdict in result.verdicts}
    assert "frozen==surplus vertices at every m" in names
    keys = [(row.replica, row.time, row.observable) for row in result.rows]
    assert keys == sorted(keys)
    assert json.loads(result.config_echo)["n"] == 300


def test_coupling_rows_independent_of_workers():
    serial = harness.run_experiment("coupling-p1", SMALL_COUPLING)
    parallel = harness.run_experiment("coupling-p1", {**SMALL_COUPLING, "workers": 2})
    assert serial.rows == parallel.rows


def test_write_results_empty_rows(tmp_path):
    out = tmp_path / "empty.csv"
    harness.write_results(make_result(), out)
    assert out.read_text(encoding="utf-8") == ",".join(RESULT_HEADER) + "\n"
    meta = json.loads(harness.meta_path(out).read_text(encoding="utf-8"))
    assert meta["name"] == "coupling-p1"
    assert meta["version"] == __version__
    assert meta["config"] == {"seed": 3}
    assert meta["passed"] is True
    assert harness.read_results(out) == []


def test_write_results_is_byte_identical_and_round_trips(tmp_path):
    rows = [
        ResultRow(replica=0, time=0.5, observable="x", value=1.0 / 3.0),
        ResultRow(replica=1, time=2.0, observable="y", value=-2.5e-17),
        ResultRow(replica=2, time=-1.25, observable="z", value=12345.678901234567),
    ]
    result = make_result(rows=rows, verdicts=[Verdict(name="bound", passed=False, value=0.2, threshold=0.1, detail="too big")])
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    harness.write_results(result, first)
    harness.write_results(result, second)
    assert first.read_bytes() == second.read_bytes()
    assert harness.meta_path(first).read_bytes() == harness.meta_path(second).read_bytes()

    for written, original in zip(harness.read_results(first), rows):
        assert written.replica == original.replica
        assert written.observable == original.observable
        assert written.time == float(f"{original.time:.15g}")
        assert written.value == float(f"{original.value:.15g}")
    assert json.loads(harness.meta_path(first).read_text(encoding="utf-8"))["passed"] is False


def test_write_results_to_missing_directory(tmp_path):
    with pytest.raises(ResultsIOError) as excinfo:
        harness.write_results(make_result(), tmp_path / "missing" / "out.csv")
    assert "missing" in excinfo.value.path


def test_read_results_errors(tmp_path):
    with pytest.raises(ResultsIOError):
        harness.read_results(tmp_path / "absent.csv")
    wrong = tmp_path / "wrong.csv"
    wrong.write_text("a,b,c\n1,2,3\n", encoding="utf-8")
    with pytest.raises(ResultsIOError):
        harness.read_results(wrong)
    broken = tmp_path / "broken.csv"
    broken.write_text(",".join(RESULT_HEADER) + "\ncoupling-p1,3,zero,1.0,x,2.0\n", encoding="utf-8")
    with pytest.raises(ResultsIOError):
        harness.read_results(broken)


def test_load_config(tmp_path):
    good = tmp_path / "good.json"
    good.write_text('{"n": 100, "seeds": 2}', encoding="utf-8")
    assert harness.load_config(good) == {"n": 100, "seeds": 2}

    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        harness.load_config(listing)

    garbled = tmp_path / "garbled.json"
    garbled.write_text("{n: 1", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        harness.load_config(garbled)

    with pytest.raises(ResultsIOError):
        harness.load_config(tmp_path / "nowhere.json")


def test_graph_table_same_for_any_worker_count():
    serial = harness.graph_table(400, 0.5, [2.0, -1.0, 0.5], reps=3, seed=13)
    parallel = harness.graph_table(400, 0.5, [2.0, -1.0, 0.5], reps=3, seed=13, workers=2)
    assert serial == parallel
    assert len(serial) == 9
    assert [row[2] for row in serial[:3]] == [-1.0, 0.5, 2.0]
    assert all(len(row) == len(harness.GRAPH_COLUMNS) for row in serial)


def test_coalescent_table_rows():
    rows = harness.coalescent_table([0.5, 0.3, 0.2], [], 1.0, math.inf, reps=4, seed=6)
    assert len(rows) == 4
    for seed, replica, t_end, frozen_mass, n_standard, n_frozen, largest in rows:
        assert seed == 6 and t_end == math.inf
        assert frozen_mass == pytest.approx(1.0)
        assert n_standard == 0 and n_frozen >= 1 and largest == 0.0


def test_lyapunov_table_columns(tmp_path):
    report = lyapunov_check(0.1, 0.02, 0.5, 10.0, [-40.0, 0.0, 12.0])
    rows = harness.lyapunov_table(report)
    assert len(rows) == 3
    # V(-40) overflows, so no generator value is written
    assert rows[0][3] == ""
    out = tmp_path / "lyapunov.csv"
    harness.write_table(out, harness.LYAPUNOV_COLUMNS, rows)
    assert out.read_text(encoding="utf-8").splitlines()[0] == ",".join(harness.LYAPUNOV_COLUMNS)
