import csv
import json
import math

from src.frozen_er import harness
from src.frozen_er.cli import attach_negative_values, main


def test_eval_prints_one_line(capsys):
    assert main(["eval", "--fn", "log-p1", "--x", "0"]) == 0
    fn, x, y, value = capsys.readouterr().out.strip().split(",")
    assert (fn, x, y) == ("log-p1", "0", "0")
    assert math.isclose(float(value), math.log(0.2588194037928068), rel_tol=1e-12)


def test_eval_ratio_and_xmax(capsys):
    main(["eval", "--fn", "ratio", "--x", "-3", "--y", "0"])
    assert capsys.readouterr().out.strip() == "ratio,-3,0,0"
    main(["eval", "--fn", "xmax"])
    assert abs(float(capsys.readouterr().out.strip().split(",")[3]) + 0.886) <= 0.01


def test_domain_error_exits_with_two(capsys):
    assert main(["eval", "--fn", "ratio", "--x", "1", "--y", "-1"]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_sim_graph_writes_table(tmp_path):
    out = tmp_path / "graph.csv"
    assert main(["sim-graph", "--n", "1000", "--p", "0.5", "--t-grid", "-2:2:2", "--reps", "2", "--seed", "4", "--out", str(out)]) == 0
    with open(out, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert tuple(rows[0]) == harness.GRAPH_COLUMNS
    assert len(rows) == 1 + 2 * 3
    # m(2) = 600 for n = 1000
    assert rows[3][3] == "600"


def test_sim_graph_bad_vertex_count(tmp_path):
    assert main(["sim-graph", "--n", "0", "--p", "0.5", "--out", str(tmp_path / "x.csv")]) == 2


def test_sim_coalescent_writes_table(tmp_path):
    out = tmp_path / "coalescent.csv"
    code = main(["sim-coalescent", "--masses", "0.5,0.3,0.2", "--frozen", "0.1", "--p", "1", "--t-end", "2", "--reps", "3", "--out", str(out)])
    assert code == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(harness.COALESCENT_COLUMNS)
    assert len(lines) == 4


def test_sim_limit_writes_diagnostics(tmp_path):
    out = tmp_path / "limit.csv"
    code = main(["sim-limit", "--p", "0", "--t-end", "2", "--t-grid", "1:2:1", "--reps", "2", "--seed", "5", "--out", str(out)])
    assert code == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(harness.LIMIT_COLUMNS)
    assert len(lines) == 5


def test_check_lyapunov_exit_codes(tmp_path):
    out = tmp_path / "lyapunov.csv"
    assert main(["check-lyapunov", "--alpha", "0.2", "--beta", "0.02", "--a", "0.5", "--B", "10", "--grid", "0:1:1", "--out", str(out)]) == 2
    # a = 1e6 cannot hold outside a small C
    assert main(["check-lyapunov", "--alpha", "0.1", "--beta", "0.02", "--a", "1e6", "--B", "1", "--grid", "20:30:10", "--out", str(out)]) == 1
    assert out.exists()


def test_experiment_with_config_file(tmp_path):
    config = tmp_path / "coupling.json"
    config.write_text(json.dumps({"n": 200, "seeds": 2, "checkpoints": 4, "seed": 1}), encoding="utf-8")
    out = tmp_path / "coupling.csv"
    assert main(["experiment", "--name", "coupling-p1", "--config", str(config), "--out", str(out)]) == 0
    meta = json.loads(harness.meta_path(out).read_text(encoding="utf-8"))
    assert meta["passed"] is True
    assert meta["config"]["n"] == 200
    assert harness.read_results(out)


def test_experiment_bad_config_exits_with_two(tmp_path):
    config = tmp_path / "bad.json"
    config.write_text('{"unknown_field": 1}', encoding="utf-8")
    assert main(["experiment", "--name", "coupling-p1", "--config", str(config), "--out", str(tmp_path / "o.csv")]) == 2


def test_negative_values_attach_to_their_flag():
    argv = ["sim-limit", "--t0", "-1e-3", "--t-grid", "-2:2:1", "--no-compensate", "--x", "-3", "--grid=-1:1:1"]
    assert attach_negative_values(argv) == ["sim-limit", "--t0=-1e-3", "--t-grid=-2:2:1", "--no-compensate", "--x=-3", "--grid=-1:1:1"]


def test_check_lyapunov_accepts_negative_grid(tmp_path):
    out = tmp_path / "lyapunov.csv"
    code = main(["check-lyapunov", "--alpha", "0.1", "--beta", "0.02", "--a", "0.5", "--B", "10", "--grid", "-40:40:40", "--out", str(out)])
    assert code == 0
    xs = [row[0] for row in csv.reader(out.read_text(encoding="utf-8").splitlines()[1:])]
    assert [float(x) for x in xs] == [-40.0, 0.0, 40.0]


def test_sim_limit_starts_from_x0(tmp_path):
    out = tmp_path / "limit.csv"
    code = main(["sim-limit", "--p", "0", "--t0", "-1", "--x0", "0.5", "--t-end", "0", "--t-grid=-1:0:1", "--reps", "1", "--seed", "2", "--out", str(out)])
    assert code == 0
    with open(out, newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert float(rows[0]["X"]) == 0.5
