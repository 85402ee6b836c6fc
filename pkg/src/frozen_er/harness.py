"""Experiment orchestration and result files.

A run is fixed by (name, config, seed): the CSV and its `.meta.json` sidecar are
byte-identical across reruns and across worker counts.
"""

import csv
import json
import logging
from collections.abc import Iterable, Sequence
from functools import partial
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ValidationError

from src.frozen_er import __version__, coalescent_sim, graph_sim, limit_sim
from src.frozen_er.constants import RESULT_FLOAT_FORMAT, RESULT_HEADER
from src.frozen_er.enums import ExperimentName
from src.frozen_er.errors import ConfigurationError, ResultsIOError
from src.frozen_er.experiments import EXPERIMENTS, fan_out
from src.frozen_er.schema.experiment_result import ExperimentResult, ResultRow
from src.frozen_er.schema.limit_path import LimitConfig, LyapunovReport
from src.frozen_er.utils import rng

logger = logging.getLogger(__name__)


def canonical_json(model: BaseModel) -> str:
    return json.dumps(model.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))


def load_config(path: str | Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ResultsIOError(f"cannot read config ({exc.strerror})", str(path)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must hold a JSON object")
    return data


def run_experiment(name: str | ExperimentName, config: dict[str, Any] | None = None) -> ExperimentResult:
    """Validate `config` against the experiment's schema, run it and collect verdicts."""
    try:
        experiment = ExperimentName(name)
    except ValueError as exc:
        known = ", ".join(member.value for member in ExperimentName)
        raise ConfigurationError(f"unknown experiment {name!r}; known: {known}") from exc

    config_model, runner = EXPERIMENTS[experiment]
    try:
        validated = config_model.model_validate(config or {})
    except ValidationError as exc:
        raise ConfigurationError(f"invalid config for {experiment.value}: {exc}") from exc

    logger.info("running %s with %s", experiment.value, canonical_json(validated))
    rows, verdicts = runner(validated)
    rows = sorted(rows, key=lambda row: (row.replica, row.time, row.observable))
    result = ExperimentResult(name=experiment, seed=validated.seed, config_echo=canonical_json(validated), rows=rows, verdicts=verdicts)
    logger.info("%s finished: %d rows, %s", experiment.value, len(rows), "passed" if result.passed else "FAILED")
    return result


# =============================================================================
# FILES
# =============================================================================


def format_value(value: Any) -> str:
    if isinstance(value, float):
        return RESULT_FLOAT_FORMAT.format(value)
    return str(value)


def write_table(out: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """CSV with `header`, floats at 15 significant digits, LF line endings."""
    try:
        with open(out, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_value(value) for value in row])
    except OSError as exc:
        raise ResultsIOError(f"cannot write results ({exc.strerror})", str(out)) from exc


def meta_path(out: str | Path) -> Path:
    return Path(f"{out}.meta.json")


def write_results(result: ExperimentResult, out: str | Path) -> None:
    """Results CSV plus the `<out>.meta.json` sidecar (config echo, version, verdicts)."""
    name = result.name.value
    write_table(
        out,
        RESULT_HEADER,
        ((name, result.seed, row.replica, float(row.time), row.observable, float(row.value)) for row in result.rows),
    )
    meta = {
        "name": name,
        "seed": result.seed,
        "config": json.loads(result.config_echo),
        "version": __version__,
        "passed": result.passed,
        "verdicts": [verdict.model_dump(mode="json") for verdict in result.verdicts],
    }
    sidecar = meta_path(out)
    try:
        sidecar.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ResultsIOError(f"cannot write metadata ({exc.strerror})", str(sidecar)) from exc


def read_results(path: str | Path) -> list[ResultRow]:
    """Rows of a results CSV written by write_results."""
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            header = tuple(next(reader, ()))
            if header != RESULT_HEADER:
                raise ResultsIOError(f"unexpected header {header}", str(path))
            return [
                ResultRow(replica=int(replica), time=float(time), observable=observable, value=float(value))
                for _, _, replica, time, observable, value in reader
            ]
    except ResultsIOError:
        raise
    except OSError as exc:
        raise ResultsIOError(f"cannot read results ({exc.strerror})", str(path)) from exc
    except ValueError as exc:
        raise ResultsIOError(f"malformed results row ({exc})", str(path)) from exc


# =============================================================================
# SIMULATION TABLES
# =============================================================================

GRAPH_COLUMNS = (
    "seed",
    "replica",
    "t",
    "m",
    "frozen_mass_rescaled",
    "largest_frozen",
    "largest_standard",
    "discarded",
    "surplus_vertices",
)
LIMIT_COLUMNS = ("seed", "replica", "t", "X", "Xpre", "M", "QV")
COALESCENT_COLUMNS = ("seed", "replica", "t_end", "frozen_mass", "n_standard", "n_frozen", "largest_standard")
LYAPUNOV_COLUMNS = ("x", "log_v", "drift_ratio", "generator_value", "inside", "holds")


def _graph_replica_rows(n: int, p: float, times: Sequence[float], seed: int, replica: int) -> list[tuple]:
    state = graph_sim.init_graph(n, p, rng.substream_seed(seed, replica))
    rows = []
    for t in times:
        graph_sim.run_to_time(state, t)
        observed = graph_sim.observables(state)
        rows.append(
            (
                seed,
                replica,
                float(t),
                state.m,
                observed.frozen_mass_rescaled,
                observed.frozen_sizes[0] if observed.frozen_sizes else 0,
                observed.standard_sizes[0] if observed.standard_sizes else 0,
                observed.discarded,
                state.surplus_vertices,
            )
        )
    return rows


def graph_table(n: int, p: float, times: Sequence[float], reps: int, seed: int, workers: int = 1) -> list[tuple]:
    """Observables of F_p(n, m(t)) at each t (ascending) for every replica."""
    task = partial(_graph_replica_rows, n, p, sorted(times), seed)
    return [row for rows in fan_out(task, range(reps), workers) for row in rows]


def _limit_replica_rows(config: LimitConfig, times: Sequence[float], replica: int) -> list[tuple]:
    path = limit_sim.simulate_path(config.model_copy(update={"seed": rng.substream_seed(config.seed, replica)}))
    return [
        (config.seed, replica, point.t, point.value, point.compensator, point.martingale, point.quadratic_variation)
        for point in limit_sim.path_diagnostics(path, times)
    ]


def limit_table(config: LimitConfig, times: Sequence[float], reps: int, workers: int = 1) -> list[tuple]:
    """X, X^pre, M and <M, M> at each of `times` for every replica."""
    task = partial(_limit_replica_rows, config, sorted(times))
    return [row for rows in fan_out(task, range(reps), workers) for row in rows]


def coalescent_table(
    standard: Sequence[float],
    frozen: Sequence[float],
    p: float,
    t_end: float,
    reps: int,
    seed: int,
) -> list[tuple]:
    rows = []
    for replica in range(reps):
        generator = rng.generator(rng.substream_seed(seed, replica))
        system = coalescent_sim.run_coalescent(coalescent_sim.init_system(list(standard), list(frozen), p), t_end, generator)
        rows.append(
            (
                seed,
                replica,
                float(t_end),
                system.frozen_mass(),
                len(system.standard),
                len(system.frozen),
                max(system.standard, default=0.0),
            )
        )
    return rows


def lyapunov_table(report: LyapunovReport) -> list[tuple]:
    return [
        (
            verdict.x,
            verdict.log_v,
            verdict.drift_ratio,
            "" if verdict.generator_value is None else verdict.generator_value,
            int(verdict.inside),
            int(verdict.holds),
        )
        for verdict in report.verdicts
    ]
