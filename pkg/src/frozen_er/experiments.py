"""Experiment definitions: one config model and one runner per experiment.

A runner takes its validated config and returns result rows and verdicts. The
thresholds baked into the config defaults are pilot-calibrated and documented in
DESIGN.md.
"""

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.frozen_er import coalescent_sim, graph_sim, limit_sim, lyapunov, stats
from src.frozen_er.constants import XMAX_REFERENCE
from src.frozen_er.enums import ComponentStatus, EventKind, ExperimentName
from src.frozen_er.schema.experiment_result import ResultRow, Verdict
from src.frozen_er.special_fn import airy_scaled, find_xmax, kernel_integrals, log_kernel_ratio, log_p1_array
from src.frozen_er.stable_oracle import airy_scaled_series, levy_exponent_check, oracle_log_p1, oracle_normalization
from src.frozen_er.utils import rng

logger = logging.getLogger(__name__)

Outcome = tuple[list[ResultRow], list[Verdict]]


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(ge=0, le=2**64 - 1, default=0)
    workers: int = Field(ge=1, default=1)


def fan_out(task: Callable, items: Sequence, workers: int) -> list:
    """Map `task` over `items` in order, in a process pool when workers > 1."""
    if workers <= 1:
        return [task(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, items))


def _verdict(name: str, passed: bool, value: float | None = None, threshold: float | None = None, detail: str = "") -> Verdict:
    logger.info("verdict %s: %s (value=%s, threshold=%s)", name, "pass" if passed else "FAIL", value, threshold)
    return Verdict(name=name, passed=bool(passed), value=value, threshold=threshold, detail=detail)


# =============================================================================
# THEOREM 1: X_p(t) - (1 + p) t -> 0
# =============================================================================


class Theorem1Config(ExperimentConfig):
    p: float = Field(gt=0.0, le=1.0, default=0.5)
    reps: int = Field(ge=2, default=300)
    t_grid: list[float] = Field(default_factory=lambda: [5.0, 10.0, 20.0, 30.0], min_length=2)
    delta: float = Field(gt=0.0, default=1e-2)
    max_ratio: float = Field(gt=0.0, default=0.5)


def run_theorem1(config: Theorem1Config) -> Outcome:
    times = sorted(config.t_grid)
    limit_config = limit_sim.make_config(p=config.p, t_end=times[-1], delta=config.delta, seed=config.seed)
    paths = limit_sim.simulate_replicas(limit_config, config.reps, config.workers)

    rows: list[ResultRow] = []
    deviations: dict[float, list[float]] = {t: [] for t in times}
    for replica, path in enumerate(paths):
        for t in times:
            value = path.value_at(t)
            deviation = abs(value - (1.0 + config.p) * t)
            deviations[t].append(deviation)
            rows.append(ResultRow(replica=replica, time=t, observable="X", value=value))
            rows.append(ResultRow(replica=replica, time=t, observable="abs_dev", value=deviation))

    first, last = float(np.median(deviations[times[0]])), float(np.median(deviations[times[-1]]))
    ratio = last / first if first > 0 else math.inf
    verdicts = [
        _verdict(
            "median_abs_dev decreasing",
            ratio <= config.max_ratio,
            value=ratio,
            threshold=config.max_ratio,
            detail=f"median |X - (1+p)t| is {first:.6g} at t={times[0]:g} and {last:.6g} at t={times[-1]:g}",
        )
    ]
    return rows, verdicts


# =============================================================================
# THEOREM 2: Y(t) = X_0(t) - t is stationary with cubic-exponential tails
# =============================================================================


class StationarityConfig(ExperimentConfig):
    reps: int = Field(ge=2, default=2000)
    t_first: float = Field(gt=0.0, default=30.0)
    t_second: float = Field(gt=0.0, default=60.0)
    delta: float | None = Field(gt=0.0, default=None)
    ks_threshold: float = Field(gt=0.0, le=1.0, default=0.06)
    slope_range: tuple[float, float] = (2.4, 3.6)
    quantile_range: tuple[float, float] = (0.90, 0.995)
    tail_level: float = 2.0
    tail_fraction: float = Field(ge=0.0, le=1.0, default=0.01)

    @model_validator(mode="after")
    def _ordered_times(self) -> "StationarityConfig":
        if not self.t_second >= self.t_first:
            raise ValueError("t_second must not precede t_first")
        return self


def run_stationarity_p0(config: StationarityConfig) -> Outcome:
    first = limit_sim.stationary_samples(config.t_first, config.t_first, config.reps, config.seed, config.delta, config.workers)
    second = limit_sim.stationary_samples(
        config.t_first, config.t_second, config.reps, config.seed, config.delta, config.workers, first_replica=config.reps
    )
    rows = [ResultRow(replica=r, time=config.t_first, observable="Y", value=v) for r, v in enumerate(first)]
    rows += [ResultRow(replica=config.reps + r, time=config.t_second, observable="Y", value=v) for r, v in enumerate(second)]

    distance = stats.ks_statistic(first, second)
    verdicts = [_verdict("ks distance between times", distance <= config.ks_threshold, value=distance, threshold=config.ks_threshold)]
    lo, hi = config.slope_range
    if config.reps >= 500:
        slope = stats.tail_cubic_fit(second, config.quantile_range)
        verdicts.append(_verdict("right-tail exponent cubic", lo <= slope <= hi, value=slope, detail=f"window [{lo}, {hi}]"))
    fraction = float(np.mean(np.asarray(second) > config.tail_level))
    verdicts.append(_verdict(f"tail fraction above {config.tail_level:g}", fraction < config.tail_fraction, value=fraction, threshold=config.tail_fraction))
    verdicts.append(_verdict("samples finite", bool(np.all(np.isfinite(first + second)))))
    return rows, verdicts


# =============================================================================
# DISCRETE GRAPH AGAINST THE LIMIT PROCESS
# =============================================================================


class DiscreteLimitConfig(ExperimentConfig):
    n: int = Field(ge=1, default=100_000)
    p: float = Field(ge=0.0, le=1.0, default=0.5)
    t: float = 2.0
    reps: int = Field(ge=1, default=500)
    limit_t0: float = -10.0
    delta: float = Field(gt=0.0, default=1e-2)
    ks_threshold: float = Field(gt=0.0, le=1.0, default=0.15)

    @model_validator(mode="after")
    def _limit_starts_earlier(self) -> "DiscreteLimitConfig":
        if not self.t > self.limit_t0:
            raise ValueError(f"t={self.t} must exceed limit_t0={self.limit_t0}")
        return self


def _graph_frozen_mass(n: int, p: float, t: float, seed: int, replica: int) -> float:
    state = graph_sim.init_graph(n, p, rng.substream_seed(seed, replica))
    graph_sim.run_to_time(state, t)
    return graph_sim.observables(state).frozen_mass_rescaled


def run_discrete_limit(config: DiscreteLimitConfig) -> Outcome:
    graph_values = fan_out(partial(_graph_frozen_mass, config.n, config.p, config.t, config.seed), list(range(config.reps)), config.workers)
    limit_config = limit_sim.make_config(p=config.p, t0=config.limit_t0, x0=0.0, t_end=config.t, delta=config.delta, seed=config.seed)
    paths = limit_sim.simulate_replicas(limit_config, config.reps, config.workers, first_replica=config.reps)
    limit_values = [path.value_at(config.t) for path in paths]

    rows = [ResultRow(replica=r, time=config.t, observable="graph_frozen_mass", value=v) for r, v in enumerate(graph_values)]
    rows += [ResultRow(replica=config.reps + r, time=config.t, observable="limit_X", value=v) for r, v in enumerate(limit_values)]
    distance = stats.ks_statistic(graph_values, limit_values)
    return rows, [_verdict("ks distance graph vs limit", distance <= config.ks_threshold, value=distance, threshold=config.ks_threshold)]


# =============================================================================
# STRUCTURAL COUPLING
# =============================================================================


class CouplingConfig(ExperimentConfig):
    n: int = Field(ge=1, default=2000)
    seeds: int = Field(ge=1, default=50)
    edge_factor: float = Field(gt=0.0, default=3.0)
    structure_p_values: list[float] = Field(default_factory=lambda: [0.0, 0.5, 1.0])
    checkpoints: int = Field(ge=1, default=30)


def _coupling_replica(config: CouplingConfig, p: float, replica: int) -> dict:
    """Run one seed to edge_factor * n edges, checking structure at every edge and identities when p = 1.

    Only a kept edge changes F, and only in the component it lands in, so that
    component is the one checked. A full scan runs at each checkpoint as well.
    """
    state = graph_sim.init_graph(config.n, p, rng.substream_seed(config.seed, replica))
    total = int(config.edge_factor * config.n)
    checkpoint_every = max(total // config.checkpoints, 1)
    identity_failures, forest_failures, structure_failures = 0, 0, 0
    trace: list[tuple[int, int, int]] = []
    while state.m < total:
        edge = graph_sim.next_edge(state)
        if graph_sim.apply_edge_sample(state, edge).kept:
            status, surplus = graph_sim.component_structure(state, edge.a)
            structure_failures += surplus != (1 if status == ComponentStatus.FROZEN else 0)
        if p == 1.0:
            identity_failures += state.frozen_vertices != state.surplus_vertices
            forest_failures += not graph_sim.forest_parts_coincide(state)
        if state.m % checkpoint_every == 0 or state.m == total:
            for record in graph_sim.component_records(state):
                expected = record.size if record.status == ComponentStatus.FROZEN else record.size - 1
                structure_failures += record.kept_edges != expected
            trace.append((state.m, state.frozen_vertices, state.surplus_vertices))
    return {"identity": identity_failures, "forest": forest_failures, "structure": structure_failures, "trace": trace}


def run_coupling_p1(config: CouplingConfig) -> Outcome:
    rows: list[ResultRow] = []
    replicas = list(range(config.seeds))
    coupled = fan_out(partial(_coupling_replica, config, 1.0), replicas, config.workers)
    for replica, outcome in zip(replicas, coupled):
        for m, frozen, surplus in outcome["trace"]:
            rows.append(ResultRow(replica=replica, time=m, observable="frozen_vertices", value=frozen))
            rows.append(ResultRow(replica=replica, time=m, observable="surplus_vertices", value=surplus))

    structure = sum(outcome["structure"] for outcome in coupled)
    for p in config.structure_p_values:
        if p != 1.0:
            structure += sum(outcome["structure"] for outcome in fan_out(partial(_coupling_replica, config, p), replicas, config.workers))

    identity = sum(outcome["identity"] for outcome in coupled)
    forest = sum(outcome["forest"] for outcome in coupled)
    return rows, [
        _verdict("frozen==surplus vertices at every m", identity == 0, value=identity, threshold=0),
        _verdict("forest parts coincide at every m", forest == 0, value=forest, threshold=0),
        _verdict("no complex components", structure == 0, value=structure, threshold=0, detail=f"p in {config.structure_p_values}"),
    ]


# =============================================================================
# FOSTER-LYAPUNOV
# =============================================================================


class LyapunovConfig(ExperimentConfig):
    alpha: float = Field(gt=0.0, default=0.1)
    beta: float = Field(gt=0.0, default=0.02)
    a: float = Field(gt=0.0, default=0.5)
    grid_start: float = -40.0
    grid_stop: float = 40.0
    grid_step: float = Field(gt=0.0, default=0.25)
    candidates: list[float] = Field(default_factory=lambda: [float(b) for b in range(1, 11)], min_length=1)
    max_B: float = Field(gt=0.0, default=10.0)


def run_lyapunov(config: LyapunovConfig) -> Outcome:
    count = int(round((config.grid_stop - config.grid_start) / config.grid_step)) + 1
    grid = np.linspace(config.grid_start, config.grid_stop, count).tolist()
    report = lyapunov.lyapunov_threshold(config.alpha, config.beta, config.a, grid, config.candidates, config.workers)
    if report is None:
        report = lyapunov.lyapunov_check(config.alpha, config.beta, config.a, max(config.candidates), grid, config.workers)
        found = False
    else:
        found = report.B <= config.max_B
    rows = []
    for verdict in report.verdicts:
        rows.append(ResultRow(replica=0, time=verdict.x, observable="drift_ratio", value=verdict.drift_ratio))
        rows.append(ResultRow(replica=0, time=verdict.x, observable="log_v", value=verdict.log_v))
    return rows, [
        _verdict("threshold B exists", found, value=report.B, threshold=config.max_B, detail=f"{len(report.violations)} violations"),
        _verdict("bounded inside C", math.isfinite(report.b), value=report.b),
    ]


# =============================================================================
# LEMMAS ON p1 AND THE KERNEL INTEGRALS
# =============================================================================


class LemmaSuiteConfig(ExperimentConfig):
    ratio_ys: list[float] = Field(default_factory=lambda: [0.1, 0.5, 1.0])
    ratio_step: float = Field(gt=0.0, default=0.05)
    monotonicity_slack: float = Field(ge=0.0, default=1e-9)
    airy_pairs: int = Field(ge=1, default=200)
    airy_z_max: float = Field(gt=0.0, default=10.0)
    sandwich_xs: list[float] = Field(default_factory=lambda: [8.0, 10.0, 15.0, 20.0])


def run_lemma_suite(config: LemmaSuiteConfig) -> Outcome:
    rows: list[ResultRow] = []
    verdicts: list[Verdict] = []

    xs = np.arange(-40.0 + config.ratio_step, 0.0 - config.ratio_step / 2, config.ratio_step)
    worst_step = min(float(np.min(np.diff(log_kernel_ratio(xs, y)))) for y in config.ratio_ys)
    verdicts.append(_verdict("ratio non-decreasing on (-40, 0)", worst_step >= -config.monotonicity_slack, value=worst_step, threshold=-config.monotonicity_slack))

    shift = -find_xmax().x_max
    lower = min(float(np.min(log_kernel_ratio(x, np.linspace(0.0, shift, 25)))) for x in np.linspace(0.0, 20.0, 81))
    verdicts.append(_verdict("ratio >= 1 for x >= 0, y <= -x_max", lower >= -1e-12, value=lower, threshold=0.0))

    generator = rng.generator(config.seed)
    worst_cross = math.inf
    for _ in range(config.airy_pairs):
        u, v = sorted(generator.uniform(0.0, config.airy_z_max, size=2), reverse=True)
        if u == v:
            continue
        at_u, at_v = airy_scaled(float(u)), airy_scaled(float(v))
        worst_cross = min(worst_cross, at_u.ai_s * at_v.aip_s - at_v.ai_s * at_u.aip_s)
    verdicts.append(_verdict("Airy cross inequality", worst_cross > 0, value=worst_cross, threshold=0.0))

    sandwich_ok, trunc_ok = True, True
    for x in config.sandwich_xs:
        integrals = kernel_integrals(x)
        rows.append(ResultRow(replica=0, time=x, observable="x_i1", value=x * integrals.i1))
        rows.append(ResultRow(replica=0, time=x, observable="i1_trunc", value=integrals.i1_trunc))
        sandwich_ok &= abs(x * integrals.i1 - 1.0) <= 5.0 / x**3
        trunc_ok &= integrals.i1_trunc >= 1.0 / (2.0 * x)
    verdicts.append(_verdict("|x I1(x) - 1| <= 5/x^3", sandwich_ok))
    verdicts.append(_verdict("I1 restricted to y <= -x_max >= 1/(2x)", trunc_ok))
    return rows, verdicts


# =============================================================================
# SPECIAL-FUNCTION ACCURACY
# =============================================================================


class SpecialAccuracyConfig(ExperimentConfig):
    inner_step: float = Field(gt=0.0, default=0.25)
    inner_tolerance: float = Field(gt=0.0, default=1e-6)
    outer_step: float = Field(gt=0.0, default=1.0)
    outer_tolerance: float = Field(gt=0.0, default=1e-3)
    normalization_tolerance: float = Field(gt=0.0, default=1e-7)
    xmax_tolerance: float = Field(gt=0.0, default=1e-2)
    airy_tolerance: float = Field(gt=0.0, default=1e-7)


def _relative_errors(xs: np.ndarray) -> list[tuple[float, float]]:
    ours = log_p1_array(xs)
    return [(float(x), abs(math.expm1(float(mine) - oracle_log_p1(float(x))))) for x, mine in zip(xs, ours)]


def run_special_accuracy(config: SpecialAccuracyConfig) -> Outcome:
    inner = np.arange(-10.0, 10.0 + config.inner_step / 2, config.inner_step)
    outer_right = np.arange(10.0 + config.outer_step, 30.0 + config.outer_step / 2, config.outer_step)
    outer = np.concatenate([-outer_right[::-1], outer_right])
    inner_errors, outer_errors = _relative_errors(inner), _relative_errors(outer)
    rows = [ResultRow(replica=0, time=x, observable="relative_error", value=e) for x, e in inner_errors + outer_errors]

    worst_inner = max(e for _, e in inner_errors)
    worst_outer = max(e for _, e in outer_errors)
    mass = oracle_normalization()
    x_max = find_xmax().x_max
    levy = levy_exponent_check()
    airy_gap = 0.0
    for z in np.arange(0.0, 10.0 + 0.25, 0.5):
        library, series = airy_scaled(float(z)), airy_scaled_series(float(z))
        airy_gap = max(airy_gap, abs(series.ai_s / library.ai_s - 1.0), abs(series.aip_s / library.aip_s - 1.0))

    return rows, [
        _verdict("p1 vs oracle on [-10, 10]", worst_inner <= config.inner_tolerance, value=worst_inner, threshold=config.inner_tolerance),
        _verdict("p1 vs oracle on 10 <= |x| <= 30", worst_outer <= config.outer_tolerance, value=worst_outer, threshold=config.outer_tolerance),
        _verdict("oracle integrates to 1", abs(mass - 1.0) <= config.normalization_tolerance, value=mass, threshold=config.normalization_tolerance),
        _verdict("mode of p1", abs(x_max - XMAX_REFERENCE) <= config.xmax_tolerance, value=x_max, threshold=config.xmax_tolerance),
        _verdict("Levy measure matches the Airy normalisation", levy.consistent, value=levy.relative_mismatch),
        _verdict("Airy library vs series", airy_gap <= config.airy_tolerance, value=airy_gap, threshold=config.airy_tolerance),
    ]


# =============================================================================
# MARTINGALE DIAGNOSTICS
# =============================================================================


class MartingaleConfig(ExperimentConfig):
    p_values: list[float] = Field(default_factory=lambda: [0.0, 0.5], min_length=1)
    reps: int = Field(ge=4, default=500)
    checkpoints: list[float] = Field(default_factory=lambda: [2.0, 5.0, 10.0], min_length=1)
    delta: float | None = Field(gt=0.0, default=None)  # None picks the cutoff and compensation by p
    mean_se: float = Field(gt=0.0, default=3.0)
    variance_se: float = Field(gt=0.0, default=4.0)


def _diagnosed_path(config: limit_sim.LimitConfig, checkpoints: list[float], replica: int):
    path = limit_sim.simulate_path(config.model_copy(update={"seed": rng.substream_seed(config.seed, replica)}))
    return limit_sim.path_diagnostics(path, checkpoints)


def martingale_limit_config(config: MartingaleConfig, p: float) -> limit_sim.LimitConfig:
    return limit_sim.make_config(p=p, t_end=max(config.checkpoints), delta=config.delta, seed=config.seed)


def run_martingale(config: MartingaleConfig) -> Outcome:
    checkpoints = sorted(config.checkpoints)
    rows: list[ResultRow] = []
    verdicts: list[Verdict] = []
    for index, p in enumerate(config.p_values):
        limit_config = martingale_limit_config(config, p)
        replicas = list(range(index * config.reps, (index + 1) * config.reps))
        diagnosed = fan_out(partial(_diagnosed_path, limit_config, checkpoints), replicas, config.workers)
        for replica, series in zip(replicas, diagnosed):
            for point in series:
                rows.append(ResultRow(replica=replica, time=point.t, observable=f"M[p={p:g}]", value=point.martingale))
                rows.append(ResultRow(replica=replica, time=point.t, observable=f"QV[p={p:g}]", value=point.quadratic_variation))
        for k, t in enumerate(checkpoints):
            martingale = [series[k].martingale for series in diagnosed]
            variation = [series[k].quadratic_variation for series in diagnosed]
            mean, se = stats.mean_and_standard_error(martingale)
            verdicts.append(_verdict(f"zero mean M p={p:g} t={t:g}", abs(mean) <= config.mean_se * se, value=mean, threshold=config.mean_se * se))
            variance, variance_se = stats.variance_and_standard_error(martingale)
            qv_mean, qv_se = stats.mean_and_standard_error(variation)
            gap = abs(variance - qv_mean)
            bound = config.variance_se * math.hypot(variance_se, qv_se)
            verdicts.append(_verdict(f"Var M = E<M,M> p={p:g} t={t:g}", gap <= bound, value=gap, threshold=bound))
    return rows, verdicts


# =============================================================================
# LIMIT-SIMULATOR INVARIANTS
# =============================================================================


class LimitInvariantsConfig(ExperimentConfig):
    p: float = Field(gt=0.0, le=1.0, default=0.5)
    t_end: float = Field(gt=0.0, default=5.0)
    reps: int = Field(ge=4, default=2000)
    delta: float = Field(gt=0.0, default=1e-2)
    ks_threshold: float = Field(gt=0.0, le=1.0, default=0.043)
    bias_reps: int = Field(ge=4, default=500)
    bias_se: float = Field(gt=0.0, default=2.0)
    count_reps: int = Field(ge=4, default=500)
    count_t_end: float = Field(gt=0.0, default=10.0)
    count_se: float = Field(gt=0.0, default=3.0)


def _count_and_compensator(config: limit_sim.LimitConfig, replica: int) -> tuple[int, float]:
    path = limit_sim.simulate_path(config.model_copy(update={"seed": rng.substream_seed(config.seed, replica)}))
    return path.jump_count(config.t_end), limit_sim.integrated_rate(path, config.t_end)


def run_limit_invariants(config: LimitInvariantsConfig) -> Outcome:
    rows: list[ResultRow] = []
    verdicts: list[Verdict] = []
    base = limit_sim.make_config(p=config.p, t_end=config.t_end, delta=config.delta, seed=config.seed)

    # thinning exactness: a looser bound and smaller windows leave the law unchanged
    plain = [path.value_at(config.t_end) for path in limit_sim.simulate_replicas(base, config.reps, config.workers)]
    tight_config = base.model_copy(update={"safety": 2.0 * base.safety, "max_window": base.max_window / 2.0})
    tight = [
        path.value_at(config.t_end)
        for path in limit_sim.simulate_replicas(tight_config, config.reps, config.workers, first_replica=config.reps)
    ]
    rows += [ResultRow(replica=r, time=config.t_end, observable="X[plain]", value=v) for r, v in enumerate(plain)]
    rows += [ResultRow(replica=config.reps + r, time=config.t_end, observable="X[tight]", value=v) for r, v in enumerate(tight)]
    distance = stats.ks_statistic(plain, tight)
    verdicts.append(_verdict("thinning exactness", distance <= config.ks_threshold, value=distance, threshold=config.ks_threshold))

    # small-jump bias: halving delta with compensation barely moves the mean
    halved_config = base.model_copy(update={"delta": base.delta / 2.0, "compensate_small": True})
    coarse_config = base.model_copy(update={"compensate_small": True})
    coarse = [p.value_at(config.t_end) for p in limit_sim.simulate_replicas(coarse_config, config.bias_reps, config.workers, 2 * config.reps)]
    halved = [
        p.value_at(config.t_end)
        for p in limit_sim.simulate_replicas(halved_config, config.bias_reps, config.workers, 2 * config.reps + config.bias_reps)
    ]
    mean_coarse, se_coarse = stats.mean_and_standard_error(coarse)
    mean_halved, se_halved = stats.mean_and_standard_error(halved)
    shift, bound = abs(mean_coarse - mean_halved), config.bias_se * math.hypot(se_coarse, se_halved)
    verdicts.append(_verdict("small-jump bias", shift <= bound, value=shift, threshold=bound))

    # p = 0 jump count against the integrated rate
    count_config = limit_sim.make_config(p=0.0, t_end=config.count_t_end, seed=config.seed)
    first = 2 * config.reps + 2 * config.bias_reps
    pairs = fan_out(partial(_count_and_compensator, count_config), list(range(first, first + config.count_reps)), config.workers)
    for offset, (count, integrated) in enumerate(pairs):
        rows.append(ResultRow(replica=first + offset, time=config.count_t_end, observable="jump_count", value=count))
        rows.append(ResultRow(replica=first + offset, time=config.count_t_end, observable="integrated_rate", value=integrated))
    gap_mean, gap_se = stats.mean_and_standard_error([count - integrated for count, integrated in pairs])
    verdicts.append(_verdict("jump count matches integrated rate", abs(gap_mean) <= config.count_se * gap_se, value=gap_mean, threshold=config.count_se * gap_se))
    return rows, verdicts


# =============================================================================
# COALESCENT RATES
# =============================================================================


class CoalescentRatesConfig(ExperimentConfig):
    standard: list[float] = Field(default_factory=lambda: [1.0, 0.6], min_length=1)
    frozen: list[float] = Field(default_factory=lambda: [0.3])
    p: float = Field(ge=0.0, le=1.0, default=0.7)
    reps: int = Field(ge=1, default=100_000)
    significance: float = Field(gt=0.0, lt=1.0, default=0.01)
    freeze_reps: int = Field(ge=2, default=10_000)
    freeze_tolerance: float = Field(gt=0.0, default=0.03)
    absorption_particles: int = Field(ge=1, default=64)

    @model_validator(mode="after")
    def _distinct_masses(self) -> "CoalescentRatesConfig":
        masses = self.standard + self.frozen
        sums = {a + b for i, a in enumerate(self.standard) for b in self.standard[i + 1 :]}
        if len(set(masses)) != len(masses) or sums & set(self.standard):
            raise ValueError("first-event classification needs distinct masses, none equal to a pair sum")
        return self


def _first_event_table(standard: list[float], frozen: list[float], p: float) -> dict[str, float]:
    """Analytic rate of every individual first event, keyed by a label."""
    table: dict[str, float] = {}
    for i, x in enumerate(standard):
        for y in standard[i + 1 :]:
            table[f"merge:{x!r}+{y!r}"] = x * y
        table[f"freeze:{x!r}"] = 0.5 * x * x
        for y in frozen:
            table[f"absorb:{x!r}->{y!r}"] = p * x * y
    return table


def _first_event_label(before: list[float], frozen_before: list[float], after, kind: EventKind) -> str:
    removed = [x for x in before if x not in after.standard]
    if kind == EventKind.STD_STD_MERGE:
        x, y = sorted(removed, key=before.index)
        return f"merge:{x!r}+{y!r}"
    if kind == EventKind.FREEZE:
        return f"freeze:{removed[0]!r}"
    target = next(y for y, z in zip(frozen_before, after.frozen) if y != z)
    return f"absorb:{removed[0]!r}->{target!r}"


def run_coalescent_rates(config: CoalescentRatesConfig) -> Outcome:
    rows: list[ResultRow] = []
    verdicts: list[Verdict] = []
    generator = rng.generator(config.seed)

    table = _first_event_table(config.standard, config.frozen, config.p)
    counts = dict.fromkeys(table, 0)
    for _ in range(config.reps):
        system = coalescent_sim.init_system(config.standard, config.frozen, config.p)
        kind = coalescent_sim.gillespie_step(system, generator)
        counts[_first_event_label(config.standard, config.frozen, system, kind)] += 1
    total_rate = math.fsum(table.values())
    for label, count in counts.items():
        rows.append(ResultRow(replica=0, time=0.0, observable=f"first_event_count[{label}]", value=count))
        rows.append(ResultRow(replica=0, time=0.0, observable=f"first_event_probability[{label}]", value=table[label] / total_rate))
    statistic, pvalue = stats.first_event_chi2(list(counts.values()), [table[label] / total_rate for label in counts])
    verdicts.append(_verdict("first-event distribution", pvalue >= config.significance, value=pvalue, threshold=config.significance, detail=f"chi2={statistic:.4g}"))

    freeze_times = []
    for _ in range(config.freeze_reps):
        system = coalescent_sim.run_coalescent(coalescent_sim.init_system([1.0], [], config.p), math.inf, generator)
        freeze_times.append(system.time)
    mean_time = float(np.mean(freeze_times))
    rows.append(ResultRow(replica=0, time=0.0, observable="mean_freeze_time", value=mean_time))
    verdicts.append(_verdict("single-particle mean freeze time", abs(mean_time / 2.0 - 1.0) <= config.freeze_tolerance, value=mean_time, threshold=config.freeze_tolerance))

    n = config.absorption_particles
    masses = [n ** (-1.0 / 3.0)] * n
    conserved, no_absorb_at_p0 = True, True
    for p in (1.0, 0.0):
        events: dict[EventKind, int] = {}
        system = coalescent_sim.run_coalescent(coalescent_sim.init_system(masses, [], p), math.inf, generator, events)
        conserved &= math.isclose(system.total_mass(), math.fsum(masses), rel_tol=1e-12)
        fraction = system.frozen_mass() / system.total_mass()
        rows.append(ResultRow(replica=0, time=system.time, observable=f"absorbed_frozen_fraction[p={p:g}]", value=fraction))
        verdicts.append(_verdict(f"all mass frozen at absorption p={p:g}", math.isclose(fraction, 1.0, rel_tol=1e-12), value=fraction))
        if p == 0.0:
            no_absorb_at_p0 = events.get(EventKind.STD_FROZEN_MERGE, 0) == 0
    verdicts.append(_verdict("mass conserved", conserved))
    verdicts.append(_verdict("no frozen merges at p=0", no_absorb_at_p0))
    return rows, verdicts


# =============================================================================
# REGISTRY
# =============================================================================

EXPERIMENTS: dict[ExperimentName, tuple[type[ExperimentConfig], Callable[..., Outcome]]] = {
    ExperimentName.THEOREM1: (Theorem1Config, run_theorem1),
    ExperimentName.STATIONARITY_P0: (StationarityConfig, run_stationarity_p0),
    ExperimentName.DISCRETE_LIMIT: (DiscreteLimitConfig, run_discrete_limit),
    ExperimentName.COUPLING_P1: (CouplingConfig, run_coupling_p1),
    ExperimentName.LYAPUNOV: (LyapunovConfig, run_lyapunov),
    ExperimentName.LEMMA_SUITE: (LemmaSuiteConfig, run_lemma_suite),
    ExperimentName.SPECIAL_ACCURACY: (SpecialAccuracyConfig, run_special_accuracy),
    ExperimentName.MARTINGALE: (MartingaleConfig, run_martingale),
    ExperimentName.LIMIT_INVARIANTS: (LimitInvariantsConfig, run_limit_invariants),
    ExperimentName.COALESCENT_RATES: (CoalescentRatesConfig, run_coalescent_rates),
}
