"""Simulation of the limit process X_p by thinning its Poisson point process representation.

Given X(s-) = x, jumps of size in dy arrive at rate

    n_p(s, x, dy) = 1/2 (y + 2px) p1(s - x - y)/p1(s - x) dy / sqrt(2 pi y^3).

For p > 0 this rate has infinite mass near y = 0, so jumps below `delta` are
dropped and, optionally, replaced by their mean as a deterministic drift.
"""

import logging
import math
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache, partial

import numpy as np
from pydantic import ValidationError

from src.frozen_er.constants import (
    ENVELOPE_MAX_REFINEMENTS,
    ENVELOPE_NODES_PER_DECADE,
    ENVELOPE_TOLERANCE,
    SAMPLER_MAX_ATTEMPTS,
    TAIL_CUTOFF_NATS,
    THINNING_GRID_POINTS,
    THINNING_MIN_WINDOW,
)
from src.frozen_er.errors import ConfigurationError, DomainError, NumericError
from src.frozen_er.kernel_quadrature import kernel_moments, moment_table
from src.frozen_er.schema.limit_path import DriftSegment, JumpEvent, LimitConfig, LimitPath, PathDiagnostics
from src.frozen_er.special_fn import find_xmax, log_kernel_ratio, log_p1_array, quad_checked, tail_cutoff
from src.frozen_er.utils import rng as rng_utils

logger = logging.getLogger(__name__)


# =============================================================================
# RATES
# =============================================================================


def _check_state(x: float, p: float, delta: float) -> None:
    if not (math.isfinite(x) and x >= 0):
        raise DomainError(f"state x must be finite and nonnegative, got {x}")
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if delta < 0 or (p > 0 and x > 0 and delta == 0):
        raise DomainError(f"jump cutoff delta={delta} gives an infinite rate for p={p}, x={x}")


def jump_rate(t: float, x: float, p: float, delta: float) -> float:
    """Total rate of jumps of size >= delta from state x at time t, by direct quadrature."""
    _check_state(x, p, delta)
    w = np.array([t - x])
    rate = 0.5 * kernel_moments(w, 0, delta)[0]
    if p > 0 and x > 0:
        rate += p * x * kernel_moments(w, -1, delta)[0]
    return float(rate)


class RateModel:
    """Tabulated rates of X_p for one (p, delta, compensate_small).

    All methods take arrays of times and states and broadcast.
    """

    def __init__(self, p: float, delta: float, compensate_small: bool):
        self.p = p
        self.delta = delta
        self.compensate_small = compensate_small
        self._m0 = moment_table(0, delta, None)
        self._m1 = moment_table(1, delta, None)
        self._m2 = moment_table(2, delta, None)
        self._m_minus1 = moment_table(-1, delta, None) if p > 0 else None
        if compensate_small:
            self._small_m0 = moment_table(0, 0.0, delta)
            self._small_m1 = moment_table(1, 0.0, delta)

    def rate(self, t, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        w = np.asarray(t, dtype=float) - x
        value = 0.5 * self._m0(w)
        if self._m_minus1 is not None:
            value = value + self.p * x * self._m_minus1(w)
        return value

    def mean_jump(self, t, x) -> np.ndarray:
        """Compensator density of the simulated jumps (sizes >= delta)."""
        x = np.asarray(x, dtype=float)
        w = np.asarray(t, dtype=float) - x
        return 0.5 * self._m1(w) + self.p * x * self._m0(w)

    def drift(self, t, x) -> np.ndarray:
        """Mean contribution of the jumps below delta; zero when not compensating."""
        x = np.asarray(x, dtype=float)
        if not self.compensate_small:
            return np.zeros(np.broadcast(np.asarray(t), x).shape)
        w = np.asarray(t, dtype=float) - x
        return 0.5 * self._small_m1(w) + self.p * x * self._small_m0(w)

    def compensator_density(self, t, x) -> np.ndarray:
        return self.mean_jump(t, x) + self.drift(t, x)

    def qv_density(self, t, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        w = np.asarray(t, dtype=float) - x
        return 0.5 * self._m2(w) + self.p * x * self._m1(w)


@lru_cache(maxsize=8)
def rate_model(p: float, delta: float, compensate_small: bool) -> RateModel:
    return RateModel(p, delta, compensate_small)


# =============================================================================
# JUMP SIZES
# =============================================================================


class JumpSizeSampler:
    """Rejection sampler for the jump-size law n_p(t, x, dy) 1{y >= delta}, normalised.

    The proposal on log-spaced bins is (y^{-1/2} + 2px y^{-3/2}) times a constant
    bound of R(y) = p1(w - y)/p1(w) on each bin. R is unimodal in y with mode at
    w - x_max, so its maximum on a bin sits at an edge or at the mode.
    """

    def __init__(self, nodes_per_decade: int = ENVELOPE_NODES_PER_DECADE):
        self.nodes_per_decade = nodes_per_decade

    def _upper_limit(self, w: float, px: float, delta: float) -> float:
        def log_density(t: np.ndarray) -> np.ndarray:
            y = np.exp(t)
            return np.log(y + 2.0 * px) - 0.5 * t + log_kernel_ratio(w, y)

        t_hi = math.log(max(w, 0.0) + TAIL_CUTOFF_NATS)
        cutoff, _, _ = tail_cutoff(log_density, math.log(delta), max(t_hi, math.log(delta) + 1.0))
        return math.exp(cutoff)

    def _envelope(self, w: float, px: float, delta: float, nodes_per_decade: int):
        y_max = self._upper_limit(w, px, delta)
        decades = max(math.log10(y_max / delta), 1.0 / nodes_per_decade)
        edges = np.logspace(math.log10(delta), math.log10(delta) + decades, int(math.ceil(decades * nodes_per_decade)) + 1)
        log_r_edges = log_kernel_ratio(w, edges)
        log_bound = np.maximum(log_r_edges[:-1], log_r_edges[1:])

        mode = w - find_xmax().x_max
        holds_mode = (edges[:-1] < mode) & (mode < edges[1:])
        if np.any(holds_mode):
            log_bound[holds_mode] = np.log(find_xmax().p1_at_max) - float(log_p1_array(w))

        lo, hi = edges[:-1], edges[1:]
        sqrt_mass = 2.0 * (np.sqrt(hi) - np.sqrt(lo))
        inverse_mass = 4.0 * px * (1.0 / np.sqrt(lo) - 1.0 / np.sqrt(hi))
        weights = np.exp(log_bound - log_bound.max()) * (sqrt_mass + inverse_mass)
        return edges, log_bound, sqrt_mass, inverse_mass, np.cumsum(weights)

    def sample(self, t: float, x: float, p: float, delta: float, rng: np.random.Generator) -> float:
        _check_state(x, p, delta)
        if not delta > 0:
            raise DomainError(f"jump sizes need a positive cutoff, got delta={delta}")
        w, px = t - x, p * x
        nodes = self.nodes_per_decade
        for _ in range(ENVELOPE_MAX_REFINEMENTS + 1):
            edges, log_bound, sqrt_mass, inverse_mass, cumulative = self._envelope(w, px, delta, nodes)
            violated = False
            for _ in range(SAMPLER_MAX_ATTEMPTS):
                j = min(int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right")), len(log_bound) - 1)
                a, b = edges[j], edges[j + 1]
                u = rng.random()
                if rng.random() * (sqrt_mass[j] + inverse_mass[j]) < sqrt_mass[j]:
                    y = (math.sqrt(a) + u * (math.sqrt(b) - math.sqrt(a))) ** 2
                else:
                    y = (1.0 / math.sqrt(a) - u * (1.0 / math.sqrt(a) - 1.0 / math.sqrt(b))) ** -2
                y = min(max(y, a), b)
                log_r = float(log_kernel_ratio(w, y))
                if log_r > log_bound[j] + ENVELOPE_TOLERANCE:
                    violated = True
                    break
                if math.log(rng.random()) < log_r - log_bound[j]:
                    return y
            if not violated:
                raise NumericError("jump-size sampler exhausted its attempts", context={"w": w, "px": px, "delta": delta})
            nodes *= 2
            logger.warning("jump-size envelope violated at w=%.6g, refining to %d nodes per decade", w, nodes)
        raise NumericError(
            "jump-size envelope still violated after refinement",
            context={"w": w, "px": px, "delta": delta, "refinements": ENVELOPE_MAX_REFINEMENTS},
        )


_SAMPLER = JumpSizeSampler()


def sample_jump_size(t: float, x: float, p: float, delta: float, rng: np.random.Generator) -> float:
    return _SAMPLER.sample(t, x, p, delta, rng)


# =============================================================================
# PATHS
# =============================================================================


def simulate_path(config: LimitConfig) -> LimitPath:
    """One path of X_p on [t0, t_end] by thinning over adaptive windows.

    On a window the dominating rate is safety * max of the rate on a 17-point grid
    of the window (state moved by the window's drift). A candidate where the
    actual rate exceeds the bound discards the window, which is halved and
    simulated again from its start.
    """
    rates = rate_model(config.p, config.delta, config.compensate_small)
    generator = rng_utils.generator(config.seed)
    path = LimitPath(config=config)

    s, x = config.t0, config.x0
    window = config.max_window
    while s < config.t_end:
        s_end = min(s + window, config.t_end)
        drift = float(rates.drift(s, x))
        grid = np.linspace(s, s_end, THINNING_GRID_POINTS)
        bound = config.safety * float(np.max(rates.rate(grid, x + drift * (grid - s))))

        candidate, accepted, violated = s, None, False
        while bound > 0:
            candidate += generator.exponential(1.0 / bound)
            if candidate >= s_end:
                break
            level = float(rates.rate(candidate, x + drift * (candidate - s)))
            if level > bound:
                violated = True
                break
            if generator.random() * bound < level:
                accepted = candidate
                break

        if violated:
            window /= 2.0
            logger.warning("rate bound violated on [%.6g, %.6g], halving window to %.3g", s, s_end, window)
            if window < THINNING_MIN_WINDOW:
                raise NumericError("thinning bound keeps failing below the minimum window", context={"s": s, "x": x, "window": window})
            continue

        stop = s_end if accepted is None else accepted
        if drift > 0 and stop > s:
            path.drift_segments.append(DriftSegment(start=s, end=stop, rate=drift))
        x += drift * (stop - s)
        if accepted is not None:
            size = sample_jump_size(accepted, x, config.p, config.delta, generator)
            path.events.append(JumpEvent(s=accepted, y=size))
            x += size
        s = stop
        window = config.max_window
    return path


def _replica_path(config: LimitConfig, replica: int) -> LimitPath:
    return simulate_path(config.model_copy(update={"seed": rng_utils.substream_seed(config.seed, replica)}))


def simulate_replicas(config: LimitConfig, reps: int, workers: int = 1, first_replica: int = 0) -> list[LimitPath]:
    """Independent paths under substream seeds mix64(seed XOR replica), in replica order.

    Replicas are numbered from `first_replica`, so disjoint ranges of one master
    seed give independent path sets.
    """
    if reps < 1:
        raise ConfigurationError(f"reps must be positive, got {reps}")
    task = partial(_replica_path, config)
    replicas = range(first_replica, first_replica + reps)
    if workers <= 1:
        return [task(replica) for replica in replicas]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, replicas))


def make_config(**fields) -> LimitConfig:
    """LimitConfig from keyword fields, with validation failures as ConfigurationError."""
    try:
        return LimitConfig(**fields)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid limit configuration: {exc}") from exc


# =============================================================================
# DIAGNOSTICS
# =============================================================================


def _integrate_along_path(
    path: LimitPath,
    times: list[float],
    densities: list[Callable[[float, float], float]],
) -> dict[float, list[float]]:
    """Cumulative integrals of density(s, X(s)) ds from t0 to each of `times`.

    Between consecutive jump times and drift-segment boundaries the state is
    linear in s, so each piece is a smooth one-dimensional quadrature.
    """
    config = path.config
    requested = sorted(set(float(t) for t in times))
    if requested[0] < config.t0 or requested[-1] > config.t_end:
        raise DomainError(f"diagnostic times must lie in [{config.t0}, {config.t_end}]")

    horizon = requested[-1]
    cuts = {config.t0, *requested}
    cuts.update(event.s for event in path.events if event.s < horizon)
    for seg in path.drift_segments:
        cuts.update(edge for edge in (seg.start, seg.end) if edge < horizon)
    breaks = sorted(cuts)

    seg_starts = np.array([seg.start for seg in path.drift_segments])
    seg_ends = np.array([seg.end for seg in path.drift_segments])

    def drift_on(a: float, b: float) -> float:
        if seg_starts.size == 0:
            return 0.0
        mid = 0.5 * (a + b)
        index = int(np.searchsorted(seg_starts, mid, side="right")) - 1
        if index >= 0 and seg_ends[index] > mid:
            return path.drift_segments[index].rate
        return 0.0

    totals = [0.0] * len(densities)
    results = {config.t0: list(totals)}
    for a, b in zip(breaks[:-1], breaks[1:]):
        x_a, slope = path.value_at(a), drift_on(a, b)
        for k, density in enumerate(densities):
            piece, _ = quad_checked(
                lambda s: density(s, x_a + slope * (s - a)), a, b, epsabs=1e-12 * (b - a), what="path integral"
            )
            totals[k] += piece
        results[b] = list(totals)
    return results


def path_diagnostics(path: LimitPath, times: list[float]) -> list[PathDiagnostics]:
    """X^pre, M = X - X^pre and <M, M> at each of `times` (sorted), in one pass along the path."""
    if not times:
        return []
    rates = rate_model(path.config.p, path.config.delta, path.config.compensate_small)
    integrals = _integrate_along_path(
        path,
        times,
        [lambda s, x: float(rates.compensator_density(s, x)), lambda s, x: float(rates.qv_density(s, x))],
    )
    diagnostics = []
    for t in sorted(float(t) for t in times):
        compensated, variation = integrals[t]
        value = path.value_at(t)
        compensator = path.config.x0 + compensated
        diagnostics.append(
            PathDiagnostics(t=t, value=value, compensator=compensator, martingale=value - compensator, quadratic_variation=variation)
        )
    return diagnostics


def compensator_and_qv(path: LimitPath, t: float) -> PathDiagnostics:
    return path_diagnostics(path, [t])[0]


def integrated_rate(path: LimitPath, t: float) -> float:
    """int_{t0}^t of the jump rate along the path: the compensator of the jump count."""
    rates = rate_model(path.config.p, path.config.delta, path.config.compensate_small)
    return _integrate_along_path(path, [t], [lambda s, x: float(rates.rate(s, x))])[float(t)][0]


# =============================================================================
# STATIONARY REGIME (p = 0)
# =============================================================================


def stationary_samples(
    t_burn: float,
    t_sample: float,
    reps: int,
    seed: int,
    delta: float | None = None,
    workers: int = 1,
    first_replica: int = 0,
) -> list[float]:
    """Independent draws of Y(t_sample) = X_0(t_sample) - t_sample, started from X_0(0) = 0.

    `t_burn` is the burn-in the caller considers sufficient; t_sample must not
    precede it.
    """
    if t_sample < t_burn or t_burn < 0:
        raise ConfigurationError(f"need 0 <= t_burn <= t_sample, got t_burn={t_burn}, t_sample={t_sample}")
    config = make_config(p=0.0, t0=0.0, x0=0.0, t_end=t_sample, delta=delta, seed=seed)
    paths = simulate_replicas(config, reps, workers, first_replica)
    return [path.value_at(t_sample) - t_sample for path in paths]
