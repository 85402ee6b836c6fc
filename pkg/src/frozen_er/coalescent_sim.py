"""Gillespie simulation of the finite frozen multiplicative coalescent.

Standard particles x, y merge at rate xy; a standard x freezes at rate x^2/2; a
standard x and a frozen y merge into a frozen x + y at rate pxy.
"""

import logging
import math

import numpy as np
from pydantic import ValidationError

from src.frozen_er.enums import EventKind
from src.frozen_er.errors import ConfigurationError, OrderingError
from src.frozen_er.schema.particle_system import ParticleSystem

logger = logging.getLogger(__name__)


def init_system(standard_masses: list[float], frozen_masses: list[float], p: float) -> ParticleSystem:
    try:
        return ParticleSystem(standard=list(standard_masses), frozen=list(frozen_masses), time=0.0, p=p)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid particle system: {exc}") from exc


def event_rates(system: ParticleSystem) -> dict[EventKind, float]:
    """Total rate of each event family.

    The standard-standard rate sum_{i<j} x_i x_j is ((sum x)^2 - sum x^2)/2.
    """
    sum_x = math.fsum(system.standard)
    sum_x2 = math.fsum(x * x for x in system.standard)
    return {
        EventKind.STD_STD_MERGE: max(0.5 * (sum_x * sum_x - sum_x2), 0.0) if len(system.standard) > 1 else 0.0,
        EventKind.FREEZE: 0.5 * sum_x2,
        EventKind.STD_FROZEN_MERGE: system.p * sum_x * math.fsum(system.frozen),
    }


def _pick(rng: np.random.Generator, weights: list[float]) -> int:
    cumulative = np.cumsum(weights)
    index = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
    return min(index, len(weights) - 1)


def _next_event(system: ParticleSystem, rng: np.random.Generator) -> tuple[float, EventKind]:
    """Waiting time and family of the next event; ABSORBED with an infinite wait when none can occur."""
    if system.is_absorbing():
        return math.inf, EventKind.ABSORBED
    rates = event_rates(system)
    kinds = list(rates)
    total = math.fsum(rates.values())
    wait = rng.exponential(1.0 / total)
    return wait, kinds[_pick(rng, [rates[kind] for kind in kinds])]


def _apply_event(system: ParticleSystem, kind: EventKind, rng: np.random.Generator) -> None:
    standard = system.standard
    if kind == EventKind.STD_STD_MERGE:
        # two mass-proportional draws, rejecting identical indices
        while True:
            i, j = _pick(rng, standard), _pick(rng, standard)
            if i != j:
                break
        merged = standard[i] + standard[j]
        for index in sorted((i, j), reverse=True):
            del standard[index]
        standard.append(merged)
    elif kind == EventKind.FREEZE:
        i = _pick(rng, [x * x for x in standard])
        system.frozen.append(standard.pop(i))
    elif kind == EventKind.STD_FROZEN_MERGE:
        i = _pick(rng, standard)
        j = _pick(rng, system.frozen)
        system.frozen[j] += standard.pop(i)


def gillespie_step(system: ParticleSystem, rng: np.random.Generator) -> EventKind:
    """Advance to and apply the next event. Returns ABSORBED (and changes nothing) without standard particles."""
    wait, kind = _next_event(system, rng)
    if kind == EventKind.ABSORBED:
        return kind
    system.time += wait
    _apply_event(system, kind, rng)
    return kind


def run_coalescent(
    system: ParticleSystem,
    t_end: float,
    rng: np.random.Generator,
    event_counts: dict[EventKind, int] | None = None,
) -> ParticleSystem:
    """Step until the next event would fall after t_end or the system is absorbing.

    The event crossing t_end is not applied and the clock stops at t_end; with
    t_end = inf the clock stops at absorption. Applied events are tallied into
    `event_counts` when given.
    """
    if t_end < system.time:
        raise OrderingError(f"cannot run back from time {system.time} to {t_end}")
    while True:
        wait, kind = _next_event(system, rng)
        if kind == EventKind.ABSORBED or system.time + wait > t_end:
            break
        system.time += wait
        _apply_event(system, kind, rng)
        if event_counts is not None:
            event_counts[kind] = event_counts.get(kind, 0) + 1
    if math.isfinite(t_end):
        system.time = t_end
    logger.debug("coalescent stopped at t=%.6g with %d standard, %d frozen", system.time, len(system.standard), len(system.frozen))
    return system
