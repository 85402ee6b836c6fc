"""Generator of Y(t) = X_0(t) - t and a numerical Foster-Lyapunov drift check.

    A f(x) = -f'(x) + int_0^inf (f(x + y) - f(x)) p1(-x - y)/p1(-x) dy / (2 sqrt(2 pi y))

V(x) = exp(alpha x^3) for x >= 0 and exp(beta |x|^3) for x < 0 overflows long
before the grid edges, so the check works with A V / V, where the jump term only
needs V(x + y)/V(x) = exp(log V(x + y) - log V(x)).
"""

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np
from numpy.typing import ArrayLike

from src.frozen_er.constants import ALPHA_UPPER, BETA_UPPER, SCAN_POINTS, SQRT_2PI
from src.frozen_er.errors import DomainError, NumericError
from src.frozen_er.schema.limit_path import LyapunovReport, LyapunovVerdict
from src.frozen_er.special_fn import log_kernel_ratio, quad_checked, tail_cutoff

logger = logging.getLogger(__name__)

# Signed jump gain h(y) as (log|h|, sign h)
GainFunction = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def _jump_integral(x: float, gain: GainFunction) -> float:
    """int_0^inf h(y) p1(-x-y)/p1(-x) dy / (2 sqrt(2 pi y)) in u = s sqrt(y), s = max(x, 1)."""
    s = max(x, 1.0)

    def log_abs(u: np.ndarray) -> np.ndarray:
        y = (np.asarray(u, dtype=float) / s) ** 2
        log_h, _ = gain(y)
        return log_h + log_kernel_ratio(-x, y)

    hi = s * math.sqrt(max(-x, 0.0) + 10.0)
    with np.errstate(all="ignore"):
        scan = np.nan_to_num(log_abs(np.linspace(0.0, hi, SCAN_POINTS)), nan=-np.inf)
    if not np.any(np.isfinite(scan)):
        return 0.0  # h vanishes identically

    try:
        cutoff, u_peak, top = tail_cutoff(log_abs, 0.0, hi)
    except NumericError as exc:
        raise DomainError(f"generator integral diverges at x={x}: {exc}") from exc

    def integrand(u: float) -> float:
        y = (u / s) ** 2
        with np.errstate(all="ignore"):
            log_h, sign = gain(np.array([y]))
            value = sign[0] * math.exp(float(log_h[0] + log_kernel_ratio(-x, y)) - top)
        return value if math.isfinite(value) else 0.0

    value, _ = quad_checked(integrand, 0.0, cutoff, epsabs=1e-13, points=[u_peak], what=f"generator jump term at x={x}")
    return value * math.exp(top) / (s * SQRT_2PI)


def generator_apply_p0(f: Callable[[float], float], df: Callable[[float], float], x: float) -> float:
    """A f(x) for the p = 0 generator, f supplied with its derivative."""
    if not math.isfinite(x):
        raise DomainError(f"generator needs a finite state, got {x}")
    f_x = f(x)

    def gain(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        h = np.array([f(x + v) - f_x for v in y], dtype=float)
        if not np.all(np.isfinite(h)):
            raise DomainError(f"f overflows on the jump range from x={x}; use lyapunov_drift_ratio for V")
        with np.errstate(divide="ignore"):
            return np.log(np.abs(h)), np.sign(h)

    return -df(x) + _jump_integral(x, gain)


# =============================================================================
# LYAPUNOV FUNCTION
# =============================================================================


def check_exponents(alpha: float, beta: float) -> None:
    if not 0 < alpha < ALPHA_UPPER:
        raise DomainError(f"alpha must lie in (0, 1/6) for the jump integral to converge, got {alpha}")
    beta_cap = min(BETA_UPPER, alpha)
    if not 0 < beta < beta_cap:
        raise DomainError(f"beta must lie in (0, {beta_cap:.6g}) = (0, min(p1(0)/9, alpha)), got {beta}")


def log_v(alpha: float, beta: float, x: ArrayLike) -> np.ndarray:
    x_arr = np.asarray(x, dtype=float)
    return np.where(x_arr >= 0, alpha * x_arr**3, beta * np.abs(x_arr) ** 3)


def lyapunov_drift_ratio(alpha: float, beta: float, x: float) -> float:
    """A V(x) / V(x), finite wherever the integral converges."""
    check_exponents(alpha, beta)
    log_v_x = float(log_v(alpha, beta, x))

    def gain(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = log_v(alpha, beta, x + y) - log_v_x
        with np.errstate(all="ignore"):
            # log|expm1(d)| without overflow for large d
            log_h = np.where(d > 0, d + np.log1p(-np.exp(-d)), np.log(-np.expm1(d)))
        return log_h, np.sign(d)

    minus_dlog_v = -3.0 * alpha * x * x if x >= 0 else 3.0 * beta * x * x
    return minus_dlog_v + _jump_integral(x, gain)


def _drift_ratios(alpha: float, beta: float, grid: Sequence[float], workers: int) -> list[float]:
    task = partial(lyapunov_drift_ratio, alpha, beta)
    if workers <= 1:
        return [task(x) for x in grid]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, grid))


def _report(alpha: float, beta: float, a: float, B: float, grid: Sequence[float], ratios: Sequence[float]) -> LyapunovReport:
    delta_exp = (beta / alpha) ** (1.0 / 3.0)
    verdicts: list[LyapunovVerdict] = []
    violations: list[float] = []
    b = 0.0
    for x, ratio in zip(grid, ratios):
        lv = float(log_v(alpha, beta, x))
        generator_value = ratio * math.exp(lv) if lv < 700.0 else None
        inside = -B / delta_exp <= x <= B
        if inside:
            excess = (ratio + a) * math.exp(lv) if lv < 700.0 else math.inf
            b = max(b, excess)
            holds = math.isfinite(excess)
        else:
            holds = ratio <= -a
            if not holds:
                violations.append(x)
        verdicts.append(LyapunovVerdict(x=x, log_v=lv, drift_ratio=ratio, generator_value=generator_value, inside=inside, holds=holds))
    return LyapunovReport(alpha=alpha, beta=beta, delta_exp=delta_exp, B=B, a=a, b=b, verdicts=verdicts, violations=violations)


def lyapunov_check(alpha: float, beta: float, a: float, B: float, grid: Sequence[float], workers: int = 1) -> LyapunovReport:
    """Evaluate A V on `grid` against A V <= -a V + b 1_C with C = [-B/delta, B], delta = (beta/alpha)^{1/3}.

    b is the smallest constant that covers C; grid points outside C where
    A V > -a V are reported as violations.
    """
    check_exponents(alpha, beta)
    if not (a > 0 and B > 0):
        raise DomainError(f"a and B must be positive, got a={a}, B={B}")
    grid = [float(x) for x in grid]
    report = _report(alpha, beta, a, B, grid, _drift_ratios(alpha, beta, grid, workers))
    logger.info("Lyapunov check alpha=%g beta=%g a=%g B=%g: %d violations, b=%.6g", alpha, beta, a, B, len(report.violations), report.b)
    return report


def lyapunov_threshold(
    alpha: float,
    beta: float,
    a: float,
    grid: Sequence[float],
    candidates: Sequence[float],
    workers: int = 1,
) -> LyapunovReport | None:
    """Report for the smallest B among `candidates` with no violation, or None."""
    check_exponents(alpha, beta)
    grid = [float(x) for x in grid]
    ratios = _drift_ratios(alpha, beta, grid, workers)
    for B in sorted(candidates):
        report = _report(alpha, beta, a, B, grid, ratios)
        if report.holds:
            return report
    return None
