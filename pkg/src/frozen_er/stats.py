"""Statistics behind the experiment verdicts."""

import math
from collections.abc import Sequence

import numpy as np
from scipy import stats

from src.frozen_er.constants import TAIL_FIT_MIN_POINTS, TAIL_FIT_MIN_SAMPLES
from src.frozen_er.errors import ConfigurationError, StatisticsError


def ks_statistic(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|."""
    if len(a) == 0 or len(b) == 0:
        raise ConfigurationError("KS distance needs two nonempty samples")
    return float(stats.ks_2samp(np.asarray(a, dtype=float), np.asarray(b, dtype=float)).statistic)


def ks_one_sample(samples: Sequence[float], cdf) -> float:
    if len(samples) == 0:
        raise ConfigurationError("KS distance needs a nonempty sample")
    return float(stats.kstest(np.asarray(samples, dtype=float), cdf).statistic)


def tail_cubic_fit(samples: Sequence[float], quantile_range: tuple[float, float] = (0.90, 0.995)) -> float:
    """Slope of log(-log S(t)) against log t over a right-tail quantile window.

    S(t) = exp(-c t^k) gives slope k. The empirical survival at the i-th order
    statistic (0-based, of N) is taken as (N - i)/(N + 1) so it never reaches 0.
    """
    lo, hi = quantile_range
    if not 0.5 < lo < hi < 0.999:
        raise ConfigurationError(f"quantile window must lie inside (0.5, 0.999), got {quantile_range}")
    if len(samples) < TAIL_FIT_MIN_SAMPLES:
        raise StatisticsError(f"tail fit needs at least {TAIL_FIT_MIN_SAMPLES} samples, got {len(samples)}")

    ordered = np.sort(np.asarray(samples, dtype=float))
    count = ordered.size
    index = np.arange(count)
    survival = (count - index) / (count + 1.0)
    window = (index >= lo * count) & (index <= hi * count) & (ordered > 0)
    if np.count_nonzero(window) < TAIL_FIT_MIN_POINTS:
        raise StatisticsError(f"only {np.count_nonzero(window)} usable tail points in the window {quantile_range}")
    fit = stats.linregress(np.log(ordered[window]), np.log(-np.log(survival[window])))
    return float(fit.slope)


def first_event_chi2(counts: Sequence[int], probabilities: Sequence[float]) -> tuple[float, float]:
    """Chi-square goodness of fit of category counts to analytic probabilities.

    Returns (statistic, p-value). A count in a zero-probability category gives
    (inf, 0.0).
    """
    observed = np.asarray(counts, dtype=float)
    expected = np.asarray(probabilities, dtype=float)
    if observed.shape != expected.shape or observed.size == 0:
        raise ConfigurationError("counts and probabilities must be nonempty and of equal length")
    if np.any(expected < 0) or not expected.sum() > 0:
        raise ConfigurationError(f"invalid category probabilities {list(probabilities)}")
    possible = expected > 0
    if np.any(observed[~possible] > 0):
        return math.inf, 0.0
    observed, expected = observed[possible], expected[possible]
    expected = expected / expected.sum() * observed.sum()
    if observed.size == 1:
        return 0.0, 1.0
    result = stats.chisquare(observed, expected)
    return float(result.statistic), float(result.pvalue)


def mean_and_standard_error(values: Sequence[float]) -> tuple[float, float]:
    data = np.asarray(values, dtype=float)
    if data.size < 2:
        raise StatisticsError("mean and standard error need at least two values")
    return float(data.mean()), float(data.std(ddof=1) / math.sqrt(data.size))


def variance_and_standard_error(values: Sequence[float]) -> tuple[float, float]:
    """Sample variance and its standard error sqrt((m4 - s^4 (n-3)/(n-1)) / n)."""
    data = np.asarray(values, dtype=float)
    count = data.size
    if count < 4:
        raise StatisticsError("variance standard error needs at least four values")
    variance = float(data.var(ddof=1))
    fourth = float(np.mean((data - data.mean()) ** 4))
    return variance, math.sqrt(max(fourth - variance**2 * (count - 3) / (count - 1), 0.0) / count)
