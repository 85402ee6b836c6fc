"""Kernel moments M_k(w; a, b) = int_a^b y^{k-1/2} p1(w-y)/p1(w) dy / sqrt(2 pi).

Every rate the limit process needs is a combination of these moments at the
recentred state w = t - x:

    jump rate      1/2 [M_0 + 2px M_{-1}]   over [delta, inf)
    mean jump      1/2 [M_1 + 2px M_0]      over [delta, inf)
    drift          1/2 [M_1 + 2px M_0]      over [0, delta)
    QV density     1/2 [M_2 + 2px M_1]      over [delta, inf)

Moments are integrated in t = ln y with scipy's vectorised quad_vec, many w at
once, and tabulated as cubic splines of log M_k.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate
from scipy.interpolate import CubicSpline

from src.frozen_er.constants import (
    LOG_Y_FLOOR,
    QUAD_EPSREL,
    QUAD_LIMIT,
    SCAN_POINTS,
    SQRT_2PI,
    TABLE_CHUNK,
    TABLE_W_MAX,
    TABLE_W_MIN,
    TABLE_W_STEP,
    TAIL_CUTOFF_NATS,
)
from src.frozen_er.errors import DomainError, NumericError
from src.frozen_er.special_fn import log_kernel_ratio

logger = logging.getLogger(__name__)

_PIECES = 4  # integration pieces per node: far left, left of peak, right of peak, far right


def _log_integrand(w: np.ndarray, k: float, t: np.ndarray) -> np.ndarray:
    # y^{k-1/2} R dy = y^{k+1/2} R dt
    return (k + 0.5) * t + log_kernel_ratio(w, np.exp(t))


def _integration_knots(w: np.ndarray, k: float, lower: float, upper: float | None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-node knots in ln y bracketing the peak, the log-integrand maximum and a scale.

    The scan locates the peak to within one scan step; knots one step either side
    of it keep the adaptive rule from stepping over a narrow peak.
    """
    t_a = np.full(w.shape, math.log(lower) if lower > 0 else LOG_Y_FLOOR)
    if upper is not None:
        t_b = np.full(w.shape, math.log(upper))
    else:
        t_b = np.log(np.maximum(w, 0.0) + TAIL_CUTOFF_NATS)

    frac = np.linspace(0.0, 1.0, SCAN_POINTS)
    scan_t = t_a[:, None] + frac[None, :] * (t_b - t_a)[:, None]
    with np.errstate(all="ignore"):
        scan = np.nan_to_num(_log_integrand(w[:, None], k, scan_t), nan=-np.inf)
    peak = np.argmax(scan, axis=1)
    rows = np.arange(w.size)
    top = scan[rows, peak]
    t_peak = scan_t[rows, peak]
    step = (t_b - t_a) / (SCAN_POINTS - 1)

    if upper is None:
        t_hi = t_b.copy()
        for row in range(w.size):
            below = np.nonzero(scan[row, peak[row] :] <= top[row] - TAIL_CUTOFF_NATS)[0]
            if below.size:
                t_hi[row] = scan_t[row, peak[row] + below[0]]
    else:
        t_hi = t_b
    if lower > 0:
        t_lo = t_a
    else:
        # left of the scan the log-integrand is (k + 1/2) t to within O(y)
        t_lo = np.minimum(np.maximum(t_a, (top - TAIL_CUTOFF_NATS - 2.0) / (k + 0.5)), t_peak)

    knots = np.stack(
        [
            t_lo,
            np.clip(t_peak - step, t_lo, t_hi),
            np.clip(t_peak, t_lo, t_hi),
            np.clip(t_peak + step, t_lo, t_hi),
            t_hi,
        ],
        axis=1,
    )
    inside = (scan_t >= t_lo[:, None]) & (scan_t <= t_hi[:, None])
    scale = integrate.trapezoid(np.where(inside, np.exp(scan - top[:, None]), 0.0), scan_t, axis=1)
    scale = np.maximum(scale, step)
    return knots, top, scale


def _log_moments_chunk(w: np.ndarray, k: float, lower: float, upper: float | None) -> np.ndarray:
    knots, top, scale = _integration_knots(w, k, lower, upper)
    widths = np.diff(knots, axis=1)

    def integrand(v: float) -> np.ndarray:
        piece = min(int(v), _PIECES - 1)
        t = knots[:, piece] + (v - piece) * widths[:, piece]
        with np.errstate(all="ignore"):
            values = np.exp(_log_integrand(w, k, t) - top) * widths[:, piece] / scale
        return np.nan_to_num(values, nan=0.0)

    result, error, info = integrate.quad_vec(
        integrand,
        0.0,
        float(_PIECES),
        epsabs=1e-13,
        epsrel=QUAD_EPSREL,
        norm="max",
        limit=QUAD_LIMIT * 4,
        points=list(range(1, _PIECES)),
        full_output=True,
    )
    if not info.success:
        raise NumericError(
            f"vectorised moment quadrature failed: {info.message}",
            context={"k": k, "lower": lower, "upper": upper, "w_range": (float(w.min()), float(w.max())), "error": float(error)},
        )
    if np.any(result <= 0):
        bad = float(w[np.argmin(result)])
        raise NumericError("moment integral is not positive", context={"k": k, "w": bad})
    return np.log(result) + np.log(scale) + top - math.log(SQRT_2PI)


def log_kernel_moments(w: ArrayLike, k: float, lower: float = 0.0, upper: float | None = None) -> np.ndarray:
    """log M_k(w; lower, upper) for every entry of w. `upper=None` means infinity."""
    w_arr = np.atleast_1d(np.asarray(w, dtype=float))
    if not np.all(np.isfinite(w_arr)):
        raise DomainError("moment states must be finite")
    if lower < 0 or (upper is not None and upper <= lower):
        raise DomainError(f"invalid moment range [{lower}, {upper})")
    if lower == 0 and k + 0.5 <= 0:
        raise DomainError(f"M_{k} diverges at y = 0; a positive lower limit is required")

    out = np.empty_like(w_arr)
    for start in range(0, w_arr.size, TABLE_CHUNK):
        chunk = slice(start, start + TABLE_CHUNK)
        out[chunk] = _log_moments_chunk(w_arr[chunk], k, lower, upper)
    return out


def kernel_moments(w: ArrayLike, k: float, lower: float = 0.0, upper: float | None = None) -> np.ndarray:
    return np.exp(log_kernel_moments(w, k, lower, upper))


class MomentTable:
    """Cubic spline of log M_k(.; lower, upper) on [TABLE_W_MIN, TABLE_W_MAX].

    States off the table are evaluated directly.
    """

    def __init__(self, k: float, lower: float, upper: float | None):
        self.k = k
        self.lower = lower
        self.upper = upper
        count = int(round((TABLE_W_MAX - TABLE_W_MIN) / TABLE_W_STEP)) + 1
        self.w_grid = np.linspace(TABLE_W_MIN, TABLE_W_MAX, count)
        logger.debug("tabulating M_%s on [%s, %s) over %d nodes", k, lower, upper, count)
        self._spline = CubicSpline(self.w_grid, log_kernel_moments(self.w_grid, k, lower, upper))

    def __call__(self, w: ArrayLike) -> np.ndarray:
        w_arr = np.asarray(w, dtype=float)
        flat = np.atleast_1d(w_arr).ravel()
        inside = (flat >= TABLE_W_MIN) & (flat <= TABLE_W_MAX)
        out = np.empty_like(flat)
        out[inside] = np.exp(self._spline(flat[inside]))
        if not np.all(inside):
            out[~inside] = kernel_moments(flat[~inside], self.k, self.lower, self.upper)
        return out.reshape(w_arr.shape)


@lru_cache(maxsize=32)
def moment_table(k: float, lower: float, upper: float | None) -> MomentTable:
    return MomentTable(k, lower, upper)
