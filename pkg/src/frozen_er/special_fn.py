"""Stable density p1 of index 3/2 (spectrally positive) and its kernel integrals.

p1(x) = -exp(x^3/12)/2 * (x Ai(x^2/4) + 2 Ai'(x^2/4)) is evaluated through
exponentially scaled Airy values, so log p1 stays finite far into the left tail
where p1 itself underflows. Ratios p1(w - y)/p1(w) are always formed in log
space.
"""

import logging
import math
from collections.abc import Callable
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate, optimize, special

from src.frozen_er.constants import (
    LAPLACE_CONSTANT,
    QUAD_EPSREL,
    QUAD_LIMIT,
    SCAN_POINTS,
    SQRT_2PI,
    TAIL_CUTOFF_NATS,
    TAIL_SERIES_TERMS,
    X_SWITCH_POS,
    XMAX_BRACKET,
    XMAX_TOL,
)
from src.frozen_er.errors import DomainError, NumericError
from src.frozen_er.schema.special import KernelIntegrals, LogDensityValue, ScaledAiryPair, XMax

logger = logging.getLogger(__name__)


# =============================================================================
# AIRY
# =============================================================================


def airy_scaled(z: float) -> ScaledAiryPair:
    """Ai(z) and Ai'(z) times exp((2/3) z^{3/2}) for z >= 0."""
    if not math.isfinite(z) or z < 0:
        raise DomainError(f"scaled Airy pair needs a finite z >= 0, got {z}")
    ai_s, aip_s, _, _ = special.airye(z)
    return ScaledAiryPair(z=z, ai_s=float(ai_s), aip_s=float(aip_s))


# =============================================================================
# TAIL SERIES (x -> +infinity)
# =============================================================================


def _tail_series() -> tuple[np.ndarray, np.ndarray]:
    """Coefficients c_n and exponents of p1(x) ~ sum_n c_n x^{-3n/2 - 1}, n odd.

    c_n = k^n / (n! Gamma(-3n/2)) from expanding exp(k s^{3/2}); even n vanish
    because Gamma has poles at the non-positive integers.
    """
    orders = np.arange(1, 2 * TAIL_SERIES_TERMS, 2, dtype=float)
    coefficients = LAPLACE_CONSTANT**orders / special.factorial(orders) / special.gamma(-1.5 * orders)
    exponents = -1.5 * orders - 1.0
    return coefficients, exponents


TAIL_COEFFICIENTS, TAIL_EXPONENTS = _tail_series()


def _log_p1_tail(x: np.ndarray) -> np.ndarray:
    # factor out the leading x^{-5/2}
    relative = x[:, None] ** (TAIL_EXPONENTS - TAIL_EXPONENTS[0])[None, :]
    return TAIL_EXPONENTS[0] * np.log(x) + np.log(relative @ TAIL_COEFFICIENTS)


def _dlog_p1_tail(x: np.ndarray) -> np.ndarray:
    relative = x[:, None] ** (TAIL_EXPONENTS - TAIL_EXPONENTS[0])[None, :]
    weights = relative * TAIL_COEFFICIENTS[None, :]
    return (weights @ TAIL_EXPONENTS) / (x * weights.sum(axis=1))


# =============================================================================
# p1 IN LOG SPACE
# =============================================================================


def _airy_terms(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ai_s, aip_s, _, _ = special.airye(x * x / 4.0)
    return ai_s, aip_s


def _as_finite_array(x: ArrayLike, name: str) -> np.ndarray:
    values = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError(f"{name} must be finite")
    return values


def log_p1_array(x: ArrayLike) -> np.ndarray:
    """Vectorised log p1(x)."""
    values = _as_finite_array(x, "x")
    flat = np.atleast_1d(values).ravel()
    out = np.empty_like(flat)

    near = flat <= X_SWITCH_POS
    if np.any(near):
        xs = flat[near]
        ai_s, aip_s = _airy_terms(xs)
        with np.errstate(divide="ignore"):
            out[near] = -np.maximum(-xs, 0.0) ** 3 / 6.0 + np.log(-0.5 * (xs * ai_s + 2.0 * aip_s))
    if not np.all(near):
        out[~near] = _log_p1_tail(flat[~near])
    return out.reshape(values.shape)


def log_p1(x: float) -> LogDensityValue:
    return LogDensityValue(x=x, log_p1=float(log_p1_array(x)))


def p1(x: float) -> float:
    return math.exp(float(log_p1_array(x)))


def log_p1_derivative(x: ArrayLike) -> np.ndarray:
    """p1'(x) / p1(x), from the derivative formula of the Airy form."""
    values = _as_finite_array(x, "x")
    flat = np.atleast_1d(values).ravel()
    out = np.empty_like(flat)
    near = flat <= X_SWITCH_POS
    if np.any(near):
        xs = flat[near]
        ai_s, aip_s = _airy_terms(xs)
        out[near] = ((1.0 + xs**3 / 2.0) * ai_s + xs**2 * aip_s) / (xs * ai_s + 2.0 * aip_s)
    if not np.all(near):
        out[~near] = _dlog_p1_tail(flat[~near])
    return out.reshape(values.shape)


def log_ps(x: float, s: float) -> float:
    """log p_s(x) through the scaling identity p_s(x) = s^{-2/3} p1(x s^{-2/3})."""
    if not s > 0:
        raise DomainError(f"scale s must be positive, got {s}")
    scale = s ** (-2.0 / 3.0)
    return math.log(scale) + float(log_p1_array(x * scale))


def log_kernel_ratio(w: ArrayLike, y: ArrayLike) -> np.ndarray:
    """log p1(w - y) - log p1(w), broadcasting over w and y."""
    w_arr = np.asarray(w, dtype=float)
    y_arr = np.asarray(y, dtype=float)
    return log_p1_array(w_arr - y_arr) - log_p1_array(w_arr)


def p1_ratio_log(x: float, y: float) -> float:
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError(f"ratio arguments must be finite, got x={x}, y={y}")
    if y < 0:
        raise DomainError(f"ratio shift y must be nonnegative, got {y}")
    if y == 0:
        return 0.0
    return float(log_kernel_ratio(x, y))


# =============================================================================
# ARGMAX
# =============================================================================


def _derivative_numerator(x: float) -> float:
    # sign(p1'(x)) = -sign((1 + x^3/2) Ai + x^2 Ai') at z = x^2/4
    ai_s, aip_s = _airy_terms(np.array([x]))
    return float((1.0 + x**3 / 2.0) * ai_s[0] + x * x * aip_s[0])


@lru_cache(maxsize=1)
def find_xmax() -> XMax:
    """Mode of p1: golden-section search on the unimodal bracket, then a root of p1'."""
    lo, hi = XMAX_BRACKET
    mid = lo + (hi - lo) * 0.5
    result = optimize.minimize_scalar(
        lambda x: -float(log_p1_array(x)),
        bracket=(lo, mid, hi),
        method="golden",
        options={"xtol": XMAX_TOL},
    )
    if not result.success or not lo <= result.x <= hi:
        raise NumericError(
            "golden-section search for the mode of p1 did not converge",
            context={"bracket": (lo, mid, hi), "last_x": float(result.x), "iterations": int(result.nit)},
        )

    # Polish on the derivative, whose root is the mode
    width = 1e-3
    a, b = float(result.x) - width, float(result.x) + width
    if _derivative_numerator(a) * _derivative_numerator(b) > 0:
        raise NumericError("derivative of p1 does not change sign around the golden-section estimate", context={"bracket": (a, b)})
    x_max = optimize.brentq(_derivative_numerator, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    logger.debug("mode of p1 at %.12f", x_max)
    return XMax(x_max=x_max, p1_at_max=p1(x_max))


# =============================================================================
# QUADRATURE HELPERS
# =============================================================================


def quad_checked(
    func: Callable[[float], float],
    a: float,
    b: float,
    *,
    epsabs: float,
    epsrel: float = QUAD_EPSREL,
    points: list[float] | None = None,
    limit: int = QUAD_LIMIT,
    weight: str | None = None,
    wvar: float | None = None,
    what: str = "integral",
) -> tuple[float, float]:
    """scipy quad that raises NumericError (with the worst subinterval) instead of warning.

    A warning is tolerated when the error estimate still meets the requested
    tolerance, max(epsabs, epsrel * |value|).
    """
    options: dict = {"epsabs": epsabs, "epsrel": epsrel, "limit": limit, "full_output": 1}
    if weight is not None:
        options.update(weight=weight, wvar=wvar, maxp1=100)
    else:
        inner = [pt for pt in (points or []) if a < pt < b]
        if inner:
            options["points"] = inner
    result = integrate.quad(func, a, b, **options)
    value, abserr, info = result[0], result[1], result[2]
    if len(result) > 3 and abserr <= max(epsabs, epsrel * abs(value)):
        logger.debug("accepting %s with abserr %.3g despite: %s", what, abserr, result[3])
    elif len(result) > 3:
        context: dict = {"what": what, "interval": (a, b), "abserr": abserr}
        if "alist" in info and info.get("last", 0) > 0:
            last = info["last"]
            worst = int(np.argmax(info["elist"][:last]))
            context["worst_subinterval"] = (float(info["alist"][worst]), float(info["blist"][worst]))
        raise NumericError(f"quadrature failed for {what}: {result[3]}", context=context)
    return float(value), float(abserr)


def tail_cutoff(
    log_f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    nats: float = TAIL_CUTOFF_NATS,
    max_doublings: int = 60,
) -> tuple[float, float, float]:
    """Point past the maximum of log_f on [lo, hi] where it has fallen `nats` below it.

    The scan range is doubled while log_f at the right end is still within `nats`
    of the maximum. Returns (cutoff, argmax, max).
    """
    for _ in range(max_doublings):
        grid = np.linspace(lo, hi, SCAN_POINTS)
        with np.errstate(all="ignore"):
            values = np.nan_to_num(np.asarray(log_f(grid), dtype=float), nan=-np.inf)
        peak = int(np.argmax(values))
        top = values[peak]
        if not np.isfinite(top):
            raise NumericError("log-integrand is not finite anywhere on the scan", context={"interval": (lo, hi)})
        below = np.nonzero(values[peak:] <= top - nats)[0]
        if below.size:
            return float(grid[peak + below[0]]), float(grid[peak]), float(top)
        hi = lo + 2.0 * (hi - lo)
    raise NumericError("log-integrand does not decay", context={"interval": (lo, hi), "nats": nats})


# =============================================================================
# KERNEL INTEGRALS I1, I2, I3, I1^(x_max)
# =============================================================================


def _moment_integral(x: float, k: int, y_upper: float | None, epsabs: float) -> tuple[float, float]:
    """M_k = int_0^{y_upper} y^{k-1/2} p1(-x-y)/p1(-x) dy / sqrt(2 pi) at state x >= 0."""
    w = -x
    if x >= 1.0:
        # u = x sqrt(y): Gaussian-like peak of width ~1 in u
        def log_integrand(u: np.ndarray) -> np.ndarray:
            y = (u / x) ** 2
            with np.errstate(divide="ignore"):
                power = 2 * k * np.log(u) if k else 0.0
            return math.log(2.0 / x ** (2 * k + 1)) + power + log_kernel_ratio(w, y)

        def integrand(u: float) -> float:
            if u <= 0 and k > 0:
                return 0.0
            return math.exp(float(log_integrand(np.array([u]))[0]))

        u_upper = x * math.sqrt(y_upper) if y_upper is not None else tail_cutoff(log_integrand, 0.0, 20.0)[0]
        value, err = quad_checked(integrand, 0.0, u_upper, epsabs=epsabs, what=f"M_{k}({x})")
        return value / SQRT_2PI, err / SQRT_2PI

    def log_integrand_y(y: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return (k - 0.5) * np.log(y) + log_kernel_ratio(w, y)

    def integrand_y(y: float) -> float:
        if y <= 0:
            return 0.0
        return math.exp(float(log_integrand_y(np.array([y]))[0]))

    if y_upper is None:
        y_upper = max(tail_cutoff(log_integrand_y, 1e-12, 20.0)[0], 1.0)
    split = min(1.0, y_upper)
    value, err = quad_checked(integrand_y, 0.0, split, epsabs=epsabs, what=f"M_{k}({x}) on [0, 1]")
    if y_upper > split:
        tail, tail_err = quad_checked(integrand_y, split, y_upper, epsabs=epsabs, what=f"M_{k}({x}) tail")
        value, err = value + tail, err + tail_err
    return value / SQRT_2PI, err / SQRT_2PI


def kernel_integrals(x: float, abs_tol: float = 1e-12) -> KernelIntegrals:
    """I1(x), I2(x), I3(x) and I1^(x_max)(x) by adaptive quadrature.

    I1 = M_0, I2 = M_1 / 2, I3 = M_2 / 2 and I1^(x_max) = M_0 restricted to
    jumps below -x_max, where M_k = int y^{k-1/2} p1(-x-y)/p1(-x) dy/sqrt(2 pi).
    """
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"kernel integrals need a finite x >= 0, got {x}")
    if not abs_tol > 0:
        raise DomainError(f"abs_tol must be positive, got {abs_tol}")

    epsabs = abs_tol / 4.0
    i1, e1 = _moment_integral(x, 0, None, epsabs)
    m1, e2 = _moment_integral(x, 1, None, epsabs)
    m2, e3 = _moment_integral(x, 2, None, epsabs)
    i1_trunc, e4 = _moment_integral(x, 0, -find_xmax().x_max, epsabs)
    return KernelIntegrals(
        x=x,
        i1=i1,
        i2=0.5 * m1,
        i3=0.5 * m2,
        i1_trunc=min(i1_trunc, i1),
        abs_tol=e1 + 0.5 * e2 + 0.5 * e3 + e4,
    )
