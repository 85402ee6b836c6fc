import math

import numpy as np
import pytest

from src.frozen_er.errors import DomainError, NumericError
from src.frozen_er.special_fn import (
    airy_scaled,
    find_xmax,
    kernel_integrals,
    log_p1,
    log_p1_array,
    log_p1_derivative,
    log_ps,
    p1,
    p1_ratio_log,
    quad_checked,
)


def left_tail_expansion(x: float) -> float:
    # log p1 as x -> -infinity, with its first correction
    ax = abs(x)
    return -(ax**3) / 6.0 + 0.5 * math.log(ax) - 0.5 * math.log(2.0 * math.pi) + math.log1p(1.0 / (6.0 * ax**3))


def test_airy_scaled_at_zero_matches_closed_forms():
    pair = airy_scaled(0.0)
    assert pair.ai_s == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3), rel=1e-12)
    assert pair.aip_s == pytest.approx(-(3 ** (-1 / 3)) / math.gamma(1 / 3), rel=1e-12)
    assert pair.ai_s == pytest.approx(0.3550280539, rel=1e-9)
    assert pair.aip_s == pytest.approx(-0.2588194038, rel=1e-9)


def test_airy_scaled_far_right_stays_finite():
    pair = airy_scaled(100.0)
    assert pair.ai_s == pytest.approx(0.089206, rel=2e-4)
    assert pair.aip_s == pytest.approx(-0.892155, rel=2e-4)


def test_airy_scaled_rejects_negative_or_nonfinite():
    with pytest.raises(DomainError):
        airy_scaled(-1.0)
    with pytest.raises(DomainError):
        airy_scaled(math.inf)


def test_log_p1_at_zero_is_minus_airy_derivative():
    assert log_p1(0.0).log_p1 == pytest.approx(math.log(0.2588194037928068), rel=1e-10)
    assert p1(0.0) == pytest.approx(0.2588194037928068, rel=1e-10)


def test_log_p1_far_left_where_p1_underflows():
    assert log_p1(-20.0).log_p1 == pytest.approx(-1332.754, abs=1e-3)
    # exp of this underflows, the log stays usable
    assert p1(-40.0) == 0.0
    assert math.isfinite(log_p1(-40.0).log_p1)


def test_log_p1_follows_left_expansion():
    for x in np.arange(-30.0, -9.5, 1.0):
        assert abs(log_p1(float(x)).log_p1 - left_tail_expansion(float(x))) <= 1e-3


def test_log_p1_right_tail_leading_term():
    # p1(x) ~ x^{-5/2} / sqrt(2 pi)
    assert log_p1(100.0).log_p1 == pytest.approx(-12.432, abs=1e-2)


def test_log_p1_continuous_across_tail_switch():
    below = float(log_p1_array(8.0 - 1e-9))
    above = float(log_p1_array(8.0 + 1e-9))
    assert above == pytest.approx(below, abs=1e-6)


def test_log_p1_array_keeps_shape():
    values = log_p1_array(np.array([[-3.0, 0.0], [4.0, 12.0]]))
    assert values.shape == (2, 2)
    assert values[0, 1] == pytest.approx(log_p1(0.0).log_p1)


def test_log_p1_rejects_nonfinite():
    with pytest.raises(DomainError):
        log_p1(math.nan)
    with pytest.raises(DomainError):
        log_p1_array([0.0, math.inf])


def test_log_p1_derivative_matches_finite_differences():
    h = 1e-5
    for x in (-6.0, -0.5, 2.0, 7.9, 8.1, 15.0):
        numeric = (float(log_p1_array(x + h)) - float(log_p1_array(x - h))) / (2 * h)
        assert float(log_p1_derivative(x)) == pytest.approx(numeric, rel=1e-4, abs=1e-8)


def test_log_ps_at_unit_scale_is_log_p1():
    assert log_ps(1.7, 1.0) == pytest.approx(log_p1(1.7).log_p1, rel=1e-14)
    with pytest.raises(DomainError):
        log_ps(1.0, 0.0)


def test_ratio_log_cases():
    # p1(x - y) >= p1(x) for x >= 0 and small shifts
    assert p1_ratio_log(5.0, 0.5) >= 0.0
    assert p1_ratio_log(-3.0, 0.0) == 0.0
    assert p1_ratio_log(-30.0, 1.0) == pytest.approx(-465.15, abs=1e-2)


def test_ratio_log_domain_errors():
    with pytest.raises(DomainError):
        p1_ratio_log(1.0, -0.1)
    with pytest.raises(DomainError):
        p1_ratio_log(math.inf, 1.0)


def test_xmax_near_reference_and_derivative_vanishes():
    mode = find_xmax()
    assert mode.x_max == pytest.approx(-0.886, abs=1e-2)
    assert abs(float(log_p1_derivative(mode.x_max))) <= 1e-8
    assert mode.p1_at_max >= p1(mode.x_max - 0.1)
    assert mode.p1_at_max >= p1(mode.x_max + 0.1)


def test_kernel_integrals_at_ten():
    integrals = kernel_integrals(10.0)
    assert abs(10.0 * integrals.i1 - 1.0) <= 1e-2
    assert integrals.i2 == pytest.approx(5.0e-4, rel=0.2)
    assert integrals.i3 == pytest.approx(1.5e-5, rel=0.2)
    # truncation to jumps below -x_max keeps at least half of 1/x
    assert 1.0 / 20.0 <= integrals.i1_trunc <= integrals.i1


def test_kernel_integrals_small_state_branch():
    integrals = kernel_integrals(0.5)
    assert integrals.i1 > integrals.i1_trunc > 0.0
    assert integrals.i2 > 0.0 and integrals.i3 > 0.0


def test_kernel_integrals_domain_errors():
    with pytest.raises(DomainError):
        kernel_integrals(-1.0)
    with pytest.raises(DomainError):
        kernel_integrals(1.0, abs_tol=0.0)


def test_oscillatory_tail_meets_tolerance():
    # by parts: int_1^inf cos(y) y^{-5/2} dy = -sin(1) + (5/2) int_1^inf sin(y) y^{-7/2} dy
    cosine, cosine_err = quad_checked(lambda y: y**-2.5, 1.0, np.inf, epsabs=1e-12, weight="cos", wvar=1.0)
    sine, _ = quad_checked(lambda y: y**-3.5, 1.0, np.inf, epsabs=1e-12, weight="sin", wvar=1.0)
    assert cosine_err <= 1e-12
    assert cosine == pytest.approx(-math.sin(1.0) + 2.5 * sine, abs=1e-10)


def test_quad_failure_reports_worst_subinterval():
    with pytest.raises(NumericError) as excinfo:
        quad_checked(lambda y: 1.0 / y, 0.0, 1.0, epsabs=1e-12, what="divergent")
    assert "divergent" in str(excinfo.value)
    assert excinfo.value.context["worst_subinterval"][0] < 0.5
