import math

import numpy as np
import pytest

from src.frozen_er.constants import LAPLACE_CONSTANT
from src.frozen_er.errors import DomainError
from src.frozen_er.special_fn import airy_scaled, log_p1_array
from src.frozen_er.stable_oracle import airy_scaled_series, levy_exponent_check, oracle_log_p1, oracle_normalization, oracle_p1


def test_levy_measure_matches_airy_normalisation():
    check = levy_exponent_check()
    assert check.consistent
    assert check.numeric == pytest.approx(LAPLACE_CONSTANT, rel=1e-8)
    # Psi(1) = k exp(-3 pi i / 4)
    assert check.characteristic_real == pytest.approx(LAPLACE_CONSTANT * math.cos(-0.75 * math.pi), rel=1e-8)
    assert check.characteristic_imag == pytest.approx(LAPLACE_CONSTANT * math.sin(-0.75 * math.pi), rel=1e-8)


def test_oracle_at_zero():
    assert oracle_p1(0.0) == pytest.approx(0.2588194038, rel=1e-7)


def test_oracle_agrees_with_airy_form_on_central_grid():
    for x in np.arange(-10.0, 10.0 + 1e-9, 0.25):
        x = float(x)
        relative = abs(math.expm1(oracle_log_p1(x) - float(log_p1_array(x))))
        assert relative <= 1e-6, x


def test_oracle_agrees_in_the_tails():
    for x in (-30.0, -20.0, -12.0, 12.0, 20.0, 30.0):
        relative = abs(math.expm1(oracle_log_p1(x) - float(log_p1_array(x))))
        assert relative <= 1e-3, x


def test_oracle_density_integrates_to_one():
    assert oracle_normalization() == pytest.approx(1.0, abs=1e-7)


def test_oracle_rejects_nonfinite():
    with pytest.raises(DomainError):
        oracle_log_p1(math.nan)


def test_airy_series_agrees_with_library():
    for z in (0.0, 0.5, 2.0, 4.5, 5.75, 6.0, 20.0, 100.0):
        series = airy_scaled_series(z)
        library = airy_scaled(z)
        assert series.ai_s == pytest.approx(library.ai_s, rel=1e-7), z
        assert series.aip_s == pytest.approx(library.aip_s, rel=1e-7), z


def test_airy_series_at_hundred_is_asymptotic():
    # two terms of the asymptotic series already fix six digits at z = 100
    zeta = 2.0 / 3.0 * 100.0**1.5
    prefactor = 1.0 / (2.0 * math.sqrt(math.pi))
    ai_two_terms = prefactor * 100.0**-0.25 * (1.0 - 5.0 / 72.0 / zeta)
    aip_two_terms = -prefactor * 100.0**0.25 * (1.0 + 7.0 / 72.0 / zeta)
    pair = airy_scaled_series(100.0)
    assert pair.ai_s == pytest.approx(ai_two_terms, rel=1e-6)
    assert pair.aip_s == pytest.approx(aip_two_terms, rel=1e-6)


def test_airy_series_rejects_negative():
    with pytest.raises(DomainError):
        airy_scaled_series(-0.5)
