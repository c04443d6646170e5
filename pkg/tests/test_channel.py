import math

import numpy as np
import pytest
from scipy import special, stats

from uavnet.channel import (FadingLaw, LinkBudget, gamma_ccdf_int,
                            gamma_cdf_int, mean_received_power, p_los, p_nlos,
                            sample_fading)
from uavnet.config import ENVIRONMENTS


URBAN = ENVIRONMENTS["urban"]


def test_p_los_known_values():
    assert p_los(math.radians(45.0), URBAN) == pytest.approx(0.9677, abs=1e-3)
    assert p_los(math.radians(90.0), URBAN) == pytest.approx(0.0219, abs=1e-3)


def test_p_los_monotone_decreasing_in_zenith():
    thetas = np.linspace(0.0, math.pi / 2, 200)
    vals = p_los(thetas, URBAN)
    assert np.all(np.diff(vals) < 0)


def test_p_los_complement():
    thetas = np.linspace(0.0, math.pi / 2, 50)
    assert np.allclose(p_los(thetas, URBAN) + p_nlos(thetas, URBAN), 1.0)


def test_mean_received_power_unit_link():
    b = LinkBudget(tx_power=3.0, tx_gain=1.0, rx_gain=1.0, distance=1.0,
                   alpha=4.0, eta=1.0)
    assert mean_received_power(b) == pytest.approx(3.0)


def test_mean_received_power_pathloss_and_excess():
    b1 = LinkBudget(2.0, 1.5, 1.0, 100.0, 4.0, 1.0)
    b2 = LinkBudget(2.0, 1.5, 1.0, 200.0, 4.0, 1.0)
    assert mean_received_power(b1) / mean_received_power(b2) == pytest.approx(16.0)
    b3 = LinkBudget(2.0, 1.5, 1.0, 100.0, 4.0, 100.0)
    assert mean_received_power(b1) / mean_received_power(b3) == pytest.approx(100.0)


def test_fading_law_rejects_bad_shape():
    with pytest.raises(ValueError):
        FadingLaw(m=0)
    with pytest.raises(ValueError):
        FadingLaw(m=1.5)


@pytest.mark.parametrize("m", [1, 2, 4])
def test_fading_unit_mean(m, rng):
    draws = sample_fading(FadingLaw(m), rng, size=1_000_000)
    assert draws.mean() == pytest.approx(1.0, abs=1e-2)
    assert np.all(draws >= 0)


def test_fading_variance_m2(rng):
    draws = sample_fading(FadingLaw(2), rng, size=1_000_000)
    assert draws.var() == pytest.approx(0.5, abs=2e-2)


def test_fading_m1_is_exponential(rng):
    draws = sample_fading(FadingLaw(1), rng, size=100_000)
    assert stats.kstest(draws, "expon").statistic < 0.01


def test_gamma_cdf_int_values():
    assert gamma_cdf_int(3, 0.0) == 0.0
    assert gamma_cdf_int(3, 1e9) == pytest.approx(1.0)
    assert gamma_cdf_int(1, 1.0) == pytest.approx(1 - math.exp(-1), rel=1e-12)


@pytest.mark.parametrize("m", [1, 2, 5])
def test_gamma_cdf_matches_regularized_gamma(m):
    x = np.linspace(0.01, 6.0, 40)
    assert np.allclose(gamma_cdf_int(m, x), special.gammainc(m, m * x),
                       atol=1e-13)
    assert np.allclose(gamma_cdf_int(m, x) + gamma_ccdf_int(m, x), 1.0,
                       atol=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_fading_samples_match_cdf(m, rng):
    draws = sample_fading(FadingLaw(m), rng, size=100_000)
    ks = stats.kstest(draws, lambda x: gamma_cdf_int(m, x)).statistic
    assert ks < 0.01
