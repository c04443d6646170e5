import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uavnet.ratiodist import (RatioCdfParams, af_end_to_end_sinr, cdf_t1,
                              cdf_t1_t3_joint, cdf_t2, df_end_to_end_sinr,
                              evaluate_terms, joint_exceedance_term_groups,
                              rayleigh_cdfs, t1_exceedance_terms)

P_REF = RatioCdfParams(a=1.0, b=4.0, i_plus_n=2.0, g=1.0, m=1)


def test_params_validation():
    with pytest.raises(ValueError):
        RatioCdfParams(a=-1.0, b=1.0, i_plus_n=0.0)
    with pytest.raises(ValueError):
        RatioCdfParams(a=0.0, b=0.0, i_plus_n=0.0)
    with pytest.raises(ValueError):
        RatioCdfParams(a=1.0, b=1.0, i_plus_n=0.0, m=0)


def test_cdf_t1_reference_value():
    # exponential case, a=1 b=4 I=2 tau=1: 1 - e^{-2}/5
    p = RatioCdfParams(1.0, 4.0, 2.0, 0.0, 1)
    assert cdf_t1(1.0, p) == pytest.approx(1 - math.exp(-2) / 5, rel=1e-12)
    assert cdf_t1(1.0, p) == pytest.approx(0.97293, abs=3e-4)


def test_cdfs_zero_and_infinity():
    for p in (P_REF, RatioCdfParams(2.0, 0.5, 0.0, 0.3, 3)):
        for f in (cdf_t1, cdf_t2, cdf_t1_t3_joint):
            assert f(0.0, p) == 0.0
            assert f(1e9, p) > 1 - 1e-6


def test_cdf_t2_zero_below_one_without_interference():
    p = RatioCdfParams(1.0, 3.0, 0.0, 0.0, 2)
    for tau in (0.1, 0.5, 0.999):
        assert cdf_t2(tau, p) == 0.0
    assert cdf_t2(1.5, p) > 0.0


def test_joint_degenerations():
    for m in (1, 2, 3):
        for tau in (0.1, 0.7, 1.0, 2.5):
            p0 = RatioCdfParams(1.0, 4.0, 2.0, 0.0, m)
            assert cdf_t1_t3_joint(tau, p0) == pytest.approx(cdf_t2(tau, p0),
                                                             abs=1e-12)
            pg = RatioCdfParams(1.0, 4.0, 2.0, 1e12, m)
            assert cdf_t1_t3_joint(tau, pg) == pytest.approx(cdf_t1(tau, pg),
                                                             abs=1e-9)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_joint_regime_seams(m):
    g = 0.6
    p = RatioCdfParams(1.3, 2.7, 0.8, g, m)
    for seam in (1 / (1 + g), 1 / g):
        lo = cdf_t1_t3_joint(seam * (1 - 1e-9), p)
        hi = cdf_t1_t3_joint(seam * (1 + 1e-9), p)
        assert abs(hi - lo) < 1e-7


def test_rayleigh_matches_general_lemmas(rng):
    worst = 0.0
    for _ in range(1000):
        p = RatioCdfParams(a=float(rng.uniform(0.05, 5.0)),
                           b=float(rng.uniform(0.05, 5.0)),
                           i_plus_n=float(rng.uniform(0.0, 5.0)),
                           g=float(rng.uniform(0.0, 3.0)), m=1)
        tau = float(rng.uniform(0.0, 4.0))
        r1, r2, r13 = rayleigh_cdfs(tau, p)
        worst = max(worst,
                    abs(cdf_t1(tau, p) - r1),
                    abs(cdf_t2(tau, p) - r2),
                    abs(cdf_t1_t3_joint(tau, p) - r13))
    assert worst < 1e-10


def test_rayleigh_at_zero():
    assert rayleigh_cdfs(0.0, P_REF) == (0.0, 0.0, 0.0)


def test_cdfs_match_sampling_m2(rng):
    m = 2
    a, b, big, g = 1.0, 4.0, 2.0, 1.0
    n = 400_000
    x = rng.gamma(m, 1 / m, n)
    y = rng.gamma(m, 1 / m, n)
    t1 = a * x / (b * y + big)
    t2 = np.maximum(a * x, b * y) / (np.minimum(a * x, b * y) + big)
    t3 = b * y / (a * x + big + g * (a * x + b * y + big))
    p = RatioCdfParams(a, b, big, g, m)
    for tau in (0.1, 0.4, 0.8, 1.0, 1.7, 3.0):
        assert cdf_t1(tau, p) == pytest.approx(np.mean(t1 <= tau), abs=5e-3)
        assert cdf_t2(tau, p) == pytest.approx(np.mean(t2 <= tau), abs=5e-3)
        assert cdf_t1_t3_joint(tau, p) == pytest.approx(
            np.mean((t1 <= tau) & (t3 <= tau)), abs=5e-3)


def test_degenerate_a_zero(rng):
    # dead direct link: T1 vanishes, the joint law collapses onto T3 alone
    m = 2
    p = RatioCdfParams(0.0, 4.0, 2.0, 1.0, m)
    assert cdf_t1(0.0, p) == 1.0
    n = 200_000
    y = rng.gamma(m, 1 / m, n)
    t3 = 4 * y / (2.0 + 1.0 * (4 * y + 2.0))
    for tau in (0.2, 0.6, 0.95):
        assert cdf_t1_t3_joint(tau, p) == pytest.approx(np.mean(t3 <= tau),
                                                        abs=5e-3)


@settings(deadline=None, max_examples=150)
@given(tau1=st.floats(min_value=0.0, max_value=6.0),
       tau2=st.floats(min_value=0.0, max_value=6.0),
       i1=st.floats(min_value=0.0, max_value=6.0),
       i2=st.floats(min_value=0.0, max_value=6.0),
       m=st.integers(min_value=1, max_value=3),
       g=st.floats(min_value=0.0, max_value=4.0))
def test_cdfs_monotone_in_tau_and_interference(tau1, tau2, i1, i2, m, g):
    tlo, thi = sorted((tau1, tau2))
    ilo, ihi = sorted((i1, i2))
    for f in (cdf_t1, cdf_t2, cdf_t1_t3_joint):
        p = RatioCdfParams(1.2, 0.8, ilo, g, m)
        assert f(tlo, p) <= f(thi, p) + 1e-9
        assert 0.0 <= f(thi, p) <= 1.0
        assert f(thi, p) <= f(thi, RatioCdfParams(1.2, 0.8, ihi, g, m)) + 1e-9


def test_binomial_identity_of_term_constants():
    # the tau->inf constant block of the max/min law sums to one
    for m in range(1, 7):
        x, y = 0.37, 2.9
        s = sum(math.comb(m + i - 1, i) * (x ** m * y ** i + x ** i * y ** m)
                / (x + y) ** (m + i) for i in range(m))
        assert s == pytest.approx(1.0, rel=1e-12)


def test_term_evaluation_conventions():
    # at I = 0 only constant terms survive, including infinite-rate ones
    terms = t1_exceedance_terms(0.5, 1.0, 2.0, 2)
    assert evaluate_terms(terms, 0.0) == pytest.approx(
        1.0 - cdf_t1(0.5, RatioCdfParams(1.0, 2.0, 0.0, 0.0, 2)), abs=1e-12)
    t1, extra = joint_exceedance_term_groups(0.3, 0.0, 2.0, 0.5, 2)
    assert t1 == []
    assert all(math.isfinite(t.log_coef) for t in extra)


def test_af_df_combiners():
    assert df_end_to_end_sinr(3.0, 3.0) == 3.0
    assert af_end_to_end_sinr(3.0, 3.0) == pytest.approx(9 / 7)
    assert af_end_to_end_sinr(2.5, math.inf) == 2.5
    assert af_end_to_end_sinr(math.inf, 0.7) == 0.7


@settings(deadline=None, max_examples=500)
@given(x=st.floats(min_value=0, max_value=1e6),
       y=st.floats(min_value=0, max_value=1e6))
def test_df_dominates_af(x, y):
    assert df_end_to_end_sinr(x, y) >= af_end_to_end_sinr(x, y) - 1e-12
