import math

import numpy as np
import pytest
from scipy import integrate, stats

from uavnet.config import Environment, NetworkConfig
from uavnet.geometry import (ClosestBsLaw, Cond, ServingGeometry,
                             association_prob_nlos, association_probs, beta_q,
                             closest_bs_law, closest_uav_joint_pdf,
                             closest_uav_law, competition_weight,
                             halfspace_limit_laws, sample_band_zenith,
                             sample_serving_geometry, serving_uav_joint_pdf,
                             serving_uav_table, zenith_band)
from uavnet import simulate as sim


def test_beta_q_domain_fault(cfg_default):
    with pytest.raises(ValueError):
        beta_q(50.0, Cond.LOS, cfg_default)


def test_beta_q_empty_cap(cfg_default):
    assert beta_q(cfg_default.h_d_min, Cond.LOS, cfg_default) == pytest.approx(0.0, abs=1e-12)


def test_beta_q_cap_volume_oracle():
    # with the LoS probability forced to ~1 the void measure is the spherical
    # cap volume above the slab bottom divided by pi
    env = Environment(c1=1e-9, c2=0.4, eta_los_db=0.0, eta_nlos_db=20.0)
    cfg = NetworkConfig(h_d_min=100.0, h_d_max=300.0, env=env)
    for r in (120.0, 200.0, 299.0):
        hm = cfg.h_d_min
        cap = (r - hm) ** 2 * (2 * r + hm) / 3.0
        assert beta_q(r, Cond.LOS, cfg) == pytest.approx(cap, rel=1e-7)


def test_beta_q_monotone(cfg_default):
    rs = np.linspace(cfg_default.h_d_min, 2000.0, 60)
    vals = [beta_q(r, Cond.NLOS, cfg_default) for r in rs]
    assert all(b2 >= b1 - 1e-12 for b1, b2 in zip(vals, vals[1:]))


def test_beta_table_matches_quadrature(cfg_default):
    law = closest_uav_law(Cond.LOS, cfg_default)
    for r in (150.0, 290.0, 301.0, 700.0, 2500.0):
        assert law.beta(r) == pytest.approx(beta_q(r, Cond.LOS, cfg_default),
                                            rel=1e-5)


def test_closest_bs_law_values(cfg_default):
    law = closest_bs_law(cfg_default)
    assert law.cdf(cfg_default.h_b) == 0.0
    assert law.cdf(1000.0) == pytest.approx(0.956757, abs=1e-4)
    total, _ = integrate.quad(law.pdf, cfg_default.h_b, np.inf)
    assert total == pytest.approx(1.0, abs=1e-8)
    u = np.linspace(1e-6, 1 - 1e-6, 100)
    assert np.allclose(law.cdf(law.ppf(u)), u, atol=1e-12)


def test_closest_bs_empirical(cfg_default, rng):
    law = closest_bs_law(cfg_default)
    draws = law.sample(rng, 20_000)
    assert stats.kstest(draws, law.cdf).statistic < 0.012


def test_closest_uav_cdf_support_and_continuity(cfg_dense):
    law = closest_uav_law(Cond.LOS, cfg_dense)
    assert law.cdf(cfg_dense.h_d_min) == pytest.approx(0.0, abs=1e-12)
    hM = cfg_dense.h_d_max
    left = beta_q(hM - 1e-7, Cond.LOS, cfg_dense)
    right = beta_q(hM + 1e-7, Cond.LOS, cfg_dense)
    assert abs(right - left) < 1e-2 * max(left, 1.0) * 1e-3 + 1e-4 * left


def test_closest_uav_pdf_is_cdf_derivative(cfg_dense):
    law = closest_uav_law(Cond.NLOS, cfg_dense)
    for r in (120.0, 250.0, 400.0):
        h = 1e-3
        num = (law.cdf(r + h) - law.cdf(r - h)) / (2 * h)
        assert law.pdf(r) == pytest.approx(num, rel=1e-5)


def test_closest_uav_pdf_normalizes(cfg_dense):
    law = closest_uav_law(Cond.LOS, cfg_dense)
    total, _ = integrate.quad(law.pdf, cfg_dense.h_d_min, law.r_hi, limit=200)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_closest_uav_empirical_ks(cfg_dense):
    window = 1.05 * max(closest_uav_law(Cond.LOS, cfg_dense).ppf(1 - 1e-9),
                        closest_uav_law(Cond.NLOS, cfg_dense).ppf(1 - 1e-9))
    samp = sim.closest_node_samples(cfg_dense, 8000, seed=5, window_radius=window)
    for cond, key in ((Cond.LOS, "los"), (Cond.NLOS, "nlos")):
        r = samp[f"r_{key}"]
        r = r[~np.isnan(r)]
        ks = stats.kstest(r, closest_uav_law(cond, cfg_dense).cdf).statistic
        assert ks < 0.02, (key, ks)


def test_joint_pdf_marginalizes_to_radial(cfg_dense):
    law = closest_uav_law(Cond.LOS, cfg_dense)
    for r in (120.0, 260.0, 380.0):
        t_hi, t_lo = zenith_band(r, cfg_dense)
        val, _ = integrate.quad(
            lambda th: closest_uav_joint_pdf(r, th, Cond.LOS, cfg_dense),
            t_hi, t_lo, limit=100)
        assert val == pytest.approx(law.pdf(r), rel=1e-8)


def test_conditional_angle_law(cfg_dense, rng):
    # conditioned on the closest distance, cos(theta) is distributed with the
    # thinning weight p_q over the band (the inhomogeneous-PPP nearest point is
    # NOT cap-uniform; the simulation oracle rejects the unweighted law)
    from uavnet.channel import p_los
    from scipy import integrate as spi
    r = 400.0
    u = rng.random(50_000)
    theta = np.asarray(sample_band_zenith(np.full(u.shape, r), Cond.LOS,
                                          cfg_dense, u))
    t_hi, t_lo = zenith_band(r, cfg_dense)
    assert np.all((theta >= t_hi - 1e-9) & (theta <= t_lo + 1e-9))
    lo, hi = cfg_dense.h_d_min / r, min(cfg_dense.h_d_max / r, 1.0)
    norm, _ = spi.quad(lambda t: p_los(math.acos(t), cfg_dense.env), lo, hi)

    def cdf(tt):
        tt = np.atleast_1d(tt)
        return np.array([spi.quad(lambda t: p_los(math.acos(t), cfg_dense.env),
                                  lo, min(max(t_, lo), hi))[0] / norm
                         for t_ in tt])

    ks = stats.kstest(np.cos(theta), cdf).statistic
    assert ks < 0.01
    # and the unweighted (cap-uniform) law is decisively rejected
    ks_uniform = stats.kstest(np.cos(theta),
                              stats.uniform(loc=lo, scale=hi - lo).cdf).statistic
    assert ks_uniform > 0.05


def test_joint_pdf_zero_outside_band(cfg_dense):
    # r = 400 > h_d_max: the sphere only meets the slab between the cap angles
    t_hi, t_lo = zenith_band(400.0, cfg_dense)
    assert closest_uav_joint_pdf(400.0, t_hi - 0.05, Cond.LOS, cfg_dense) == 0.0
    assert closest_uav_joint_pdf(400.0, t_lo + 0.05, Cond.LOS, cfg_dense) == 0.0
    assert closest_uav_joint_pdf(400.0, 0.5 * (t_hi + t_lo), Cond.LOS, cfg_dense) > 0.0


def test_halfspace_laws(cfg_default):
    hs = halfspace_limit_laws(Cond.LOS, cfg_default)
    total, _ = integrate.quad(hs.angular_pdf, 0, math.pi / 2)
    assert total == pytest.approx(1.0, rel=1e-8)
    r_med = hs.radial_ppf(0.5)
    assert hs.radial_cdf(r_med) == pytest.approx(0.5, rel=1e-12)
    c = (2.0 / 3.0) * math.pi * cfg_default.lambda_d * hs.b_q
    assert c * r_med ** 3 == pytest.approx(math.log(2), rel=1e-12)


def test_joint_pdf_factorizes_in_halfspace_limit():
    cfg = NetworkConfig(h_d_min=0.1, h_d_max=1e6, lambda_d=1e-6)
    hs = halfspace_limit_laws(Cond.LOS, cfg)
    for r in (40.0, 80.0, 150.0):
        for th in (0.3, 0.8, 1.3):
            joint = closest_uav_joint_pdf(r, th, Cond.LOS, cfg)
            product = hs.radial_pdf(r) * hs.angular_pdf(th)
            assert abs(joint - product) < 1e-4


def test_association_probs_sum(cfg_nlos_rich):
    a_l, a_n = association_probs(cfg_nlos_rich)
    assert a_l + a_n == pytest.approx(1.0)
    assert 0.2 < a_n < 0.9  # the synthetic scenario keeps both branches live


def test_association_monotone_in_excess_loss_gap(cfg_nlos_rich):
    gaps = [1.0, 3.0, 6.0, 12.0]
    vals = []
    for gap in gaps:
        env = Environment(c1=27.23, c2=0.08, eta_los_db=0.0, eta_nlos_db=gap)
        vals.append(association_prob_nlos(cfg_nlos_rich.with_(env=env)))
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_association_empirical(cfg_nlos_rich):
    a_l, a_n = association_probs(cfg_nlos_rich)
    window = 1.05 * max(closest_uav_law(Cond.LOS, cfg_nlos_rich).ppf(1 - 1e-9),
                        closest_uav_law(Cond.NLOS, cfg_nlos_rich).ppf(1 - 1e-9))
    samp = sim.closest_node_samples(cfg_nlos_rich, 8000, seed=9,
                                    window_radius=window)
    emp = float((~samp["srv_los"][~np.isnan(samp["r_srv"])]).mean())
    assert emp == pytest.approx(a_n, abs=0.02)


def test_association_spec_example_config():
    # urban, denser relays: NLoS service is essentially impossible
    cfg = NetworkConfig(lambda_d=1e-6)
    a_n = association_prob_nlos(cfg)
    assert a_n < 1e-6


def test_serving_pdf_normalizes(cfg_nlos_rich):
    for cond in (Cond.LOS, Cond.NLOS):
        law = closest_uav_law(cond, cfg_nlos_rich)

        def inner(r):
            t_hi, t_lo = zenith_band(r, cfg_nlos_rich)
            val, _ = integrate.quad(
                lambda th: serving_uav_joint_pdf(r, th, cond, cfg_nlos_rich),
                t_hi, t_lo, limit=60)
            return val

        total, _ = integrate.quad(inner, cfg_nlos_rich.h_d_min, law.r_hi,
                                  limit=120)
        assert total == pytest.approx(1.0, abs=1e-4)


def test_serving_pdf_reduces_without_competition(cfg_default):
    # an overwhelming opposite-condition penalty removes the competition term
    env = Environment(c1=9.61, c2=0.16, eta_los_db=1.0, eta_nlos_db=300.0)
    cfg = cfg_default.with_(env=env)
    for r, th in ((150.0, 0.9), (260.0, 0.7)):
        serving = serving_uav_joint_pdf(r, th, Cond.LOS, cfg)
        closest = closest_uav_joint_pdf(r, th, Cond.LOS, cfg)
        assert serving == pytest.approx(closest, rel=1e-9)
    assert association_probs(cfg)[0] == pytest.approx(1.0, abs=1e-12)


def test_serving_table_matches_rejection_sampler(cfg_nlos_rich, rng):
    table = serving_uav_table(Cond.NLOS, cfg_nlos_rich)
    a_l, a_n = association_probs(cfg_nlos_rich)
    assert table.weight == pytest.approx(a_n, rel=1e-3)
    law = closest_uav_law(Cond.NLOS, cfg_nlos_rich)
    draws = []
    while len(draws) < 4000:
        r = float(law.ppf(rng.random()))
        if rng.random() < float(competition_weight(r, Cond.NLOS, cfg_nlos_rich)):
            draws.append(r)
    qmc_draws = np.asarray(table.ppf(rng.random(4000)))
    ks = stats.ks_2samp(np.asarray(draws), qmc_draws).statistic
    assert ks < 0.035


def test_sample_serving_geometry_invariants(cfg_nlos_rich, rng):
    for _ in range(200):
        g = sample_serving_geometry(cfg_nlos_rich, rng)
        assert g.r_b0 >= cfg_nlos_rich.h_b
        h_d = g.r_d0 * math.cos(g.theta_d0)
        assert cfg_nlos_rich.h_d_min - 1e-9 <= h_d <= cfg_nlos_rich.h_d_max + 1e-9
        assert 0.0 <= g.phi_b0d0 < 2 * math.pi
        # triangle inequality in the vertical plane
        assert g.backhaul_distance(cfg_nlos_rich.h_b) >= abs(h_d - cfg_nlos_rich.h_b) - 1e-9


def test_backhaul_distance_degenerate_planar():
    # relay straight above the serving BS: purely vertical separation
    geom = ServingGeometry(r_b0=math.hypot(400.0, 20.0),
                           r_d0=math.hypot(400.0, 250.0),
                           theta_d0=math.acos(250.0 / math.hypot(400.0, 250.0)),
                           phi_b0d0=0.0, cond=Cond.LOS)
    assert geom.backhaul_distance(20.0) == pytest.approx(230.0, rel=1e-12)


def test_serving_geometry_matches_full_simulation(cfg_nlos_rich, rng):
    # the composed sampler against serving distances from full realizations
    window = 1.05 * max(closest_uav_law(Cond.LOS, cfg_nlos_rich).ppf(1 - 1e-9),
                        closest_uav_law(Cond.NLOS, cfg_nlos_rich).ppf(1 - 1e-9))
    samp = sim.closest_node_samples(cfg_nlos_rich, 6000, seed=13,
                                    window_radius=window)
    r_sim = samp["r_srv"][~np.isnan(samp["r_srv"])]
    r_ana = np.array([sample_serving_geometry(cfg_nlos_rich, rng).r_d0
                      for _ in range(4000)])
    assert stats.ks_2samp(r_sim, r_ana).statistic < 0.03
