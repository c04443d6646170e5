"""Self-validation suite: every analytical result against its sampling oracle.

Each check returns a dict  {name, passed, value, threshold, detail}  so the
CLI can emit a machine-readable report and the test suite can assert on the
same machinery with its own budgets.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import stats

from .config import NetworkConfig
from .coverage import CoverageRequest, coverage
from .geometry import (Cond, association_probs, band_sin_p_integral,
                       closest_bs_law, closest_uav_law, competition_weight,
                       zenith_band)
from .interference import LaplaceEvaluator, exclusion_radius
from .geometry import ServingGeometry
from .ratiodist import RatioCdfParams, cdf_t1, cdf_t1_t3_joint, cdf_t2, rayleigh_cdfs
from . import simulate as sim


def _check(name, value, threshold, detail="", larger_is_fail=True):
    passed = bool(value <= threshold) if larger_is_fail else bool(value >= threshold)
    return {"name": name, "passed": passed, "value": float(value),
            "threshold": float(threshold), "detail": detail}


# ---------------------------------------------------------------------------
# ratio-law oracles


def ratio_cdf_checks(m, n_samples, seed, tol=None, params=(1.0, 4.0, 2.0, 1.0),
                     label=""):
    """Sup-norm distance of the three cdfs from brute-force gamma sampling."""
    a, b, big, g = params
    rng = np.random.default_rng(seed)
    x = rng.gamma(m, 1.0 / m, n_samples)
    y = rng.gamma(m, 1.0 / m, n_samples)
    t1 = a * x / (b * y + big)
    t2 = np.maximum(a * x, b * y) / (np.minimum(a * x, b * y) + big)
    t3 = b * y / (a * x + big + g * (a * x + b * y + big))
    taus = np.concatenate([np.linspace(0.02, 0.98, 25), np.linspace(1.0, 8.0, 15)])
    p = RatioCdfParams(a, b, big, g, m)
    tol = tol if tol is not None else max(3e-3, 4.0 / math.sqrt(n_samples))
    sup1 = max(abs(cdf_t1(t, p) - np.mean(t1 <= t)) for t in taus)
    sup2 = max(abs(cdf_t2(t, p) - np.mean(t2 <= t)) for t in taus)
    sup3 = max(abs(cdf_t1_t3_joint(t, p) - np.mean((t1 <= t) & (t3 <= t)))
               for t in taus)
    tag = f" ({label})" if label else ""
    return [
        _check(f"ratio_cdf_t1_mc_m{m}{tag}", sup1, tol, f"n={n_samples}"),
        _check(f"ratio_cdf_t2_mc_m{m}{tag}", sup2, tol, f"n={n_samples}"),
        _check(f"ratio_cdf_joint_mc_m{m}{tag}", sup3, tol, f"n={n_samples}"),
    ]


def corollary_consistency_check(n_tuples, seed, tol=1e-10):
    """General lemmas at m = 1 against the exponential closed forms."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_tuples):
        p = RatioCdfParams(a=float(rng.uniform(0.05, 5)), b=float(rng.uniform(0.05, 5)),
                           i_plus_n=float(rng.uniform(0, 5)), g=float(rng.uniform(0, 3)),
                           m=1)
        tau = float(rng.uniform(0, 4))
        r1, r2, r13 = rayleigh_cdfs(tau, p)
        worst = max(worst, abs(cdf_t1(tau, p) - r1), abs(cdf_t2(tau, p) - r2),
                    abs(cdf_t1_t3_joint(tau, p) - r13))
    return [_check("corollary_m1_consistency", worst, tol, f"{n_tuples} tuples")]


def limit_behaviour_checks():
    """Zero/infinity threshold limits and the g-degenerations of the joint law."""
    out = []
    worst0 = worst_inf = worst_g0 = worst_ginf = 0.0
    for m in (1, 2, 3):
        for (a, b, big) in ((1.0, 4.0, 2.0), (2.5, 0.3, 0.0), (0.7, 0.7, 5.0)):
            for g in (0.0, 0.5, 3.0):
                p = RatioCdfParams(a, b, big, g, m)
                worst0 = max(worst0, cdf_t1(0.0, p), cdf_t2(0.0, p),
                             cdf_t1_t3_joint(0.0, p))
                worst_inf = max(worst_inf, 1 - cdf_t1(1e9, p), 1 - cdf_t2(1e9, p),
                                1 - cdf_t1_t3_joint(1e9, p))
            for tau in (0.1, 0.7, 1.0, 2.3):
                p0 = RatioCdfParams(a, b, big, 0.0, m)
                pg = RatioCdfParams(a, b, big, 1e12, m)
                worst_g0 = max(worst_g0, abs(cdf_t1_t3_joint(tau, p0) - cdf_t2(tau, p0)))
                worst_ginf = max(worst_ginf, abs(cdf_t1_t3_joint(tau, pg) - cdf_t1(tau, pg)))
    out.append(_check("limits_cdf_at_zero", worst0, 0.0))
    out.append(_check("limits_cdf_at_infinity", worst_inf, 1e-6))
    out.append(_check("joint_g0_equals_t2", worst_g0, 1e-12))
    out.append(_check("joint_ginf_equals_t1", worst_ginf, 1e-9))
    return out


# ---------------------------------------------------------------------------
# spatial-law oracles


def _closest_window(cfg):
    r = max(closest_uav_law(Cond.LOS, cfg).ppf(1 - 1e-9),
            closest_uav_law(Cond.NLOS, cfg).ppf(1 - 1e-9),
            closest_bs_law(cfg).ppf(1 - 1e-9))
    return 1.05 * r


def _joint_chi2(r_s, th_s, cfg, cond, serving):
    """Chi-square p-value of the empirical (r, theta) histogram against the
    closest (serving=False) or serving (serving=True) joint law."""
    law = closest_uav_law(cond, cfg)
    ok = ~np.isnan(r_s)
    r_s, th_s = r_s[ok], th_s[ok]
    n = len(r_s)
    qs = np.linspace(0.0, 1.0, 7)
    r_edges = np.quantile(r_s, qs)
    r_edges[0], r_edges[-1] = cfg.h_d_min, np.inf
    th_edges = np.linspace(0.0, math.pi / 2, 6)
    gl_x, gl_w = np.polynomial.legendre.leggauss(32)

    probs = np.zeros((len(r_edges) - 1, len(th_edges) - 1))
    for i, (r0, r1) in enumerate(zip(r_edges[:-1], r_edges[1:])):
        r1_eff = min(r1, law.r_hi)
        half = 0.5 * (r1_eff - r0)
        rg = r0 + half * (gl_x + 1.0)
        wg = half * gl_w
        pdf_r = law.pdf(rg)
        if serving:
            pdf_r = pdf_r * competition_weight(rg, cond, cfg)
        t_hi, t_lo = zenith_band(rg, cfg)
        total_p = band_sin_p_integral(rg, cond, cfg)
        for j, (ta, tb) in enumerate(zip(th_edges[:-1], th_edges[1:])):
            ca = np.cos(np.maximum(ta, t_hi))
            cb = np.cos(np.minimum(tb, t_lo))
            frac = np.array([_band_p_mass(a, b_, cond, cfg) for a, b_ in zip(cb, ca)])
            probs[i, j] = np.sum(wg * pdf_r * frac / np.maximum(total_p, 1e-300))
    probs /= probs.sum()

    obs = np.zeros_like(probs)
    ri = np.clip(np.searchsorted(r_edges, r_s, side="right") - 1, 0, probs.shape[0] - 1)
    ti = np.clip(np.searchsorted(th_edges, th_s, side="right") - 1, 0, probs.shape[1] - 1)
    np.add.at(obs, (ri, ti), 1)
    exp = probs.ravel() * n
    o = obs.ravel()
    keep = exp >= 5
    chi2 = float(np.sum((o[keep] - exp[keep]) ** 2 / exp[keep]))
    rest_o, rest_e = o[~keep].sum(), exp[~keep].sum()
    dof = keep.sum() - 1
    if rest_e > 0:
        chi2 += (rest_o - rest_e) ** 2 / rest_e
        dof += 1
    return float(stats.chi2.sf(chi2, dof))




_CELL_X, _CELL_W = np.polynomial.legendre.leggauss(12)


def _band_p_mass(c_lo, c_hi, cond, cfg):
    """integral of p_cond over cos(theta) in [c_lo, c_hi] (clipped to valid)."""
    if not c_hi > c_lo:
        return 0.0
    half = 0.5 * (c_hi - c_lo)
    t = c_lo + half * (_CELL_X + 1.0)
    from .geometry import p_cond as _pc
    return float(half * np.sum(_CELL_W * _pc(np.arccos(np.clip(t, -1, 1)), cond, cfg.env)))


def spatial_law_checks(cfg: NetworkConfig, n_real, seed, ks_tol=0.01,
                       assoc_tol=0.01, chi2_p=0.01):
    """Closest/serving law KS and chi-square tests plus association frequency."""
    window = _closest_window(cfg)
    samp = sim.closest_node_samples(cfg, n_real, seed, window)
    out = []
    ks_b = stats.kstest(samp["r_bs"][~np.isnan(samp["r_bs"])],
                        closest_bs_law(cfg).cdf).statistic
    out.append(_check("closest_bs_ks", ks_b, ks_tol, f"n={n_real}"))
    for cond, key in ((Cond.LOS, "los"), (Cond.NLOS, "nlos")):
        r = samp[f"r_{key}"]
        r = r[~np.isnan(r)]
        ks = stats.kstest(r, closest_uav_law(cond, cfg).cdf).statistic
        out.append(_check(f"closest_uav_{key}_ks", ks, ks_tol, f"n={len(r)}"))
    pv = _joint_chi2(samp["r_los"], samp["th_los"], cfg, Cond.LOS, serving=False)
    out.append(_check("closest_joint_chi2_p", pv, chi2_p, "LoS joint law",
                      larger_is_fail=False))
    a_l, a_n = association_probs(cfg)
    srv = samp["srv_los"][~np.isnan(samp["r_srv"])]
    emp_n = float((~srv).mean())
    out.append(_check("association_nlos", abs(a_n - emp_n), assoc_tol,
                      f"analytic {a_n:.4f} empirical {emp_n:.4f}"))
    dominant = Cond.LOS if a_l >= a_n else Cond.NLOS
    mask = srv if dominant is Cond.LOS else ~srv
    r_srv = samp["r_srv"][~np.isnan(samp["r_srv"])][mask]
    th_srv = samp["th_srv"][~np.isnan(samp["r_srv"])][mask]
    pv = _joint_chi2(r_srv, th_srv, cfg, dominant, serving=True)
    out.append(_check("serving_joint_chi2_p", pv, chi2_p,
                      f"{dominant.value} serving law", larger_is_fail=False))
    return out


# ---------------------------------------------------------------------------
# interference-transform oracles


def laplace_checks(cfg: NetworkConfig, n_real, seed, rel_tol=0.02,
                   geom: ServingGeometry | None = None):
    """Transforms against empirical E[e^{-sI}] on an s-grid scaled to 1/E[I],
    plus the mean-interference identity of the first derivative."""
    if geom is None:
        geom = ServingGeometry(r_b0=1.2 * closest_bs_law(cfg).ppf(0.5),
                               r_d0=1.1 * closest_uav_law(Cond.LOS, cfg).ppf(0.5),
                               theta_d0=0.8, phi_b0d0=1.0, cond=Cond.LOS)
    window = sim.default_window_radius(cfg)
    u_b0 = math.sqrt(geom.r_b0 ** 2 - cfg.h_b ** 2)
    i_bs = sim.bs_interference_samples(cfg, u_b0, n_real, seed, window)
    re_l = exclusion_radius(Cond.LOS, geom.cond, geom.r_d0, cfg)
    re_n = exclusion_radius(Cond.NLOS, geom.cond, geom.r_d0, cfg)
    i_l = sim.uav_interference_samples(cfg, Cond.LOS, re_l, n_real, seed + 1, window)
    i_n = sim.uav_interference_samples(cfg, Cond.NLOS, re_n, n_real, seed + 2, window)
    i_u = i_bs + i_l + i_n
    lap = LaplaceEvaluator(geom, cfg, u_max=window)
    s_grid = np.logspace(-1.0, 1.3, 10) / np.mean(i_u)
    worst = 0.0
    for s in s_grid:
        ana = lap.evaluate(float(s))
        emp = math.exp(-s * cfg.n0) * float(np.mean(np.exp(-s * i_u)))
        worst = max(worst, abs(ana - emp) / max(emp, 1e-12))
    out = [_check("laplace_total_grid_rel", worst, rel_tol, f"n={n_real}")]
    d1 = lap.derivative(1, 0.0)
    mean_emp = cfg.n0 + float(np.mean(i_u))
    out.append(_check("laplace_mean_identity_rel",
                      abs(-d1 - mean_emp) / mean_emp, rel_tol,
                      f"L'(0)={d1:.3e}"))
    s_mid = float(1.0 / np.mean(i_u))
    joint = float(np.mean(np.exp(-s_mid * i_u)))
    prod = (float(np.mean(np.exp(-s_mid * i_bs)))
            * float(np.mean(np.exp(-s_mid * i_l)))
            * float(np.mean(np.exp(-s_mid * i_n))))
    out.append(_check("laplace_product_form_rel", abs(joint - prod) / prod,
                      rel_tol, "conditional independence"))
    return out


# ---------------------------------------------------------------------------
# end-to-end coverage oracle


def coverage_checks(cfg: NetworkConfig, tau_dbs, n_trials, n_samples, seed,
                    tol=0.03):
    """Analytical coverage against full-network simulation (window matched)."""
    taus = tuple(10 ** (t / 10.0) for t in tau_dbs)
    window = sim.default_window_radius(cfg)
    s = sim.estimate_coverage(cfg, taus, n_trials, seed)
    out = []
    for proto, psim in (("af", s.p_af), ("df", s.p_df)):
        res = coverage(CoverageRequest(cfg=cfg, protocol=proto, tau_grid=taus,
                                       n_samples=n_samples, seed=seed,
                                       window_radius=window))
        worst = float(np.max(np.abs(res.p_cov - psim)))
        out.append(_check(f"coverage_{proto}_vs_sim", worst, tol,
                          f"analytic {np.round(res.p_cov, 4).tolist()} "
                          f"sim {np.round(psim, 4).tolist()}"))
    return out


def run_suite(cfg: NetworkConfig, seed=0, ratio_n=1_000_000, spatial_n=20_000,
              laplace_n=20_000, coverage_trials=6_000, coverage_samples=8192,
              tau_dbs=(-10.0, 0.0, 10.0)):
    """The full oracle suite at a configurable budget; returns check dicts."""
    checks = []
    checks += ratio_cdf_checks(cfg.m, ratio_n, seed)
    checks += corollary_consistency_check(300, seed + 1)
    checks += limit_behaviour_checks()
    checks += spatial_law_checks(cfg, spatial_n, seed + 2,
                                 ks_tol=max(0.01, 1.7 / math.sqrt(spatial_n)))
    checks += laplace_checks(cfg, laplace_n, seed + 3)
    checks += coverage_checks(cfg, tau_dbs, coverage_trials, coverage_samples,
                              seed + 4)
    return checks
