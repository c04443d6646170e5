"""Full-network Monte Carlo: the independent oracle for every analytical result.

Each trial draws a fresh BS disc PPP and marked UAV slab PPP inside a finite
window, applies the max-mean-power association, draws all fadings, and
assembles the exact per-trial SINRs of the hybrid one-hop/two-hop scheme.
Counter-based Philox substreams (one jump per trial index) make results
reproducible under any execution order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .antennas import UlaParams, bs_omni_gain, db_to_linear, uav_access_gain, GAIN_MAX_DBI
from .channel import p_los
from .config import AntennaModel, NetworkConfig
from .geometry import Cond
from .ratiodist import af_end_to_end_sinr, df_end_to_end_sinr


def default_window_radius(cfg: NetworkConfig):
    """Horizontal simulation radius holding ~400 BSs on average."""
    return 20.0 / math.sqrt(math.pi * cfg.lambda_b)


def trial_rng(seed, index):
    """Independent substream for one trial (counter-based jump)."""
    return np.random.Generator(np.random.Philox(key=seed).jumped(index))


@dataclass
class NetworkRealization:
    """One sampled BS set and marked UAV set inside a cylindrical window."""
    bs_xy: np.ndarray        # (n_b, 2) ground projections
    uav_xyz: np.ndarray      # (n_d, 3)
    uav_los: np.ndarray      # (n_d,) bool marks
    window_radius: float


def sample_realization(cfg: NetworkConfig, window_radius, rng) -> NetworkRealization:
    """Poisson counts, uniform placement, LoS marks by independent thinning."""
    area = math.pi * window_radius ** 2
    n_b = rng.poisson(cfg.lambda_b * area)
    n_d = rng.poisson(cfg.lambda_d * area * (cfg.h_d_max - cfg.h_d_min))
    bs_r = window_radius * np.sqrt(rng.random(n_b))
    bs_phi = 2.0 * math.pi * rng.random(n_b)
    bs_xy = np.column_stack([bs_r * np.cos(bs_phi), bs_r * np.sin(bs_phi)])
    d_r = window_radius * np.sqrt(rng.random(n_d))
    d_phi = 2.0 * math.pi * rng.random(n_d)
    d_z = cfg.h_d_min + (cfg.h_d_max - cfg.h_d_min) * rng.random(n_d)
    uav_xyz = np.column_stack([d_r * np.cos(d_phi), d_r * np.sin(d_phi), d_z])
    dist = np.sqrt(d_r ** 2 + d_z ** 2)
    zen = np.arccos(np.clip(d_z / np.maximum(dist, 1e-12), -1.0, 1.0))
    uav_los = rng.random(n_d) < p_los(zen, cfg.env)
    return NetworkRealization(bs_xy=bs_xy, uav_xyz=uav_xyz, uav_los=uav_los,
                              window_radius=window_radius)


@dataclass
class Association:
    bs_index: int
    r_b0: float
    uav_index: int           # -1 when no UAV is inside the window
    r_d0: float
    theta_d0: float
    cond: Cond | None


def associate(real: NetworkRealization, cfg: NetworkConfig) -> Association:
    """Nearest BS; UAV maximizing r^(-alpha_q)/eta_q over both conditions."""
    if len(real.bs_xy) == 0:
        raise ValueError("empty BS set")
    u_b = np.hypot(real.bs_xy[:, 0], real.bs_xy[:, 1])
    bs_index = int(np.argmin(u_b))
    r_b0 = math.sqrt(u_b[bs_index] ** 2 + cfg.h_b ** 2)
    if len(real.uav_xyz) == 0:
        return Association(bs_index, r_b0, -1, math.nan, math.nan, None)
    r_d = np.linalg.norm(real.uav_xyz, axis=1)
    alpha = np.where(real.uav_los, cfg.alpha_los, cfg.alpha_nlos)
    eta = np.where(real.uav_los, cfg.eta_los, cfg.eta_nlos)
    power = r_d ** (-alpha) / eta
    uav_index = int(np.argmax(power))
    r_d0 = float(r_d[uav_index])
    theta_d0 = math.acos(min(1.0, real.uav_xyz[uav_index, 2] / r_d0))
    cond = Cond.LOS if real.uav_los[uav_index] else Cond.NLOS
    return Association(bs_index, r_b0, uav_index, r_d0, theta_d0, cond)


@dataclass
class TrialOutcome:
    """Per-trial SINRs (linear) and bookkeeping of one hybrid-scheme draw."""
    sinr_bu: float
    sinr_du: float
    snr_bd: float            # backhaul SNR (interference neglected)
    sinr_bd: float           # backhaul SINR (equals snr_bd for non-isotropic)
    sinr_af: float           # hybrid max(direct, two-hop AF)
    sinr_df: float
    cond: Cond | None
    has_uav: bool


def _bs_gains_to_origin(u_b, cfg, ula):
    if cfg.bs_antenna_model is AntennaModel.ISOTROPIC:
        return np.ones_like(u_b)
    return bs_omni_gain(np.pi - np.arctan2(u_b, cfg.h_b), ula)


def evaluate_trial(real: NetworkRealization, cfg: NetworkConfig, rng,
                   assoc: Association | None = None) -> TrialOutcome:
    """Exact per-trial SINR assembly for the hybrid scheme.

    Backhaul interference is neglected for the directional antenna models and
    computed explicitly (fresh fadings, unit gains) for the isotropic baseline.
    """
    if assoc is None:
        assoc = associate(real, cfg)
    m = cfg.m
    iso = cfg.bs_antenna_model is AntennaModel.ISOTROPIC
    ula = UlaParams(n_elements=cfg.n_b, theta_tilt=cfg.theta_b)
    gmax = db_to_linear(GAIN_MAX_DBI)

    u_b = np.hypot(real.bs_xy[:, 0], real.bs_xy[:, 1])
    r_b = np.sqrt(u_b ** 2 + cfg.h_b ** 2)
    g_b = _bs_gains_to_origin(u_b, cfg, ula)
    f_b = rng.gamma(m, 1.0 / m, len(r_b))
    p_bu = cfg.p_b * g_b * f_b * r_b ** (-cfg.alpha_nlos) / cfg.eta_nlos
    i_bu = float(np.sum(p_bu)) - float(p_bu[assoc.bs_index])
    # serving BS power with its own fading draw retained
    x = f_b[assoc.bs_index]
    a_coef = cfg.p_b * g_b[assoc.bs_index] * assoc.r_b0 ** (-cfg.alpha_nlos) / cfg.eta_nlos
    p_b0 = a_coef * x

    has_uav = assoc.uav_index >= 0
    if len(real.uav_xyz):
        r_d = np.linalg.norm(real.uav_xyz, axis=1)
        zen = np.arccos(np.clip(real.uav_xyz[:, 2] / np.maximum(r_d, 1e-12), -1, 1))
        g_d = np.ones_like(r_d) if iso else uav_access_gain(np.pi - zen)
        alpha = np.where(real.uav_los, cfg.alpha_los, cfg.alpha_nlos)
        eta = np.where(real.uav_los, cfg.eta_los, cfg.eta_nlos)
        f_d = rng.gamma(m, 1.0 / m, len(r_d))
        p_du = cfg.p_d * g_d * f_d * r_d ** (-alpha) / eta
        i_du = float(np.sum(p_du))
        if has_uav:
            i_du -= float(p_du[assoc.uav_index])
    else:
        i_du = 0.0
    i_u = i_bu + i_du

    if not has_uav:
        sinr_bu = p_b0 / (i_u + cfg.n0)
        return TrialOutcome(sinr_bu, 0.0, 0.0, 0.0, sinr_bu, sinr_bu, None, False)

    los = assoc.cond is Cond.LOS
    y = f_d[assoc.uav_index]
    g_d0 = 1.0 if iso else uav_access_gain(math.pi - assoc.theta_d0)
    b_coef = (cfg.p_d * g_d0 * assoc.r_d0 ** (-cfg.alpha(los)) / cfg.eta(los))
    p_d0 = b_coef * y

    sinr_bu = p_b0 / (i_u + p_d0 + cfg.n0)
    sinr_du = p_d0 / (i_u + p_b0 + cfg.n0)

    # backhaul hop
    d0 = np.array([*real.uav_xyz[assoc.uav_index, :2], real.uav_xyz[assoc.uav_index, 2]])
    b0 = np.array([*real.bs_xy[assoc.bs_index], cfg.h_b])
    r_bd = float(np.linalg.norm(d0 - b0))
    z = rng.gamma(m, 1.0 / m)
    if iso:
        g_bs_bh = g_uav_bh = 1.0
    else:
        g_uav_bh = gmax  # steered directional antenna at the relay
        if cfg.bs_antenna_model is AntennaModel.OMNI_PLUS_DIRECTIONAL:
            g_bs_bh = gmax  # dedicated steered backhaul antenna
        else:
            cosang = (d0[2] - cfg.h_b) / max(r_bd, 1e-12)
            g_bs_bh = bs_omni_gain(math.acos(min(1.0, max(-1.0, cosang))), ula)
    p_bd = cfg.p_b * g_bs_bh * g_uav_bh * z * r_bd ** (-cfg.alpha_los) / cfg.eta_los
    snr_bd = p_bd / cfg.n0 if cfg.n0 > 0 else math.inf

    if iso:
        # explicit backhaul interference at the serving UAV (unit gains)
        v_b = real.bs_xy - b0[None, :2]
        r_bxd = np.sqrt(np.sum((np.column_stack([real.bs_xy, np.full(len(real.bs_xy), cfg.h_b)])
                                - d0[None, :]) ** 2, axis=1))
        f_bd = rng.gamma(m, 1.0 / m, len(r_bxd))
        p_bxd = cfg.p_b * f_bd * r_bxd ** (-cfg.alpha_los) / cfg.eta_los
        i_bd = float(np.sum(p_bxd)) - float(p_bxd[assoc.bs_index])
        r_dxd = np.sqrt(np.sum((real.uav_xyz - d0[None, :]) ** 2, axis=1))
        f_dd = rng.gamma(m, 1.0 / m, len(r_dxd))
        with np.errstate(divide="ignore"):
            p_dxd = cfg.p_d * f_dd * r_dxd ** (-cfg.alpha_los) / cfg.eta_los
        p_dxd[assoc.uav_index] = 0.0
        i_dd = float(np.sum(p_dxd))
        sinr_bd = p_bd / (i_bd + i_dd + cfg.n0)
        del v_b
    else:
        sinr_bd = snr_bd

    sinr_af = max(sinr_bu, af_end_to_end_sinr(sinr_bd, sinr_du))
    sinr_df = max(sinr_bu, df_end_to_end_sinr(sinr_bd, sinr_du))
    return TrialOutcome(sinr_bu, sinr_du, snr_bd, sinr_bd, sinr_af, sinr_df,
                        assoc.cond, True)


@dataclass
class SimCoverage:
    tau: np.ndarray
    p_af: np.ndarray
    p_df: np.ndarray
    stderr_af: np.ndarray
    stderr_df: np.ndarray
    n_trials: int
    no_uav_fraction: float
    nlos_fraction: float     # association frequency among trials with a UAV
    resampled: int


def estimate_coverage(cfg: NetworkConfig, tau_grid, n_trials, seed,
                      window_radius=None) -> SimCoverage:
    """Empirical exceedance frequencies of the hybrid AF/DF SINRs."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    window = default_window_radius(cfg) if window_radius is None else window_radius
    tau = np.asarray(tau_grid, dtype=float)
    hits_af = np.zeros(tau.shape, dtype=np.int64)
    hits_df = np.zeros(tau.shape, dtype=np.int64)
    no_uav = 0
    nlos = 0
    resampled = 0
    for i in range(n_trials):
        rng = trial_rng(seed, i)
        while True:
            real = sample_realization(cfg, window, rng)
            if len(real.bs_xy):
                break
            resampled += 1
        out = evaluate_trial(real, cfg, rng)
        hits_af += out.sinr_af >= tau
        hits_df += out.sinr_df >= tau
        if not out.has_uav:
            no_uav += 1
        elif out.cond is Cond.NLOS:
            nlos += 1
    p_af = hits_af / n_trials
    p_df = hits_df / n_trials
    return SimCoverage(
        tau=tau, p_af=p_af, p_df=p_df,
        stderr_af=np.sqrt(p_af * (1 - p_af) / n_trials),
        stderr_df=np.sqrt(p_df * (1 - p_df) / n_trials),
        n_trials=n_trials, no_uav_fraction=no_uav / n_trials,
        nlos_fraction=nlos / max(n_trials - no_uav, 1), resampled=resampled,
    )


# ---------------------------------------------------------------------------
# empirical oracles for the distribution and Laplace-transform results


def closest_node_samples(cfg: NetworkConfig, n, seed, window_radius,
                         uav_window_radius=None):
    """Per-realization closest-BS / closest-UAV distances and the serving UAV.

    Returns arrays: r_bs, (r, theta) of closest LoS and NLoS UAVs (nan when the
    window holds none), serving (r, theta) and LoS flag.  The UAV field may use
    its own (typically much smaller) window.
    """
    out = {k: np.full(n, np.nan) for k in
           ("r_bs", "r_los", "th_los", "r_nlos", "th_nlos", "r_srv", "th_srv")}
    srv_los = np.zeros(n, dtype=bool)
    uav_window = window_radius if uav_window_radius is None else uav_window_radius
    for i in range(n):
        rng = trial_rng(seed, i)
        real = sample_realization(cfg.with_(lambda_d=0.0) if uav_window != window_radius
                                  else cfg, window_radius, rng)
        if uav_window != window_radius:
            uavs = sample_realization(cfg.with_(lambda_b=0.0), uav_window, rng)
            real = NetworkRealization(bs_xy=real.bs_xy, uav_xyz=uavs.uav_xyz,
                                      uav_los=uavs.uav_los,
                                      window_radius=window_radius)
        if len(real.bs_xy):
            u = np.hypot(real.bs_xy[:, 0], real.bs_xy[:, 1])
            out["r_bs"][i] = math.sqrt(u.min() ** 2 + cfg.h_b ** 2)
        if not len(real.uav_xyz):
            continue
        r_d = np.linalg.norm(real.uav_xyz, axis=1)
        zen = np.arccos(np.clip(real.uav_xyz[:, 2] / r_d, -1, 1))
        for label, mask in (("los", real.uav_los), ("nlos", ~real.uav_los)):
            if mask.any():
                j = np.flatnonzero(mask)[np.argmin(r_d[mask])]
                out[f"r_{label}"][i] = r_d[j]
                out[f"th_{label}"][i] = zen[j]
        alpha = np.where(real.uav_los, cfg.alpha_los, cfg.alpha_nlos)
        eta = np.where(real.uav_los, cfg.eta_los, cfg.eta_nlos)
        j = int(np.argmax(r_d ** (-alpha) / eta))
        out["r_srv"][i] = r_d[j]
        out["th_srv"][i] = zen[j]
        srv_los[i] = bool(real.uav_los[j])
    out["srv_los"] = srv_los
    return out


def bs_interference_samples(cfg: NetworkConfig, u0, n, seed, window_radius):
    """Draws of the BS interference power given no BS closer than u0 (2D)."""
    ula = UlaParams(n_elements=cfg.n_b, theta_tilt=cfg.theta_b)
    vals = np.empty(n)
    area_density = cfg.lambda_b * math.pi * (window_radius ** 2 - u0 ** 2)
    for i in range(n):
        rng = trial_rng(seed, i)
        k = rng.poisson(area_density)
        u = np.sqrt(u0 ** 2 + (window_radius ** 2 - u0 ** 2) * rng.random(k))
        g = _bs_gains_to_origin(u, cfg, ula)
        f = rng.gamma(cfg.m, 1.0 / cfg.m, k)
        r = np.sqrt(u ** 2 + cfg.h_b ** 2)
        vals[i] = np.sum(cfg.p_b * g * f * r ** (-cfg.alpha_nlos) / cfg.eta_nlos)
    return vals


def uav_interference_samples(cfg: NetworkConfig, q1: Cond, r_excl, n, seed,
                             window_radius):
    """Draws of the condition-q1 UAV interference outside the exclusion ball."""
    los = q1 is Cond.LOS
    vals = np.empty(n)
    mean_pts = cfg.lambda_d * math.pi * window_radius ** 2 * (cfg.h_d_max - cfg.h_d_min)
    for i in range(n):
        rng = trial_rng(seed, i)
        k = rng.poisson(mean_pts)
        u = window_radius * np.sqrt(rng.random(k))
        z = cfg.h_d_min + (cfg.h_d_max - cfg.h_d_min) * rng.random(k)
        r = np.sqrt(u ** 2 + z ** 2)
        zen = np.arccos(z / r)
        keep = (r >= r_excl) & (rng.random(k) < p_cond_vec(zen, q1, cfg))
        r = r[keep]
        gain = uav_access_gain(np.pi - zen[keep])
        f = rng.gamma(cfg.m, 1.0 / cfg.m, keep.sum())
        vals[i] = np.sum(cfg.p_d * gain * f * r ** (-cfg.alpha(los)) / cfg.eta(los))
    return vals


def p_cond_vec(theta, q1: Cond, cfg):
    pl = p_los(theta, cfg.env)
    return pl if q1 is Cond.LOS else 1.0 - pl
