"""Closest/serving node laws in the 3D slab deployment.

The aerial relays form a homogeneous PPP between two heights, independently
thinned into LoS/NLoS populations by the zenith-angle-dependent LoS
probability.  This module provides the closest-node distance laws, the joint
distance/zenith law, the LoS/NLoS association probabilities, the serving-node
law under max-mean-power association, and samplers for all of them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from .channel import p_los
from .config import NetworkConfig


class Cond(str, Enum):
    """Channel condition tag of an air-to-ground link."""
    LOS = "los"
    NLOS = "nlos"

    @property
    def other(self):
        return Cond.NLOS if self is Cond.LOS else Cond.LOS


def p_cond(theta, cond: Cond, env):
    pl = p_los(theta, env)
    return pl if cond is Cond.LOS else 1.0 - pl


def zenith_band(r, cfg: NetworkConfig):
    """(theta_low, theta_high) zenith angles subtended by the slab at radius r.

    theta_low corresponds to the slab top (0 while the sphere of radius r stays
    below h_d_max), theta_high to the slab bottom.
    """
    r = np.asarray(r, dtype=float)
    t_hi = np.arccos(np.minimum(cfg.h_d_max / r, 1.0))
    t_lo = np.arccos(np.minimum(cfg.h_d_min / r, 1.0))
    return t_hi, t_lo


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)
_GL_T = 0.5 * (_GL_NODES + 1.0)   # nodes on (0, 1)
_GL_W = 0.5 * _GL_WEIGHTS


def band_sin_p_integral(r, cond: Cond, cfg: NetworkConfig):
    """integral of sin(w)·p_cond(w) over the slab zenith band at radius r.

    In t = cos(w) this is the integral of p_cond(arccos t) over
    [h_d_min/r, min(h_d_max/r, 1)]; evaluated with fixed Gauss-Legendre nodes
    (the integrand is a smooth sigmoid).
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    lo = np.minimum(cfg.h_d_min / r, 1.0)
    hi = np.minimum(cfg.h_d_max / r, 1.0)
    width = hi - lo
    t = lo[:, None] + width[:, None] * _GL_T[None, :]
    vals = p_cond(np.arccos(np.clip(t, -1.0, 1.0)), cond, cfg.env)
    out = width * (vals @ _GL_W)
    return out if out.shape != (1,) else float(out[0])


def beta_q(r, cond: Cond, cfg: NetworkConfig, rel_tol=1e-8):
    """Void-measure profile of the exclusion ball of radius r inside the slab.

    pi * lambda_d * beta_q(r) is the mean number of condition-q UAVs within 3D
    distance r of the origin.  Adaptive quadrature in t = cos(theta) with the
    cap/segment switch at t = h_d_max/r handled as a breakpoint.
    """
    if r < cfg.h_d_min:
        raise ValueError("beta_q is defined for r >= h_d_min")
    hm3 = cfg.h_d_min ** 3
    hM3 = cfg.h_d_max ** 3
    r3 = r ** 3
    t0 = cfg.h_d_min / r

    def integrand(t):
        return (min(hM3, r3 * t ** 3) - hm3) / t ** 3 * p_cond(math.acos(min(t, 1.0)), cond, cfg.env)

    pts = None
    if r > cfg.h_d_max:
        pts = [cfg.h_d_max / r]
    val, _ = integrate.quad(integrand, t0, 1.0, points=pts,
                            epsrel=rel_tol, epsabs=0.0, limit=200)
    return (2.0 / 3.0) * val


def _beta_profile(r, cond: Cond, cfg: NetworkConfig):
    """Vectorized beta_q on an array of radii (fixed-order quadrature).

    Splits at the cap/segment kink t = h_d_max/r so each panel is smooth.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    hm3, hM3 = cfg.h_d_min ** 3, cfg.h_d_max ** 3
    out = np.zeros_like(r)
    ok = r > cfg.h_d_min
    rr = r[ok]
    t0 = cfg.h_d_min / rr
    tk = np.clip(cfg.h_d_max / rr, None, 1.0)

    def panel(lo, hi, top_is_cap):
        width = hi - lo
        t = lo[:, None] + width[:, None] * _GL_T[None, :]
        p = p_cond(np.arccos(np.clip(t, -1.0, 1.0)), cond, cfg.env)
        if top_is_cap:
            f = (rr[:, None] ** 3 * t ** 3 - hm3) / t ** 3
        else:
            f = (hM3 - hm3) / t ** 3
        return width * ((f * p) @ _GL_W)

    # t in [t0, tk]: sphere boundary below the slab top; t in [tk, 1]: full column
    vals = panel(t0, tk, True)
    seg = tk < 1.0
    if np.any(seg):
        extra = panel(tk[seg], np.ones(seg.sum()), False)
        vals[seg] += extra
    out[ok] = (2.0 / 3.0) * vals
    return out


class ClosestBsLaw:
    """Distance law of the nearest BS (2D PPP at constant height h_b)."""

    def __init__(self, cfg: NetworkConfig):
        if not cfg.lambda_b > 0:
            raise ValueError("lambda_b must be positive")
        self.lam = cfg.lambda_b
        self.h_b = cfg.h_b

    def cdf(self, r):
        r = np.asarray(r, dtype=float)
        out = 1.0 - np.exp(-math.pi * self.lam * np.maximum(r * r - self.h_b ** 2, 0.0))
        return float(out) if out.ndim == 0 else out

    def pdf(self, r):
        r = np.asarray(r, dtype=float)
        out = np.where(
            r >= self.h_b,
            2.0 * math.pi * self.lam * r
            * np.exp(-math.pi * self.lam * np.maximum(r * r - self.h_b ** 2, 0.0)),
            0.0,
        )
        return float(out) if out.ndim == 0 else out

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        out = np.sqrt(self.h_b ** 2 - np.log1p(-u) / (math.pi * self.lam))
        return float(out) if out.ndim == 0 else out

    def sample(self, rng, size=None):
        return self.ppf(rng.random(size))


class ClosestUavLaw:
    """Distance law of the closest condition-q UAV (tabulated profile inside).

    The cdf is 1 − exp(−pi·lambda_d·beta_q(r)); the table resolves beta_q on a
    dense grid and the public cdf/pdf/ppf interpolate it monotonically.
    """

    def __init__(self, cond: Cond, cfg: NetworkConfig, n_grid=2048, tail=1e-13):
        self.cond = cond
        self.cfg = cfg
        self.lam = cfg.lambda_d
        target = -math.log(tail) / (math.pi * self.lam)
        r_hi = 2.0 * cfg.h_d_max
        while _beta_profile(np.array([r_hi]), cond, cfg)[0] < target:
            r_hi *= 2.0
            if r_hi > 1e12:
                break
        x = np.linspace(0.0, 1.0, n_grid) ** 2
        self.r_grid = cfg.h_d_min + (r_hi - cfg.h_d_min) * x
        self.beta_grid = np.asarray(_beta_profile(self.r_grid, cond, cfg))
        self._beta = PchipInterpolator(self.r_grid, self.beta_grid, extrapolate=False)
        self.r_hi = r_hi

    def beta(self, r):
        r = np.asarray(r, dtype=float)
        below = np.clip(r, None, self.r_grid[-1])
        vals = np.where(r <= self.cfg.h_d_min, 0.0, self._beta(np.maximum(below, self.cfg.h_d_min)))
        # quadratic far-field continuation beyond the table
        over = r > self.r_grid[-1]
        if np.any(over):
            slope = self.beta_grid[-1] / self.r_grid[-1] ** 2
            vals = np.where(over, slope * r * r, vals)
        out = np.asarray(vals)
        return float(out) if out.ndim == 0 else out

    def cdf(self, r):
        out = 1.0 - np.exp(-math.pi * self.lam * np.asarray(self.beta(r)))
        return float(out) if out.ndim == 0 else out

    def pdf(self, r):
        r = np.asarray(r, dtype=float)
        s = band_sin_p_integral(np.maximum(r, self.cfg.h_d_min), self.cond, self.cfg)
        out = np.where(
            r >= self.cfg.h_d_min,
            2.0 * math.pi * self.lam * r * r * np.asarray(s)
            * np.exp(-math.pi * self.lam * np.asarray(self.beta(r))),
            0.0,
        )
        return float(out) if out.ndim == 0 else out

    def ppf(self, u):
        """Inverse cdf via monotone inversion of the tabulated void measure."""
        u = np.asarray(u, dtype=float)
        target = -np.log1p(-u) / (math.pi * self.lam)
        out = np.interp(target, self.beta_grid, self.r_grid)
        return float(out) if out.ndim == 0 else out

    def sample(self, rng, size=None):
        return self.ppf(rng.random(size))


@lru_cache(maxsize=32)
def closest_uav_law(cond: Cond, cfg: NetworkConfig) -> ClosestUavLaw:
    return ClosestUavLaw(cond, cfg)


def closest_bs_law(cfg: NetworkConfig) -> ClosestBsLaw:
    return ClosestBsLaw(cfg)


def closest_uav_joint_pdf(r, theta, cond: Cond, cfg: NetworkConfig):
    """Joint (distance, zenith) density of the closest condition-q UAV.

    The condition-q population is an inhomogeneous PPP (thinned by the
    LoS-probability sigmoid), so conditioned on the closest distance r the
    zenith angle has density p_q(theta)·sin(theta) over the slab band, not the
    bare cap-uniform law; equivalently the joint density is
    2·pi·lambda_d·p_q(theta)·r²·sin(theta)·exp(-pi·lambda_d·beta_q(r)).
    The empirical joint histogram from simulation pins this form down.
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    law = closest_uav_law(cond, cfg)
    t_hi, t_lo = zenith_band(np.maximum(r, cfg.h_d_min), cfg)
    inside = (theta >= t_hi) & (theta <= t_lo) & (r >= cfg.h_d_min)
    dens = (2.0 * math.pi * cfg.lambda_d * r * r
            * p_cond(theta, cond, cfg.env) * np.sin(theta)
            * np.exp(-math.pi * cfg.lambda_d * np.asarray(law.beta(r))))
    out = np.asarray(np.where(inside, dens, 0.0))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class HalfspaceLaws:
    """Limit laws when the slab fills the whole upper half-space.

    Distance and angle decouple; the angular density carries the thinning
    weight p_q(theta)·sin(theta)/b_q (the bare sin(theta) law would describe
    the unthinned process only).
    """
    b_q: float
    lam: float
    cond: Cond
    env: object

    def radial_pdf(self, r):
        r = np.asarray(r, dtype=float)
        c = (2.0 / 3.0) * math.pi * self.lam * self.b_q
        out = 2.0 * math.pi * self.lam * self.b_q * r * r * np.exp(-c * r ** 3)
        return float(out) if out.ndim == 0 else out

    def radial_cdf(self, r):
        r = np.asarray(r, dtype=float)
        c = (2.0 / 3.0) * math.pi * self.lam * self.b_q
        out = 1.0 - np.exp(-c * r ** 3)
        return float(out) if out.ndim == 0 else out

    def radial_ppf(self, u):
        c = (2.0 / 3.0) * math.pi * self.lam * self.b_q
        out = (-np.log1p(-np.asarray(u, dtype=float)) / c) ** (1.0 / 3.0)
        return float(out) if out.ndim == 0 else out

    def angular_pdf(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.where((theta >= 0) & (theta <= math.pi / 2),
                       p_cond(theta, self.cond, self.env) * np.sin(theta)
                       / self.b_q, 0.0)
        out = np.asarray(out)
        return float(out) if out.ndim == 0 else out


def halfspace_limit_laws(cond: Cond, cfg: NetworkConfig) -> HalfspaceLaws:
    t = _GL_T  # integral of p over cos(theta) in (0, 1)
    b_q = float(p_cond(np.arccos(t), cond, cfg.env) @ _GL_W)
    return HalfspaceLaws(b_q=b_q, lam=cfg.lambda_d, cond=cond, env=cfg.env)


def competitor_radius(r, cond: Cond, cfg: NetworkConfig):
    """Distance at which an opposite-condition UAV ties the mean power of a
    condition-q UAV at distance r (antenna gains absorbed into the excess
    losses, matching the association rule)."""
    q_los = cond is Cond.LOS
    eta_q = cfg.eta(q_los)
    eta_o = cfg.eta(not q_los)
    alpha_q = cfg.alpha(q_los)
    alpha_o = cfg.alpha(not q_los)
    return (eta_q / eta_o) ** (1.0 / alpha_o) * np.asarray(r, dtype=float) ** (alpha_q / alpha_o)


def competition_weight(r, cond: Cond, cfg: NetworkConfig):
    """P[no opposite-condition UAV beats a condition-q server at distance r]."""
    law = closest_uav_law(cond.other, cfg)
    rho = np.maximum(cfg.h_d_min, competitor_radius(r, cond, cfg))
    out = np.exp(-math.pi * cfg.lambda_d * np.asarray(law.beta(rho)))
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=32)
def association_prob_nlos(cfg: NetworkConfig, rel_tol=1e-6):
    """Probability that the serving UAV is NLoS (nested adaptive quadrature)."""
    law_n = closest_uav_law(Cond.NLOS, cfg)
    law_l = closest_uav_law(Cond.LOS, cfg)
    r_hi = law_n.r_hi

    def integrand(r):
        rho = max(cfg.h_d_min, float(competitor_radius(r, Cond.NLOS, cfg)))
        surv = math.exp(-math.pi * cfg.lambda_d * beta_q(rho, Cond.LOS, cfg))
        pdf = (2.0 * math.pi * cfg.lambda_d * r * r
               * float(band_sin_p_integral(r, Cond.NLOS, cfg))
               * math.exp(-math.pi * cfg.lambda_d * beta_q(r, Cond.NLOS, cfg)))
        return pdf * surv

    val, _ = integrate.quad(integrand, cfg.h_d_min, r_hi, epsrel=rel_tol,
                            epsabs=1e-12, limit=400)
    _ = law_l  # warm the LoS table for callers that follow up with weights
    return min(1.0, max(0.0, val))


def association_probs(cfg: NetworkConfig):
    """(A_los, A_nlos) with A_los = 1 − A_nlos."""
    a_n = association_prob_nlos(cfg)
    return 1.0 - a_n, a_n


def serving_uav_joint_pdf(r, theta, cond: Cond, cfg: NetworkConfig):
    """Joint (distance, zenith) density of the serving UAV given its condition.

    Closest-UAV joint law times the opposite-condition competition weight,
    normalized by the association probability of the condition.
    """
    a_l, a_n = association_probs(cfg)
    a_q = a_l if cond is Cond.LOS else a_n
    return closest_uav_joint_pdf(r, theta, cond, cfg) * competition_weight(r, cond, cfg) / a_q


@dataclass(frozen=True)
class ServingGeometry:
    """Conditioning variables of the coverage integrand."""
    r_b0: float          # serving BS 3D distance
    r_d0: float          # serving UAV 3D distance
    theta_d0: float      # serving UAV zenith angle
    phi_b0d0: float      # azimuth between serving BS and UAV
    cond: Cond

    def backhaul_distance(self, h_b):
        """3D distance between the serving BS and serving UAV (law of cosines)."""
        rb, rd, th = self.r_b0, self.r_d0, self.theta_d0
        u_b = math.sqrt(max(rb * rb - h_b * h_b, 0.0))
        sq = (rb * rb + rd * rd - 2.0 * h_b * rd * math.cos(th)
              - 2.0 * u_b * rd * math.sin(th) * math.cos(self.phi_b0d0))
        return math.sqrt(max(sq, 1e-18))


_BAND_GRID = np.linspace(0.0, 1.0, 49)


def sample_band_zenith(r, cond: Cond, cfg, u):
    """Zenith angle of the closest condition-q point given its distance r.

    Inverse-cdf draw from the density proportional to p_q over cos(theta) on
    the band [h_d_min/r, min(h_d_max/r, 1)] (tabulated per radius)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    u = np.broadcast_to(np.atleast_1d(np.asarray(u, dtype=float)), r.shape)
    lo = cfg.h_d_min / r
    hi = np.minimum(cfg.h_d_max / r, 1.0)
    t = lo[:, None] + (hi - lo)[:, None] * _BAND_GRID[None, :]
    p = p_cond(np.arccos(np.clip(t, -1.0, 1.0)), cond, cfg.env)
    cdf = integrate.cumulative_trapezoid(p, t, axis=1, initial=0.0)
    target = u * cdf[:, -1]
    j = np.clip((cdf < target[:, None]).sum(axis=1), 1, t.shape[1] - 1)
    rows = np.arange(len(r))
    c0 = cdf[rows, j - 1]
    c1 = cdf[rows, j]
    t0 = t[rows, j - 1]
    t1 = t[rows, j]
    frac = np.where(c1 > c0, (target - c0) / np.maximum(c1 - c0, 1e-300), 0.0)
    out = np.arccos(np.clip(t0 + frac * (t1 - t0), -1.0, 1.0))
    return out if out.shape != (1,) else float(out[0])


def sample_serving_geometry(cfg: NetworkConfig, rng) -> ServingGeometry:
    """Draw one serving geometry: condition by association probability, serving
    UAV by rejection with the competition weight, BS and azimuth directly."""
    a_l, _ = association_probs(cfg)
    cond = Cond.LOS if rng.random() < a_l else Cond.NLOS
    law = closest_uav_law(cond, cfg)
    while True:
        r = float(law.ppf(rng.random()))
        if rng.random() < float(competition_weight(r, cond, cfg)):
            break
    theta = float(sample_band_zenith(r, cond, cfg, rng.random()))
    r_b0 = float(closest_bs_law(cfg).ppf(rng.random()))
    phi = 2.0 * math.pi * rng.random()
    return ServingGeometry(r_b0=r_b0, r_d0=r, theta_d0=theta, phi_b0d0=phi, cond=cond)


class ServingUavTable:
    """Tabulated inverse-cdf of the serving-UAV radial law for one condition.

    Used by the low-discrepancy coverage integrator, which needs a rejection-
    free monotone map from the unit interval.
    """

    def __init__(self, cond: Cond, cfg: NetworkConfig, n_grid=4096):
        law = closest_uav_law(cond, cfg)
        x = np.linspace(0.0, 1.0, n_grid) ** 2
        r = cfg.h_d_min + (law.r_hi - cfg.h_d_min) * x
        dens = law.pdf(r) * competition_weight(r, cond, cfg)
        cum = integrate.cumulative_trapezoid(dens, r, initial=0.0)
        self.weight = float(cum[-1])  # equals the association probability
        if self.weight <= 0:
            raise ValueError("serving law has no mass for this condition")
        cdf = cum / cum[-1]
        keep = np.concatenate(([True], np.diff(cdf) > 0))
        self._inv = PchipInterpolator(cdf[keep], r[keep], extrapolate=True)
        self.cond = cond
        self.cfg = cfg

    def ppf(self, u):
        return np.clip(self._inv(np.asarray(u, dtype=float)),
                       self.cfg.h_d_min, None)


@lru_cache(maxsize=32)
def serving_uav_table(cond: Cond, cfg: NetworkConfig) -> ServingUavTable:
    return ServingUavTable(cond, cfg)
