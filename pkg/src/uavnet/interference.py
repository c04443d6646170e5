"""Conditional Laplace transforms of the aggregate interference at the origin.

Conditioned on the serving BS (2D distance u_b0) and serving UAV (3D distance
r_d0, condition q2), the interference from BSs and from LoS/NLoS UAVs are
independent PPP functionals, so the transform of the total factors into three
exponentials.  Each exponent is a gain-weighted integral over the interferer
domain minus the max-power exclusion region: a ground disc for BSs, a
spherical cap/segment of the condition-pair exclusion radius for UAVs.

Derivatives in s (needed by the coverage integrands) are computed exactly by
differentiating under the integral sign and composing with the exponential via
the Bell-polynomial recursion, never by finite differences.

Two implementations coexist deliberately: scalar adaptive-quadrature versions
(`laplace_bs`, `laplace_uav`) serve as the reference surface, and fixed-node
batched kernels (used by `LaplaceEvaluator` and the coverage integrator) are
tested against them.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import integrate

from .antennas import UlaParams, bs_omni_gain, uav_access_gain
from .channel import p_los
from .config import AntennaModel, NetworkConfig
from .geometry import Cond, ServingGeometry, p_cond

_LOG_FLOOR = -745.0


def exclusion_radius(q1: Cond, q2: Cond, r, cfg: NetworkConfig):
    """Exclusion-zone radius for q1-condition interferers given a q2 server at r."""
    if q1 is q2:
        return float(r)
    eta1 = cfg.eta(q1 is Cond.LOS)
    eta2 = cfg.eta(q2 is Cond.LOS)
    a1 = cfg.alpha(q1 is Cond.LOS)
    a2 = cfg.alpha(q2 is Cond.LOS)
    return float((eta2 / eta1) ** (1.0 / a1) * r ** (a2 / a1))


def _one_minus_pow(x, m):
    """1 - (1+x)^(-m) without cancellation for small x."""
    return -np.expm1(-m * np.log1p(x))


def _bs_kappa(psi, cfg):
    """Per-interferer mean power scale of a BS at zenith ψ = atan(u/h_b)."""
    ula = UlaParams(n_elements=cfg.n_b, theta_tilt=cfg.theta_b)
    gain = bs_omni_gain(np.pi - psi, ula)
    r = cfg.h_b / np.cos(psi)
    return cfg.p_b * gain / (cfg.m * cfg.eta_nlos * r ** cfg.alpha_nlos)


def _uav_kappa(theta, r, q1: Cond, cfg):
    """Per-interferer mean power scale of a q1 UAV at (r, θ)."""
    eta = cfg.eta(q1 is Cond.LOS)
    alpha = cfg.alpha(q1 is Cond.LOS)
    gain = uav_access_gain(np.pi - theta)
    return cfg.p_d * gain / (cfg.m * eta * r ** alpha)


# ---------------------------------------------------------------------------
# scalar adaptive-quadrature reference implementations


def laplace_bs(s, u_b0, cfg: NetworkConfig, u_max=math.inf, rel_tol=1e-10):
    """Laplace transform of BS interference given the serving BS at 2D distance u_b0.

    Exponent integrated over ψ = atan(u/h_b) (finite interval, smooth tail);
    `u_max` truncates the interferer field for window-matched comparisons.
    """
    if s == 0.0 or cfg.lambda_b == 0.0:
        return 1.0
    psi0 = math.atan2(u_b0, cfg.h_b)
    psi1 = math.atan2(u_max, cfg.h_b) if math.isfinite(u_max) else math.pi / 2

    def integrand(psi):
        x = s * _bs_kappa(psi, cfg)
        u_du = cfg.h_b ** 2 * math.tan(psi) / math.cos(psi) ** 2
        return _one_minus_pow(x, cfg.m) * u_du

    val, _ = integrate.quad(integrand, psi0, psi1, epsrel=rel_tol, epsabs=1e-16,
                            limit=400)
    e = -2.0 * math.pi * cfg.lambda_b * val
    return math.exp(e) if e > _LOG_FLOOR else 0.0


def _uav_exponent_scalar(s, r_excl, q1: Cond, cfg, u_max=math.inf, rel_tol=1e-9):
    """Slab-minus-exclusion integral of [1-(1+s kappa)^-m]·p_q1·r² sinθ.

    Parameterized by (height z, w = cosθ); the full slab is the rectangle
    w ∈ (0,1], z ∈ [h_d_min, h_d_max] and the exclusion ball removes w ≥ z/r_excl.
    Outer integral in v = sqrt(w) which absorbs the w^(α-3) horizon behavior.
    """
    hm, hM = cfg.h_d_min, cfg.h_d_max

    def column(v, z_lo, z_hi):
        w = v * v
        if z_hi <= z_lo:
            return 0.0
        theta = math.acos(min(w, 1.0))
        p = p_cond(theta, q1, cfg.env)
        if p == 0.0:
            return 0.0

        def inner(z):
            x = s * _uav_kappa(theta, z / w, q1, cfg)
            return _one_minus_pow(x, cfg.m) * z * z
        val, _ = integrate.quad(inner, z_lo, z_hi, epsrel=rel_tol, epsabs=1e-300,
                                limit=100)
        return val * p * 2.0 / v ** 5

    def limits(v):
        w = v * v
        z_lo, z_hi = hm, hM
        if math.isfinite(u_max):
            # cylinder window: u = (z/w)·sqrt(1-w²) <= u_max
            if w < 1.0:
                z_hi = min(z_hi, u_max * w / math.sqrt(1.0 - w * w))
        return z_lo, z_hi

    def outer_full(v):
        z_lo, z_hi = limits(v)
        return column(v, z_lo, z_hi)

    def outer_cap(v):
        w = v * v
        z_lo, z_hi = limits(v)
        return column(v, z_lo, min(z_hi, r_excl * w))

    total, _ = integrate.quad(outer_full, 0.0, 1.0, epsrel=rel_tol, epsabs=1e-300,
                              limit=200)
    if r_excl > hm:
        v_lo = math.sqrt(hm / r_excl)
        pts = [math.sqrt(hM / r_excl)] if r_excl > hM else None
        cap, _ = integrate.quad(outer_cap, v_lo, 1.0, points=pts, epsrel=rel_tol,
                                epsabs=1e-300, limit=200)
        total -= cap
    return total


def laplace_uav(s, q1: Cond, q2: Cond, r_d0, cfg: NetworkConfig,
                u_max=math.inf, rel_tol=1e-9):
    """Laplace transform of interference from condition-q1 UAVs given a q2
    server at 3D distance r_d0."""
    if s == 0.0 or cfg.lambda_d == 0.0:
        return 1.0
    r_excl = exclusion_radius(q1, q2, r_d0, cfg)
    val = _uav_exponent_scalar(s, r_excl, q1, cfg, u_max=u_max, rel_tol=rel_tol)
    e = -2.0 * math.pi * cfg.lambda_d * val
    return math.exp(e) if e > _LOG_FLOOR else 0.0


# ---------------------------------------------------------------------------
# batched fixed-node kernels


def _panel_nodes(edges, n):
    """Gauss-Legendre nodes/weights tiled over consecutive panels."""
    x, w = np.polynomial.legendre.leggauss(n)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        xs.append(lo + half * (x + 1.0))
        ws.append(half * w)
    return np.concatenate(xs), np.concatenate(ws)


_PSI_UNIT_X, _PSI_UNIT_W = _panel_nodes([0.0, 0.5, 1.0], 80)
_Z_FULL_X, _Z_FULL_W = np.polynomial.legendre.leggauss(16)
_Z_FULL_X = 0.5 * (_Z_FULL_X + 1.0)
_Z_FULL_W = 0.5 * _Z_FULL_W
_V_NODE_X, _V_NODE_W = _panel_nodes([0.0, 0.35, 1.0], 16)


def _bs_exponent_batch(s, u0, cfg: NetworkConfig, max_order, u_max=None):
    """J_B,j integrals for aligned arrays of (s, u0); shape (max_order+1, n).

    J_B,0 = ∫ [1-(1+sκ)^-m] u du over u >= u0;  J_B,j = ∫ κ^j (1+sκ)^{-m-j} u du.
    ``u_max`` truncates the interferer field at a horizontal window radius.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    u0 = np.broadcast_to(np.atleast_1d(np.asarray(u0, dtype=float)), s.shape)
    psi0 = np.arctan2(u0, cfg.h_b)
    psi1 = math.pi / 2 if u_max is None else math.atan2(u_max, cfg.h_b)
    span = np.maximum(psi1 - psi0, 0.0)[:, None]
    psi = psi0[:, None] + span * _PSI_UNIT_X[None, :]
    wgt = span * _PSI_UNIT_W[None, :]
    kappa = _bs_kappa(psi, cfg)
    u_du = cfg.h_b ** 2 * np.tan(psi) / np.cos(psi) ** 2
    x = s[:, None] * kappa
    out = np.empty((max_order + 1, s.size))
    out[0] = np.sum(_one_minus_pow(x, cfg.m) * u_du * wgt, axis=1)
    if max_order:
        base = np.power(1.0 + x, -float(cfg.m))
        kp = np.ones_like(kappa)
        for j in range(1, max_order + 1):
            base = base / (1.0 + x)
            kp = kp * kappa
            out[j] = np.sum(kp * base * u_du * wgt, axis=1)
    return out


def _uav_exponent_batch(s, r_excl, q1: Cond, cfg: NetworkConfig, max_order,
                        u_max=None):
    """J_D,j integrals (slab minus exclusion ball) for aligned (s, r_excl).

    The remaining interferer region is integrated directly: per height z the
    direction cosine w = cos(theta) runs over [z/sqrt(z²+u_max²), min(z/r_excl, 1)]
    (outside the window cylinder below, outside the exclusion ball above), with
    the v = sqrt(w) substitution absorbing the w^(alpha-3) horizon behavior.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    r_excl = np.broadcast_to(np.atleast_1d(np.asarray(r_excl, dtype=float)),
                             s.shape)
    hm, hM = cfg.h_d_min, cfg.h_d_max
    eta = cfg.eta(q1 is Cond.LOS)
    alpha = cfg.alpha(q1 is Cond.LOS)
    z = hm + (hM - hm) * _Z_FULL_X                       # (nz,)
    zw = (hM - hm) * _Z_FULL_W
    if u_max is None:
        w_lo = np.zeros((s.size, z.size))
    else:
        w_lo = np.broadcast_to(z / np.sqrt(z * z + u_max * u_max),
                               (s.size, z.size))
    with np.errstate(divide="ignore"):
        w_hi = np.minimum(z[None, :] / np.maximum(r_excl[:, None], 1e-300), 1.0)
    v_lo = np.sqrt(w_lo)
    v_hi = np.sqrt(np.maximum(w_hi, w_lo))
    span = v_hi - v_lo                                    # (n, nz)
    v = v_lo[..., None] + span[..., None] * _V_NODE_X[None, None, :]
    v = np.where(span[..., None] > 0, v, 1.0)             # dummy for empty columns
    w = v * v
    theta = np.arccos(np.clip(w, 0.0, 1.0))
    p = p_cond(theta, q1, cfg.env)
    gain = uav_access_gain(np.pi - theta)
    kap = (cfg.p_d / (cfg.m * eta)) * gain * w ** alpha \
        * (z ** (-alpha))[None, :, None]
    wgt = (span[..., None] * _V_NODE_W[None, None, :]
           * (zw * z * z)[None, :, None] * 2.0 * p / v ** 5)
    x = s[:, None, None] * kap
    out = np.empty((max_order + 1, s.size))
    out[0] = (_one_minus_pow(x, cfg.m) * wgt).sum(axis=(1, 2))
    if max_order:
        base = np.power(1.0 + x, -float(cfg.m))
        kp = np.ones_like(x)
        for j in range(1, max_order + 1):
            base = base / (1.0 + x)
            kp = kp * kap
            out[j] = (kp * base * wgt).sum(axis=(1, 2))
    return out


def _pochhammer(m, j):
    out = 1.0
    for i in range(j):
        out *= m + i
    return out


class _BatchLaplace:
    """Exponent and derivative factors of e^(-sN0)·L_{I|q}(s) for aligned
    per-sample geometry and evaluation points."""

    def __init__(self, cfg: NetworkConfig, cond: Cond, u_b0, r_d0, n0=None,
                 u_max=None):
        self.cfg = cfg
        self.cond = cond
        self.u_b0 = np.atleast_1d(np.asarray(u_b0, dtype=float))
        r_d0 = np.atleast_1d(np.asarray(r_d0, dtype=float))
        self.r_excl = {
            q1: np.array([exclusion_radius(q1, cond, r, cfg) for r in r_d0])
            for q1 in (Cond.LOS, Cond.NLOS)
        }
        self.n0 = cfg.n0 if n0 is None else n0
        self.u_max = u_max

    def sliced(self, idx):
        """View onto the geometry rows ``idx`` (for grouped evaluations)."""
        view = object.__new__(_BatchLaplace)
        view.cfg = self.cfg
        view.cond = self.cond
        view.u_b0 = self.u_b0[idx]
        view.r_excl = {q: arr[idx] for q, arr in self.r_excl.items()}
        view.n0 = self.n0
        view.u_max = self.u_max
        return view

    def log_value_and_factors(self, s, max_order):
        """(G, [Q_0..Q_max]) with e^G = value and derivative_k = e^G·Q_k."""
        cfg = self.cfg
        s = np.atleast_1d(np.asarray(s, dtype=float))
        jb = _bs_exponent_batch(s, self.u_b0, cfg, max_order, u_max=self.u_max)
        jl = _uav_exponent_batch(s, self.r_excl[Cond.LOS], Cond.LOS, cfg,
                                 max_order, u_max=self.u_max)
        jn = _uav_exponent_batch(s, self.r_excl[Cond.NLOS], Cond.NLOS, cfg,
                                 max_order, u_max=self.u_max)
        two_pi = 2.0 * math.pi
        g0 = -s * self.n0 - two_pi * (cfg.lambda_b * jb[0]
                                      + cfg.lambda_d * (jl[0] + jn[0]))
        qs = [np.ones_like(g0)]
        if max_order:
            derivs = []
            for j in range(1, max_order + 1):
                gj = ((-1.0) ** j * _pochhammer(cfg.m, j) * two_pi
                      * (cfg.lambda_b * jb[j] + cfg.lambda_d * (jl[j] + jn[j])))
                if j == 1:
                    gj = gj - self.n0
                derivs.append(gj)
            for n in range(1, max_order + 1):
                qn = np.zeros_like(g0)
                for i in range(n):
                    qn += math.comb(n - 1, i) * derivs[n - 1 - i] * qs[i]
                qs.append(qn)
        return g0, qs


class LaplaceEvaluator:
    """Conditional Laplace transform of interference-plus-noise for one serving
    geometry; evaluate(0) = 1 and derivatives up to order 2m are supported."""

    def __init__(self, geom: ServingGeometry, cfg: NetworkConfig, n0=None,
                 u_max=None):
        if cfg.bs_antenna_model is AntennaModel.ISOTROPIC:
            raise ValueError("analytical interference model requires a "
                             "non-isotropic antenna configuration")
        u_b0 = math.sqrt(max(geom.r_b0 ** 2 - cfg.h_b ** 2, 0.0))
        self.cfg = cfg
        self.geom = geom
        self._batch = _BatchLaplace(cfg, geom.cond, [u_b0], [geom.r_d0], n0=n0,
                                    u_max=u_max)
        self.max_order = 2 * cfg.m

    def log_value(self, s):
        g0, _ = self._batch.log_value_and_factors([s], 0)
        return float(g0[0])

    def evaluate(self, s):
        g = self.log_value(s)
        return math.exp(g) if g > _LOG_FLOOR else 0.0

    def derivative(self, k, s):
        """k-th derivative of e^(-sN0)·L(s) at s (k up to 2m)."""
        if not 0 <= k <= self.max_order:
            raise ValueError(f"derivative order {k} outside 0..{self.max_order}")
        g0, qs = self._batch.log_value_and_factors([s], k)
        g = float(g0[0])
        if g <= _LOG_FLOOR:
            return 0.0
        return math.exp(g) * float(qs[k][0])


def laplace_total(s, geom: ServingGeometry, cfg: NetworkConfig):
    """e^(-sN0) times the product of the BS and both UAV interference transforms."""
    return LaplaceEvaluator(geom, cfg).evaluate(s)
