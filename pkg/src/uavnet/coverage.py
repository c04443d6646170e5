"""Analytical coverage probability of the hybrid one-hop/two-hop scheme.

For each serving condition q the coverage is the expectation, over the serving
geometry (r_B0, r_D0, theta_D0, phi) and the backhaul fading Z, of a finite
sum of signed Laplace-transform derivatives: the interference expectation of
the gamma-ratio exceedance terms from :mod:`uavnet.ratiodist`.  The outer 5D
integral is evaluated by randomized quasi-Monte Carlo (scrambled Sobol points
mapped through the exact inverse-cdf samplers), with the spread over scramble
replicates providing the error estimate.

The amplify-and-forward path selects its term regime per sample through
g = N0/(cZ); decode-and-forward integrates Z analytically into the backhaul
outage weight V0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .antennas import GAIN_MAX_DBI, LinkKind, UlaParams, bs_omni_gain, db_to_linear, \
    gain_for_link, uav_access_gain
from .channel import gamma_cdf_int
from .config import AntennaModel, NetworkConfig
from .geometry import Cond, ServingGeometry, association_probs, closest_bs_law, \
    sample_band_zenith, serving_uav_table
from .interference import _BatchLaplace, LaplaceEvaluator, _LOG_FLOOR
from .ratiodist import joint_exceedance_term_groups


@dataclass(frozen=True)
class MuTerm:
    """Arguments of one mu building block of the coverage theorems."""
    x: float
    y: float
    i: int
    j: int
    r: float      # multiplier of the (-r)^k / k! prefactor
    s: float      # evaluation point of the derivative
    k: int


def mu(term: MuTerm, lap: LaplaceEvaluator):
    """x^i y^j/(x+y)^(i+j) · (−r)^k/k! · d^k/ds^k [e^(−sN0) L(s)] at term.s."""
    if term.x == 0.0 and term.i > 0:
        return 0.0
    if term.y == 0.0 and term.j > 0:
        return 0.0
    pref = (term.x ** term.i * term.y ** term.j
            / (term.x + term.y) ** (term.i + term.j))
    pref *= (-term.r) ** term.k / math.factorial(term.k)
    return pref * lap.derivative(term.k, term.s)


def link_coefficients(geom: ServingGeometry, cfg: NetworkConfig):
    """(a, b, c): mean direct, relay-access and backhaul powers of the serving
    links, gains selected per the configured antenna model."""
    model = cfg.bs_antenna_model
    los = geom.cond is Cond.LOS
    a = (cfg.p_b * gain_for_link(model, LinkKind.BS_ACCESS, geom, cfg)
         * geom.r_b0 ** (-cfg.alpha_nlos) / cfg.eta_nlos)
    b = (cfg.p_d * gain_for_link(model, LinkKind.UAV_ACCESS, geom, cfg)
         * geom.r_d0 ** (-cfg.alpha(los)) / cfg.eta(los))
    r_bd = geom.backhaul_distance(cfg.h_b)
    c = (cfg.p_b * gain_for_link(model, LinkKind.BACKHAUL_BS, geom, cfg)
         * gain_for_link(model, LinkKind.BACKHAUL_UAV, geom, cfg)
         * r_bd ** (-cfg.alpha_los) / cfg.eta_los)
    return a, b, c


def _expect_terms(terms, lap: LaplaceEvaluator, weight_extra=None, n_t1=None):
    """E_I of a term list through the Laplace evaluator (scalar path).

    ``weight_extra`` scales terms beyond the first ``n_t1`` (used for the
    backhaul-success weight of the decode-and-forward combination).
    """
    total = 0.0
    for idx, t in enumerate(terms):
        if not math.isfinite(t.s):
            continue
        g0, qs = lap._batch.log_value_and_factors([t.s], t.n)
        g = float(g0[0])
        if g <= _LOG_FLOOR:
            continue
        q = float(qs[t.n][0])
        if q == 0.0:
            continue
        val = t.sign * (-1.0) ** t.n * math.copysign(1.0, q) * math.exp(
            t.log_coef + g + math.log(abs(q)))
        if weight_extra is not None and idx >= n_t1:
            val *= weight_extra
        total += val
    return total


def w_terms_af(tau, geom: ServingGeometry, z, cfg: NetworkConfig,
               lap: LaplaceEvaluator):
    """Conditional AF coverage kernel W at one geometry and backhaul fading z."""
    a, b, c = link_coefficients(geom, cfg)
    cz = c * z
    n0 = lap._batch.n0
    g = n0 / cz if cz > 0 else math.inf
    t1, extra = joint_exceedance_term_groups(tau, a, b, g, cfg.m)
    return _expect_terms(t1 + extra, lap)


def v_terms_df(tau, geom: ServingGeometry, cfg: NetworkConfig,
               lap: LaplaceEvaluator):
    """Conditional DF coverage kernel W = V1 + (1-V0)(V2 + V3·1(tau<1))."""
    a, b, c = link_coefficients(geom, cfg)
    n0 = lap._batch.n0
    v0 = gamma_cdf_int(cfg.m, n0 * tau / c) if c > 0 else 1.0
    t1, extra = joint_exceedance_term_groups(tau, a, b, 0.0, cfg.m)
    return _expect_terms(t1 + extra, lap, weight_extra=1.0 - v0, n_t1=len(t1))


@dataclass(frozen=True)
class CoverageRequest:
    cfg: NetworkConfig
    protocol: str                      # "af" | "df" | "interference_limited"
    tau_grid: tuple                    # linear SINR thresholds, sorted
    n_samples: int = 20480             # geometry samples per condition
    n_scrambles: int = 10              # RQMC replicates (error estimate)
    seed: int = 0
    tolerance: float = 0.02            # stderr above this flags non-convergence
    window_radius: float | None = None  # match a simulator window, None = infinite

    def __post_init__(self):
        taus = tuple(self.tau_grid)
        if not taus or any(t <= 0 for t in taus) or list(taus) != sorted(taus):
            raise ValueError("tau_grid must be positive and sorted")
        object.__setattr__(self, "tau_grid", taus)
        if self.protocol not in ("af", "df", "interference_limited"):
            raise ValueError(f"unknown protocol {self.protocol!r}")


@dataclass
class CoverageResult:
    tau: np.ndarray
    p_cov: np.ndarray
    stderr: np.ndarray
    p_cov_los_part: np.ndarray         # A_L · P_cov,L
    p_cov_nlos_part: np.ndarray        # A_N · P_cov,N
    a_los: float
    a_nlos: float
    converged: bool


_MIN_U = 1e-12  # keep inverse-cdf arguments inside the open unit interval


def _geometry_batch(cfg, cond, n, sobol_seed):
    """Map one scrambled Sobol block to (z, geometry, coefficients).

    ``n`` must be a power of two (Sobol balance).
    """
    sob = stats.qmc.Sobol(d=5, scramble=True,
                          seed=np.random.default_rng(sobol_seed))
    u = np.clip(sob.random_base2(int(math.log2(n))), _MIN_U, 1.0 - _MIN_U)
    z = stats.gamma.ppf(u[:, 0], a=cfg.m, scale=1.0 / cfg.m)
    r_b0 = closest_bs_law(cfg).ppf(u[:, 1])
    r_d0 = np.asarray(serving_uav_table(cond, cfg).ppf(u[:, 2]))
    theta = sample_band_zenith(r_d0, cond, cfg, u[:, 3])
    phi = 2.0 * math.pi * u[:, 4]

    los = cond is Cond.LOS
    ula = UlaParams(n_elements=cfg.n_b, theta_tilt=cfg.theta_b)
    g_b0 = bs_omni_gain(np.pi - np.arccos(cfg.h_b / r_b0), ula)
    a = cfg.p_b * g_b0 * r_b0 ** (-cfg.alpha_nlos) / cfg.eta_nlos
    b = (cfg.p_d * uav_access_gain(np.pi - theta)
         * r_d0 ** (-cfg.alpha(los)) / cfg.eta(los))
    u_b0 = np.sqrt(np.maximum(r_b0 ** 2 - cfg.h_b ** 2, 0.0))
    h_d = r_d0 * np.cos(theta)
    sq = (r_b0 ** 2 + r_d0 ** 2 - 2.0 * cfg.h_b * h_d
          - 2.0 * u_b0 * r_d0 * np.sin(theta) * np.cos(phi))
    r_bd = np.sqrt(np.maximum(sq, 1e-18))
    gmax = db_to_linear(GAIN_MAX_DBI)
    if cfg.bs_antenna_model is AntennaModel.OMNI_PLUS_DIRECTIONAL:
        g_bh = gmax * gmax
    else:
        cosang = np.clip((h_d - cfg.h_b) / r_bd, -1.0, 1.0)
        g_bh = bs_omni_gain(np.arccos(cosang), ula) * gmax
    c = cfg.p_b * g_bh * r_bd ** (-cfg.alpha_los) / cfg.eta_los
    return z, u_b0, r_d0, a, b, c


_CHUNK = 4096


def _expect_terms_batched(rows, batch_lap, n_out):
    """Sum row contributions sign·w·(−1)^n·exp(lc)·F^(n)(s) into per-sample W.

    ``rows`` holds (sample_idx, sign·weight, log_coef, n, s); duplicate
    (sample, s) pairs share one transform evaluation.
    """
    w_out = np.zeros(n_out)
    if not rows:
        return w_out
    idx = np.fromiter((r[0] for r in rows), dtype=np.int64, count=len(rows))
    sgn = np.fromiter((r[1] for r in rows), dtype=float, count=len(rows))
    lc = np.fromiter((r[2] for r in rows), dtype=float, count=len(rows))
    nn = np.fromiter((r[3] for r in rows), dtype=np.int64, count=len(rows))
    ss = np.fromiter((r[4] for r in rows), dtype=float, count=len(rows))

    key = np.rec.fromarrays([idx, ss])
    uniq, inv = np.unique(key, return_inverse=True)
    u_idx = uniq.f0.astype(np.int64)
    u_s = uniq.f1
    max_n = int(nn.max())
    g_all = np.empty(len(uniq))
    q_all = np.ones((max_n + 1, len(uniq)))
    for lo in range(0, len(uniq), _CHUNK):
        hi = min(lo + _CHUNK, len(uniq))
        g0, qs = batch_lap.sliced(u_idx[lo:hi]).log_value_and_factors(
            u_s[lo:hi], max_n)
        g_all[lo:hi] = g0
        for k in range(max_n + 1):
            q_all[k, lo:hi] = qs[k]

    g_row = g_all[inv]
    q_row = q_all[nn, inv]
    live = (g_row > _LOG_FLOOR) & (q_row != 0.0)
    contrib = np.zeros(len(rows))
    contrib[live] = (sgn[live] * (-1.0) ** nn[live] * np.sign(q_row[live])
                     * np.exp(lc[live] + g_row[live] + np.log(np.abs(q_row[live]))))
    np.add.at(w_out, idx, contrib)
    return w_out


def _conditional_coverage(cfg, cond, taus, protocol, n_per, n_scr, seed, n0,
                          u_max=None):
    """RQMC estimate of P_cov,q on the tau grid: (means, per-scramble means)."""
    means = np.zeros((n_scr, len(taus)))
    cond_tag = 0 if cond is Cond.LOS else 1
    for k in range(n_scr):
        ss = np.random.SeedSequence((seed, cond_tag, k))
        z, u_b0, r_d0, a, b, c = _geometry_batch(cfg, cond, n_per, ss)
        lap = _BatchLaplace(cfg, cond, u_b0, r_d0, n0=n0, u_max=u_max)
        if protocol == "af":
            g = np.where(c * z > 0, n0 / np.maximum(c * z, 1e-300), math.inf)
        else:
            g = np.zeros(n_per)
        for j, tau in enumerate(taus):
            rows = []
            if protocol == "df":
                v0 = gamma_cdf_int(cfg.m, np.where(c > 0, n0 * tau / np.maximum(c, 1e-300), np.inf))
                wx = 1.0 - np.asarray(v0)
            for i in range(n_per):
                t1, extra = joint_exceedance_term_groups(tau, a[i], b[i], g[i], cfg.m)
                for t in t1:
                    rows.append((i, t.sign, t.log_coef, t.n, t.s))
                weight = wx[i] if protocol == "df" else 1.0
                if weight > 0.0:
                    for t in extra:
                        rows.append((i, t.sign * weight, t.log_coef, t.n, t.s))
            w = _expect_terms_batched(rows, lap, n_per)
            means[k, j] = np.clip(w, 0.0, 1.0).mean()
    p = means.mean(axis=0)
    se = means.std(axis=0, ddof=1) / math.sqrt(n_scr) if n_scr > 1 else np.full(len(taus), np.nan)
    return p, se


def coverage(req: CoverageRequest) -> CoverageResult:
    """Coverage probability over the tau grid, split by serving condition.

    P_cov = A_L·P_cov,L + A_N·P_cov,N with the association weights from the
    serving-law quadrature; conditions whose association weight is negligible
    are not integrated.
    """
    cfg = req.cfg
    if cfg.bs_antenna_model is AntennaModel.ISOTROPIC:
        raise ValueError("analytical coverage requires a non-isotropic antenna "
                         "model (backhaul interference is not negligible "
                         "under the isotropic baseline)")
    n0 = 0.0 if req.protocol == "interference_limited" else cfg.n0
    # with n0 = 0 both protocols coincide (g = 0, V0 = 0), so run the AF path
    proto = "af" if req.protocol == "interference_limited" else req.protocol
    a_l, a_n = association_probs(cfg)
    taus = req.tau_grid
    # per-scramble block rounded to a power of two (Sobol balance)
    n_per = 2 ** max(1, round(math.log2(max(req.n_samples / req.n_scrambles, 2))))
    parts = {}
    errs = {}
    for cond, weight in ((Cond.LOS, a_l), (Cond.NLOS, a_n)):
        if weight < 1e-9:
            parts[cond] = np.zeros(len(taus))
            errs[cond] = np.zeros(len(taus))
            continue
        p, se = _conditional_coverage(cfg, cond, taus, proto, n_per,
                                      req.n_scrambles, req.seed, n0,
                                      u_max=req.window_radius)
        parts[cond] = p
        errs[cond] = se
    p_l_part = a_l * parts[Cond.LOS]
    p_n_part = a_n * parts[Cond.NLOS]
    stderr = np.sqrt((a_l * errs[Cond.LOS]) ** 2 + (a_n * errs[Cond.NLOS]) ** 2)
    p_cov = p_l_part + p_n_part
    return CoverageResult(
        tau=np.asarray(taus), p_cov=p_cov, stderr=stderr,
        p_cov_los_part=p_l_part, p_cov_nlos_part=p_n_part,
        a_los=a_l, a_nlos=a_n,
        converged=bool(np.all(np.nan_to_num(stderr, nan=0.0) <= req.tolerance)),
    )


def coverage_interference_limited(req: CoverageRequest) -> CoverageResult:
    """Noise-free coverage (identical for both relaying protocols)."""
    if req.protocol != "interference_limited":
        req = CoverageRequest(cfg=req.cfg, protocol="interference_limited",
                              tau_grid=req.tau_grid, n_samples=req.n_samples,
                              n_scrambles=req.n_scrambles, seed=req.seed,
                              tolerance=req.tolerance,
                              window_radius=req.window_radius)
    return coverage(req)
