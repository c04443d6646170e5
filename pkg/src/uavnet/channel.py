"""Air-to-ground channel: LoS probability, received-power law, unit-mean gamma fading."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .config import Environment


def p_los(theta, env: Environment):
    """Probability that a link with zenith angle θ (radians) is line-of-sight.

    The sigmoid is parameterized in degrees of elevation (90 − θ_deg), so the
    conversion happens here at the call site.
    """
    theta_deg = np.degrees(np.asarray(theta, dtype=float))
    out = 1.0 / (1.0 + env.c1 * np.exp(-env.c2 * (90.0 - theta_deg - env.c1)))
    if out.ndim == 0:
        return float(out)
    return out


def p_nlos(theta, env: Environment):
    return 1.0 - p_los(theta, env)


@dataclass(frozen=True)
class LinkBudget:
    """One link's mean power bookkeeping (all linear)."""
    tx_power: float
    tx_gain: float
    rx_gain: float
    distance: float
    alpha: float
    eta: float


def mean_received_power(budget: LinkBudget):
    """P · Gtx · Grx · r^(−α) / η with the unit-mean fading marginalized out."""
    return (budget.tx_power * budget.tx_gain * budget.rx_gain
            * budget.distance ** (-budget.alpha) / budget.eta)


@dataclass(frozen=True)
class FadingLaw:
    """Unit-mean small-scale power fading: Gamma with shape = rate = m."""
    m: int

    def __post_init__(self):
        if not (isinstance(self.m, int) and self.m >= 1):
            raise ValueError("fading shape m must be an integer >= 1")


def sample_fading(law: FadingLaw, rng, size=None):
    """Draw unit-mean Gamma(m, m) fading powers."""
    return rng.gamma(shape=law.m, scale=1.0 / law.m, size=size)


def gamma_cdf_int(m: int, x):
    """cdf of Gamma(shape=m, rate=m) at x for integer m, via the finite series.

    1 − Σ_{i<m} (mx)^i / i! · e^(−mx); equals the regularized lower incomplete
    gamma γ(m, mx)/(m−1)!.
    """
    x = np.asarray(x, dtype=float)
    mx = m * x
    acc = np.zeros_like(mx)
    term = np.ones_like(mx)
    acc += term
    for i in range(1, m):
        term = term * mx / i
        acc += term
    out = 1.0 - acc * np.exp(-mx)
    out = np.clip(out, 0.0, 1.0)
    if out.ndim == 0:
        return float(out)
    return out


def gamma_ccdf_int(m: int, x):
    """Complement of :func:`gamma_cdf_int` (series form, avoids cancellation)."""
    x = np.asarray(x, dtype=float)
    mx = m * x
    acc = np.zeros_like(mx)
    term = np.ones_like(mx)
    acc += term
    for i in range(1, m):
        term = term * mx / i
        acc += term
    out = acc * np.exp(-mx)
    out = np.clip(out, 0.0, 1.0)
    if out.ndim == 0:
        return float(out)
    return out


def fading_pdf(m: int, x):
    """pdf m^m x^(m−1) e^(−mx) / Γ(m) of the unit-mean gamma fading."""
    x = np.asarray(x, dtype=float)
    out = m ** m * x ** (m - 1) * np.exp(-m * x) / special.gamma(m)
    if out.ndim == 0:
        return float(out)
    return out
