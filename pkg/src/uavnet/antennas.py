"""Antenna gain patterns: ULA array factor, downtilted omnidirectional composite,
steerable directional, aerial access pattern, isotropic baseline.

All public functions return linear gains and accept numpy arrays for the angle
arguments.  Zenith angles are measured from the +z axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import AntennaModel, db_to_linear

GAIN_MAX_DBI = 8.0          # peak element / directional / access gain
BS_SLA_V_DB = 30.0          # vertical sidelobe attenuation limit
DIR_FRONT_BACK_DB = 30.0    # front-back ratio of the steerable pattern
UAV_ACCESS_SLA_DB = 30.0

_AF_EPS = 1e-9              # removable-singularity band of the array factor


@dataclass(frozen=True)
class UlaParams:
    """Vertical uniform linear array at the BS (half-wavelength spacing)."""
    n_elements: int = 8
    theta_tilt: float = math.radians(100.0)
    theta_3db: float = math.radians(65.0)
    sla_v_db: float = BS_SLA_V_DB
    g_e_max_dbi: float = GAIN_MAX_DBI


@dataclass(frozen=True)
class DirectionalParams:
    """Steerable directional antenna (backhaul use)."""
    theta_3db: float = math.radians(10.0)
    phi_3db: float = math.radians(10.0)
    a_m_db: float = DIR_FRONT_BACK_DB
    g_max_dbi: float = GAIN_MAX_DBI


def array_factor(theta, theta_tilt, n):
    """Normalized array factor sin(n·x)/(n·sin x), x = (pi/2)(cos θ − cos θ_tilt).

    Removable singularities (mainlobe and grating directions) return the limit
    value cos(n·x)/cos(x); within |Δ| < 1e-9 of the mainlobe that is exactly 1.
    """
    theta = np.asarray(theta, dtype=float)
    delta = np.cos(theta) - math.cos(theta_tilt)
    x = 0.5 * np.pi * delta
    # distance of Δ from the nearest even integer locates sin(x) zeros
    sing = np.abs(delta - 2.0 * np.round(0.5 * delta)) < _AF_EPS
    denom = n * np.sin(x)
    denom = np.where(sing, 1.0, denom)
    out = np.where(sing, np.cos(n * x) / np.cos(x), np.sin(n * x) / denom)
    if out.ndim == 0:
        return float(out)
    return out


def _element_vertical_db(theta, theta_3db, sla_v_db):
    dev = (np.asarray(theta, dtype=float) - np.pi / 2) / theta_3db
    return -np.minimum(12.0 * dev * dev, sla_v_db)


def bs_omni_gain(theta, params: UlaParams = UlaParams()):
    """Linear gain of the downtilted omnidirectional BS array along zenith θ.

    Element pattern plus 20·log10|array factor|; exact array nulls map to zero
    linear gain rather than being clamped.
    """
    fa = np.abs(np.asarray(array_factor(theta, params.theta_tilt, params.n_elements)))
    ge_db = params.g_e_max_dbi + _element_vertical_db(theta, params.theta_3db, params.sla_v_db)
    with np.errstate(divide="ignore"):
        total_db = ge_db + 20.0 * np.log10(fa)
    out = np.where(fa == 0.0, 0.0, 10.0 ** (total_db / 10.0))
    if out.ndim == 0:
        return float(out)
    return out


def wrap_angle(x):
    """Wrap an angle difference into [-pi, pi]."""
    return (np.asarray(x, dtype=float) + np.pi) % (2.0 * np.pi) - np.pi


def directional_gain(theta, phi, theta0, phi0, params: DirectionalParams = DirectionalParams()):
    """Linear gain of the steerable directional antenna pointed at (θ0, φ0)."""
    gv = -np.minimum(12.0 * ((np.asarray(theta, dtype=float) - theta0) / params.theta_3db) ** 2,
                     BS_SLA_V_DB)
    dphi = wrap_angle(np.asarray(phi, dtype=float) - phi0)
    gh = -np.minimum(12.0 * (dphi / params.phi_3db) ** 2, params.a_m_db)
    g3d = -np.minimum(-gv - gh, params.a_m_db)
    out = 10.0 ** ((params.g_max_dbi + g3d) / 10.0)
    if out.ndim == 0:
        return float(out)
    return out


_UAV_ACCESS_THETA_3DB = math.radians(120.0)


def uav_access_gain(theta):
    """Linear gain of the fixed, straight-down aerial access antenna.

    The argument is the angle at the UAV measured from +z; the boresight is
    θ = pi (pointing at the ground).
    """
    dev = (np.asarray(theta, dtype=float) - np.pi) / _UAV_ACCESS_THETA_3DB
    g_db = GAIN_MAX_DBI - np.minimum(12.0 * dev * dev, UAV_ACCESS_SLA_DB)
    out = 10.0 ** (g_db / 10.0)
    if out.ndim == 0:
        return float(out)
    return out


class LinkKind(Enum):
    BS_ACCESS = "bs_access"          # serving BS -> ground terminal
    UAV_ACCESS = "uav_access"        # serving UAV -> ground terminal
    BACKHAUL_BS = "backhaul_bs"      # BS-side gain of the feeder link
    BACKHAUL_UAV = "backhaul_uav"    # UAV-side gain of the feeder link


def gain_for_link(model: AntennaModel, link_kind: LinkKind, geom, cfg):
    """Dispatch the serving-link gains used by the coverage analysis.

    ``geom`` is a ServingGeometry; under the isotropic baseline every link has
    unit gain.  Backhaul antennas of the serving pair are perfectly steered, so
    the steerable sides contribute their peak gain.
    """
    if not isinstance(link_kind, LinkKind):
        raise ValueError(f"unknown link kind: {link_kind!r}")
    if model is AntennaModel.ISOTROPIC:
        return 1.0
    ula = UlaParams(n_elements=cfg.n_b, theta_tilt=cfg.theta_b)
    if link_kind is LinkKind.BS_ACCESS:
        return bs_omni_gain(math.pi - math.acos(cfg.h_b / geom.r_b0), ula)
    if link_kind is LinkKind.UAV_ACCESS:
        return uav_access_gain(math.pi - geom.theta_d0)
    if link_kind is LinkKind.BACKHAUL_UAV:
        return db_to_linear(GAIN_MAX_DBI)
    # BACKHAUL_BS
    if model is AntennaModel.OMNI_PLUS_DIRECTIONAL:
        return db_to_linear(GAIN_MAX_DBI)
    r_bd = geom.backhaul_distance(cfg.h_b)
    cosang = (geom.r_d0 * math.cos(geom.theta_d0) - cfg.h_b) / r_bd
    return bs_omni_gain(math.acos(min(1.0, max(-1.0, cosang))), ula)
