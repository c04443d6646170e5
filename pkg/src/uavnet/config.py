"""Scenario configuration: deployment, power, antenna, fading and environment parameters.

Everything downstream reads from a frozen :class:`NetworkConfig`.  All internal
computation is carried out in linear power/gain units and radians; dB and
degrees appear only at the config and report boundaries.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum


def db_to_linear(x_db):
    """10^(x/10)."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)


class AntennaModel(str, Enum):
    ISOTROPIC = "isotropic"
    OMNI_DOWNTILT = "omni_downtilt"
    OMNI_PLUS_DIRECTIONAL = "omni_plus_directional"


@dataclass(frozen=True)
class Environment:
    """LoS-probability curve parameters and excess path loss of one deployment type.

    ``c1``/``c2`` shape the sigmoid LoS-probability curve (``c2`` acts per
    degree of elevation); ``eta_*_db`` are the mean excess path losses.
    """

    c1: float
    c2: float
    eta_los_db: float
    eta_nlos_db: float

    @property
    def eta_los(self):
        return db_to_linear(self.eta_los_db)

    @property
    def eta_nlos(self):
        return db_to_linear(self.eta_nlos_db)


ENVIRONMENTS = {
    "suburban": Environment(4.88, 0.43, 0.1, 21.0),
    "urban": Environment(9.61, 0.16, 1.0, 20.0),
    "dense_urban": Environment(12.08, 0.11, 1.6, 23.0),
    "highrise": Environment(27.23, 0.08, 2.3, 34.0),
}


def environment_presets():
    """The four named propagation environments."""
    return dict(ENVIRONMENTS)


@dataclass(frozen=True)
class NetworkConfig:
    """All parameters of one deployment scenario.

    Densities are per m^2 (BS) / per m^3 (UAV), heights in meters, powers and
    noise linear, angles in radians.
    """

    lambda_b: float = 1e-6          # BS density
    h_b: float = 20.0               # BS height
    lambda_d: float = 1e-8          # UAV density
    h_d_min: float = 100.0          # bottom of the UAV slab
    h_d_max: float = 300.0          # top of the UAV slab
    p_b: float = 10.0               # BS transmit power (linear)
    p_d: float = db_to_linear(5.0)  # UAV transmit power (linear)
    n0: float = 1e-8                # noise power (linear)
    alpha_los: float = 2.5
    alpha_nlos: float = 4.0
    m: int = 1                      # Nakagami shape (integer)
    env: Environment = ENVIRONMENTS["urban"]
    bs_antenna_model: AntennaModel = AntennaModel.OMNI_DOWNTILT
    n_b: int = 8                    # ULA element count
    theta_b: float = math.radians(100.0)  # BS mainlobe zenith angle (downtilt)

    @property
    def eta_los(self):
        return self.env.eta_los

    @property
    def eta_nlos(self):
        return self.env.eta_nlos

    def eta(self, los: bool):
        return self.eta_los if los else self.eta_nlos

    def alpha(self, los: bool):
        return self.alpha_los if los else self.alpha_nlos

    def with_(self, **kw):
        """Copy with fields replaced (config objects are immutable)."""
        return replace(self, **kw)


def validate(cfg: NetworkConfig):
    """Check every invariant; returns the full list of violations (empty if ok)."""
    v = []
    if not cfg.lambda_b > 0:
        v.append("lambda_b must be > 0")
    if not cfg.lambda_d > 0:
        v.append("lambda_d must be > 0")
    if not cfg.h_b > 0:
        v.append("h_b must be > 0")
    if not cfg.h_d_min > 0:
        v.append("h_d_min must be > 0")
    if not cfg.h_d_min < cfg.h_d_max:
        v.append("UAV height band degenerate: h_d_min must be < h_d_max")
    if not cfg.p_b > 0:
        v.append("p_b must be > 0")
    if not cfg.p_d > 0:
        v.append("p_d must be > 0")
    if cfg.n0 < 0:
        v.append("n0 must be >= 0")
    if not cfg.alpha_los < cfg.alpha_nlos:
        v.append("alpha_los must be < alpha_nlos")
    if not cfg.alpha_los > 2:
        v.append("alpha_los must be > 2 (interference diverges otherwise)")
    if not (isinstance(cfg.m, int) and cfg.m >= 1):
        v.append("m must be an integer >= 1")
    if not cfg.env.c1 > 0:
        v.append("env.c1 must be > 0")
    if not cfg.env.c2 > 0:
        v.append("env.c2 must be > 0")
    if not cfg.env.eta_los_db >= 0:
        v.append("env.eta_los_db must be >= 0")
    if not cfg.env.eta_los_db <= cfg.env.eta_nlos_db:
        v.append("env excess losses out of order: eta_los_db must be <= eta_nlos_db")
    if not (isinstance(cfg.n_b, int) and cfg.n_b >= 1):
        v.append("n_b must be an integer >= 1")
    if not (math.pi / 2 < cfg.theta_b < math.pi):
        v.append("downtilt constraint: theta_b must lie in (pi/2, pi)")
    if cfg.bs_antenna_model not in tuple(AntennaModel):
        v.append("unknown bs_antenna_model")
    return v


class ConfigError(ValueError):
    """Raised when a config file cannot be turned into a valid NetworkConfig."""


# JSON boundary: powers/noise carry a _db suffix, the mainlobe angle is in
# degrees, env is a preset name or an inline object.
_DB_KEYS = {"p_b_db": "p_b", "p_d_db": "p_d", "n0_db": "n0"}
_PLAIN_KEYS = (
    "lambda_b", "h_b", "lambda_d", "h_d_min", "h_d_max",
    "alpha_los", "alpha_nlos", "m", "n_b",
)


def config_from_dict(data: dict) -> NetworkConfig:
    kw = {}
    known = set(_PLAIN_KEYS) | set(_DB_KEYS) | {"env", "bs_antenna_model", "theta_b_deg"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in _PLAIN_KEYS:
        if key in data:
            kw[key] = int(data[key]) if key in ("m", "n_b") else float(data[key])
    for key, field in _DB_KEYS.items():
        if key in data:
            kw[field] = db_to_linear(float(data[key]))
    if "theta_b_deg" in data:
        kw["theta_b"] = math.radians(float(data["theta_b_deg"]))
    env = data.get("env")
    if isinstance(env, str):
        if env not in ENVIRONMENTS:
            raise ConfigError(f"unknown environment preset {env!r}")
        kw["env"] = ENVIRONMENTS[env]
    elif isinstance(env, dict):
        try:
            kw["env"] = Environment(
                c1=float(env["c1"]), c2=float(env["c2"]),
                eta_los_db=float(env["eta_los_db"]),
                eta_nlos_db=float(env["eta_nlos_db"]),
            )
        except KeyError as exc:
            raise ConfigError(f"env object missing key {exc}") from exc
    elif env is not None:
        raise ConfigError("env must be a preset name or an object")
    if "bs_antenna_model" in data:
        try:
            kw["bs_antenna_model"] = AntennaModel(data["bs_antenna_model"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return NetworkConfig(**kw)


def load_config(path) -> NetworkConfig:
    """Load a scenario from a JSON file and validate it."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"not valid JSON: {exc}") from exc
    cfg = config_from_dict(data)
    violations = validate(cfg)
    if violations:
        raise ConfigError("; ".join(violations))
    return cfg


def config_to_dict(cfg: NetworkConfig) -> dict:
    """Boundary representation (dB powers, degree angle) of a config."""
    env_name = next((k for k, v in ENVIRONMENTS.items() if v == cfg.env), None)
    return {
        "lambda_b": cfg.lambda_b,
        "h_b": cfg.h_b,
        "lambda_d": cfg.lambda_d,
        "h_d_min": cfg.h_d_min,
        "h_d_max": cfg.h_d_max,
        "p_b_db": linear_to_db(cfg.p_b),
        "p_d_db": linear_to_db(cfg.p_d),
        "n0_db": linear_to_db(cfg.n0) if cfg.n0 > 0 else -math.inf,
        "alpha_los": cfg.alpha_los,
        "alpha_nlos": cfg.alpha_nlos,
        "m": cfg.m,
        "env": env_name if env_name is not None else {
            "c1": cfg.env.c1, "c2": cfg.env.c2,
            "eta_los_db": cfg.env.eta_los_db, "eta_nlos_db": cfg.env.eta_nlos_db,
        },
        "bs_antenna_model": cfg.bs_antenna_model.value,
        "theta_b_deg": math.degrees(cfg.theta_b),
        "n_b": cfg.n_b,
    }
