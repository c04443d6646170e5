"""Command-line front end: coverage runs, parameter sweeps, self-validation.

Outputs are diff-friendly: CSV with '#' provenance comments (resolved config,
seed, config hash, version) and JSON validation reports.  Identical config and
seed reproduce byte-identical files.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys

import numpy as np

from . import __version__
from .config import (AntennaModel, ConfigError, ENVIRONMENTS, NetworkConfig,
                     config_to_dict, load_config, validate)
from .coverage import CoverageRequest, coverage
from . import simulate as sim
from .validation import run_suite

_PROTOCOLS = ("af", "df", "interference_limited")
_SWEEP_PARAMS = ("mean_height", "max_height", "uav_density", "tau",
                 "environment", "antenna_model")


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _provenance_lines(cfg, seed, extra=None):
    resolved = json.dumps(config_to_dict(cfg), sort_keys=True)
    digest = hashlib.sha256(resolved.encode()).hexdigest()[:16]
    lines = [f"# uavnet {__version__}",
             f"# config_hash: {digest}",
             f"# seed: {seed}",
             f"# config: {resolved}"]
    if extra:
        lines += [f"# {k}: {v}" for k, v in extra.items()]
    return lines


def _write_csv(path, header_lines, columns, rows):
    text = "\n".join(header_lines) + "\n" + ",".join(columns) + "\n"
    text += "\n".join(",".join(_fmt(v) for v in row) for row in rows)
    text += "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_or_exit(path):
    try:
        return load_config(path)
    except (OSError, ConfigError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _parse_taus(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        print(f"error: bad --tau-db list: {text!r}", file=sys.stderr)
        raise SystemExit(2)
    if not vals or sorted(vals) != vals:
        print("error: --tau-db must be a sorted, nonempty list", file=sys.stderr)
        raise SystemExit(2)
    return vals


def _run_engines(cfg, engines, protocols, tau_dbs, args):
    """Rows (engine, protocol, tau_db, p, stderr, los_part, nlos_part, flag)."""
    taus = tuple(10 ** (t / 10.0) for t in tau_dbs)
    window = sim.default_window_radius(cfg) if args.window_radius is None \
        else args.window_radius
    rows = []
    if "sim" in engines:
        res = sim.estimate_coverage(cfg, taus, args.trials, args.seed,
                                    window_radius=window)
        for proto in protocols:
            if proto == "interference_limited":
                continue  # simulation always carries noise
            p = res.p_af if proto == "af" else res.p_df
            se = res.stderr_af if proto == "af" else res.stderr_df
            for t, pv, sev in zip(tau_dbs, p, se):
                rows.append(("sim", proto, t, pv, sev, math.nan, math.nan, "ok"))
    if "analytic" in engines:
        for proto in protocols:
            req = CoverageRequest(cfg=cfg, protocol=proto, tau_grid=taus,
                                  n_samples=args.samples, seed=args.seed,
                                  tolerance=args.tolerance,
                                  window_radius=window if "sim" in engines else args.window_radius)
            res = coverage(req)
            flag = "ok" if res.converged else "not-converged"
            for i, t in enumerate(tau_dbs):
                rows.append(("analytic", proto, t, res.p_cov[i], res.stderr[i],
                             res.p_cov_los_part[i], res.p_cov_nlos_part[i], flag))
    return rows


def cmd_coverage(args):
    cfg = _load_or_exit(args.config)
    engines = ("analytic", "sim") if args.engine == "both" else (args.engine,)
    protocols = [p.strip() for p in args.protocol.split(",")]
    for p in protocols:
        if p not in _PROTOCOLS:
            print(f"error: unknown protocol {p!r}", file=sys.stderr)
            return 2
    if "analytic" in engines and cfg.bs_antenna_model is AntennaModel.ISOTROPIC:
        print("error: the analytic engine does not cover the isotropic model "
              "(backhaul interference is not negligible); use --engine sim",
              file=sys.stderr)
        return 2
    tau_dbs = _parse_taus(args.tau_db)
    rows = _run_engines(cfg, engines, protocols, tau_dbs, args)
    header = _provenance_lines(cfg, args.seed,
                               {"trials": args.trials, "samples": args.samples})
    _write_csv(args.out, header,
               ["engine", "protocol", "tau_db", "p_cov", "stderr",
                "p_cov_los_part", "p_cov_nlos_part", "flag"], rows)
    return 0


def _sweep_values(args):
    if args.param in ("environment", "antenna_model"):
        return [v.strip() for v in args.values.split(",") if v.strip()]
    text = args.values
    if ":" in text:
        try:
            lo, hi, cnt = text.split(":")
            return list(np.linspace(float(lo), float(hi), int(cnt)))
        except ValueError:
            print(f"error: bad --values range {text!r}", file=sys.stderr)
            raise SystemExit(2)
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        print(f"error: bad --values list {text!r}", file=sys.stderr)
        raise SystemExit(2)


def _apply_sweep(cfg, param, x):
    if param == "mean_height":
        half = 0.5 * (cfg.h_d_max - cfg.h_d_min)
        return cfg.with_(h_d_min=x - half, h_d_max=x + half)
    if param == "max_height":
        return cfg.with_(h_d_max=x)
    if param == "uav_density":
        return cfg.with_(lambda_d=x)
    if param == "tau":
        return cfg
    if param == "environment":
        if x not in ENVIRONMENTS:
            print(f"error: unknown environment {x!r}", file=sys.stderr)
            raise SystemExit(2)
        return cfg.with_(env=ENVIRONMENTS[x])
    if param == "antenna_model":
        try:
            return cfg.with_(bs_antenna_model=AntennaModel(x))
        except ValueError:
            print(f"error: unknown antenna model {x!r}", file=sys.stderr)
            raise SystemExit(2)
    raise AssertionError(param)


def cmd_sweep(args):
    cfg0 = _load_or_exit(args.config)
    values = _sweep_values(args)
    if not values:
        print("error: empty sweep grid", file=sys.stderr)
        return 2
    engines = ("analytic", "sim") if args.engine == "both" else (args.engine,)
    protocols = [p.strip() for p in args.protocol.split(",")]
    tau_dbs = [0.0] if args.param == "tau" else _parse_taus(args.tau_db)
    rows = []
    for i, x in enumerate(values):
        cfg = _apply_sweep(cfg0, args.param, x)
        bad = validate(cfg)
        if bad:
            print(f"error: grid point {x!r}: {'; '.join(bad)}", file=sys.stderr)
            return 2
        if "analytic" in engines and cfg.bs_antenna_model is AntennaModel.ISOTROPIC:
            print("error: analytic engine cannot evaluate the isotropic model",
                  file=sys.stderr)
            return 2
        point = argparse.Namespace(**vars(args))
        point.seed = args.seed + i  # decorrelate grid points, deterministic
        here = [x] if args.param != "tau" else []
        tds = tau_dbs if args.param != "tau" else [x]
        for row in _run_engines(cfg, engines, protocols, tds, point):
            rows.append((args.param, *(here or [x]), *row))
    header = _provenance_lines(cfg0, args.seed,
                               {"sweep": args.param,
                                "values": ",".join(_fmt(v) for v in values),
                                "trials": args.trials, "samples": args.samples})
    _write_csv(args.out, header,
               ["param", "x", "engine", "protocol", "tau_db", "p_cov",
                "stderr", "p_cov_los_part", "p_cov_nlos_part", "flag"], rows)
    return 0


def cmd_validate(args):
    cfg = _load_or_exit(args.config)
    checks = run_suite(cfg, seed=args.seed, ratio_n=args.ratio_samples,
                       spatial_n=args.spatial_samples,
                       laplace_n=args.laplace_samples,
                       coverage_trials=args.trials,
                       coverage_samples=args.samples)
    report = {"version": __version__,
              "config": config_to_dict(cfg),
              "seed": args.seed,
              "passed": all(c["passed"] for c in checks),
              "checks": checks}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    if not report["passed"]:
        failing = [c["name"] for c in checks if not c["passed"]]
        print(f"validation failed: {', '.join(failing)}", file=sys.stderr)
        return 1
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="uavnet",
        description="Coverage analysis of 3D two-hop cellular networks with "
                    "wirelessly backhauled aerial relays.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="-", help="output path ('-' = stdout)")

    p = sub.add_parser("coverage", help="coverage curve on a threshold grid")
    common(p)
    p.add_argument("--engine", choices=("analytic", "sim", "both"), default="both")
    p.add_argument("--protocol", default="af,df",
                   help="comma list drawn from af,df,interference_limited")
    p.add_argument("--tau-db", default="-10,0,10", help="sorted dB thresholds")
    p.add_argument("--trials", type=int, default=20000, help="simulation trials")
    p.add_argument("--samples", type=int, default=20480,
                   help="analytic geometry samples per condition")
    p.add_argument("--tolerance", type=float, default=0.02,
                   help="stderr above this flags non-convergence")
    p.add_argument("--window-radius", type=float, default=None,
                   help="simulation window radius (m); default 20/sqrt(pi*lambda_b)")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("sweep", help="sweep one parameter, one row per grid point")
    common(p)
    p.add_argument("--param", choices=_SWEEP_PARAMS, required=True)
    p.add_argument("--values", required=True,
                   help="comma list, lo:hi:count range, or names for "
                        "environment/antenna_model")
    p.add_argument("--engine", choices=("analytic", "sim", "both"), default="sim")
    p.add_argument("--protocol", default="df")
    p.add_argument("--tau-db", default="0")
    p.add_argument("--trials", type=int, default=5000)
    p.add_argument("--samples", type=int, default=8192)
    p.add_argument("--tolerance", type=float, default=0.02)
    p.add_argument("--window-radius", type=float, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate",
                       help="run the oracle suite, emit a JSON report")
    common(p)
    p.add_argument("--ratio-samples", type=int, default=1_000_000)
    p.add_argument("--spatial-samples", type=int, default=20_000)
    p.add_argument("--laplace-samples", type=int, default=20_000)
    p.add_argument("--trials", type=int, default=6000)
    p.add_argument("--samples", type=int, default=8192)
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
