#!/usr/bin/env python3
"""Overlay the closed-form ratio cdfs with brute-force gamma sampling.

Useful as a quick visual sanity check of the building blocks behind both
relaying protocols (direct, decode-and-forward, amplify-and-forward forms).
"""
import argparse
import sys

import numpy as np

from uavnet.ratiodist import RatioCdfParams, cdf_t1, cdf_t1_t3_joint, cdf_t2


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--samples", type=int, default=2_000_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="ratio_cdfs.png")
    args = ap.parse_args()

    a, b, big, g = 1.0, 4.0, 2.0, 1.0
    p = RatioCdfParams(a, b, big, g, args.m)
    rng = np.random.default_rng(args.seed)
    x = rng.gamma(args.m, 1 / args.m, args.samples)
    y = rng.gamma(args.m, 1 / args.m, args.samples)
    t1 = a * x / (b * y + big)
    t2 = np.maximum(a * x, b * y) / (np.minimum(a * x, b * y) + big)
    t3 = b * y / (a * x + big + g * (a * x + b * y + big))

    taus = np.linspace(0.01, 5.0, 120)
    print("tau   F_T1 (mc)      F_T2 (mc)      joint (mc)")
    for t in (0.25, 0.5, 1.0, 2.0, 4.0):
        print(f"{t:4.2f}  {cdf_t1(t, p):.4f} ({np.mean(t1 <= t):.4f})"
              f"  {cdf_t2(t, p):.4f} ({np.mean(t2 <= t):.4f})"
              f"  {cdf_t1_t3_joint(t, p):.4f} ({np.mean((t1 <= t) & (t3 <= t)):.4f})")

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib unavailable; numeric table only")
        return 0
    fig, ax = plt.subplots()
    for label, ana, emp in (
        ("direct form", [cdf_t1(t, p) for t in taus], t1),
        ("max/min form", [cdf_t2(t, p) for t in taus], t2),
        ("joint form", [cdf_t1_t3_joint(t, p) for t in taus],
         None),
    ):
        line, = ax.plot(taus, ana, label=label)
        if emp is not None:
            sub = taus[::6]
            ax.plot(sub, [np.mean(emp <= t) for t in sub], "o", ms=3,
                    color=line.get_color())
    ax.plot(taus[::6], [np.mean((t1 <= t) & (t3 <= t)) for t in taus[::6]],
            "o", ms=3, color="C2")
    ax.set_xlabel("threshold")
    ax.set_ylabel("cdf")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
