"""Plot a series file (fronts and amplitudes) and optionally a final
snapshot, using matplotlib.

Usage: python3 docs/plot_series.py SERIES [SNAPSHOT] [--out fig.png]
"""

import argparse

import matplotlib.pyplot as plt
import numpy as np

from lgfronts.io import read_series, read_snapshot


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("series")
    ap.add_argument("snapshot", nargs="?", default=None)
    ap.add_argument("--out", default=None, help="write the figure here "
                    "instead of showing it")
    args = ap.parse_args()

    meta, records = read_series(args.series)
    t = np.array([r.t for r in records])
    ncols = 3 if args.snapshot else 2
    fig, axes = plt.subplots(1, ncols, figsize=(4.5 * ncols, 3.5))

    ax = axes[0]
    ax.plot(t, [r.g for r in records], label="g(t)")
    ax.plot(t, [r.h for r in records], label="h(t)")
    if "span_crit" in meta:
        ax.axhline(meta["span_crit"] / 2.0, ls=":", c="gray")
        ax.axhline(-meta["span_crit"] / 2.0, ls=":", c="gray")
    ax.set_xlabel("t")
    ax.set_ylabel("front position")
    ax.legend()

    ax = axes[1]
    ax.plot(t, [r.max_v for r in records], label="max v")
    ax.plot(t, [r.min_u_core for r in records], label="min u (core)")
    if "ustar" in meta:
        ax.axhline(meta["ustar"], ls=":", c="gray")
    ax.set_xlabel("t")
    ax.legend()

    if args.snapshot:
        smeta, x, u, v = read_snapshot(args.snapshot)
        ax = axes[2]
        ax.plot(x, u, label="u")
        ax.plot(x, v, label="v")
        ax.set_xlabel("x")
        ax.set_title(f"t = {smeta.get('t', '?')}")
        ax.legend()

    fig.tight_layout()
    if args.out:
        fig.savefig(args.out, dpi=150)
        print(f"wrote {args.out}")
    else:
        plt.show()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
