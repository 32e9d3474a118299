#!/usr/bin/env python3
"""Render a stability-map CSV (and optional Hopf-curve overlay) to a PNG.

Usage: plot_stability_map.py out/stability_map.csv [out/hopf_curves.csv] [map.png]
"""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as f:
        rdr = csv.DictReader(f)
        return list(rdr)


def main():
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    rows = load(sys.argv[1])
    curves_path = sys.argv[2] if len(sys.argv) > 2 else None
    out = sys.argv[3] if len(sys.argv) > 3 else "stability_map.png"

    xs = [float(r["d21"]) for r in rows]
    ys = [float(r["tau"]) for r in rows]
    st = [int(r["stable"]) for r in rows]
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.scatter([x for x, s in zip(xs, st) if s], [y for y, s in zip(ys, st) if s],
               s=6, c="#2b6cb0", label="stable", marker="s")
    ax.scatter([x for x, s in zip(xs, st) if not s], [y for y, s in zip(ys, st) if not s],
               s=6, c="#e53e3e", label="unstable", marker="s")

    if curves_path:
        curves = {}
        for r in load(curves_path):
            key = (r["n"], r["branch"], r["j"])
            curves.setdefault(key, []).append((float(r["d21"]), float(r["tau"])))
        for (n, br, j), pts in sorted(curves.items()):
            pts.sort()
            ax.plot([p[0] for p in pts], [p[1] for p in pts], lw=1.2,
                    label=f"n={n} {br} j={j}")

    ax.set_xlabel("d21")
    ax.set_ylabel("tau")
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    main()
