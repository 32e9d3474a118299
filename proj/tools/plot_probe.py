#!/usr/bin/env python3
"""Plot a probe time series and its tail spectrum from a simulate run.

Usage: plot_probe.py out/probe.csv [probe.png] [--tail T]
"""
import sys

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    path = sys.argv[1]
    out = sys.argv[2] if len(sys.argv) > 2 and not sys.argv[2].startswith("--") else "probe.png"
    tail = None
    if "--tail" in sys.argv:
        tail = float(sys.argv[sys.argv.index("--tail") + 1])

    data = np.genfromtxt(path, delimiter=",", names=True)
    t, u = data["t"], data["u"]

    fig, (a1, a2) = plt.subplots(2, 1, figsize=(8, 6))
    a1.plot(t, u, lw=0.6)
    a1.set_xlabel("t")
    a1.set_ylabel("u(probe)")

    if tail is None:
        tail = (t[-1] - t[0]) / 3
    sel = t >= t[-1] - tail
    ts, us = t[sel], u[sel]
    dt = (ts[-1] - ts[0]) / (len(ts) - 1)
    ys = (us - us.mean()) * np.hanning(len(us))
    mags = np.abs(np.fft.rfft(ys)) / len(ys)
    freqs = np.fft.rfftfreq(len(ys), dt)
    keep = (freqs > 0) & (freqs <= 1.0)
    a2.plot(freqs[keep], np.maximum(mags[keep], 1e-300), lw=0.8)
    a2.set_xlabel("frequency")
    a2.set_ylabel("|U(f)| (tail)")
    a2.set_yscale("log")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    main()
