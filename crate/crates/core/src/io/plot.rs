//! Generated matplotlib script for the CSV outputs of a run.

pub const PLOT_SCRIPT: &str = r##"#!/usr/bin/env python3
"""Plots the diagnostics series and snapshots of one run directory.

Usage: python3 plot.py [run_dir]
"""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

run_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))


def read(path):
    with open(path) as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    header, body = rows[0], rows[1:]
    return {name: [float(r[k]) for r in body if r[k] != ""] for k, name in enumerate(header)}


d = read(os.path.join(run_dir, "diagnostics.csv"))
fig, ax = plt.subplots(2, 2, figsize=(11, 8))
ax[0, 0].plot(d["t"], d["e_lyap"], label="e_lyap")
ax[0, 0].plot(d["t"], [a + b for a, b in zip(d["e_lyap"], d["cumulative_diss"])], "--", label="e_lyap + int V")
ax[0, 0].legend()
ax[0, 0].set_xlabel("t")
e0 = d["energy_total"][0]
ax[0, 1].plot(d["t"], [e - e0 for e in d["energy_total"]], label="E(t) - E(0)")
m0 = d["mass_excess"][0]
ax[0, 1].plot(d["t"], [m - m0 for m in d["mass_excess"]], label="m(t) - m(0)")
ax[0, 1].legend()
ax[1, 0].plot(d["t"], d["phi_min"], label="phi min")
ax[1, 0].plot(d["t"], d["phi_max"], label="phi max")
ax[1, 0].plot(d["t"], d["v_min"], label="v min")
ax[1, 0].plot(d["t"], d["theta_min"], label="theta min")
ax[1, 0].legend()
ax[1, 1].semilogy(d["t"], [max(r, 1e-300) for r in d["lemma24_residual"]])
ax[1, 1].set_title("integrated momentum residual")
fig.tight_layout()
fig.savefig(os.path.join(run_dir, "diagnostics.png"), dpi=120)

index = os.path.join(run_dir, "snapshots", "index.csv")
if os.path.exists(index):
    with open(index) as fh:
        entries = list(csv.DictReader(fh))
    fig, ax = plt.subplots(2, 2, figsize=(11, 8), sharex=True)
    for e in entries:
        s = read(os.path.join(run_dir, "snapshots", e["file"]))
        for a, key in zip(ax.flat, ["v", "u", "theta", "phi"]):
            a.plot(s["x"], s[key], label=f"t={float(e['t']):.3g}")
            a.set_title(key)
    ax[0, 0].legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(os.path.join(run_dir, "snapshots.png"), dpi=120)
"##;
