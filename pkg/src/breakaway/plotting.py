"""SVG figures for the CLI. Derived artifacts; the CSV tables are authoritative."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed salt and no date so reruns produce the same file
_SVG_OPTS = {"metadata": {"Date": None}}
matplotlib.rcParams["svg.hashsalt"] = "breakaway"


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", **_SVG_OPTS)
    plt.close(fig)
    return path


def stribeck_figure(v, F, path):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(v, F, color="k", lw=1.5)
    ax.axhline(0, color="0.6", lw=0.5)
    ax.axvline(0, color="0.6", lw=0.5)
    ax.set_xlabel("relative velocity")
    ax.set_ylabel("steady-state friction")
    ax.grid(alpha=0.3)
    return _save(fig, path)


def phase_figure(table, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ks = np.unique(table[:, 0])
    cmap = plt.get_cmap("viridis", max(len(ks), 2))
    for i, k in enumerate(ks):
        rows = table[table[:, 0] == k]
        ax.plot(rows[:, 1], rows[:, 2], color=cmap(i), lw=1.2, label=f"k={k:g}")
    ax.set_xlabel("presliding distance z")
    ax.set_ylabel("relative velocity")
    ax.set_yscale("log")
    if len(ks) <= 16:
        ax.legend(fontsize=6, ncol=2)
    ax.grid(alpha=0.3, which="both")
    return _save(fig, path)


def breakaway_figure(sweeps, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    styles = ["-", "--", ":", "-."]
    for i, sweep in enumerate(sweeps):
        ax.plot(sweep.k, sweep.F_ba, styles[i % len(styles)], lw=1.5, label=sweep.choice.value)
    ks = sweeps[0].k if sweeps else np.array([1.0])
    if ks.min() > 0 and ks.max() / ks.min() > 100:
        ax.set_xscale("log")
    ax.set_xlabel("actuation force rate k")
    ax.set_ylabel("break-away force")
    ax.legend()
    ax.grid(alpha=0.3)
    return _save(fig, path)


def trajectory_figure(traj, path):
    fig, axes = plt.subplots(3, 1, figsize=(6, 6.5), sharex=True)
    axes[0].plot(traj.t, traj.u, label="u = k t")
    axes[0].plot(traj.t, traj.F, "--", label="friction")
    axes[0].set_ylabel("force")
    axes[0].legend(fontsize=8)
    axes[1].plot(traj.t, traj.z)
    axes[1].set_ylabel("z")
    axes[2].plot(traj.t, traj.v)
    axes[2].set_ylabel("velocity")
    axes[2].set_xlabel("time")
    for det in traj.detections:
        for ax in axes:
            ax.axvline(det.t, color="r", lw=0.8, alpha=0.6)
    for ax in axes:
        ax.grid(alpha=0.3)
    return _save(fig, path)


def fit_figure(x, y, x_fit, y_fit, xlabel, path, logx=False):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(x, y, "o", ms=4, label="data")
    ax.plot(x_fit, y_fit, "-", label="fit")
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("force")
    ax.legend()
    ax.grid(alpha=0.3)
    return _save(fig, path)
