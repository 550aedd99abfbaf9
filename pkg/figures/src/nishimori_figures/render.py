"""Figure renderers, one per figure id.

Each renderer reads one or more schema-versioned CSV files and writes a
deterministic PNG (fixed style, no timestamps).  Nothing is recomputed
from raw shots; plots are views of the CSV columns.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import read_table

_STYLE = {
    "figure.figsize": (5.2, 3.6),
    "figure.dpi": 160,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.bbox": "tight",
}

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"]


def _save(fig, output):
    fig.savefig(output, format="png", metadata={"Software": None})
    plt.close(fig)


def fidelity_decay(fidelity_csv, output):
    """Decoded GHZ fidelity against system size on a log scale."""
    t = read_table(fidelity_csv, "nishimori-fidelity-v1")
    t.require("n_sites", "F", "F_err")
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        n = t.floats("n_sites")
        f = t.floats("F")
        err = t.floats("F_err")
        ax.errorbar(n, f, yerr=err, fmt="o-", color=_COLORS[0], capsize=3)
        ax.axhline(0.5, color="gray", ls="--", lw=0.8)
        ax.set_yscale("log")
        ax.set_xlabel("system qubits N")
        ax.set_ylabel("decoded GHZ fidelity")
        _save(fig, output)


def observable_curves(sitemap_csv, output):
    """Lattice-averaged bond and plaquette observables against the angle."""
    t = read_table(sitemap_csv, "nishimori-sitemap-v1")
    t.require("t_A", "element", "index", "value")
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for element, color, label in (
            ("bond", _COLORS[0], r"$\langle ZXZ \rangle$"),
            ("plaquette", _COLORS[1], r"$\langle W \rangle$"),
        ):
            xs, means = [], []
            for t_A in t.distinct("t_A"):
                rows = t.where(t_A=t_A, element=element)
                if rows:
                    xs.append(float(t_A))
                    means.append(float(np.mean(t.floats("value", rows))))
            if xs:
                ax.plot(xs, means, "o-", color=color, label=label)
        ax.axhline(1.0, color="gray", ls="--", lw=0.8)
        ax.set_xlabel(r"$t_A$ (rad)")
        ax.set_ylabel("lattice-averaged expectation")
        ax.legend()
        _save(fig, output)


def magnetization_histograms(hist_csv, output):
    """Decoded-magnetization histograms, one panel per grid point."""
    t = read_table(hist_csv, "nishimori-hist-v1")
    t.require("size", "t_A", "p_s", "M", "count")
    points = []
    for r in t.rows:
        key = (r["size"], r["t_A"], r["p_s"])
        if key not in points:
            points.append(key)
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(1, len(points), squeeze=False,
                                 figsize=(2.2 * len(points), 2.6))
        for ax, key in zip(axes[0], points):
            size, t_A, p_s = key
            rows = t.where(size=size, t_A=t_A, p_s=p_s)
            M = t.floats("M", rows)
            counts = t.floats("count", rows)
            ax.bar(M, counts / counts.sum(), width=1.6, color=_COLORS[0])
            ax.set_title(f"$t_A$={float(t_A):.3g}, $p_s$={float(p_s):.3g}", fontsize=8)
            ax.set_xlabel("M")
        axes[0][0].set_ylabel("fraction of shots")
        _save(fig, output)


def _series_by_size(table, x_col, y_col, e_col, fixed=None):
    out = []
    for size in table.distinct("size"):
        rows = table.where(size=size, **(fixed or {}))
        rows = sorted(rows, key=lambda r: float(r[x_col]))
        if rows:
            out.append((
                int(size),
                table.floats(x_col, rows),
                table.floats(y_col, rows),
                table.floats(e_col, rows),
            ))
    return out


def transition_curves(sweep_csv, output, statistic="g", x_col="t_A"):
    """f or g against the sweep axis, one curve per size."""
    t = read_table(sweep_csv)
    if t.schema not in ("nishimori-sweep-v1", "nishimori-grid-v1"):
        raise ValueError(f"{sweep_csv}: unsupported schema {t.schema!r}")
    t.require("size", x_col, statistic, statistic + "_err")
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for k, (size, x, y, e) in enumerate(
            _series_by_size(t, x_col, statistic, statistic + "_err")
        ):
            ax.errorbar(x, y, yerr=e, fmt="o-", ms=3, capsize=2,
                        color=_COLORS[k % len(_COLORS)], label=f"size {size}")
        ax.set_xlabel(x_col)
        ax.set_ylabel(statistic)
        ax.legend()
        _save(fig, output)


def peak_scaling_inset(sweep_csv, output, statistic="f"):
    """Peak heights per size on a log-log grid (scaling inset)."""
    t = read_table(sweep_csv)
    t.require("size", "t_A", statistic, statistic + "_err")
    sizes, heights = [], []
    for size, x, y, e in _series_by_size(t, "t_A", statistic, statistic + "_err"):
        sizes.append(size)
        heights.append(float(np.max(y)))
    if len(sizes) < 2:
        raise ValueError("scaling inset needs at least two sizes")
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(3.0, 3.0))
        ax.loglog(sizes, heights, "o-", color=_COLORS[0])
        ax.set_xlabel("size")
        ax.set_ylabel(f"max {statistic}")
        _save(fig, output)


def phase_heatmap(grid_csv, output):
    """g over the (t_A, p_s) plane with the ridge overlay from the CSV."""
    t = read_table(grid_csv, "nishimori-grid-v1")
    t.require("t_A", "p_s", "g", "ridge_t_A_at_p_s")
    t_vals = sorted({float(r["t_A"]) for r in t.rows})
    p_vals = sorted({float(r["p_s"]) for r in t.rows})
    g = np.full((len(p_vals), len(t_vals)), np.nan)
    ridge = {}
    for r in t.rows:
        i = p_vals.index(float(r["p_s"]))
        j = t_vals.index(float(r["t_A"]))
        g[i, j] = float(r["g"])
        ridge[float(r["p_s"])] = float(r["ridge_t_A_at_p_s"])
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        mesh = ax.pcolormesh(t_vals, p_vals, g, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label="g")
        ps_sorted = sorted(ridge)
        ax.plot([ridge[p] for p in ps_sorted], ps_sorted, "w.-", lw=1.2,
                label="ridge of max g")
        ax.set_xlabel(r"$t_A$ (rad)")
        ax.set_ylabel(r"$p_s$")
        ax.legend(loc="upper left")
        _save(fig, output)


def chain_comparison(sweep_csv, output):
    """1D-chain curves: g against angle per chain length."""
    t = read_table(sweep_csv)
    t.require("kind", "size", "t_A", "g", "g_err")
    if not any(r["kind"] == "chain" for r in t.rows):
        raise ValueError("chain comparison needs chain rows")
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for k, (size, x, y, e) in enumerate(
            _series_by_size(t, "t_A", "g", "g_err", fixed={"kind": "chain"})
        ):
            ax.errorbar(x, y, yerr=e, fmt="o-", ms=3, capsize=2,
                        color=_COLORS[k % len(_COLORS)], label=f"N = {size}")
        ax.axvline(math.pi / 4, color="gray", ls="--", lw=0.8)
        ax.set_xlabel(r"$t_A$ (rad)")
        ax.set_ylabel("g")
        ax.legend()
        _save(fig, output)


FIGURES = {
    "fidelity-decay": (fidelity_decay, 1),
    "observable-curves": (observable_curves, 1),
    "magnetization-histograms": (magnetization_histograms, 1),
    "transition-curves": (transition_curves, 1),
    "peak-scaling": (peak_scaling_inset, 1),
    "phase-heatmap": (phase_heatmap, 1),
    "chain-comparison": (chain_comparison, 1),
}
