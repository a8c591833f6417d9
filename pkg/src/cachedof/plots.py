"""Matplotlib figure rendering for the CLI report paths."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_mse_curve(snr_db, mse, path, title="Post-cancellation MSE vs SNR"):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(snr_db, mse, marker="o")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("mean squared error")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_table1_chart(report, path):
    """Grouped log-scale bars of subpacketization per comparison-table row."""
    rows = report.rows
    x = np.arange(len(rows))
    width = 0.27
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.bar(x - width, [float(r.F_subset) for r in rows], width,
           label="subset scheme F")
    ax.bar(x, [float(r.F_pg) for r in rows], width, label="projective scheme F")
    hyper = [r.spec.printed_F_hypercube for r in rows]
    ax.bar(
        x + width,
        [float(h) if h else np.nan for h in hyper],
        width,
        label="hypercube F (reference only)",
        hatch="//",
        alpha=0.6,
    )
    ax.set_yscale("log")
    ax.set_xticks(x)
    ax.set_xticklabels(
        [f"{r.spec.printed_K_T},{r.spec.printed_K_R}" for r in rows], fontsize=8
    )
    ax.set_xlabel("row (K_T, K_R)")
    ax.set_ylabel("subpacketization F")
    ax.set_title("Subpacketization comparison")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_bounds_grid(amax, q_values, ok_lookup, path):
    """Pass/fail grid per q: fraction of f-sweep passing for each (a, b)."""
    fig, axes = plt.subplots(1, len(q_values), figsize=(3.2 * len(q_values), 3.2))
    if len(q_values) == 1:
        axes = [axes]
    for ax, q in zip(axes, q_values):
        grid = np.full((amax, amax), np.nan)
        for a in range(1, amax + 1):
            for b in range(1, a + 1):
                checks = [ok_lookup[(a, b, f, q)] for f in range(b, amax + 1)]
                grid[a - 1, b - 1] = sum(checks) / len(checks)
        im = ax.imshow(grid, vmin=0, vmax=1, origin="lower", cmap="RdYlGn")
        ax.set_title(f"q = {q}", fontsize=9)
        ax.set_xlabel("b - 1")
        ax.set_ylabel("a - 1")
    fig.colorbar(im, ax=axes, shrink=0.8, label="fraction of f passing")
    fig.savefig(path, dpi=150)
    plt.close(fig)
