"""Latency figure for a k-hop report. Uses the Agg backend, writes files only."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .harness import KHopReport  # noqa: E402


def plot_report(report: KHopReport, path, title: str | None = None) -> Path:
    """Mean response time per k (log scale) with per-seed points behind it."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.0, 3.6), constrained_layout=True)
    recs = [r for r in report.records if r.timings]
    for i, r in enumerate(recs):
        ms = np.array([t.elapsed_ns for t in r.timings], dtype=float) / 1e6
        jitter = np.linspace(-0.18, 0.18, ms.size) if ms.size > 1 else np.zeros(1)
        ax.plot(i + jitter, ms, ".", color="0.7", ms=3, zorder=1)
    if recs:
        means = [float(r.mean_us()) / 1e3 for r in recs]
        ax.bar(range(len(recs)), means, width=0.5, color="C0", alpha=0.8, zorder=2, label="mean")
        ax.set_xticks(range(len(recs)), [f"{r.k}-hop\n(n={r.n_seeds})" for r in recs])
        ax.set_yscale("log")
        ax.legend(frameon=False, loc="upper left")
    ax.set_ylabel("response time [ms]")
    ax.set_title(title or f"k-hop neighbourhood count ({report.mode})")
    ax.spines[["top", "right"]].set_visible(False)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
