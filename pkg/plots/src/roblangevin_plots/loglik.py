"""Per-point log-likelihood profiles: sorted-descending curves plus
overlaid histograms, one series per method.

Input schema: a CSV with columns ``method,loglik``, one row per test point.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from .sweep import METHOD_COLORS, METHOD_LABELS, PlotError, sidecar_path


def load_profiles(path: str) -> dict[str, np.ndarray]:
    frame = pd.read_csv(path, dtype=str)
    for col in ("method", "loglik"):
        if col not in frame.columns:
            raise PlotError(f"column {col!r} not in {path}")
    vals = pd.to_numeric(frame["loglik"], errors="coerce")
    keep = vals.notna()
    if not keep.any():
        raise PlotError(f"no usable rows in {path}")
    profiles = {}
    for method, block in vals[keep].groupby(frame.loc[keep, "method"], sort=True):
        # descending: largest log-likelihood first
        profiles[method] = np.sort(block.to_numpy())[::-1]
    sizes = {m: v.size for m, v in profiles.items()}
    if len(set(sizes.values())) > 1:
        raise PlotError(f"per-method point counts differ: {sizes}")
    return profiles


def plot_loglik_profile(path: str, out: str) -> str:
    """Draw the two-panel profile figure, write PNG and data sidecar.

    Returns the sidecar path."""
    profiles = load_profiles(path)

    fig, (ax_sorted, ax_hist) = plt.subplots(1, 2, figsize=(10, 4))
    for method, vals in sorted(profiles.items()):
        label = METHOD_LABELS.get(method, method)
        color = METHOD_COLORS.get(method)
        ax_sorted.plot(np.arange(vals.size), vals, label=label, color=color)
        ax_hist.hist(vals, bins=30, alpha=0.5, label=label, color=color)
    ax_sorted.set_xlabel("test point (sorted)")
    ax_sorted.set_ylabel("log-likelihood")
    ax_sorted.legend()
    ax_hist.set_xlabel("log-likelihood")
    ax_hist.set_ylabel("count")
    ax_hist.legend()
    fig.tight_layout()
    os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
    fig.savefig(out, dpi=150)
    plt.close(fig)

    side = sidecar_path(out)
    rows = []
    for method, vals in sorted(profiles.items()):
        for rank, v in enumerate(vals):
            rows.append({"method": method, "rank": rank, "loglik": v})
    pd.DataFrame(rows).to_csv(side, index=False, float_format="%.17g")
    return side
