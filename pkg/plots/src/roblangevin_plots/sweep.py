"""Sweep curves: one line per method with a shaded +/- 1 std band."""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

X_COLUMNS = ("n", "d", "eps")
Y_COLUMNS = ("recovery_error", "avg_test_loglik", "w2_sq")

METHOD_LABELS = {"robula": "Rob-ULA", "ula": "ULA"}
METHOD_COLORS = {"robula": "tab:blue", "ula": "tab:orange"}


class PlotError(ValueError):
    """Bad plot request: missing column, empty selection, degenerate sweep."""


@dataclass(frozen=True)
class PlotSpec:
    csv_path: str
    x: str
    y: str
    out: str

    def __post_init__(self):
        if self.x not in X_COLUMNS:
            raise PlotError(f"x: must be one of {X_COLUMNS}, got {self.x!r}")
        if self.y not in Y_COLUMNS:
            raise PlotError(f"y: must be one of {Y_COLUMNS}, got {self.y!r}")


def sidecar_path(out: str) -> str:
    root, _ = os.path.splitext(out)
    return root + ".data.csv"


def aggregate(spec: PlotSpec) -> pd.DataFrame:
    """Per-(method, x) mean and sample std of the y column.

    Non-numeric y cells ("diverged", blanks) are dropped with a count on
    stderr; they are harness failure markers, not data.
    """
    frame = pd.read_csv(spec.csv_path, dtype=str)
    for col in ("method", spec.x, spec.y):
        if col not in frame.columns:
            raise PlotError(f"column {col!r} not in {spec.csv_path}")
    x_vals = pd.to_numeric(frame[spec.x], errors="coerce")
    y_vals = pd.to_numeric(frame[spec.y], errors="coerce")
    keep = x_vals.notna() & y_vals.notna()
    dropped = int((~keep).sum())
    if dropped:
        print(f"dropped {dropped} rows with non-numeric cells", file=sys.stderr)
    if not keep.any():
        raise PlotError(f"no usable rows for y={spec.y!r} in {spec.csv_path}")

    data = pd.DataFrame({
        "method": frame.loc[keep, "method"],
        "x": x_vals[keep],
        "y": y_vals[keep],
    })
    if data["x"].nunique() < 2:
        raise PlotError(f"x: column {spec.x!r} does not vary in the CSV")

    grouped = data.groupby(["method", "x"], sort=True)["y"]
    agg = grouped.agg(mean="mean", std="std", count="count").reset_index()
    agg["std"] = agg["std"].fillna(0.0)
    return agg


def write_sidecar(path: str, spec: PlotSpec, agg: pd.DataFrame) -> None:
    out = agg.rename(columns={"x": spec.x, "mean": f"{spec.y}_mean",
                              "std": f"{spec.y}_std"})
    out.to_csv(path, index=False, float_format="%.17g")


def plot_sweep(spec: PlotSpec) -> str:
    """Draw the sweep figure, write the PNG and its data sidecar.

    Returns the sidecar path."""
    agg = aggregate(spec)

    fig, ax = plt.subplots(figsize=(6, 4))
    for method, block in agg.groupby("method", sort=True):
        block = block.sort_values("x")
        label = METHOD_LABELS.get(method, method)
        color = METHOD_COLORS.get(method)
        ax.plot(block["x"], block["mean"], marker="o", label=label, color=color)
        ax.fill_between(block["x"], block["mean"] - block["std"],
                        block["mean"] + block["std"], alpha=0.2, color=color)
    ax.set_xlabel(spec.x)
    ax.set_ylabel(spec.y)
    ax.legend()
    fig.tight_layout()
    os.makedirs(os.path.dirname(spec.out) or ".", exist_ok=True)
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)

    side = sidecar_path(spec.out)
    write_sidecar(side, spec, agg)
    return side
