"""Synthetic Huber-contaminated data, label flips, and CSV loading.

Each observation is drawn from (1 - eps) P + eps Q with an adversarial Q:
a shifted Gaussian cluster for mean estimation, heavy-tailed covariates
plus uniform response offsets for regression, label flips for
classification. Corruption provenance is recorded per point for evaluation
only; the samplers never see the flags.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray


class DataError(ValueError):
    """Invalid dataset, schema or generation request."""


@dataclass
class Dataset:
    """Observations plus evaluation-only provenance.

    ``kind`` is one of "mean" (vector observations ``Z``), "regression" or
    "classification" (pairs ``(X, y)``). ``truth`` carries the generating
    parameter for synthetic data, ``None`` for loaded data.
    """

    kind: str
    is_corrupt: NDArray
    Z: NDArray | None = None
    X: NDArray | None = None
    y: NDArray | None = None
    truth: NDArray | None = field(default=None)

    @property
    def n(self) -> int:
        return self.is_corrupt.shape[0]

    @property
    def d(self) -> int:
        return self.Z.shape[1] if self.kind == "mean" else self.X.shape[1]

    @property
    def obs(self):
        """Observations as the matching model consumes them (no flags)."""
        return self.Z if self.kind == "mean" else (self.X, self.y)


@dataclass(frozen=True)
class ContaminationSpec:
    eps: float
    mode: str = "bernoulli"  # or "exact-count"
    shift_low: float = 0.0
    shift_high: float = 10.0
    chi2_df: int = 1

    def __post_init__(self):
        if not 0.0 <= self.eps < 1.0:
            raise DataError(f"eps must be in [0, 1), got {self.eps}")
        if self.mode not in ("bernoulli", "exact-count"):
            raise DataError(f"unknown contamination mode {self.mode!r}")


def _corrupt_flags(n: int, spec: ContaminationSpec, rng: np.random.Generator) -> NDArray:
    if spec.mode == "bernoulli":
        return rng.random(n) < spec.eps
    m = math.floor(spec.eps * n)
    flags = np.zeros(n, dtype=bool)
    flags[rng.permutation(n)[:m]] = True
    return flags


def hoeffding_band(n: int, delta: float) -> float:
    """Half-width of the high-probability band around the nominal corrupt
    fraction: sqrt((2/n) log(1/delta))."""
    if n < 1 or not 0 < delta < 1:
        raise DataError("need n >= 1 and delta in (0, 1)")
    return math.sqrt(2.0 / n * math.log(1.0 / delta))


def gen_mean_estimation(n: int, d: int, spec: ContaminationSpec,
                        rng: np.random.Generator) -> Dataset:
    """Mean-estimation dataset: clean z ~ N(theta, I), corrupt points form a
    single cluster shifted by one Unif[0,10]^d draw."""
    if n < 1 or d < 1:
        raise DataError("need n >= 1 and d >= 1")
    theta = rng.uniform(0.0, 1.0, d)
    flags = _corrupt_flags(n, spec, rng)
    theta_cor = rng.uniform(spec.shift_low, spec.shift_high, d)
    Z = theta + rng.standard_normal((n, d))
    Z[flags] += theta_cor
    return Dataset(kind="mean", is_corrupt=flags, Z=Z, truth=theta)


def gen_regression(n: int, d: int, spec: ContaminationSpec,
                   rng: np.random.Generator) -> Dataset:
    """Regression dataset: clean x ~ N(0, I), y = x.theta* + N(0,1); corrupt
    rows get chi-square features and a Unif[0,10] response offset."""
    if n < 1 or d < 1:
        raise DataError("need n >= 1 and d >= 1")
    theta_star = rng.uniform(0.0, 1.0, d)
    flags = _corrupt_flags(n, spec, rng)
    X = rng.standard_normal((n, d))
    noise = rng.standard_normal(n)
    m = int(flags.sum())
    if m:
        X[flags] = rng.chisquare(spec.chi2_df, (m, d))
        noise[flags] = rng.uniform(spec.shift_low, spec.shift_high, m)
    y = X @ theta_star + noise
    return Dataset(kind="regression", is_corrupt=flags, X=X, y=y, truth=theta_star)


def flip_labels(data: Dataset, eps: float, rng: np.random.Generator,
                mode: str = "bernoulli") -> Dataset:
    """Negate the labels of an eps-selection of rows and flag them corrupt."""
    if data.kind != "classification":
        raise DataError("label flips apply to classification datasets only")
    spec = ContaminationSpec(eps=eps, mode=mode)
    flips = _corrupt_flags(data.n, spec, rng)
    y = data.y.copy()
    y[flips] = -y[flips]
    return Dataset(
        kind="classification",
        is_corrupt=data.is_corrupt | flips,
        X=data.X.copy(),
        y=y,
        truth=data.truth,
    )


def _parse_csv(path: str):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise DataError(f"{path}: no data rows")
    return header, np.asarray(rows, dtype=float)


def load_csv(path: str, label_column: str, feature_columns: list[str] | None = None,
             seed: int = 0, train_fraction: float = 0.7) -> tuple[Dataset, Dataset]:
    """Load a binary-classification CSV into (train, test) datasets.

    Labels are mapped to {-1, +1}; features are rescaled column-wise to
    [-1, 1] using the training rows' ranges (constant columns map to 0).
    The split is a deterministic seeded shuffle.
    """
    header, data = _parse_csv(path)
    if label_column not in header:
        raise DataError(f"label column {label_column!r} not in header {header}")
    if feature_columns is None:
        feature_columns = [h for h in header if h != label_column]
    missing = [c for c in feature_columns if c not in header]
    if missing:
        raise DataError(f"feature columns not in header: {missing}")

    labels_raw = data[:, header.index(label_column)]
    classes = np.unique(labels_raw)
    if classes.size != 2:
        raise DataError(f"labels must be binary, found {classes.size} distinct values")
    y = np.where(labels_raw == classes[1], 1.0, -1.0)
    X = data[:, [header.index(c) for c in feature_columns]]

    n = X.shape[0]
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(round(train_fraction * n))
    tr, te = order[:n_train], order[n_train:]

    lo = X[tr].min(axis=0)
    hi = X[tr].max(axis=0)
    span = hi - lo

    def rescale(block: NDArray) -> NDArray:
        out = np.zeros_like(block)
        nz = span > 0
        out[:, nz] = 2.0 * (block[:, nz] - lo[nz]) / span[nz] - 1.0
        return out

    def make(idx: NDArray) -> Dataset:
        return Dataset(
            kind="classification",
            is_corrupt=np.zeros(idx.size, dtype=bool),
            X=rescale(X[idx]),
            y=y[idx],
        )

    return make(tr), make(te)
