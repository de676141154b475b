"""Recursive robust mean estimation via PCA splits and outlier truncation.

The estimator discards points outside the smallest interval (1-D) or ball
(d-D) containing a ``(1 - eps)^2`` fraction of the sample, then splits the
survivors along the top principal components of their covariance: the
high-variance half is re-estimated recursively, the low-variance half by a
plain mean. With clean data (eps = 0) the whole pipeline reduces exactly to
the sample mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .linalg import sym_eig


class RobustMeanError(ValueError):
    """Invalid input to the robust mean machinery."""


@dataclass(frozen=True)
class Interval:
    a: float
    b: float


@dataclass(frozen=True)
class Ball:
    center: NDArray
    radius: float


@dataclass
class TruncationResult:
    """Survivors of one truncation pass plus the region that selected them."""

    kept: NDArray          # (m, d) retained points
    kept_indices: NDArray  # indices into the input sample
    region: Interval | Ball


def _as_sample(S: NDArray, d: int) -> NDArray:
    S = np.asarray(S, dtype=float)
    if S.ndim == 1:
        S = S[:, None]
    if S.ndim != 2 or S.shape[0] == 0:
        raise RobustMeanError(f"expected a nonempty (n, d) sample, got shape {S.shape}")
    if S.shape[1] != d:
        raise RobustMeanError(f"sample dimension {S.shape[1]} != declared d = {d}")
    if not np.all(np.isfinite(S)):
        raise RobustMeanError("sample has non-finite entries")
    return S


def retained_count(n: int, eps: float) -> int:
    """Number of points a truncation pass must cover: ceil((1-eps)^2 * n),
    clamped to [1, n]."""
    k = math.ceil((1.0 - eps) ** 2 * n)
    return min(max(k, 1), n)


def smallest_interval(values, k: int, *, tie_break: str = "left") -> tuple[float, float]:
    """Minimum-width closed interval covering at least k of the values.

    Endpoints are data values. Among minimal-width windows the one with the
    smallest left endpoint wins (``tie_break="right"`` mirrors the rule,
    used to test reflection equivariance).
    """
    v = np.sort(np.asarray(values, dtype=float).ravel())
    n = v.size
    if n == 0:
        raise RobustMeanError("empty value list")
    if not 1 <= k <= n:
        raise RobustMeanError(f"k = {k} out of range [1, {n}]")
    widths = v[k - 1:] - v[: n - k + 1]
    if tie_break == "left":
        i = int(np.argmin(widths))
    elif tie_break == "right":
        i = widths.size - 1 - int(np.argmin(widths[::-1]))
    else:
        raise RobustMeanError(f"unknown tie_break {tie_break!r}")
    return float(v[i]), float(v[i + k - 1])


def smallest_ball_radius(points: NDArray, center: NDArray, k: int) -> float:
    """Radius of the smallest closed ball at ``center`` covering >= k points
    (the k-th smallest Euclidean distance)."""
    points = np.asarray(points, dtype=float)
    center = np.asarray(center, dtype=float).ravel()
    if points.ndim != 2 or points.shape[1] != center.size:
        raise RobustMeanError(
            f"dimension mismatch: points {points.shape} vs center {center.shape}"
        )
    n = points.shape[0]
    if not 1 <= k <= n:
        raise RobustMeanError(f"k = {k} out of range [1, {n}]")
    dists = np.linalg.norm(points - center, axis=1)
    return float(np.partition(dists, k - 1)[k - 1])


def truncate_outliers(S: NDArray, eps: float, d: int) -> TruncationResult:
    """Drop points outside the smallest interval/ball covering a
    (1-eps)^2 fraction of the sample.

    For d > 1 the ball center is built coordinate-wise from 1-D robust mean
    estimates, so a far-off contaminated cluster cannot drag it away.
    """
    S = _as_sample(S, d)
    if not 0.0 <= eps < 1.0:
        raise RobustMeanError(f"eps must be in [0, 1), got {eps}")
    n = S.shape[0]
    k = retained_count(n, eps)
    if d == 1:
        a, b = smallest_interval(S[:, 0], k)
        mask = (S[:, 0] >= a) & (S[:, 0] <= b)
        region: Interval | Ball = Interval(a, b)
    else:
        center = np.empty(d)
        for i in range(d):
            center[i] = robust_gradient_estimate(S[:, i], eps, 1)[0]
        r = smallest_ball_radius(S, center, k)
        mask = np.linalg.norm(S - center, axis=1) <= r
        region = Ball(center, r)
    idx = np.flatnonzero(mask)
    return TruncationResult(kept=S[idx], kept_indices=idx, region=region)


def robust_gradient_estimate(S: NDArray, eps: float, d: int) -> NDArray:
    """Robust mean of a (possibly eps-contaminated) vector sample.

    Truncates outliers, then recurses on the top-ceil(d/2) principal
    subspace of the survivors' covariance while averaging the complementary
    low-variance subspace directly. Recursion halves the dimension, giving
    ceil(log2 d) PCA levels. A single survivor short-circuits to itself.
    """
    S = _as_sample(S, d)
    trunc = truncate_outliers(S, eps, d)
    kept = trunc.kept
    if kept.shape[0] == 1:
        return kept[0].copy()
    if d == 1:
        return kept.mean(axis=0)

    centered = kept - kept.mean(axis=0)
    cov = centered.T @ centered / kept.shape[0]
    _, V = sym_eig(cov)
    d_top = math.ceil(d / 2)
    Vb, Wb = V[:, :d_top], V[:, d_top:]
    mu_top = robust_gradient_estimate(kept @ Vb, eps, d_top)
    mu_rest = (kept @ Wb).mean(axis=0)
    return Vb @ mu_top + Wb @ mu_rest
