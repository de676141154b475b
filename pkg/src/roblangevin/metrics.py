"""Evaluation quantities: posterior means, recovery error, log-likelihoods,
Gaussian moment fits and the closed-form squared 2-Wasserstein distance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .linalg import psd_sqrt
from .models import Model


class MetricsError(ValueError):
    pass


@dataclass
class GaussianSummary:
    mean: NDArray
    cov: NDArray


def posterior_mean(samples: NDArray) -> NDArray:
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise MetricsError("no samples")
    return samples.mean(axis=0)


def recovery_error(theta_hat, theta_star) -> float:
    theta_hat = np.asarray(theta_hat, dtype=float).ravel()
    theta_star = np.asarray(theta_star, dtype=float).ravel()
    if theta_hat.size != theta_star.size:
        raise MetricsError("dimension mismatch")
    return float(np.linalg.norm(theta_hat - theta_star))


def per_point_loglik(model: Model, theta_hat, obs) -> NDArray:
    return model.loglik_all(theta_hat, obs)


def avg_loglik(model: Model, theta_hat, obs) -> float:
    """Mean held-out log-likelihood of the plug-in estimate theta_hat."""
    vals = per_point_loglik(model, theta_hat, obs)
    if vals.size == 0:
        raise MetricsError("empty test set")
    return float(vals.mean())


def avg_loglik_over_samples(model: Model, samples: NDArray, obs) -> float:
    """Sample-averaged variant: mean over chain samples of the per-point
    average log-likelihood (instead of plugging in the posterior mean)."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise MetricsError("no samples")
    return float(np.mean([model.loglik_all(s, obs).mean() for s in samples]))


def fit_gaussian(samples: NDArray) -> GaussianSummary:
    """Moment-matched Gaussian with population (divisor N) covariance."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[0] < 2:
        raise MetricsError("need at least 2 samples of shape (n, d)")
    mean = samples.mean(axis=0)
    centered = samples - mean
    cov = centered.T @ centered / samples.shape[0]
    return GaussianSummary(mean=mean, cov=0.5 * (cov + cov.T))


def gaussian_w2(a: GaussianSummary, b: GaussianSummary) -> float:
    """Squared 2-Wasserstein distance between Gaussians:
    ||mu_a - mu_b||^2 + tr(S_a + S_b - 2 (S_b^1/2 S_a S_b^1/2)^1/2)."""
    mean_term = float(np.sum((a.mean - b.mean) ** 2))
    rb = psd_sqrt(b.cov)
    cross = psd_sqrt(rb @ a.cov @ rb)
    cov_term = float(np.trace(a.cov) + np.trace(b.cov) - 2.0 * np.trace(cross))
    # tiny negative values are pure roundoff
    return mean_term + max(cov_term, 0.0)
