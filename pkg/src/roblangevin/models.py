"""Likelihood models: Gaussian mean, linear regression, logistic regression.

Each model bundles per-point negative log-likelihood gradients, a Gaussian
log-prior gradient, per-point log-likelihood evaluation and spectral
smoothness diagnostics. Observations are model-tagged: an ``(n, d)`` array
of vectors for the mean model, an ``(X, y)`` pair for regression and
classification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray



class ModelError(ValueError):
    """Dimension mismatch or invalid model configuration."""


@dataclass(frozen=True)
class SmoothnessReport:
    """Hessian spectrum bounds for the clean-data negative log posterior.

    ``m`` and ``L`` bracket the Hessian (m I <= H <= L I); barred versions
    are per-sample averages m/n and L/n, and kappa = L/m.
    """

    m: float
    L: float
    m_bar: float
    L_bar: float
    kappa: float

    @classmethod
    def from_extremes(cls, m: float, L: float, n: int) -> "SmoothnessReport":
        if not 0 < m <= L:
            raise ModelError(f"need 0 < m <= L, got m={m}, L={L}")
        return cls(m=m, L=L, m_bar=m / n, L_bar=L / n, kappa=L / m)


def _pd_inverse(M: NDArray, name: str) -> NDArray:
    M = np.asarray(M, dtype=float)
    w = np.linalg.eigvalsh(0.5 * (M + M.T))
    if w[0] <= 0:
        raise ModelError(f"{name} must be positive definite (min eigenvalue {w[0]:g})")
    return np.linalg.inv(M)


class Model:
    """Interface shared by the three shipped models.

    Subclasses hold a Gaussian prior N(theta0, Sigma0) and implement the
    per-point gradient / log-likelihood pair plus the smoothness report.
    """

    d: int
    theta0: NDArray
    Sigma0: NDArray

    def _init_prior(self, theta0, Sigma0) -> None:
        self.theta0 = np.asarray(theta0, dtype=float).ravel()
        self.Sigma0 = np.asarray(Sigma0, dtype=float)
        self._Sigma0_inv = _pd_inverse(self.Sigma0, "prior covariance")
        if self.theta0.size != self.d:
            raise ModelError("prior mean dimension mismatch")

    def grad_log_prior(self, theta: NDArray) -> NDArray:
        theta = self._check_theta(theta)
        return -self._Sigma0_inv @ (theta - self.theta0)

    def _check_theta(self, theta) -> NDArray:
        theta = np.asarray(theta, dtype=float).ravel()
        if theta.size != self.d:
            raise ModelError(f"theta has dimension {theta.size}, expected {self.d}")
        return theta

    # per-observation contracts, implemented by subclasses
    def grad_point(self, theta, z) -> NDArray:
        raise NotImplementedError

    def grad_all(self, theta, obs) -> NDArray:
        raise NotImplementedError

    def loglik_all(self, theta, obs) -> NDArray:
        raise NotImplementedError

    def smoothness_report(self, n: int, eps: float, obs=None) -> SmoothnessReport:
        raise NotImplementedError


class GaussianMeanModel(Model):
    """Gaussian likelihood N(theta, Sigma) with conjugate prior N(theta0, Sigma0)."""

    def __init__(self, Sigma, theta0, Sigma0):
        self.Sigma = np.asarray(Sigma, dtype=float)
        self.d = self.Sigma.shape[0]
        self._Sigma_inv = _pd_inverse(self.Sigma, "likelihood covariance")
        self._logdet = float(np.linalg.slogdet(self.Sigma)[1])
        self._init_prior(theta0, Sigma0)

    def grad_point(self, theta, z):
        theta = self._check_theta(theta)
        z = np.asarray(z, dtype=float).ravel()
        if z.size != self.d:
            raise ModelError("observation dimension mismatch")
        return self._Sigma_inv @ (theta - z)

    def grad_all(self, theta, Z):
        theta = self._check_theta(theta)
        return (theta - np.asarray(Z, dtype=float)) @ self._Sigma_inv

    def loglik_all(self, theta, Z):
        theta = self._check_theta(theta)
        diff = np.asarray(Z, dtype=float) - theta
        quad = np.einsum("ij,jk,ik->i", diff, self._Sigma_inv, diff)
        return -0.5 * (quad + self.d * np.log(2 * np.pi) + self._logdet)

    def smoothness_report(self, n, eps, obs=None):
        lam_max_S = float(np.linalg.eigvalsh(self.Sigma)[-1])
        lam_min_S = float(np.linalg.eigvalsh(self.Sigma)[0])
        lam_max_0 = float(np.linalg.eigvalsh(self.Sigma0)[-1])
        lam_min_0 = float(np.linalg.eigvalsh(self.Sigma0)[0])
        m = n * (1.0 - eps) / lam_max_S + 1.0 / lam_max_0
        L = n * (1.0 - eps) / lam_min_S + 1.0 / lam_min_0
        return SmoothnessReport.from_extremes(m, L, n)


class LinRegModel(Model):
    """Linear regression with Gaussian noise variance sigma2 and Gaussian prior."""

    def __init__(self, d, sigma2, theta0, Sigma0):
        if sigma2 <= 0:
            raise ModelError(f"noise variance must be positive, got {sigma2}")
        self.d = int(d)
        self.sigma2 = float(sigma2)
        self._init_prior(theta0, Sigma0)

    def grad_point(self, theta, z):
        theta = self._check_theta(theta)
        x, y = z
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.d:
            raise ModelError("covariate dimension mismatch")
        return x * (x @ theta - float(y)) / self.sigma2

    def grad_all(self, theta, obs):
        theta = self._check_theta(theta)
        X, y = obs
        resid = X @ theta - y
        return X * (resid / self.sigma2)[:, None]

    def loglik_all(self, theta, obs):
        theta = self._check_theta(theta)
        X, y = obs
        resid = y - X @ theta
        return -0.5 * (resid**2 / self.sigma2 + np.log(2 * np.pi * self.sigma2))

    def smoothness_report(self, n, eps, obs=None):
        if obs is None:
            raise ModelError("regression smoothness needs the covariate sample")
        X = obs[0]
        Sx = X.T @ X / X.shape[0]
        lam = np.linalg.eigvalsh(0.5 * (Sx + Sx.T))
        lam_max_0 = float(np.linalg.eigvalsh(self.Sigma0)[-1])
        lam_min_0 = float(np.linalg.eigvalsh(self.Sigma0)[0])
        m = n * (1.0 - eps) * float(lam[0]) / self.sigma2 + 1.0 / lam_max_0
        L = n * (1.0 - eps) * float(lam[-1]) / self.sigma2 + 1.0 / lam_min_0
        return SmoothnessReport.from_extremes(m, L, n)


def _stable_sigmoid(t: NDArray) -> NDArray:
    # branch on sign to keep exp() arguments nonpositive
    out = np.empty_like(t, dtype=float)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


class LogisticModel(Model):
    """Logistic regression with labels in {-1, +1} and standard normal prior."""

    def __init__(self, d):
        self.d = int(d)
        self._init_prior(np.zeros(self.d), np.eye(self.d))

    def grad_point(self, theta, z):
        theta = self._check_theta(theta)
        x, y = z
        x = np.asarray(x, dtype=float).ravel()
        margin = float(y) * (x @ theta)
        return -float(y) * x * float(_stable_sigmoid(np.array([-margin]))[0])

    def grad_all(self, theta, obs):
        theta = self._check_theta(theta)
        X, y = obs
        margins = y * (X @ theta)
        return X * (-y * _stable_sigmoid(-margins))[:, None]

    def loglik_all(self, theta, obs):
        theta = self._check_theta(theta)
        X, y = obs
        return -np.logaddexp(0.0, -(y * (X @ theta)))

    def smoothness_report(self, n, eps, obs=None):
        if obs is None:
            raise ModelError("logistic smoothness needs the covariate sample")
        X = obs[0]
        Sx = X.T @ X / X.shape[0]
        lam_max = float(np.linalg.eigvalsh(0.5 * (Sx + Sx.T))[-1])
        lam_max_0 = float(np.linalg.eigvalsh(self.Sigma0)[-1])
        lam_min_0 = float(np.linalg.eigvalsh(self.Sigma0)[0])
        m = 1.0 / lam_max_0  # sigmoid curvature can vanish; prior carries convexity
        L = n * lam_max / 4.0 + 1.0 / lam_min_0
        return SmoothnessReport.from_extremes(m, L, n)


def rbme_closed_posterior(model: GaussianMeanModel, Z) -> tuple[NDArray, NDArray]:
    """Conjugate Gaussian posterior (mean, covariance) given clean vectors Z."""
    Z = np.asarray(Z, dtype=float).reshape(-1, model.d)
    n_c = Z.shape[0]
    precision = model._Sigma0_inv + n_c * model._Sigma_inv
    cov = np.linalg.inv(precision)
    rhs = model._Sigma0_inv @ model.theta0
    if n_c:
        rhs = rhs + model._Sigma_inv @ Z.sum(axis=0)
    mean = cov @ rhs
    return mean, 0.5 * (cov + cov.T)


def rblr_theta_reg(model: LinRegModel, X, y) -> NDArray:
    """Ridge-type posterior mode for regression on clean data (X, y)."""
    X = np.asarray(X, dtype=float).reshape(-1, model.d)
    y = np.asarray(y, dtype=float).ravel()
    A = model._Sigma0_inv + X.T @ X / model.sigma2
    b = model._Sigma0_inv @ model.theta0
    if X.shape[0]:
        b = b + X.T @ y / model.sigma2
    return np.linalg.solve(A, b)
