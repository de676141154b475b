"""Unadjusted Langevin chains, plain and robustified.

Both samplers share one update skeleton: start at theta_0 ~ N(0, beta I),
then repeat theta <- theta - eta * drift(theta) + sqrt(2 eta) xi with i.i.d.
standard normal xi. The plain chain's drift sums all per-point likelihood
gradients; the robust chain replaces that sum with n times a robust mean of
the per-point gradients. The prior gradient is always exact: only the data
are contaminated, never the prior.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from .models import Model, SmoothnessReport
from .robust_mean import robust_gradient_estimate

DIVERGENCE_NORM = 1e8


class DivergenceError(RuntimeError):
    """Chain produced a non-finite or runaway iterate."""

    def __init__(self, iteration: int, detail: str = ""):
        self.iteration = iteration
        super().__init__(f"chain diverged at iteration {iteration}{': ' + detail if detail else ''}")


class SamplerConfigError(ValueError):
    """Unresolvable or inconsistent chain configuration."""


@dataclass(frozen=True)
class ChainConfig:
    """Sampler settings. ``step_size`` / ``init_scale`` may be "auto",
    resolved from a smoothness report via :func:`resolve_defaults`."""

    step_size: float | str = "auto"
    burn_in: int = 0
    n_samples: int = 1
    seed: int = 0
    init_scale: float | str = "auto"
    eps: float = 0.0

    def resolved(self) -> bool:
        return not (isinstance(self.step_size, str) or isinstance(self.init_scale, str))


@dataclass
class ChainResult:
    samples: NDArray          # (n_samples, d), post burn-in
    step_size: float
    init_scale: float
    wall_time: float
    all_iterates: NDArray | None = None


def resolve_defaults(cfg: ChainConfig, report: SmoothnessReport | None, n: int) -> ChainConfig:
    """Fill in "auto" step size and init scale.

    Both default to 1/L = 1/(n * L_bar): the largest step size the
    convergence analysis permits, and the matching N(0, I/L) start.
    """
    step, init = cfg.step_size, cfg.init_scale
    if isinstance(step, str) or isinstance(init, str):
        if report is None:
            raise SamplerConfigError("auto step size / init scale need a smoothness report")
        if isinstance(step, str):
            if step != "auto":
                raise SamplerConfigError(f"unknown step_size {step!r}")
            step = 1.0 / (n * report.L_bar)
        if isinstance(init, str):
            if init != "auto":
                raise SamplerConfigError(f"unknown init_scale {init!r}")
            init = 1.0 / report.L
    if step <= 0 or init <= 0:
        raise SamplerConfigError("step_size and init_scale must be positive")
    if cfg.n_samples < 1 or cfg.burn_in < 0:
        raise SamplerConfigError("need n_samples >= 1 and burn_in >= 0")
    return replace(cfg, step_size=float(step), init_scale=float(init))


def _check_iterate(theta: NDArray, k: int) -> None:
    if not np.all(np.isfinite(theta)):
        raise DivergenceError(k, "non-finite iterate")
    if np.linalg.norm(theta) > DIVERGENCE_NORM:
        raise DivergenceError(k, f"iterate norm {np.linalg.norm(theta):g}")


def _run_chain(
    drift: Callable[[NDArray], NDArray],
    d: int,
    cfg: ChainConfig,
    theta0: NDArray | None,
    keep_all: bool,
) -> ChainResult:
    if not cfg.resolved():
        raise SamplerConfigError("chain config not resolved; call resolve_defaults first")
    eta = float(cfg.step_size)
    noise_scale = math.sqrt(2.0 * eta)
    rng = np.random.default_rng(cfg.seed)
    theta = math.sqrt(float(cfg.init_scale)) * rng.standard_normal(d)
    if theta0 is not None:
        theta = np.asarray(theta0, dtype=float).ravel().copy()
    total = cfg.burn_in + cfg.n_samples
    samples = np.empty((cfg.n_samples, d))
    trace = np.empty((total, d)) if keep_all else None
    t0 = time.perf_counter()
    for k in range(total):
        theta = theta - eta * drift(theta) + noise_scale * rng.standard_normal(d)
        _check_iterate(theta, k)
        if keep_all:
            trace[k] = theta
        if k >= cfg.burn_in:
            samples[k - cfg.burn_in] = theta
    return ChainResult(
        samples=samples,
        step_size=eta,
        init_scale=float(cfg.init_scale),
        wall_time=time.perf_counter() - t0,
        all_iterates=trace,
    )


def run_gradient_chain(
    grad: Callable[[NDArray], NDArray],
    d: int,
    cfg: ChainConfig,
    theta0: NDArray | None = None,
    keep_all: bool = False,
) -> ChainResult:
    """Raw Langevin chain on an explicit gradient field (synthetic targets)."""
    return _run_chain(grad, d, cfg, theta0, keep_all)


def run_ula(model: Model, obs, cfg: ChainConfig, keep_all: bool = False) -> ChainResult:
    """Plain ULA targeting the full-data posterior."""

    def drift(theta: NDArray) -> NDArray:
        return model.grad_all(theta, obs).sum(axis=0) - model.grad_log_prior(theta)

    return _run_chain(drift, model.d, cfg, None, keep_all)


def run_rob_ula(model: Model, obs, cfg: ChainConfig, keep_all: bool = False) -> ChainResult:
    """Rob-ULA: likelihood drift is n times a robust mean of per-point gradients."""
    if not 0.0 <= cfg.eps < 1.0:
        raise SamplerConfigError(f"contamination level must be in [0, 1), got {cfg.eps}")
    eps = float(cfg.eps)

    def drift(theta: NDArray) -> NDArray:
        grads = model.grad_all(theta, obs)
        n = grads.shape[0]
        mu_hat = robust_gradient_estimate(grads, eps, model.d)
        return n * mu_hat - model.grad_log_prior(theta)

    return _run_chain(drift, model.d, cfg, None, keep_all)
