"""Robust Langevin posterior sampling under Huber epsilon-contamination."""

from .contamination import ContaminationSpec, Dataset, flip_labels, gen_mean_estimation, gen_regression, load_csv
from .linalg import RngHandle, gaussian_vector, psd_sqrt, sym_eig
from .metrics import (
    GaussianSummary,
    avg_loglik,
    fit_gaussian,
    gaussian_w2,
    per_point_loglik,
    posterior_mean,
    recovery_error,
)
from .models import (
    GaussianMeanModel,
    LinRegModel,
    LogisticModel,
    SmoothnessReport,
    rblr_theta_reg,
    rbme_closed_posterior,
)
from .robust_mean import robust_gradient_estimate, smallest_ball_radius, smallest_interval, truncate_outliers
from .samplers import (
    ChainConfig,
    ChainResult,
    DivergenceError,
    resolve_defaults,
    run_gradient_chain,
    run_rob_ula,
    run_ula,
)

__version__ = "0.1.0"
