import numpy as np
import pytest

from roblangevin.models import (
    GaussianMeanModel,
    LinRegModel,
    LogisticModel,
    ModelError,
    SmoothnessReport,
    rblr_theta_reg,
    rbme_closed_posterior,
)


def finite_diff(f, theta, h=1e-5):
    g = np.empty_like(theta)
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = h
        g[i] = (f(theta + e) - f(theta - e)) / (2 * h)
    return g


def random_models_and_obs(rng, d=4):
    A = rng.standard_normal((d, d))
    Sigma = A @ A.T + d * np.eye(d)
    B = rng.standard_normal((d, d))
    Sigma0 = B @ B.T + d * np.eye(d)
    theta0 = rng.standard_normal(d)
    gm = GaussianMeanModel(Sigma, theta0, Sigma0)
    lr = LinRegModel(d, 0.7, theta0, Sigma0)
    lo = LogisticModel(d)
    z_mean = rng.standard_normal(d)
    x = rng.standard_normal(d)
    return [
        (gm, z_mean, lambda th: -gm.loglik_all(th, z_mean[None, :])[0]),
        (lr, (x, 1.3), lambda th: -lr.loglik_all(th, (x[None, :], np.array([1.3])))[0]),
        (lo, (x, -1.0), lambda th: -lo.loglik_all(th, (x[None, :], np.array([-1.0])))[0]),
    ]


class TestGradients:
    def test_gaussian_mean_at_data_point(self):
        m = GaussianMeanModel(np.eye(2), np.zeros(2), np.eye(2))
        z = np.array([1.5, -0.5])
        assert np.allclose(m.grad_point(z, z), 0.0)

    def test_regression_example(self):
        m = LinRegModel(2, 1.0, np.zeros(2), np.eye(2))
        g = m.grad_point(np.zeros(2), (np.array([1.0, 0.0]), 2.0))
        assert np.allclose(g, [-2.0, 0.0])

    def test_logistic_at_zero(self):
        m = LogisticModel(3)
        rng = np.random.default_rng(0)
        for _ in range(5):
            x = rng.standard_normal(3)
            y = rng.choice([-1.0, 1.0])
            assert np.allclose(m.grad_point(np.zeros(3), (x, y)), -y * x / 2)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        for model, z, negloglik in random_models_and_obs(rng):
            for _ in range(20):
                theta = rng.standard_normal(model.d)
                g = model.grad_point(theta, z)
                fd = finite_diff(negloglik, theta)
                assert np.linalg.norm(g - fd) <= 1e-5 * (1 + np.linalg.norm(g))

    def test_grad_all_stacks_grad_point(self):
        rng = np.random.default_rng(2)
        d = 3
        m = LinRegModel(d, 2.0, np.zeros(d), np.eye(d))
        X = rng.standard_normal((6, d))
        y = rng.standard_normal(6)
        theta = rng.standard_normal(d)
        G = m.grad_all(theta, (X, y))
        for i in range(6):
            assert np.allclose(G[i], m.grad_point(theta, (X[i], y[i])))

    def test_dimension_mismatch(self):
        m = GaussianMeanModel(np.eye(2), np.zeros(2), np.eye(2))
        with pytest.raises(ModelError):
            m.grad_point(np.zeros(3), np.zeros(2))
        with pytest.raises(ModelError):
            m.grad_point(np.zeros(2), np.zeros(3))


class TestPriorGradient:
    def test_zero_at_mode(self):
        m = GaussianMeanModel(np.eye(2), np.array([1.0, 2.0]), np.diag([3.0, 0.5]))
        assert np.allclose(m.grad_log_prior(np.array([1.0, 2.0])), 0.0)

    def test_identity_precision(self):
        m = LogisticModel(2)
        assert np.allclose(m.grad_log_prior(np.array([3.0, -1.0])), [-3.0, 1.0])

    def test_diagonal_precision(self):
        m = GaussianMeanModel(np.eye(1), np.zeros(1), np.array([[4.0]]))
        assert np.allclose(m.grad_log_prior(np.array([8.0])), [-2.0])

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        for model, _, _ in random_models_and_obs(rng):
            S0_inv = np.linalg.inv(model.Sigma0)

            def logprior(th):
                diff = th - model.theta0
                return -0.5 * diff @ S0_inv @ diff

            for _ in range(10):
                theta = rng.standard_normal(model.d)
                g = model.grad_log_prior(theta)
                fd = finite_diff(logprior, theta)
                assert np.linalg.norm(g - fd) <= 1e-5 * (1 + np.linalg.norm(g))


class TestClosedForms:
    def test_posterior_no_data_is_prior(self):
        m = GaussianMeanModel(np.eye(2), np.array([0.5, -0.5]), 2 * np.eye(2))
        mean, cov = rbme_closed_posterior(m, np.empty((0, 2)))
        assert np.allclose(mean, m.theta0)
        assert np.allclose(cov, m.Sigma0)

    def test_posterior_single_point(self):
        m = GaussianMeanModel(np.eye(2), np.zeros(2), np.eye(2))
        mean, cov = rbme_closed_posterior(m, np.array([[2.0, 0.0]]))
        assert np.allclose(mean, [1.0, 0.0])
        assert np.allclose(cov, np.eye(2) / 2)

    def test_posterior_1d_two_points(self):
        m = GaussianMeanModel(np.eye(1), np.zeros(1), np.eye(1))
        mean, cov = rbme_closed_posterior(m, np.array([[0.0], [2.0]]))
        assert mean[0] == pytest.approx(2 / 3)
        assert cov[0, 0] == pytest.approx(1 / 3)

    def test_posterior_mean_is_stationary_point(self):
        rng = np.random.default_rng(4)
        d = 3
        A = rng.standard_normal((d, d))
        m = GaussianMeanModel(A @ A.T + d * np.eye(d), rng.standard_normal(d), np.eye(d))
        Z = rng.standard_normal((10, d)) + 2
        mean, _ = rbme_closed_posterior(m, Z)

        def grad_f(th):
            return m.grad_all(th, Z).sum(axis=0) - m.grad_log_prior(th)

        assert np.linalg.norm(grad_f(mean)) <= 1e-8 * (1 + np.linalg.norm(grad_f(np.zeros(d))))

    def test_theta_reg_no_data_is_prior_mean(self):
        m = LinRegModel(2, 1.0, np.array([1.0, -1.0]), np.eye(2))
        assert np.allclose(rblr_theta_reg(m, np.empty((0, 2)), np.empty(0)), [1.0, -1.0])

    def test_theta_reg_ridgeless_mean(self):
        m = LinRegModel(1, 1.0, np.zeros(1), np.array([[1e6]]))
        th = rblr_theta_reg(m, np.array([[1.0], [1.0]]), np.array([1.0, 3.0]))
        assert th[0] == pytest.approx(2.0, abs=1e-4)

    def test_theta_reg_noiseless_recovery(self):
        rng = np.random.default_rng(5)
        d = 4
        theta_star = rng.standard_normal(d)
        X = rng.standard_normal((30, d))
        m = LinRegModel(d, 1.0, np.zeros(d), 1e6 * np.eye(d))
        th = rblr_theta_reg(m, X, X @ theta_star)
        assert np.linalg.norm(th - theta_star) <= 1e-3

    def test_theta_reg_normal_equations(self):
        rng = np.random.default_rng(6)
        d = 3
        m = LinRegModel(d, 0.5, rng.standard_normal(d), np.diag([1.0, 2.0, 3.0]))
        X = rng.standard_normal((20, d))
        y = rng.standard_normal(20)
        th = rblr_theta_reg(m, X, y)
        S0_inv = np.linalg.inv(m.Sigma0)
        resid = (S0_inv + X.T @ X / m.sigma2) @ th - (X.T @ y / m.sigma2 + S0_inv @ m.theta0)
        assert np.linalg.norm(resid) <= 1e-8 * (1 + np.linalg.norm(th))


class TestSmoothness:
    def test_rbme_identity_covariances(self):
        m = GaussianMeanModel(np.eye(2), np.zeros(2), np.eye(2))
        rep = m.smoothness_report(100, 0.0)
        assert rep.m == rep.L == 101.0
        assert rep.kappa == 1.0

    def test_rbme_anisotropic(self):
        m = GaussianMeanModel(np.diag([1.0, 4.0]), np.zeros(2), np.eye(2))
        rep = m.smoothness_report(100, 0.0)
        assert rep.m == pytest.approx(26.0)
        assert rep.L == pytest.approx(101.0)

    def test_logistic_quarter_curvature(self):
        m = LogisticModel(2)
        # rows chosen so X.T @ X / len(X) is exactly the identity
        X = np.sqrt(2.0) * np.array(
            [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]
        )
        rep = m.smoothness_report(100, 0.0, (X, np.ones(4)))
        assert rep.L == pytest.approx(26.0)
        assert rep.m == pytest.approx(1.0)

    def test_hessian_bracket(self):
        rng = np.random.default_rng(7)
        d, n = 3, 40
        A = rng.standard_normal((d, d))
        gm = GaussianMeanModel(A @ A.T + d * np.eye(d), np.zeros(d), np.diag([1.0, 2.0, 0.5]))
        Z = rng.standard_normal((n, d))
        rep = gm.smoothness_report(n, 0.0)
        H = np.linalg.inv(gm.Sigma0) + n * np.linalg.inv(gm.Sigma)
        w = np.linalg.eigvalsh(H)
        assert rep.m <= w[0] + 1e-8 and w[-1] <= rep.L + 1e-8

        lr = LinRegModel(d, 0.8, np.zeros(d), np.diag([1.0, 2.0, 0.5]))
        X = rng.standard_normal((n, d))
        rep2 = lr.smoothness_report(n, 0.0, (X, np.zeros(n)))
        H2 = np.linalg.inv(lr.Sigma0) + X.T @ X / lr.sigma2
        w2 = np.linalg.eigvalsh(H2)
        assert rep2.m <= w2[0] + 1e-8 and w2[-1] <= rep2.L + 1e-8

    def test_report_invariant(self):
        with pytest.raises(ModelError):
            SmoothnessReport.from_extremes(2.0, 1.0, 10)
