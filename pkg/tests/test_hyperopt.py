"""Marginal-likelihood objective and multistart optimizer contracts."""

import numpy as np
import pytest
from scipy.linalg import cho_factor, cho_solve

from ctkreg import covariance, hyperopt
from ctkreg.hyperopt import HyperParams, neg_log_marginal, optimize
from ctkreg.kernels import DcKernel
from ctkreg.signals import Intersample, Past, SampledSignal

TRUE = HyperParams(DcKernel(alpha=2.0, beta=0.8, lam=5.0), sigma2=0.05)


def _synthetic(n=40, seed=0, params=TRUE, ts=0.1):
    """Data drawn exactly from the Gaussian model of the estimator."""
    rng = np.random.default_rng(seed)
    u = SampledSignal(rng.standard_normal(n), ts, Intersample.ZOH, Past.ZA)
    cov = covariance.build(u, params.kernel)
    chol = np.linalg.cholesky(cov.sigma_y + 1e-12 * np.eye(n))
    y0 = chol @ rng.standard_normal(n)
    y = y0 + np.sqrt(params.sigma2) * rng.standard_normal(n)
    return u, y


class TestObjective:
    def test_matches_direct_formula(self):
        u, y = _synthetic()
        params = HyperParams(DcKernel(1.0, 0.3, 2.0), sigma2=0.1)
        sigma = covariance.build(u, params.kernel).sigma_y + 0.1 * np.eye(u.n)
        sign, logdet = np.linalg.slogdet(sigma)
        expected = (
            y @ np.linalg.solve(sigma, y) + logdet + u.n * np.log(2 * np.pi)
        )
        assert sign > 0
        assert neg_log_marginal(u, y, params) == pytest.approx(expected, rel=1e-10)

    def test_infeasible_returns_inf(self):
        u, y = _synthetic(n=10)
        bad = HyperParams(DcKernel(1.0, 0.0, 0.0), sigma2=0.0)
        # zero kernel + zero noise: factorization must fail, not crash
        assert neg_log_marginal(u, y, bad) == np.inf


class TestOptimizer:
    def test_dominates_true_hyperparameters(self):
        u, y = _synthetic(n=40, seed=1)
        result = optimize(u, y, n_starts=5, maxfev=200, seed=0)
        assert result.nll <= neg_log_marginal(u, y, TRUE) + 1e-6

    def test_more_starts_never_worse(self):
        u, y = _synthetic(n=30, seed=2)
        few = optimize(u, y, n_starts=1, maxfev=150, seed=3)
        many = optimize(u, y, n_starts=8, maxfev=150, seed=3)
        # the 1-start design is a prefix of the 8-start design
        assert many.nll <= few.nll + 1e-9

    def test_deterministic_in_seed(self):
        u, y = _synthetic(n=25, seed=4)
        a = optimize(u, y, n_starts=2, maxfev=100, seed=11)
        b = optimize(u, y, n_starts=2, maxfev=100, seed=11)
        assert a.params == b.params
        assert a.nll == b.nll

    def test_respects_box(self):
        u, y = _synthetic(n=25, seed=5)
        result = optimize(u, y, n_starts=2, maxfev=100, seed=0, transient=True)
        k = result.params.kernel
        var_y = np.var(y)
        assert 1e-2 <= k.alpha <= 1e2
        assert 0.0 <= k.beta <= 0.99 * k.alpha
        assert 1e-6 <= k.lam <= 1e6
        assert 1e-8 * var_y <= result.params.sigma2 <= 10 * var_y
        assert 0.0 <= result.params.alpha_t <= 1e3

    def test_warm_start_can_only_help(self):
        u, y = _synthetic(n=30, seed=6)
        cold = optimize(u, y, n_starts=1, maxfev=150, seed=7)
        warm = optimize(
            u, y, n_starts=1, maxfev=150, seed=7,
            extra_starts=[hyperopt.pack(TRUE)],
        )
        assert warm.nll <= cold.nll + 1e-9

    def test_zero_variance_rejected(self):
        u = SampledSignal(np.ones(10), 0.1, Intersample.ZOH, Past.ZA)
        with pytest.raises(ValueError):
            optimize(u, np.ones(10), n_starts=1)

    def test_pack_unpack_roundtrip(self):
        p = HyperParams(DcKernel(3.0, 1.2, 7.0), sigma2=0.3, alpha_t=2.5)
        theta = hyperopt.pack(p)
        back = hyperopt._unpack(theta, transient=True)
        assert back.kernel.alpha == pytest.approx(3.0, rel=1e-12)
        assert back.kernel.beta == pytest.approx(1.2, rel=1e-12)
        assert back.kernel.lam == pytest.approx(7.0, rel=1e-12)
        assert back.sigma2 == pytest.approx(0.3, rel=1e-12)
        assert back.alpha_t == pytest.approx(2.5, rel=1e-12)


class TestNoiseRecovery:
    def test_sigma2_within_factor_three(self):
        """Sanity band on kernel-matched data: the tuned noise variance stays
        within a factor of 3 of the truth for most seeds (N = 200, 10 dB)."""
        hits = 0
        seeds = range(8)
        for seed in seeds:
            rng = np.random.default_rng(seed)
            u = SampledSignal(
                rng.choice([-1.0, 1.0], size=200), 0.05, Intersample.ZOH, Past.ZA
            )
            cov = covariance.build(u, TRUE.kernel)
            chol = np.linalg.cholesky(cov.sigma_y + 1e-10 * np.eye(200))
            y0 = chol @ rng.standard_normal(200)
            sigma2 = float(np.var(y0) / 10)
            y = y0 + np.sqrt(sigma2) * rng.standard_normal(200)
            result = optimize(
                u, y, n_starts=2, maxfev=250, seed=seed,
                extra_starts=[hyperopt.pack(HyperParams(TRUE.kernel, sigma2))],
            )
            if sigma2 / 3 <= result.params.sigma2 <= 3 * sigma2:
                hits += 1
        assert hits >= 7


class TestEmpiricalBayesFit:
    def test_returns_fit_at_optimum(self):
        u, y = _synthetic(n=30, seed=8)
        est, result = hyperopt.empirical_bayes_fit(u, y, n_starts=2, maxfev=150)
        p = result.params
        sigma = covariance.build(u, p.kernel).sigma_y + p.sigma2 * np.eye(u.n)
        expected = cho_solve(cho_factor(sigma, lower=True), y)
        assert np.allclose(est.coeffs, expected, rtol=1e-8)
