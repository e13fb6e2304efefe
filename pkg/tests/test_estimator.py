"""Estimator algebra: solve accuracy, linearity, shrinkage, optimality."""

import numpy as np
import pytest

from ctkreg import covariance, estimator
from ctkreg.estimator import InsufficientPastError, fit
from ctkreg.kernels import DcKernel
from ctkreg.signals import Intersample, Past, SampledSignal

K = DcKernel(alpha=1.1, beta=0.4, lam=1.5)


def _instance(n=8, seed=0, past=Past.ZA, ts=0.25):
    rng = np.random.default_rng(seed)
    u = SampledSignal(rng.standard_normal(n), ts, Intersample.ZOH, past)
    y = rng.standard_normal(n)
    return u, y


class TestSolveAlgebra:
    def test_residual_bound(self):
        u, y = _instance(n=30, seed=1)
        est = fit(u, y, K, sigma2=1e-3)
        gram = est.cov.sigma_y + est.sigma2 * np.eye(u.n)
        residual = np.linalg.norm(gram @ est.coeffs - y)
        assert residual <= 1e-8 * np.linalg.norm(y)

    def test_linearity_in_y(self):
        u, y1 = _instance(n=12, seed=2)
        _, y2 = _instance(n=12, seed=3)
        taus = np.linspace(0.05, 3.0, 20)
        g1 = fit(u, y1, K, 0.01).impulse(taus)
        g2 = fit(u, y2, K, 0.01).impulse(taus)
        g12 = fit(u, y1 + y2, K, 0.01).impulse(taus)
        scale = max(np.abs(g12).max(), 1.0)
        assert np.allclose(g1 + g2, g12, rtol=0, atol=1e-10 * scale)

    def test_shrinkage_with_large_regularization(self):
        u, y = _instance(n=10, seed=4)
        taus = np.linspace(0.05, 2.0, 10)
        norm_small = np.abs(fit(u, y, K, 1e-2).impulse(taus)).max()
        norm_big = np.abs(fit(u, y, K, 1e6).impulse(taus)).max()
        # ghat -> 0 like 1/gamma as the regularization dominates
        assert norm_big <= 1e-3 * norm_small

    def test_objective_dominance(self):
        """The coefficient vector minimizes the regularized LS objective
        J(c) = ||y - S c||^2 / sigma2 + c' S c, S = Sigma_y."""
        u, y = _instance(n=8, seed=5)
        sigma2 = 0.05
        est = fit(u, y, K, sigma2)
        s = est.cov.sigma_y

        def objective(c):
            r = y - s @ c
            return float(r @ r / sigma2 + c @ s @ c)

        j_opt = objective(est.coeffs)
        rng = np.random.default_rng(6)
        for _ in range(50):
            delta = rng.standard_normal(u.n) * rng.choice([1e-3, 1e-1, 1.0])
            assert objective(est.coeffs + delta) >= j_opt - 1e-9 * abs(j_opt)

    def test_input_output_length_mismatch(self):
        u, _ = _instance(n=8)
        with pytest.raises(ValueError):
            fit(u, np.zeros(5), K, 0.1)

    def test_nonpositive_sigma2(self):
        u, y = _instance(n=8)
        with pytest.raises(ValueError):
            fit(u, y, K, 0.0)


class TestTransientFit:
    def test_changes_coefficients_not_cross(self):
        u, y = _instance(n=10, seed=7)
        plain = fit(u, y, K, 0.01)
        with_t = fit(u, y, K, 0.01, transient_weight=2.0)
        assert not np.allclose(plain.coeffs, with_t.coeffs)
        # same cross rows: impulse difference comes only from coefficients
        row = with_t.cov.cross_eval(0.3)
        assert np.allclose(row, plain.cov.cross_eval(0.3))


class TestPrediction:
    def test_matches_interval_convolution(self):
        """Frozen check: prediction equals the convolution of the estimate's
        interval integrals with the held input (past included)."""
        u, y = _instance(n=12, seed=8)
        est = fit(u, y, K, 0.01)
        rng = np.random.default_rng(9)
        past = rng.standard_normal(300)
        u_val = SampledSignal(
            rng.standard_normal(6), u.ts, Intersample.ZOH, Past.UNKNOWN
        )
        yp = est.predict_output(u_val, u_past=past)
        ext = np.concatenate([past, u_val.samples])
        s_max = past.size + u_val.n
        weights = est.interval_integrals(s_max)
        expected = [
            sum(
                weights[s - 1] * ext[past.size + i - s]
                for s in range(1, past.size + i + 1)
            )
            for i in range(u_val.n)
        ]
        assert np.allclose(yp, expected, rtol=1e-10)

    def test_insufficient_past_raises(self):
        # slow-decaying estimate with almost no past supplied
        k_slow = DcKernel(alpha=0.05, beta=0.0, lam=1.0)
        u, y = _instance(n=8, seed=10)
        est = fit(u, y, k_slow, 0.01)
        u_val = SampledSignal(np.ones(4), u.ts, Intersample.ZOH, Past.UNKNOWN)
        with pytest.raises(InsufficientPastError):
            est.predict_output(u_val, u_past=np.zeros(2))

    def test_ts_mismatch_rejected(self):
        u, y = _instance(n=8)
        est = fit(u, y, K, 0.01)
        u_val = SampledSignal(np.ones(4), u.ts * 2, Intersample.ZOH, Past.UNKNOWN)
        with pytest.raises(ValueError):
            est.predict_output(u_val, u_past=np.zeros(500))

    def test_bl_prediction_reproduces_training_fit(self):
        """For a BL periodic input, predicting on the training input must give
        the smoothed training output (the posterior-mean output)."""
        rng = np.random.default_rng(11)
        u = SampledSignal(rng.standard_normal(9), 0.3, Intersample.BL, Past.PA)
        y = rng.standard_normal(9)
        est = fit(u, y, K, 0.05)
        yhat = est.predict_output(u)
        # posterior mean of the noiseless output: Sigma_y (Sigma_y + s2 I)^-1 y
        expected = est.cov.sigma_y @ est.coeffs
        assert np.allclose(yhat, expected, rtol=1e-8, atol=1e-10)
