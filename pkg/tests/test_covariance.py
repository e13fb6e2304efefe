"""Covariance builders against direct quadrature and internal consistency."""

import numpy as np
import pytest

from ctkreg import validate
from ctkreg.covariance import (
    Combo,
    TransientKernel,
    augment_transient,
    build,
    build_bl_pa,
    build_zoh_pa,
    build_zoh_za,
)
from ctkreg.kernels import DcKernel, kappa_g
from ctkreg.signals import Intersample, Past, SampledSignal

K = DcKernel(alpha=1.3, beta=0.6, lam=2.1)


def _zoh(n, past, seed=0, ts=0.25):
    rng = np.random.default_rng(seed)
    return SampledSignal(rng.standard_normal(n), ts, Intersample.ZOH, past)


class TestQuadratureEquivalence:
    """Each builder vs brute-force quadrature of the defining double integral
    (randomized instances, all three combos)."""

    def test_sweep(self):
        report = validate.sweep_covariance(n_instances=3, seed=5)
        assert report.passed, list(report.lines())


class TestStructure:
    def test_sigma_symmetric(self):
        cov = build_zoh_za(_zoh(8, Past.ZA), K)
        assert np.array_equal(cov.sigma_y, cov.sigma_y.T)

    def test_sigma_psd(self):
        for builder, past in ((build_zoh_za, Past.ZA), (build_zoh_pa, Past.PA)):
            cov = builder(_zoh(8, past), K)
            assert np.linalg.eigvalsh(cov.sigma_y).min() >= -1e-10 * np.abs(
                cov.sigma_y
            ).max()

    def test_dispatch(self):
        assert build(_zoh(6, Past.ZA), K).combo is Combo.ZOH_ZA
        assert build(_zoh(6, Past.PA), K).combo is Combo.ZOH_PA

    def test_dispatch_rejects_unknown_past(self):
        with pytest.raises(ValueError):
            build(_zoh(6, Past.UNKNOWN), K)

    def test_builder_checks_declared_behavior(self):
        with pytest.raises(ValueError):
            build_zoh_za(_zoh(6, Past.PA), K)

    def test_bl_rejects_nyquist_energy(self):
        sig = SampledSignal(np.array([1.0, -1.0] * 3), 0.2, Intersample.BL, Past.PA)
        with pytest.raises(ValueError):
            build_bl_pa(sig, K)


class TestFastImpulsePath:
    """The prefix-sum impulse evaluator vs the direct cross-covariance rows."""

    @pytest.mark.parametrize("past", [Past.ZA, Past.PA])
    def test_matches_direct(self, past):
        u = _zoh(9, past, seed=3)
        cov = build(u, K)
        rng = np.random.default_rng(4)
        coeffs = rng.standard_normal(u.n)
        taus = np.linspace(0.0, 3.0 * u.period, 73)
        direct = cov.cross_matrix(taus) @ coeffs
        fast = cov.impulse(coeffs, taus)
        assert np.allclose(fast, direct, rtol=1e-11, atol=1e-13)

    def test_near_zero_beta(self):
        k0 = DcKernel(alpha=2.0, beta=0.0, lam=1.0)
        u = _zoh(6, Past.ZA, seed=5)
        cov = build(u, k0)
        coeffs = np.ones(6)
        taus = np.array([0.1, 0.9, 2.5])
        assert np.allclose(
            cov.impulse(coeffs, taus), cov.cross_matrix(taus) @ coeffs, rtol=1e-10
        )


class TestTransient:
    def test_augmentation_adds_scaled_base_gram(self):
        u = _zoh(7, Past.ZA)
        cov = build(u, K)
        tk = TransientKernel(K, alpha_t=0.8)
        t_grid = np.arange(7) * u.ts
        aug = augment_transient(cov, tk, t_grid)
        expected = cov.sigma_y + 0.8 * np.asarray(
            kappa_g(K, t_grid[:, None], t_grid[None, :])
        )
        assert np.allclose(aug.sigma_y, expected, rtol=1e-14, atol=1e-16)

    def test_cross_rows_unchanged(self):
        u = _zoh(7, Past.ZA)
        cov = build(u, K)
        aug = augment_transient(cov, TransientKernel(K, 5.0), np.arange(7) * u.ts)
        assert np.array_equal(aug.cross_eval(0.4), cov.cross_eval(0.4))

    def test_negative_scale_rejected(self):
        with pytest.raises(ValueError):
            TransientKernel(K, alpha_t=-1.0)

    def test_grid_length_checked(self):
        cov = build(_zoh(7, Past.ZA), K)
        with pytest.raises(ValueError):
            augment_transient(cov, TransientKernel(K, 1.0), np.arange(5) * 0.25)
