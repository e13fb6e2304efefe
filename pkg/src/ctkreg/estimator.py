"""Regularized impulse-response estimation from sampled input/output data.

The estimate is the posterior mean under a Gaussian prior with a stable-spline
covariance: ghat(tau) = Sigma_gy(tau) (Sigma_y + sigma2 I)^{-1} y. A transient
term can be added to Sigma_y to absorb the error made by assuming the unknown
input past is zero or periodic; it changes the coefficient vector but not the
cross-covariance rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import covariance
from .covariance import Combo, CovariancePair, TransientKernel
from .kernels import DcKernel
from .signals import Intersample, SampledSignal, dft


class InsufficientPastError(ValueError):
    """Raised when output prediction needs more past input than was supplied."""


@dataclass(frozen=True)
class RegularizedEstimate:
    """A fitted impulse-response estimate plus everything needed to use it."""

    cov: CovariancePair
    coeffs: np.ndarray
    sigma2: float
    u: SampledSignal
    transient: TransientKernel | None = None

    @property
    def kernel(self) -> DcKernel:
        return self.cov.kernel

    def impulse(self, taus) -> np.ndarray:
        """Evaluate ghat on an array of lags."""
        return self.cov.impulse(self.coeffs, np.asarray(taus, dtype=float))

    def interval_integrals(self, s_max: int) -> np.ndarray:
        """Integrals of ghat over ((s-1)ts, s*ts], s = 1..s_max."""
        return self.cov.integrated_cross(self.coeffs, s_max)

    def predict_output(
        self, u_val: SampledSignal, u_past: np.ndarray | None = None
    ) -> np.ndarray:
        """Noiseless output of ghat driven by a new input with known past.

        ``u_past`` holds the input samples immediately before the validation
        window (most recent last); it is required for held inputs unless the
        estimate's tail is negligible within the window itself.
        """
        if self.cov.combo is Combo.BL_PA:
            return self._predict_bl(u_val)
        return self._predict_zoh(u_val, u_past)

    def _predict_zoh(self, u_val: SampledSignal, u_past) -> np.ndarray:
        if u_val.intersample is not Intersample.ZOH:
            raise ValueError("held-input prediction needs a ZOH validation input")
        if u_val.ts != self.u.ts:
            raise ValueError("validation sampling interval must match the training one")
        past = np.zeros(0) if u_past is None else np.asarray(u_past, dtype=float)
        ts = u_val.ts
        k = self.kernel
        # beyond the training record only the fast-decaying branch of the
        # cross kernel survives, so ghat falls off like e^{-(alpha+beta) tau};
        # extend the convolution to where that envelope is below 1e-10, but no
        # further than the supplied past allows, then verify that the actual
        # interval integrals (not just the prior envelope, which can be very
        # loose) have decayed before truncating
        rate = k.alpha + k.beta
        s_env = self.cov.n + int(np.ceil(23.03 / (rate * ts)))
        s_max = min(s_env, past.size + u_val.n)
        weights = np.asarray(self.interval_integrals(s_max))
        if s_max < s_env:
            tail = np.max(np.abs(weights[-max(s_max // 50, 1):]))
            peak = np.max(np.abs(weights))
            if tail > 1e-6 * peak:
                raise InsufficientPastError(
                    f"prediction truncated at {s_max} intervals but the "
                    f"estimate's tail is still {tail / peak:.2e} of its peak; "
                    "supply a longer input past"
                )
        ext = np.concatenate([past, u_val.samples])
        full = np.convolve(ext, weights)
        p = past.size
        idx = np.arange(u_val.n) + p - 1
        out = np.where(idx >= 0, full[np.clip(idx, 0, full.size - 1)], 0.0)
        return out

    def _predict_bl(self, u_val: SampledSignal) -> np.ndarray:
        """Frequency-domain prediction for a periodic band-limited input.

        Requires the validation input to share the training fundamental
        period, so the estimate's Fourier coefficients line up with its bins.
        """
        from . import kernels

        if u_val.intersample is not Intersample.BL:
            raise ValueError("band-limited prediction needs a BL validation input")
        period = self.cov.n * self.cov.ts
        if not np.isclose(u_val.period, period):
            raise ValueError(
                "validation input must share the training fundamental period"
            )
        k = self.kernel
        bins = self.cov.bl_bins
        m = bins.size
        fmat = kernels.fourier_moment_matrix(k, period, bins)
        omega0 = 2 * np.pi / period
        t_tr = np.arange(self.cov.n) * self.cov.ts
        e_tr = np.exp(1j * omega0 * np.outer(t_tr, bins))
        v = self.cov.bl_u * (e_tr.T @ self.coeffs)
        ghat_fourier = fmat[:, ::-1] @ v / self.cov.n
        cv = dft(u_val)
        if cv.bins.size != m:
            raise ValueError("validation input must use the same number of harmonics")
        t_val = np.arange(u_val.n) * u_val.ts
        e_val = np.exp(1j * omega0 * np.outer(t_val, bins))
        yhat = e_val @ (cv.coeffs * ghat_fourier) / u_val.n
        if np.max(np.abs(yhat.imag)) > 1e-9 * max(np.max(np.abs(yhat.real)), 1e-300):
            raise AssertionError("imaginary residue in band-limited prediction")
        return yhat.real


def fit(
    u: SampledSignal,
    y: np.ndarray,
    kernel: DcKernel,
    sigma2: float,
    transient_weight: float | None = None,
) -> RegularizedEstimate:
    """Posterior-mean estimate of the impulse response from one data record.

    ``sigma2`` is the noise variance (the regularization level);
    ``transient_weight`` enables the transient model with prior scale
    alpha_t * kappa_g on the output grid.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (u.n,):
        raise ValueError("output must have one sample per input sample")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    cov = covariance.build(u, kernel)
    transient = None
    if transient_weight is not None:
        transient = TransientKernel(kernel, transient_weight)
        cov = covariance.augment_transient(cov, transient, np.arange(u.n) * u.ts)
    gram = cov.sigma_y + sigma2 * np.eye(u.n)
    factor = cho_factor(gram, lower=True)
    coeffs = cho_solve(factor, y)
    residual = np.linalg.norm(gram @ coeffs - y)
    if residual > 1e-8 * max(np.linalg.norm(y), 1e-300):
        raise np.linalg.LinAlgError(
            f"ill-conditioned covariance: solve residual {residual:.3g}"
        )
    return RegularizedEstimate(cov=cov, coeffs=coeffs, sigma2=sigma2, u=u, transient=transient)
