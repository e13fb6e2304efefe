"""Output covariance and impulse/output cross-covariance builders.

Each supported (intersample, past) combination assembles the N x N output
covariance from the matching derived kernel and exposes an evaluator for the
1 x N cross-covariance row at any lag tau. The ZOH builders form
Phi @ K @ Phi.T with Phi the regressor matrix, so assembly is O(N^3) rather
than the naive O(N^4) double sum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import toeplitz

from . import kernels
from .kernels import DcKernel
from .signals import Intersample, Past, SampledSignal, dft, nyquist_energy


class Combo(enum.Enum):
    ZOH_PA = "zoh-pa"
    ZOH_ZA = "zoh-za"
    BL_PA = "bl-pa"


@dataclass(frozen=True)
class TransientKernel:
    """Transient prior kappa_t = alpha_t * kappa_g, absorbing a wrong past assumption."""

    base: DcKernel
    alpha_t: float

    def __post_init__(self):
        if self.alpha_t < 0:
            raise ValueError("alpha_t must be nonnegative")

    def gram(self, t_grid: np.ndarray) -> np.ndarray:
        t = np.asarray(t_grid, dtype=float)
        return self.alpha_t * np.asarray(
            kernels.kappa_g(self.base, t[:, None], t[None, :])
        )


@dataclass(frozen=True)
class CovariancePair:
    """The output covariance Sigma_y plus a cross-covariance row evaluator."""

    sigma_y: np.ndarray
    combo: Combo
    kernel: DcKernel
    ts: float
    n: int
    phi: np.ndarray | None = None          # ZOH regressor matrix (N x N)
    bl_bins: np.ndarray | None = None      # BL harmonic indices
    bl_u: np.ndarray | None = None         # BL input DFT coefficients on bl_bins

    def cross_eval(self, tau: float) -> np.ndarray:
        return self.cross_matrix(np.array([float(tau)]))[0]

    def cross_matrix(self, taus) -> np.ndarray:
        """Rows Sigma_gy(tau) stacked for each requested lag."""
        taus = np.asarray(taus, dtype=float)
        if np.any(taus < 0):
            raise ValueError("lags must be nonnegative")
        if self.combo is Combo.ZOH_ZA:
            s = np.arange(1, self.n + 1)
            kv = _chunked(lambda t: kernels.kappa_ggd(self.kernel, self.ts, t[:, None], s[None, :]), taus)
        elif self.combo is Combo.ZOH_PA:
            s = np.arange(1, self.n + 1)
            kv = _chunked(
                lambda t: kernels.kappa_ggdp(self.kernel, self.ts, self.n, t[:, None], s[None, :]),
                taus,
            )
        else:
            period = self.n * self.ts
            fc = np.empty((taus.size, self.bl_bins.size), dtype=complex)
            for i, tau in enumerate(taus):
                fc[i] = [
                    kernels.fourier_cross_integral(self.kernel, period, tau, int(n2))
                    for n2 in self.bl_bins
                ]
            omega0 = 2 * np.pi / period
            t_grid = np.arange(self.n) * self.ts
            phases = np.exp(1j * omega0 * np.outer(t_grid, self.bl_bins))
            rows = (np.conj(fc) * self.bl_u) @ phases.T / self.n
            _check_imag(rows, what="cross-covariance rows")
            return rows.real
        return kv @ self.phi.T

    def impulse(self, coeffs: np.ndarray, taus) -> np.ndarray:
        """ghat(tau) = Sigma_gy(tau) @ coeffs, evaluated efficiently on a grid."""
        taus = np.asarray(taus, dtype=float)
        coeffs = np.asarray(coeffs, dtype=float)
        if self.combo in (Combo.ZOH_ZA, Combo.ZOH_PA):
            w = self.phi.T @ coeffs
            return _impulse_zoh(self, w, taus)
        return self.cross_matrix(taus) @ coeffs

    def integrated_cross(self, coeffs: np.ndarray, s_max: int) -> np.ndarray:
        """Interval integrals of ghat: int over ((s-1)ts, s*ts] of ghat, s = 1..s_max.

        Used when convolving the estimate with a held input.
        """
        coeffs = np.asarray(coeffs, dtype=float)
        if self.combo is Combo.BL_PA:
            raise NotImplementedError(
                "BL estimates are convolved in the frequency domain; "
                "see RegularizedEstimate.predict_output"
            )
        w = self.phi.T @ coeffs
        s = np.arange(1, s_max + 1)
        s2 = np.arange(1, self.n + 1)
        if self.combo is Combo.ZOH_ZA:
            kv = _chunked(lambda ss: kernels.kappa_gd(self.kernel, self.ts, ss[:, None], s2[None, :]), s.astype(float))
        else:
            kv = _chunked(
                lambda ss: kernels.kappa_gd_periodized_cross(self.kernel, self.ts, self.n, ss[:, None], s2[None, :]),
                s,
            )
        return kv @ w


def _chunked(fn, xs, chunk: int = 4096):
    parts = [fn(xs[i:i + chunk]) for i in range(0, len(xs), chunk)]
    return np.concatenate(parts, axis=0)


def _check_imag(arr: np.ndarray, what: str):
    scale = np.max(np.abs(arr.real))
    if np.max(np.abs(arr.imag)) > 1e-9 * max(scale, 1e-300):
        raise AssertionError(f"imaginary residue in {what} exceeds tolerance")


def _symmetrize(sigma: np.ndarray) -> np.ndarray:
    return (sigma + sigma.T) / 2


def _regressor_matrix(u: SampledSignal, periodic: bool) -> np.ndarray:
    """Phi[i, s-1] = u((i - s) * ts), with wrapped (PA) or zero (ZA) past."""
    samples = u.samples
    n = samples.size
    if periodic:
        idx = np.mod(np.arange(n)[:, None] - np.arange(1, n + 1)[None, :], n)
        return samples[idx]
    col = np.concatenate(([0.0], samples[:-1]))
    return toeplitz(col, np.zeros(n))


def build_zoh_za(u: SampledSignal, k: DcKernel) -> CovariancePair:
    """Covariance for a held input assumed zero before time 0."""
    if u.intersample is not Intersample.ZOH or u.past is not Past.ZA:
        raise ValueError("input must declare ZOH intersample and ZA past behavior")
    n = u.n
    phi = _regressor_matrix(u, periodic=False)
    gram = kernels.kappa_gd_gram(k, u.ts, n)
    sigma = _symmetrize(phi @ gram @ phi.T)
    return CovariancePair(sigma, Combo.ZOH_ZA, k, u.ts, n, phi=phi)


def build_zoh_pa(u: SampledSignal, k: DcKernel) -> CovariancePair:
    """Covariance for a held input periodically appended before time 0."""
    if u.intersample is not Intersample.ZOH or u.past is not Past.PA:
        raise ValueError("input must declare ZOH intersample and PA past behavior")
    n = u.n
    phi = _regressor_matrix(u, periodic=True)
    gram = kernels.kappa_gdp_gram(k, u.ts, n)
    sigma = _symmetrize(phi @ gram @ phi.T)
    return CovariancePair(sigma, Combo.ZOH_PA, k, u.ts, n, phi=phi)


def build_bl_pa(u: SampledSignal, k: DcKernel) -> CovariancePair:
    """Covariance for a periodic band-limited input, assembled in the frequency domain."""
    if u.intersample is not Intersample.BL or u.past is not Past.PA:
        raise ValueError("input must declare BL intersample and PA past behavior")
    scale = max(np.max(np.abs(u.samples)), 1.0)
    if nyquist_energy(u) > 1e-9 * scale * u.n:
        raise ValueError("nonzero Nyquist bin: input is not band-limited below pi/ts")
    n = u.n
    period = n * u.ts
    coeffs = dft(u)
    bins = coeffs.bins
    uu = coeffs.coeffs
    fmat = kernels.fourier_moment_matrix(k, period, bins)
    t_grid = np.arange(n) * u.ts
    omega0 = coeffs.omega0
    e_mat = np.exp(1j * omega0 * np.outer(t_grid, bins)) * uu[None, :]
    sigma_c = e_mat @ fmat @ e_mat.conj().T / n**2
    _check_imag(sigma_c, what="BL output covariance")
    sigma = _symmetrize(sigma_c.real)
    return CovariancePair(sigma, Combo.BL_PA, k, u.ts, n, bl_bins=bins, bl_u=uu)


def build(u: SampledSignal, k: DcKernel) -> CovariancePair:
    builders = {
        (Intersample.ZOH, Past.ZA): build_zoh_za,
        (Intersample.ZOH, Past.PA): build_zoh_pa,
        (Intersample.BL, Past.PA): build_bl_pa,
    }
    key = (u.intersample, u.past)
    if key not in builders:
        raise ValueError(
            f"no closed-form covariance for intersample={u.intersample.value}, "
            f"past={u.past.value}"
        )
    return builders[key](u, k)


def augment_transient(
    base: CovariancePair, tk: TransientKernel, t_grid: np.ndarray
) -> CovariancePair:
    """Add the transient prior Gram to sigma_y; cross rows are unchanged."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size != base.n:
        raise ValueError("time grid length must match the covariance dimension")
    sigma = _symmetrize(base.sigma_y + tk.gram(t_grid))
    return replace(base, sigma_y=sigma)


# ---------------------------------------------------------------------------
# Fast impulse evaluation for ZOH combos.
#
# The cross kernel is separable away from the interval that straddles tau:
# intervals left of tau contribute e^{-(a+b)tau} times a weight that depends
# only on s', intervals right of it e^{-(a-b)tau} times another. Prefix sums
# over the input-weighted interval terms make each grid point O(1).
# ---------------------------------------------------------------------------

def _impulse_zoh(cov: CovariancePair, w: np.ndarray, taus: np.ndarray) -> np.ndarray:
    k, ts, n = cov.kernel, cov.ts, cov.n
    a, b, lam = k.alpha, k.beta, k.lam
    periodic = cov.combo is Combo.ZOH_PA
    period = n * ts
    if periodic and np.any(taus >= period):
        # uncommon: fall back to the direct formula beyond one period
        s2 = np.arange(1, n + 1)
        far = taus >= period
        out = np.empty_like(taus)
        out[far] = _chunked(
            lambda t: kernels.kappa_ggdp(k, ts, n, t[:, None], s2[None, :]), taus[far]
        ) @ w
        if np.any(~far):
            out[~far] = _impulse_zoh(cov, w, taus[~far])
        return out

    s2 = np.arange(1, n + 1, dtype=float)
    left_vec = lam * np.expm1((a - b) * ts) / (a - b) * np.exp(-(a - b) * s2 * ts)
    right_vec = lam * np.expm1((a + b) * ts) / (a + b) * np.exp(-(a + b) * s2 * ts)
    if periodic:
        # intervals left of tau wrap at most once when tau < period, so their
        # geometric factor is exactly 1 and only the right tail needs scaling
        z_right = np.exp(-(a + b) * period)
        right_scale = 1.0 / (1 - z_right)
    wl = w * left_vec
    wr = w * right_vec
    pre_l = np.concatenate(([0.0], np.cumsum(wl)))   # pre_l[m] = sum of first m
    pre_r = np.concatenate(([0.0], np.cumsum(wr)))
    tot_r = pre_r[-1]

    x = taus / ts
    ceil_x = np.ceil(x).astype(int)
    m_left = np.clip(ceil_x - 1, 0, n)          # count of s' < x
    left = np.exp(-(a + b) * taus) * pre_l[m_left]
    if periodic:
        # s' <= ceil(x) wrap once (factor z_right), the rest not at all
        m_r = np.clip(ceil_x, 0, n)
        right_w = z_right * pre_r[m_r] + (tot_r - pre_r[m_r])
        right = np.exp(-(a - b) * taus) * right_scale * right_w
    else:
        # s' >= x + 1 lie right of tau
        m_r = np.clip(ceil_x, 0, n)
        right = np.exp(-(a - b) * taus) * (tot_r - pre_r[m_r])

    out = left + right
    # the single interval straddling tau (s' = ceil(x), when in range)
    s0 = ceil_x
    has = (s0 >= 1) & (s0 <= n) & (x > 0)
    if np.any(has):
        s0h = s0[has].astype(float)
        th = taus[has]
        straddle = lam * (
            np.exp(-(a + b) * th - (a - b) * (s0h - 1) * ts) / (a - b)
            - 2 * b * np.exp(-2 * a * th) / (a * a - b * b)
            - np.exp(-(a - b) * th - (a + b) * s0h * ts) / (a + b)
        )
        out[has] += w[s0[has] - 1] * straddle
    return out
