"""Diagonal-correlated kernel and its discretized/periodized descendants.

The base kernel is kappa(tau, tau') = lam * exp(-alpha*(tau+tau')) *
exp(-beta*|tau-tau'|). Integrating it over sampling intervals (ZOH),
resumming it over periods (PA), or both, gives six derived kernels; all have
elementary closed forms, implemented here and validated against quadrature
and truncated-series oracles (see ctkreg.oracles / ctkreg.validate).

Two coefficients printed in the source material for the periodized kernels do
not match their defining series; the forms below follow the series (the
resummation gives a leading coefficient 1/((1-e^{-2aP})(1-e^{-(a+b)P})) on
the e^{-b|tau-tau'|} term, not the tail coefficient).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: admissible hyperparameter box; beta is kept away from alpha because the
#: closed forms carry 1/(alpha - beta) factors
BETA_RATIO_MAX = 0.99


@dataclass(frozen=True)
class DcKernel:
    """Hyperparameters of the diagonal-correlated kernel.

    alpha: decay rate (1/s), > 0. beta: off-diagonal correlation rate (1/s),
    0 <= beta <= 0.99*alpha. lam: scale ((signal units)^2), >= 0.
    """

    alpha: float
    beta: float
    lam: float

    def __post_init__(self):
        if not (self.alpha > 0 and np.isfinite(self.alpha)):
            raise ValueError("alpha must be positive")
        if not (0 <= self.beta <= BETA_RATIO_MAX * self.alpha * (1 + 1e-12)):
            raise ValueError(
                f"beta must lie in [0, {BETA_RATIO_MAX}*alpha] "
                f"(got alpha={self.alpha}, beta={self.beta})"
            )
        if not (self.lam >= 0 and np.isfinite(self.lam)):
            raise ValueError("lam must be nonnegative")

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "lambda": self.lam}

    @classmethod
    def from_dict(cls, d: dict) -> "DcKernel":
        return cls(alpha=d["alpha"], beta=d["beta"], lam=d["lambda"])


@dataclass(frozen=True)
class DerivedDcConstants:
    """Interval/periodization constants of the closed forms.

    lambda1, lambda2 depend on (alpha, beta, ts); lambda3 additionally on the
    period n*ts. lambda4 is the printed companion of the diagonal periodized
    term; the series-validated forms use 2*lambda1 in its place, but the
    constant is kept for reference.
    """

    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: float

    @classmethod
    def from_kernel(cls, k: DcKernel, ts: float, n: int) -> "DerivedDcConstants":
        a, b = k.alpha, k.beta
        p = n * ts
        l1 = np.expm1((a + b) * ts) * np.expm1((a - b) * ts) / ((a + b) * (a - b))
        l2 = ((a - b) * np.exp(2 * a * ts) - 2 * a * np.exp((a - b) * ts) + a + b) / (
            a * (a * a - b * b)
        )
        l3 = np.exp(-(a + b) * p) / (
            (-np.expm1(-2 * a * p)) * (-np.expm1(-(a + b) * p))
        )
        l4 = ((a + b) * np.exp(2 * a * ts) - 2 * a * np.exp((a + b) * ts) + a - b) / (
            a * (a * a - b * b)
        )
        return cls(lambda1=float(l1), lambda2=float(l2), lambda3=float(l3), lambda4=float(l4))


def kappa_g(k: DcKernel, tau, tau2):
    """Pointwise DC kernel; arguments must be nonnegative."""
    tau = np.asarray(tau, dtype=float)
    tau2 = np.asarray(tau2, dtype=float)
    if np.any(tau < 0) or np.any(tau2 < 0):
        raise ValueError("kernel arguments must be nonnegative")
    out = k.lam * np.exp(-k.alpha * (tau + tau2) - k.beta * np.abs(tau - tau2))
    return out if out.ndim else float(out)


def kappa_gd(k: DcKernel, ts: float, s, s2):
    """Double interval integral of kappa_g over ((s-1)ts, s*ts] x ((s2-1)ts, s2*ts]."""
    s = np.asarray(s)
    s2 = np.asarray(s2)
    if np.any(s < 1) or np.any(s2 < 1):
        raise ValueError("interval indices start at 1")
    c = DerivedDcConstants.from_kernel(k, ts, 1)
    a, b = k.alpha, k.beta
    off = c.lambda1 * k.lam * np.exp(-b * np.abs(s - s2) * ts - a * (s + s2) * ts)
    diag = c.lambda2 * k.lam * np.exp(-a * (s + s2) * ts)
    out = np.where(s == s2, diag, off)
    return out if out.ndim else float(out)


def kappa_gd_gram(k: DcKernel, ts: float, n: int) -> np.ndarray:
    """The n x n Gram of kappa_gd on s, s2 = 1..n, built vectorized."""
    s = np.arange(1, n + 1, dtype=float)
    return np.asarray(kappa_gd(k, ts, s[:, None], s[None, :]))


def kappa_ggd(k: DcKernel, ts: float, tau, s2):
    """Single interval integral: int over tau2 in ((s2-1)ts, s2*ts] of kappa_g.

    Branches on where tau falls relative to the interval; continuous across
    the branch boundaries.
    """
    tau = np.asarray(tau, dtype=float)
    s2 = np.asarray(s2)
    if np.any(tau < 0):
        raise ValueError("tau must be nonnegative")
    if np.any(s2 < 1):
        raise ValueError("interval indices start at 1")
    a, b, lam = k.alpha, k.beta, k.lam
    x = tau / ts
    lo = (s2 - 1) * ts
    hi = s2 * ts

    # tau beyond the interval: integrand carries e^{-(a+b)tau} e^{-(a-b)tau2}
    after = (
        lam
        / (a - b)
        * np.exp(-(a + b) * tau)
        * (np.exp(-(a - b) * lo) - np.exp(-(a - b) * hi))
    )
    # tau before the interval: e^{-(a-b)tau} e^{-(a+b)tau2}
    before = (
        lam
        / (a + b)
        * np.exp(-(a - b) * tau)
        * (np.exp(-(a + b) * lo) - np.exp(-(a + b) * hi))
    )
    # tau inside: split the integral at tau2 = tau
    inside = lam * (
        np.exp(-(a + b) * tau - (a - b) * lo) / (a - b)
        - 2 * b * np.exp(-2 * a * tau) / (a * a - b * b)
        - np.exp(-(a - b) * tau - (a + b) * hi) / (a + b)
    )
    out = np.where(x > s2, after, np.where(x <= s2 - 1, before, inside))
    return out if out.ndim else float(out)


def kappa_gp(k: DcKernel, period: float, tau, tau2):
    """Doubly periodized DC kernel on [0, period)^2 (sum over both period shifts)."""
    tau = np.asarray(tau, dtype=float)
    tau2 = np.asarray(tau2, dtype=float)
    if np.any(tau < 0) or np.any(tau2 < 0) or np.any(tau >= period) or np.any(tau2 >= period):
        raise ValueError("arguments must lie in [0, period)")
    a, b, lam = k.alpha, k.beta, k.lam
    denom = (-np.expm1(-2 * a * period)) * (-np.expm1(-(a + b) * period))
    head = 1.0 / denom
    tail = np.exp(-(a + b) * period) / denom
    d = np.abs(tau - tau2)
    out = lam * np.exp(-a * (tau + tau2)) * (head * np.exp(-b * d) + tail * np.exp(b * d))
    return out if out.ndim else float(out)


def kappa_ggp(k: DcKernel, period: float, tau, tau2):
    """Singly periodized kernel: sum over n >= 0 of kappa_g(tau, tau2 + n*period).

    tau may exceed the period (the impulse response is evaluated on [0, inf)).
    """
    tau = np.asarray(tau, dtype=float)
    tau2 = np.asarray(tau2, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be nonnegative")
    if np.any(tau2 < 0) or np.any(tau2 >= period):
        raise ValueError("tau2 must lie in [0, period)")
    a, b, lam = k.alpha, k.beta, k.lam
    n0 = np.maximum(0, np.ceil((tau - tau2) / period)).astype(float)
    # shifts with tau2 + n*period >= tau: geometric tail in e^{-(a+b)period}
    tail = np.exp(b * (tau - tau2) - (a + b) * n0 * period) / (
        -np.expm1(-(a + b) * period)
    )
    # shifts still left of tau: finite geometric sum in e^{-(a-b)period}
    head = (
        np.exp(-b * (tau - tau2))
        * (-np.expm1(-(a - b) * n0 * period))
        / (-np.expm1(-(a - b) * period))
    )
    out = lam * np.exp(-a * (tau + tau2)) * (tail + head)
    return out if out.ndim else float(out)


def kappa_gdp(k: DcKernel, ts: float, n_period: int, s, s2):
    """Discretized + periodized kernel: double period resummation of kappa_gd."""
    s = np.asarray(s)
    s2 = np.asarray(s2)
    if np.any(s < 1) or np.any(s2 < 1):
        raise ValueError("interval indices start at 1")
    a, b, lam = k.alpha, k.beta, k.lam
    p = n_period * ts
    c = DerivedDcConstants.from_kernel(k, ts, n_period)
    g_diag = 1.0 / (-np.expm1(-2 * a * p))
    d = np.abs(s - s2) * ts
    cross = (
        c.lambda3
        * c.lambda1
        * lam
        * np.exp(-a * (s + s2) * ts)
        * (np.exp(-b * d) + np.exp(b * d))
    )
    out = g_diag * np.asarray(kappa_gd(k, ts, s, s2)) + cross
    return out if out.ndim else float(out)


def kappa_gdp_gram(k: DcKernel, ts: float, n: int) -> np.ndarray:
    s = np.arange(1, n + 1, dtype=float)
    return np.asarray(kappa_gdp(k, ts, n, s[:, None], s[None, :]))


def kappa_ggdp(k: DcKernel, ts: float, n_period: int, tau, s2):
    """Period resummation of kappa_ggd: sum over n >= 0 of kappa_ggd(tau, s2 + n*N).

    The shifted intervals left of tau resum as a finite geometric sum, the
    ones right of tau as a geometric tail; at most one interval straddles tau.
    """
    tau = np.asarray(tau, dtype=float)
    s2 = np.asarray(s2)
    if np.any(tau < 0):
        raise ValueError("tau must be nonnegative")
    if np.any(s2 < 1) or np.any(s2 > n_period):
        raise ValueError("s2 must lie in 1..n_period")
    a, b, lam = k.alpha, k.beta, k.lam
    p = n_period * ts
    x = tau / ts
    n_left = np.maximum(0, np.ceil((x - s2) / n_period)).astype(int)
    n_right = np.maximum(0, np.ceil((x + 1 - s2) / n_period)).astype(int)
    z_left = np.exp(-(a - b) * p)
    z_right = np.exp(-(a + b) * p)

    left = (
        lam
        * np.exp(-(a + b) * tau - (a - b) * s2 * ts)
        * (np.expm1((a - b) * ts) / (a - b))
        * (-np.expm1(-(a - b) * n_left * p))
        / (1 - z_left)
    )
    right = (
        lam
        * np.exp(-(a - b) * tau - (a + b) * s2 * ts - (a + b) * n_right * p)
        * (np.expm1((a + b) * ts) / (a + b))
        / (1 - z_right)
    )
    q = s2 + n_left * n_period
    straddle = np.where(
        n_right > n_left,
        lam
        * (
            np.exp(-(a + b) * tau - (a - b) * (q - 1) * ts) / (a - b)
            - 2 * b * np.exp(-2 * a * tau) / (a * a - b * b)
            - np.exp(-(a - b) * tau - (a + b) * q * ts) / (a + b)
        ),
        0.0,
    )
    out = left + right + straddle
    return out if out.ndim else float(out)


def kappa_gd_periodized_cross(k: DcKernel, ts: float, n_period: int, s, s2):
    """sum over n >= 0 of kappa_gd(s, s2 + n*n_period), for s >= 1, 1 <= s2 <= N.

    This is the interval integral of kappa_ggdp over ((s-1)ts, s*ts], used when
    predicting outputs from a periodized-kernel estimate.
    """
    s = np.asarray(s)
    s2 = np.asarray(s2)
    if np.any(s < 1) or np.any(s2 < 1) or np.any(s2 > n_period):
        raise ValueError("indices out of range")
    a, b, lam = k.alpha, k.beta, k.lam
    p = n_period * ts
    c = DerivedDcConstants.from_kernel(k, ts, n_period)
    delta = s - s2
    n_left = np.maximum(0, np.ceil(delta / n_period)).astype(int)
    n_right = np.floor_divide(delta, n_period) + 1
    n_right = np.maximum(0, n_right).astype(int)
    on_diag = (np.mod(delta, n_period) == 0) & (delta >= 0)

    left = (
        c.lambda1
        * lam
        * np.exp(-(a + b) * s * ts - (a - b) * s2 * ts)
        * (-np.expm1(-(a - b) * n_left * p))
        / (-np.expm1(-(a - b) * p))
    )
    right = (
        c.lambda1
        * lam
        * np.exp(-(a - b) * s * ts - (a + b) * s2 * ts - (a + b) * n_right * p)
        / (-np.expm1(-(a + b) * p))
    )
    diag = np.where(on_diag, c.lambda2 * lam * np.exp(-2 * a * s * ts), 0.0)
    out = left + right + diag
    return out if out.ndim else float(out)


def _tri_integral(p: complex, q: complex, period: float) -> complex:
    """int_0^P e^{-p t} int_0^t e^{-q t2} dt2 dt over the lower triangle."""
    return (
        (-np.expm1(-p * period)) / p - (-np.expm1(-(p + q) * period)) / (p + q)
    ) / q


def fourier_kernel_integrals(k: DcKernel, period: float, n: int, n2: int) -> complex:
    """Double Fourier moment of kappa_gp over [0, period]^2.

    Computes int int kappa_gp(t, t2) e^{-j n w0 t} e^{+j n2 w0 t2} dt dt2 with
    w0 = 2*pi/period, by splitting the square at the diagonal.
    """
    a, b, lam = k.alpha, k.beta, k.lam
    w0 = 2 * np.pi / period
    denom = (-np.expm1(-2 * a * period)) * (-np.expm1(-(a + b) * period))
    head = lam / denom
    tail = lam * np.exp(-(a + b) * period) / denom
    total = 0j
    for coef, bb in ((head, b), (tail, -b)):
        total += coef * (
            _tri_integral(a + bb + 1j * n * w0, a - bb - 1j * n2 * w0, period)
            + _tri_integral(a + bb - 1j * n2 * w0, a - bb + 1j * n * w0, period)
        )
    return complex(total)


def fourier_moment_matrix(k: DcKernel, period: float, bins) -> np.ndarray:
    """Matrix of double Fourier moments F[i, j] for harmonic index pairs.

    Entry (i, j) is fourier_kernel_integrals(k, period, bins[i], bins[j]),
    computed vectorized; rows at negative harmonics are conjugate mirrors of
    the positive ones, which keeps the matrix exactly Hermitian-pairable.
    """
    bins = np.asarray(bins, dtype=int)
    a, b, lam = k.alpha, k.beta, k.lam
    w0 = 2 * np.pi / period
    denom = (-np.expm1(-2 * a * period)) * (-np.expm1(-(a + b) * period))
    head = lam / denom
    tail = lam * np.exp(-(a + b) * period) / denom
    n = bins[:, None].astype(float)
    n2 = bins[None, :].astype(float)
    total = np.zeros((bins.size, bins.size), dtype=complex)
    for coef, bb in ((head, b), (tail, -b)):
        total += coef * (
            _tri_integral(a + bb + 1j * n * w0, a - bb - 1j * n2 * w0, period)
            + _tri_integral(a + bb - 1j * n2 * w0, a - bb + 1j * n * w0, period)
        )
    # enforce the conjugate mirror F(-n, -n2) = conj(F(n, n2)) exactly
    neg = bins < 0
    if np.any(neg) and bins.size % 2 == 1:
        total[neg] = np.conj(total[~neg & (bins > 0)][::-1, ::-1])
    return total


def fourier_cross_integral(k: DcKernel, period: float, tau: float, n2: int) -> complex:
    """Fourier moment of the cross kernel: int_0^P kappa_ggp(tau, t2) e^{+j n2 w0 t2} dt2."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    a, b, lam = k.alpha, k.beta, k.lam
    w0 = 2 * np.pi / period
    m = int(np.floor(tau / period))
    r = tau - m * period
    d_right = -np.expm1(-(a + b) * period)
    d_left = -np.expm1(-(a - b) * period)
    w_right = -(a + b) + 1j * n2 * w0
    w_left = -(a - b) + 1j * n2 * w0

    def seg(w, lo, hi):
        return (np.exp(w * hi) - np.exp(w * lo)) / w

    # exponents are combined with the overall e^{-a tau} factor so every
    # argument of exp stays nonpositive
    def c_right(shifts):
        return np.exp(-(a - b) * tau - (a + b) * shifts * period) / d_right

    def c_left(shifts):
        return (
            np.exp(-(a + b) * tau)
            * (-np.expm1(-(a - b) * shifts * period))
            / d_left
        )

    total = lam * (
        c_right(m + 1) * seg(w_right, 0.0, r)
        + c_left(m + 1) * seg(w_left, 0.0, r)
        + c_right(m) * seg(w_right, r, period)
        + c_left(m) * seg(w_left, r, period)
    )
    return complex(total)
