"""Empirical-Bayes tuning of kernel hyperparameters and noise variance.

The marginal likelihood of the output under the Gaussian prior is maximized
over (alpha, beta, lambda, sigma2) -- plus the transient scale alpha_t when
the transient model is enabled -- by multistart Nelder-Mead over a box in
transformed coordinates (log scales for the positive parameters, the ratio
beta/alpha for the decay split). Deterministic in the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import minimize
from scipy.stats import qmc

from . import covariance, estimator
from .kernels import BETA_RATIO_MAX, DcKernel
from .signals import SampledSignal


@dataclass(frozen=True)
class HyperParams:
    """A kernel, a noise variance, and (optionally) a transient scale."""

    kernel: DcKernel
    sigma2: float
    alpha_t: float | None = None

    def to_dict(self) -> dict:
        out = {**self.kernel.to_dict(), "sigma2": self.sigma2}
        if self.alpha_t is not None:
            out["alpha_t"] = self.alpha_t
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "HyperParams":
        return cls(
            kernel=DcKernel.from_dict(d),
            sigma2=float(d["sigma2"]),
            alpha_t=float(d["alpha_t"]) if "alpha_t" in d else None,
        )


@dataclass(frozen=True)
class OptimizeResult:
    params: HyperParams
    nll: float
    n_evals: int
    start_nlls: tuple[float, ...]


def neg_log_marginal(u: SampledSignal, y: np.ndarray, params: HyperParams) -> float:
    """-2 log p(y) up to scale: y' S^-1 y + logdet S + N log 2pi, S = Sigma_y + sigma2 I.

    Returns +inf when the covariance cannot be factorized or the parameters
    produce non-finite entries, so optimizers treat such points as infeasible.
    """
    y = np.asarray(y, dtype=float)
    try:
        cov = covariance.build(u, params.kernel)
        sigma = cov.sigma_y
        if params.alpha_t is not None:
            tk = covariance.TransientKernel(params.kernel, params.alpha_t)
            sigma = sigma + tk.gram(np.arange(u.n) * u.ts)
        sigma = sigma + params.sigma2 * np.eye(u.n)
        if not np.all(np.isfinite(sigma)):
            return np.inf
        factor = cho_factor(sigma, lower=True)
    except (np.linalg.LinAlgError, ValueError, FloatingPointError):
        return np.inf
    alpha = cho_solve(factor, y)
    logdet = 2.0 * np.sum(np.log(np.diag(factor[0])))
    nll = float(y @ alpha + logdet + u.n * np.log(2 * np.pi))
    return nll if np.isfinite(nll) else np.inf


def _default_bounds(var_y: float, transient: bool) -> list[tuple[float, float]]:
    bounds = [
        (np.log(1e-2), np.log(1e2)),                 # log alpha
        (0.0, BETA_RATIO_MAX),                       # beta / alpha
        (np.log(1e-6), np.log(1e6)),                 # log lambda
        (np.log(1e-8 * var_y), np.log(10 * var_y)),  # log sigma2
    ]
    if transient:
        bounds.append((0.0, 1e3))                    # alpha_t, linear
    return bounds


def _unpack(theta: np.ndarray, transient: bool) -> HyperParams:
    alpha = float(np.exp(theta[0]))
    ratio = float(np.clip(theta[1], 0.0, BETA_RATIO_MAX))
    kernel = DcKernel(alpha=alpha, beta=ratio * alpha, lam=float(np.exp(theta[2])))
    alpha_t = float(max(theta[4], 0.0)) if transient else None
    return HyperParams(kernel=kernel, sigma2=float(np.exp(theta[3])), alpha_t=alpha_t)


def pack(params: HyperParams) -> np.ndarray:
    """Transformed coordinates of a hyperparameter point (inverse of the
    unpacking used by the optimizer); handy for warm starts."""
    k = params.kernel
    theta = [np.log(k.alpha), k.beta / k.alpha, np.log(k.lam), np.log(params.sigma2)]
    if params.alpha_t is not None:
        theta.append(params.alpha_t)
    return np.array(theta)


def optimize(
    u: SampledSignal,
    y: np.ndarray,
    *,
    transient: bool = False,
    n_starts: int = 25,
    maxfev: int = 400,
    max_restarts: int = 2,
    seed: int = 0,
    extra_starts=None,
) -> OptimizeResult:
    """Multistart Nelder-Mead maximization of the marginal likelihood.

    Start points are drawn once as a Latin hypercube over the bound box
    (deterministic in ``seed``); requesting fewer starts uses a prefix of the
    same design, so a larger ``n_starts`` can only improve the result. Each
    start runs a bounded adaptive simplex search and is restarted from its own
    optimum until the improvement stalls, which guards against premature
    simplex collapse. The best final value wins; ties go to the earliest
    start.

    ``extra_starts`` accepts additional start vectors in transformed
    coordinates (log alpha, beta/alpha, log lambda, log sigma2[, alpha_t]);
    campaign runners use it to warm-start from a neighboring trial's optimum.
    """
    y = np.asarray(y, dtype=float)
    if n_starts < 1:
        raise ValueError("need at least one start")
    var_y = float(np.var(y))
    if not var_y > 0:
        raise ValueError("output has zero variance; nothing to fit")
    bounds = _default_bounds(var_y, transient)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    sampler = qmc.LatinHypercube(d=len(bounds), seed=seed)
    design = lo + sampler.random(max(25, n_starts)) * (hi - lo)
    starts = list(design[:n_starts])
    for x0 in extra_starts or ():
        starts.append(np.clip(np.asarray(x0, dtype=float), lo, hi))

    def objective(theta):
        return neg_log_marginal(u, y, _unpack(theta, transient))

    best_x, best_f = None, np.inf
    n_evals = 0
    start_nlls = []
    for x0 in starts:
        x, f = x0, np.inf
        for _ in range(max_restarts + 1):
            res = minimize(
                objective,
                x,
                method="Nelder-Mead",
                bounds=bounds,
                options={
                    "maxfev": maxfev,
                    "adaptive": True,
                    "xatol": 1e-4,
                    "fatol": 1e-6,
                },
            )
            n_evals += res.nfev
            if f - res.fun < 1e-3:
                x, f = (res.x, res.fun) if res.fun < f else (x, f)
                break
            x, f = res.x, res.fun
        start_nlls.append(float(f))
        if f < best_f:
            best_x, best_f = x, f
    if not np.isfinite(best_f):
        raise RuntimeError(
            "all optimizer starts were infeasible (covariance factorization "
            "failed everywhere); check the data scaling"
        )
    return OptimizeResult(
        params=_unpack(best_x, transient),
        nll=float(best_f),
        n_evals=n_evals,
        start_nlls=tuple(start_nlls),
    )


def empirical_bayes_fit(
    u: SampledSignal,
    y: np.ndarray,
    *,
    transient: bool = False,
    n_starts: int = 25,
    maxfev: int = 400,
    seed: int = 0,
    extra_starts=None,
) -> tuple[estimator.RegularizedEstimate, OptimizeResult]:
    """Tune hyperparameters on (u, y) and fit the estimate at the optimum."""
    result = optimize(
        u, y, transient=transient, n_starts=n_starts, maxfev=maxfev, seed=seed,
        extra_starts=extra_starts,
    )
    p = result.params
    est = estimator.fit(
        u, y, p.kernel, p.sigma2,
        transient_weight=p.alpha_t if transient else None,
    )
    return est, result
