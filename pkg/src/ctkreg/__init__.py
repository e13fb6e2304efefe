"""Kernel-regularized estimation of continuous-time systems from sampled data.

The package estimates a stable impulse response g(tau) from N input/output
samples by Gaussian-process regression with a diagonal-correlated kernel,
handling the input's intersample behavior (zero-order hold or band-limited)
and its unknown past (zero or periodic appendage, optionally absorbed by a
transient model) exactly through closed-form derived kernels.
"""

from .covariance import Combo, CovariancePair, TransientKernel, build
from .estimator import InsufficientPastError, RegularizedEstimate, fit
from .hyperopt import HyperParams, empirical_bayes_fit, neg_log_marginal, optimize
from .kernels import DcKernel
from .metrics import FitReport, fit_impulse, fit_output, impulse_grid
from .signals import DftCoefficients, Intersample, Past, SampledSignal, generate_prbs
from .simulator import BANKS, CtTransferFunction, DataBankSpec, make_trial, rao_garnier

__version__ = "0.1.0"

__all__ = [
    "BANKS",
    "Combo",
    "CovariancePair",
    "CtTransferFunction",
    "DataBankSpec",
    "DcKernel",
    "DftCoefficients",
    "FitReport",
    "HyperParams",
    "InsufficientPastError",
    "Intersample",
    "Past",
    "RegularizedEstimate",
    "SampledSignal",
    "TransientKernel",
    "build",
    "empirical_bayes_fit",
    "fit",
    "fit_impulse",
    "fit_output",
    "generate_prbs",
    "impulse_grid",
    "make_trial",
    "neg_log_marginal",
    "optimize",
    "rao_garnier",
]
