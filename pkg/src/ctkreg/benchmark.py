"""Monte Carlo benchmark campaigns over the data banks.

A campaign runs seeded trials of the full pipeline -- simulate, tune
hyperparameters by empirical Bayes, fit, score -- and aggregates FIT
statistics. The first trial gets a thorough multistart; later trials add the
first trial's optimum as a warm start, which keeps the per-trial optimizer
budget small without giving up reliability (trials within a bank share their
statistics, so their optima cluster). Per-trial failures are recorded, never
fatal.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import hyperopt, metrics, simulator
from .hyperopt import HyperParams
from .signals import Past
from .simulator import BANKS, DataBankSpec

COMBO_PAST = {"zoh-za": Past.ZA, "zoh-pa": Past.PA}


@dataclass(frozen=True)
class CampaignConfig:
    bank: str
    n_trials: int = 20
    seed: int = 0
    combo: str = "zoh-za"
    transient: bool = True
    n_starts_first: int = 6
    n_starts_rest: int = 1
    maxfev: int = 400
    jobs: int = 1
    snr_db: float | None = None

    def spec(self) -> DataBankSpec:
        spec = BANKS[self.bank]
        if self.snr_db is not None:
            spec = DataBankSpec(
                spec.name, spec.ts, spec.n, snr_db=self.snr_db,
                skip=spec.skip, n_val=spec.n_val,
                prbs_order=spec.prbs_order, prbs_divider=spec.prbs_divider,
            )
        return spec

    def to_dict(self) -> dict:
        return {
            "bank": self.bank, "n_trials": self.n_trials, "seed": self.seed,
            "combo": self.combo, "transient": self.transient,
            "n_starts_first": self.n_starts_first,
            "n_starts_rest": self.n_starts_rest, "maxfev": self.maxfev,
            "jobs": self.jobs, "snr_db": self.snr_db,
        }


@dataclass
class TrialResult:
    trial: int
    fit_g: float | None = None
    fit_y: float | None = None
    nll: float | None = None
    n_evals: int | None = None
    params: dict | None = None
    seconds: float = 0.0
    error: str | None = None
    ghat: np.ndarray | None = field(default=None, repr=False)
    yhat: np.ndarray | None = field(default=None, repr=False)


def run_trial(
    config: CampaignConfig,
    trial: int,
    warm: HyperParams | None = None,
    keep_arrays: bool = False,
) -> TrialResult:
    """One seeded trial: simulate, tune, fit, and score FIT_g and FIT_y."""
    if config.combo not in COMBO_PAST:
        raise ValueError(f"unsupported estimation combo {config.combo!r}")
    start = time.monotonic()
    result = TrialResult(trial=trial)
    try:
        td = simulator.make_trial(config.spec(), trial, seed=config.seed)
        u = td.u_train.with_past(COMBO_PAST[config.combo])
        n_starts = config.n_starts_first if warm is None else config.n_starts_rest
        extra = [hyperopt.pack(warm)] if warm is not None else None
        est, opt = hyperopt.empirical_bayes_fit(
            u, td.y_train, transient=config.transient, n_starts=n_starts,
            maxfev=config.maxfev, seed=config.seed * 100003 + trial,
            extra_starts=extra,
        )
        grid = metrics.impulse_grid()
        ghat = est.impulse(grid)
        g_true = td.system.impulse_response(grid)
        result.fit_g = metrics.fit_impulse(ghat, g_true)
        yhat = est.predict_output(td.u_val, u_past=td.u_val_past)
        result.fit_y = metrics.fit_output(yhat, td.y0_val)
        result.nll = opt.nll
        result.n_evals = opt.n_evals
        result.params = opt.params.to_dict()
        if keep_arrays:
            result.ghat = ghat
            result.yhat = yhat
    except Exception as exc:  # per-trial failures are campaign data
        result.error = f"{type(exc).__name__}: {exc}"
    result.seconds = time.monotonic() - start
    return result


def run_campaign(
    config: CampaignConfig,
    progress=None,
    keep_arrays: bool = False,
) -> list[TrialResult]:
    """Run all trials; trial 0 is thorough, the rest warm-start from it.

    With ``jobs > 1`` the warm-started trials run in a process pool; outputs
    and ordering are identical to the sequential run.
    """
    results = [run_trial(config, 0, warm=None, keep_arrays=keep_arrays)]
    if progress:
        progress(results[0])
    warm = None
    if results[0].params is not None:
        warm = HyperParams.from_dict(results[0].params)
    rest = range(1, config.n_trials)
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            futures = [
                pool.submit(run_trial, config, t, warm, keep_arrays) for t in rest
            ]
            for fut in futures:
                results.append(fut.result())
                if progress:
                    progress(results[-1])
    else:
        for t in rest:
            results.append(run_trial(config, t, warm, keep_arrays=keep_arrays))
            if progress:
                progress(results[-1])
    return results


def collect_report(
    config: CampaignConfig, results: list[TrialResult], metric: str
) -> metrics.FitReport:
    """Aggregate one metric ('fit_g' or 'fit_y') across successful trials."""
    report = metrics.FitReport(bank=config.bank, metric=metric)
    for r in results:
        value = getattr(r, metric)
        if r.error is None and value is not None:
            report.add(r.trial, value)
    return report
