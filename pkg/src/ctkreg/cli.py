"""Command-line interface: generate, estimate, evaluate, validate-kernels.

Each campaign lives in one directory: ``generate`` writes per-trial CSV
records plus a ``config.json`` manifest, ``estimate`` adds per-trial
hyperparameters and estimate grids, ``evaluate`` reduces them to FIT tables.
All commands are deterministic given (config, seed) and idempotent on their
outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import estimator, hyperopt, metrics, simulator, validate
from .benchmark import COMBO_PAST
from .signals import Intersample, Past, SampledSignal
from .simulator import BANKS, CtTransferFunction, DataBankSpec


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _trial_dir(root: Path, trial: int) -> Path:
    return root / f"trial{trial:03d}"


# ---------------------------------------------------------------------- generate

def cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    spec = BANKS[args.bank]
    if args.snr_db is not None:
        spec = DataBankSpec(
            spec.name, spec.ts, spec.n, snr_db=args.snr_db, skip=spec.skip,
            n_val=spec.n_val, prbs_order=spec.prbs_order,
            prbs_divider=spec.prbs_divider,
        )
    system = None
    if args.num is not None or args.den is not None:
        default = simulator.rao_garnier()
        num = tuple(args.num) if args.num is not None else default.num
        den = tuple(args.den) if args.den is not None else default.den
        system = CtTransferFunction(num, den)
    for trial in range(args.trials):
        td = simulator.make_trial(spec, trial, seed=args.seed, system=system)
        tdir = _trial_dir(out, trial)
        tdir.mkdir(exist_ok=True)
        header = f"ts={spec.ts!r} intersample=zoh past=unknown\nu,y,y0"
        np.savetxt(
            tdir / "train.csv",
            np.column_stack([td.u_train.samples, td.y_train, td.y0_train]),
            delimiter=",", header=header, comments="# ",
        )
        np.savetxt(
            tdir / "validation.csv",
            np.column_stack([td.u_val.samples, td.y0_val]),
            delimiter=",", header=f"ts={spec.ts!r} intersample=zoh\nu,y0",
            comments="# ",
        )
        np.savetxt(tdir / "past.csv", td.u_val_past,
                   header="input samples before the validation window\nu",
                   comments="# ")
        _write_json(tdir / "truth.json", {
            "num": list(td.system.num), "den": list(td.system.den),
            "sigma2_true": td.sigma2_true, "bank": spec.name, "trial": trial,
            "ts": spec.ts,
        })
    _write_json(out / "config.json", {
        "command": "generate", "bank": args.bank, "trials": args.trials,
        "seed": args.seed, "snr_db": args.snr_db,
        "ts": spec.ts, "n": spec.n, "n_val": spec.n_val,
    })
    print(f"wrote {args.trials} trials for bank {args.bank} to {out}")
    return 0


# ---------------------------------------------------------------------- estimate

def _load_trial(tdir: Path):
    meta = json.loads((tdir / "truth.json").read_text())
    ts = float(meta["ts"])
    train = np.loadtxt(tdir / "train.csv", delimiter=",")
    val = np.loadtxt(tdir / "validation.csv", delimiter=",")
    past = np.loadtxt(tdir / "past.csv")
    u_train = SampledSignal(train[:, 0], ts, Intersample.ZOH, Past.UNKNOWN)
    u_val = SampledSignal(val[:, 0], ts, Intersample.ZOH, Past.UNKNOWN)
    return u_train, train[:, 1], u_val, val[:, 1], past, meta


def _estimate_one(tdir: Path, args, warm_dict):
    u_train, y_train, u_val, _, past, _ = _load_trial(tdir)
    u = u_train.with_past(COMBO_PAST[args.combo])
    transient = args.transient == "on"
    warm = hyperopt.HyperParams.from_dict(warm_dict) if warm_dict else None
    n_starts = args.rest_starts if warm is not None else args.starts
    extra = [hyperopt.pack(warm)] if warm is not None else None
    trial = int(tdir.name.replace("trial", ""))
    t0 = time.monotonic()
    est, opt = hyperopt.empirical_bayes_fit(
        u, y_train, transient=transient, n_starts=n_starts,
        maxfev=args.maxfev, seed=args.seed * 100003 + trial, extra_starts=extra,
    )
    grid = metrics.impulse_grid()
    ghat = est.impulse(grid)
    yhat = est.predict_output(u_val, u_past=past)
    np.savetxt(tdir / "ghat.csv", np.column_stack([grid, ghat]),
               delimiter=",", header="tau,ghat", comments="# ")
    np.savetxt(tdir / "yhat.csv", yhat, header="yhat", comments="# ")
    payload = {
        **opt.params.to_dict(), "nll": opt.nll, "n_evals": opt.n_evals,
        "combo": args.combo, "transient": transient,
        "seconds": time.monotonic() - t0,
    }
    _write_json(tdir / "hyperparameters.json", payload)
    if args.verbose:
        with open(tdir / "start_objectives.csv", "w") as fh:
            fh.write("start,nll\n")
            for i, v in enumerate(opt.start_nlls):
                fh.write(f"{i},{v}\n")
    return payload


def cmd_estimate(args) -> int:
    data = Path(args.data)
    manifest = json.loads((data / "config.json").read_text())
    tdirs = sorted(data.glob("trial[0-9][0-9][0-9]"))
    if not tdirs:
        print(f"error: no trial directories under {data}", file=sys.stderr)
        return 1
    failures = []
    first = _estimate_one(tdirs[0], args, None)
    warm = {k: first[k] for k in ("alpha", "beta", "lambda", "sigma2", "alpha_t")
            if k in first}
    rest = tdirs[1:]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = {pool.submit(_estimate_one, td, args, warm): td for td in rest}
            for fut, td in futures.items():
                try:
                    fut.result()
                except Exception as exc:
                    failures.append((td.name, f"{type(exc).__name__}: {exc}"))
    else:
        for td in rest:
            try:
                _estimate_one(td, args, warm)
            except Exception as exc:
                failures.append((td.name, f"{type(exc).__name__}: {exc}"))
    _write_json(data / "estimate_config.json", {
        "command": "estimate", "combo": args.combo, "transient": args.transient,
        "starts": args.starts, "rest_starts": args.rest_starts,
        "maxfev": args.maxfev, "seed": args.seed, "jobs": args.jobs,
        "bank": manifest.get("bank"), "failures": dict(failures),
    })
    for name, err in failures:
        print(f"warning: {name} failed: {err}", file=sys.stderr)
    print(f"estimated {len(tdirs) - len(failures)}/{len(tdirs)} trials in {data}")
    return 0


# ---------------------------------------------------------------------- evaluate

def cmd_evaluate(args) -> int:
    data = Path(args.data)
    manifest_path = data / "config.json"
    if not manifest_path.exists():
        print(f"error: {data} is not a campaign directory", file=sys.stderr)
        return 1
    manifest = json.loads(manifest_path.read_text())
    bank = manifest.get("bank", "custom")
    tdirs = sorted(data.glob("trial[0-9][0-9][0-9]"))
    estimated = [td for td in tdirs if (td / "ghat.csv").exists()]
    if not estimated:
        print(f"error: no estimates found under {data}; run estimate first",
              file=sys.stderr)
        return 1
    grid = metrics.impulse_grid()
    report_g = metrics.FitReport(bank=bank, metric="fit_g")
    report_y = metrics.FitReport(bank=bank, metric="fit_y")
    missing = [td.name for td in tdirs if td not in estimated]
    for tdir in estimated:
        meta = json.loads((tdir / "truth.json").read_text())
        system = CtTransferFunction(tuple(meta["num"]), tuple(meta["den"]))
        trial = int(meta["trial"])
        ghat = np.loadtxt(tdir / "ghat.csv", delimiter=",")[:, 1]
        report_g.add(trial, metrics.fit_impulse(ghat, system.impulse_response(grid)))
        yhat = np.loadtxt(tdir / "yhat.csv")
        y0 = np.loadtxt(tdir / "validation.csv", delimiter=",")[:, 1]
        report_y.add(trial, metrics.fit_output(yhat, y0))
    out = Path(args.out) if args.out else data
    out.mkdir(parents=True, exist_ok=True)
    report_g.to_csv(out / "fit_g.csv")
    report_y.to_csv(out / "fit_y.csv")
    summary = {
        "bank": bank,
        "fit_g": report_g.summary(),
        "fit_y": report_y.summary(),
        "missing_trials": missing,
        "partial": bool(missing),
    }
    _write_json(out / "summary.json", summary)
    print(f"{bank}: FIT_g {report_g.mean:.2f} ± {report_g.std:.2f}, "
          f"FIT_y {report_y.mean:.2f} ± {report_y.std:.2f} "
          f"({len(estimated)} trials{', PARTIAL' if missing else ''})")
    return 0


# ---------------------------------------------------------------- validate-kernels

def cmd_validate_kernels(args) -> int:
    combos = args.combo or None
    report = validate.sweep_kernels(
        n_draws=args.draws, seed=args.seed, combos=combos,
        perturb_scale=args.perturb_scale,
    )
    lines = list(report.lines())
    if not args.skip_covariance:
        cov_report = validate.sweep_covariance(
            n_instances=args.cov_instances, seed=args.seed, combos=combos
        )
        lines += list(cov_report.lines())
        passed = report.passed and cov_report.passed
    else:
        passed = report.passed
    for line in lines:
        print(line)
    print("validate-kernels:", "PASS" if passed else "FAIL")
    return 0 if passed else 1


# ---------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctkreg",
        description="Kernel-regularized continuous-time system identification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="simulate a data bank into trial CSVs")
    p.add_argument("--bank", choices=sorted(BANKS), required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--snr-db", type=float, default=None)
    p.add_argument("--num", type=float, nargs="+", default=None,
                   help="override the test system's numerator coefficients")
    p.add_argument("--den", type=float, nargs="+", default=None,
                   help="override the test system's denominator coefficients")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("estimate", help="tune and fit estimates for each trial")
    p.add_argument("--data", required=True, help="directory written by generate")
    p.add_argument("--combo", choices=sorted(COMBO_PAST), default="zoh-za")
    p.add_argument("--transient", choices=["on", "off"], default="on")
    p.add_argument("--starts", type=int, default=6,
                   help="multistart count for the first trial")
    p.add_argument("--rest-starts", type=int, default=1,
                   help="additional cold starts for warm-started trials")
    p.add_argument("--maxfev", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--verbose", action="store_true",
                   help="write per-start objective traces")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("evaluate", help="reduce estimates to FIT tables")
    p.add_argument("--data", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("validate-kernels",
                       help="closed-form vs oracle validation sweep")
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--combo", action="append",
                   choices=sorted(validate.COMBO_FAMILIES))
    p.add_argument("--cov-instances", type=int, default=10)
    p.add_argument("--skip-covariance", action="store_true")
    p.add_argument("--perturb-scale", type=float, default=1.0,
                   help=argparse.SUPPRESS)  # self-test canary
    p.set_defaults(func=cmd_validate_kernels)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
