"""Continuous-time benchmark systems and sampled-data generation.

A continuous-time transfer function is discretized exactly under a held input
(matrix exponential of the augmented system), driven by a PRBS excitation,
and sampled into training and validation records with additive white noise at
a prescribed SNR. Everything is deterministic in (seed, trial).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.signal import dlsim, dlti

from .signals import Intersample, Past, SampledSignal, generate_prbs


@dataclass(frozen=True)
class CtTransferFunction:
    """Strictly proper, stable continuous-time transfer function.

    ``num`` and ``den`` are polynomial coefficients, highest order first.
    """

    num: tuple[float, ...]
    den: tuple[float, ...]

    def __post_init__(self):
        num = tuple(float(c) for c in np.trim_zeros(np.atleast_1d(self.num), "f"))
        den = tuple(float(c) for c in np.trim_zeros(np.atleast_1d(self.den), "f"))
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        if not den:
            raise ValueError("denominator must be nonzero")
        if len(num) >= len(den):
            raise ValueError("transfer function must be strictly proper")
        poles = np.roots(den)
        if np.any(poles.real >= 0):
            raise ValueError("system must be asymptotically stable")

    @property
    def order(self) -> int:
        return len(self.den) - 1

    def to_state_space(self):
        """Controllable canonical form (A, B, C); D is zero (strictly proper)."""
        den = np.asarray(self.den) / self.den[0]
        num = np.asarray(self.num) / self.den[0]
        n = self.order
        a = np.zeros((n, n))
        a[0] = -den[1:]
        a[1:, :-1] = np.eye(n - 1)
        b = np.zeros((n, 1))
        b[0, 0] = 1.0
        c = np.zeros((1, n))
        c[0, n - len(num):] = num
        return a, b, c

    def impulse_response(self, taus) -> np.ndarray:
        """g(tau) = C e^{A tau} B evaluated through the eigendecomposition of A."""
        taus = np.asarray(taus, dtype=float)
        a, b, c = self.to_state_space()
        w, v = np.linalg.eig(a)
        weights = (c @ v).ravel() * np.linalg.solve(v, b).ravel()
        g = np.exp(np.multiply.outer(taus, w)) @ weights
        return g.real

    def simulate_zoh(self, u: np.ndarray, ts: float) -> np.ndarray:
        """Exact sampled output under a held input, zero initial state."""
        a, b, c = self.to_state_space()
        n = self.order
        aug = np.zeros((n + 1, n + 1))
        aug[:n, :n] = a * ts
        aug[:n, n:] = b * ts
        phi = expm(aug)
        ad, bd = phi[:n, :n], phi[:n, n:]
        system = dlti(ad, bd, c, np.zeros((1, 1)), dt=ts)
        _, y, _ = dlsim(system, np.asarray(u, dtype=float))
        return y.ravel()


def rao_garnier(
    num: tuple[float, ...] = (-6400.0, 1600.0),
    den: tuple[float, ...] = (1.0, 6.0, 408.0, 416.0, 1600.0),
) -> CtTransferFunction:
    """Fourth-order benchmark system: fast and slow resonant modes plus a
    non-minimum-phase zero."""
    return CtTransferFunction(num, den)


def add_noise(y0: np.ndarray, snr_db: float, rng: np.random.Generator):
    """White Gaussian noise sized so that var(y0)/var(noise) = 10^(snr/10)."""
    y0 = np.asarray(y0, dtype=float)
    sigma2 = float(np.var(y0) / 10 ** (snr_db / 10))
    return y0 + np.sqrt(sigma2) * rng.standard_normal(y0.size), sigma2


@dataclass(frozen=True)
class DataBankSpec:
    """One benchmark sampling condition: rate, record length, and windowing."""

    name: str
    ts: float
    n: int
    snr_db: float = 10.0
    skip: int = 3000        # transient samples discarded before the window
    n_val: int = 1000       # validation record length
    prbs_order: int = 10
    prbs_divider: int = 7


BANKS = {
    "D1": DataBankSpec("D1", ts=0.01, n=1000),
    "D2": DataBankSpec("D2", ts=0.05, n=200),
    "D3": DataBankSpec("D3", ts=0.1, n=100),
    "D4": DataBankSpec("D4", ts=0.1, n=1000),
}


@dataclass(frozen=True)
class TrialData:
    """Sampled records for one Monte Carlo trial."""

    spec: DataBankSpec
    trial: int
    u_train: SampledSignal       # past behavior deliberately left unknown
    y_train: np.ndarray          # noisy training output
    y0_train: np.ndarray         # noiseless training output
    sigma2_true: float
    u_val: SampledSignal
    y0_val: np.ndarray           # noiseless validation output
    u_val_past: np.ndarray       # true input samples before the validation window
    system: CtTransferFunction = field(default_factory=rao_garnier)


def make_trial(
    spec: DataBankSpec,
    trial: int,
    seed: int = 0,
    system: CtTransferFunction | None = None,
) -> TrialData:
    """Simulate one trial: PRBS input, exact ZOH sampling, windowed records.

    The long run starts from rest; ``spec.skip`` samples are discarded so the
    training window carries a nontrivial (and unknown-to-the-estimator) input
    past. The validation window follows immediately, is noiseless, and keeps
    the true past input so output prediction is well posed.
    """
    if system is None:
        system = rao_garnier()
    bank_idx = sorted(BANKS).index(spec.name) if spec.name in BANKS else 99
    rng = np.random.default_rng([seed, trial, bank_idx])
    total = spec.skip + spec.n + spec.n_val
    prbs_seed = int(rng.integers(0, (1 << spec.prbs_order) - 1))
    u_full = generate_prbs(
        spec.prbs_order, spec.prbs_divider, length=total, seed=prbs_seed,
        ts=spec.ts, past=Past.UNKNOWN,
    )
    y_full = system.simulate_zoh(u_full.samples, spec.ts)

    sl_tr = slice(spec.skip, spec.skip + spec.n)
    sl_val = slice(spec.skip + spec.n, total)
    u_train = SampledSignal(
        u_full.samples[sl_tr], spec.ts, Intersample.ZOH, Past.UNKNOWN
    )
    y0_train = y_full[sl_tr]
    y_train, sigma2 = add_noise(y0_train, spec.snr_db, rng)
    u_val = SampledSignal(
        u_full.samples[sl_val], spec.ts, Intersample.ZOH, Past.UNKNOWN
    )
    return TrialData(
        spec=spec,
        trial=trial,
        u_train=u_train,
        y_train=y_train,
        y0_train=y0_train,
        sigma2_true=sigma2,
        u_val=u_val,
        y0_val=y_full[sl_val],
        u_val_past=u_full.samples[: spec.skip + spec.n].copy(),
        system=system,
    )
