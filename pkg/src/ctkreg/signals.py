"""Sampled signals with declared intersample and past behavior."""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field

import numpy as np


class Intersample(enum.Enum):
    ZOH = "zoh"
    BL = "bl"


class Past(enum.Enum):
    PA = "pa"
    ZA = "za"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SampledSignal:
    """N input (or output) samples taken every ``ts`` seconds.

    ``intersample`` declares how the underlying continuous-time signal moves
    between samples, ``past`` declares what it did before t = 0.
    """

    samples: np.ndarray
    ts: float
    intersample: Intersample = Intersample.ZOH
    past: Past = Past.UNKNOWN

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        samples.setflags(write=False)
        if samples.ndim != 1 or samples.size < 2:
            raise ValueError("need a 1-D signal with at least 2 samples")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        if not (self.ts > 0 and np.isfinite(self.ts)):
            raise ValueError("ts must be positive and finite")
        if self.intersample is Intersample.BL and self.past is Past.ZA:
            raise ValueError("a band-limited signal cannot be zero-appended")

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def period(self) -> float:
        return self.n * self.ts

    def with_past(self, past: Past) -> "SampledSignal":
        return SampledSignal(self.samples, self.ts, self.intersample, past)

    def to_csv(self, path) -> None:
        header = (
            f"ts={self.ts!r} intersample={self.intersample.value} "
            f"past={self.past.value}\nvalue"
        )
        np.savetxt(path, self.samples, header=header, comments="# ")

    @classmethod
    def from_csv(cls, path) -> "SampledSignal":
        if hasattr(path, "read"):
            text = path.read()
        else:
            with open(path) as fh:
                text = fh.read()
        meta = {}
        for line in text.splitlines():
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        key, val = tok.split("=", 1)
                        meta[key] = val
        samples = np.loadtxt(io.StringIO(text))
        return cls(
            samples,
            ts=float(meta["ts"]),
            intersample=Intersample(meta["intersample"]),
            past=Past(meta["past"]),
        )


@dataclass(frozen=True)
class DftCoefficients:
    """DFT bins U(n*omega0) for |n| < N/2, conjugate-symmetric for real input."""

    coeffs: np.ndarray  # indexed by n = -(h-1) .. h-1 where h = ceil(N/2)
    omega0: float
    n_samples: int

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        object.__setattr__(self, "coeffs", coeffs)
        coeffs.setflags(write=False)

    @property
    def bins(self) -> np.ndarray:
        """The retained harmonic indices n with |n| < N/2."""
        half = (self.n_samples - 1) // 2
        return np.arange(-half, half + 1)

    def __getitem__(self, n: int) -> complex:
        half = (self.n_samples - 1) // 2
        if abs(n) > half:
            raise IndexError(f"harmonic {n} outside |n| < N/2")
        return self.coeffs[n + half]


def eval_zoh(sig: SampledSignal, t) -> np.ndarray | float:
    """Value of the held input at time ``t``.

    Sample k is held on the left-open interval (k*ts, (k+1)*ts]; before t = 0
    the signal wraps periodically (PA) or is zero (ZA).
    """
    if sig.intersample is not Intersample.ZOH:
        raise ValueError("signal does not declare ZOH intersample behavior")
    if sig.past is Past.UNKNOWN:
        raise ValueError(
            "past behavior is unknown; assume PA or ZA (use the transient "
            "model to absorb the assumption error)"
        )
    t = np.asarray(t, dtype=float)
    # left-open hold: t in (k*ts, (k+1)*ts] maps to sample k
    k = np.ceil(t / sig.ts).astype(int) - 1
    if sig.past is Past.PA:
        # periodic for all t, period N*ts
        vals = sig.samples[np.mod(k, sig.n)]
    else:
        inside = (k >= 0) & (k < sig.n)
        vals = np.where(inside, sig.samples[np.clip(k, 0, sig.n - 1)], 0.0)
    return vals if vals.ndim else float(vals)


def dft(sig: SampledSignal) -> DftCoefficients:
    """DFT bins U(n*omega0) = sum_k u(k*ts) e^{-j n omega0 k ts}, |n| < N/2."""
    n = sig.n
    omega0 = 2 * np.pi / (n * sig.ts)
    full = np.fft.fft(sig.samples)
    half = (n - 1) // 2
    # reorder to n = -half .. half; for real input these are conjugate pairs
    idx = np.mod(np.arange(-half, half + 1), n)
    return DftCoefficients(full[idx], omega0=omega0, n_samples=n)


def nyquist_energy(sig: SampledSignal) -> float:
    """Magnitude of the (unrepresentable) Nyquist bin; zero for odd N."""
    if sig.n % 2:
        return 0.0
    return abs(np.fft.fft(sig.samples)[sig.n // 2])


def eval_bl(sig: SampledSignal, t) -> np.ndarray | float:
    """Band-limited (trigonometric) interpolation of a periodic signal.

    The reconstruction keeps only harmonics |n| < N/2; an even-length signal
    with energy at the Nyquist bin is not representable and is rejected.
    """
    if sig.intersample is not Intersample.BL:
        raise ValueError("signal does not declare BL intersample behavior")
    scale = np.max(np.abs(sig.samples))
    if nyquist_energy(sig) > 1e-9 * max(scale, 1.0) * sig.n:
        raise ValueError(
            "even-length signal has energy at the Nyquist bin; the "
            "band-limited reconstruction excludes |n| = N/2"
        )
    t = np.atleast_1d(np.asarray(t, dtype=float))
    coeffs = dft(sig)
    phases = np.exp(1j * coeffs.omega0 * np.outer(t, coeffs.bins))
    vals = phases @ coeffs.coeffs / sig.n
    if np.max(np.abs(vals.imag)) > 1e-10 * max(np.max(np.abs(vals.real)), 1.0):
        raise AssertionError("imaginary residue after conjugate pairing")
    out = vals.real
    return out if np.asarray(t).ndim else float(out[0])


# primitive polynomial taps (XOR positions, 1-based from the output bit) for
# maximal-length LFSRs of each register order
_LFSR_TAPS = {
    2: (2, 1), 3: (3, 2), 4: (4, 3), 5: (5, 3), 6: (6, 5), 7: (7, 6),
    8: (8, 6, 5, 4), 9: (9, 5), 10: (10, 7), 11: (11, 9), 12: (12, 6, 4, 1),
    13: (13, 4, 3, 1), 14: (14, 5, 3, 1), 15: (15, 14), 16: (16, 15, 13, 4),
    17: (17, 14), 18: (18, 11), 19: (19, 6, 2, 1), 20: (20, 17),
    21: (21, 19), 22: (22, 21), 23: (23, 18), 24: (24, 23, 22, 17),
    25: (25, 22), 26: (26, 6, 2, 1), 27: (27, 5, 2, 1), 28: (28, 25),
    29: (29, 27), 30: (30, 6, 4, 1), 31: (31, 28),
}


def lfsr_sequence(order: int, seed: int = 0) -> np.ndarray:
    """One full period (2^order - 1 bits) of a maximal-length LFSR."""
    if order not in _LFSR_TAPS:
        raise ValueError(f"no primitive polynomial tabulated for order {order}")
    period = (1 << order) - 1
    state = (seed % period) + 1 if seed else period  # all-ones when seed = 0
    taps = _LFSR_TAPS[order]
    bits = np.empty(period, dtype=np.int8)
    for i in range(period):
        bits[i] = state & 1
        fb = 0
        for tap in taps:
            fb ^= (state >> (order - tap)) & 1
        state = (state >> 1) | (fb << (order - 1))
    return bits


def generate_prbs(
    order: int,
    divider: int,
    length: int | None = None,
    seed: int = 0,
    ts: float = 1.0,
    past: Past = Past.UNKNOWN,
) -> SampledSignal:
    """PRBS excitation: LFSR chips held ``divider`` samples, levels in {-1, +1}.

    One period has ``divider * (2**order - 1)`` samples; the sequence is tiled
    or truncated to ``length``. Deterministic in ``seed`` (seed 0 starts from
    the all-ones register state).
    """
    if not 2 <= order <= 31:
        raise ValueError("order must be in [2, 31]")
    if divider < 1:
        raise ValueError("divider must be >= 1")
    bits = lfsr_sequence(order, seed)
    chips = np.repeat(2.0 * bits - 1.0, divider)
    if length is None:
        length = chips.size
    reps = -(-length // chips.size)
    samples = np.tile(chips, reps)[:length]
    return SampledSignal(samples, ts=ts, intersample=Intersample.ZOH, past=past)
