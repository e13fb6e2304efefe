"""Sampled-signal semantics: hold/interpolation, DFT bins, PRBS generation."""

import io

import numpy as np
import pytest

from ctkreg.signals import (
    Intersample,
    Past,
    SampledSignal,
    dft,
    eval_bl,
    eval_zoh,
    generate_prbs,
    lfsr_sequence,
    nyquist_energy,
)


class TestSampledSignal:
    def test_validation(self):
        with pytest.raises(ValueError):
            SampledSignal(np.array([1.0]), 0.1)          # too short
        with pytest.raises(ValueError):
            SampledSignal(np.array([1.0, np.nan]), 0.1)  # non-finite
        with pytest.raises(ValueError):
            SampledSignal(np.array([1.0, 2.0]), 0.0)     # bad ts
        with pytest.raises(ValueError):
            SampledSignal(np.array([1.0, 2.0]), 0.1, Intersample.BL, Past.ZA)

    def test_csv_roundtrip(self):
        sig = SampledSignal(
            np.array([0.5, -1.25, 3.0]), 0.05, Intersample.ZOH, Past.PA
        )
        buf = io.StringIO()
        sig.to_csv(buf)
        back = SampledSignal.from_csv(io.StringIO(buf.getvalue()))
        assert np.array_equal(back.samples, sig.samples)
        assert back.ts == sig.ts
        assert back.intersample is sig.intersample
        assert back.past is sig.past

    def test_period(self):
        sig = SampledSignal(np.zeros(8) + 1.0, 0.25)
        assert sig.period == pytest.approx(2.0)


class TestZohEvaluation:
    SIG = SampledSignal(np.array([1.0, 2.0, 3.0, 4.0]), 0.5, Intersample.ZOH, Past.ZA)

    def test_left_open_hold(self):
        # sample k is held on (k*ts, (k+1)*ts]
        assert eval_zoh(self.SIG, 0.5) == 1.0
        assert eval_zoh(self.SIG, 0.500001) == 2.0
        assert eval_zoh(self.SIG, 1.0) == 2.0
        assert eval_zoh(self.SIG, 2.0) == 4.0

    def test_zero_appended_past(self):
        assert eval_zoh(self.SIG, -0.3) == 0.0
        assert eval_zoh(self.SIG, 0.0) == 0.0

    def test_periodic_appended_past(self):
        sig = self.SIG.with_past(Past.PA)
        assert eval_zoh(sig, -1.5) == eval_zoh(sig, -1.5 + sig.period)
        assert eval_zoh(sig, 0.0) == 4.0      # wraps to the last sample
        assert eval_zoh(sig, 2.3) == 1.0      # periodic beyond the record too

    def test_unknown_past_rejected(self):
        sig = SampledSignal(np.ones(4), 0.5, Intersample.ZOH, Past.UNKNOWN)
        with pytest.raises(ValueError):
            eval_zoh(sig, 0.1)


class TestDft:
    def test_matches_direct_sum(self):
        rng = np.random.default_rng(0)
        sig = SampledSignal(rng.standard_normal(7), 0.2, Intersample.BL, Past.PA)
        coeffs = dft(sig)
        t = np.arange(7) * 0.2
        for n in coeffs.bins:
            direct = np.sum(sig.samples * np.exp(-1j * n * coeffs.omega0 * t))
            assert coeffs[int(n)] == pytest.approx(direct, rel=1e-12, abs=1e-12)

    def test_conjugate_symmetry(self):
        sig = SampledSignal(np.array([1.0, -2.0, 0.5, 3.0, -1.0]), 0.1,
                            Intersample.BL, Past.PA)
        coeffs = dft(sig)
        for n in range(1, 3):
            assert coeffs[-n] == pytest.approx(np.conj(coeffs[n]), rel=1e-12)

    def test_out_of_range_bin(self):
        sig = SampledSignal(np.ones(5), 0.1, Intersample.BL, Past.PA)
        with pytest.raises(IndexError):
            dft(sig)[3]


class TestBlEvaluation:
    def test_interpolates_samples(self):
        rng = np.random.default_rng(1)
        sig = SampledSignal(rng.standard_normal(9), 0.3, Intersample.BL, Past.PA)
        t = np.arange(9) * 0.3
        assert np.allclose(eval_bl(sig, t), sig.samples, atol=1e-12)

    def test_periodic(self):
        rng = np.random.default_rng(2)
        sig = SampledSignal(rng.standard_normal(5), 0.2, Intersample.BL, Past.PA)
        assert eval_bl(sig, np.array([0.37]))[0] == pytest.approx(
            eval_bl(sig, np.array([0.37 + sig.period]))[0], rel=1e-10
        )

    def test_rejects_nyquist_energy(self):
        # alternating +-1 of even length lives entirely at the Nyquist bin
        sig = SampledSignal(np.array([1.0, -1.0, 1.0, -1.0]), 0.1,
                            Intersample.BL, Past.PA)
        assert nyquist_energy(sig) > 0
        with pytest.raises(ValueError):
            eval_bl(sig, np.array([0.05]))


class TestPrbs:
    def test_lfsr_maximal_length(self):
        for order in (3, 4, 5, 7):
            bits = lfsr_sequence(order)
            period = 2**order - 1
            assert bits.size == period
            # maximal length: one more 1 than 0 over a full period
            assert int(bits.sum()) == 2 ** (order - 1)

    def test_lfsr_distinct_states(self):
        order = 5
        bits = lfsr_sequence(order)
        # every length-`order` window is a distinct nonzero state
        ext = np.concatenate([bits, bits[: order - 1]])
        windows = {tuple(ext[i:i + order]) for i in range(bits.size)}
        assert len(windows) == 2**order - 1

    def test_levels_and_hold(self):
        sig = generate_prbs(4, divider=3, length=45, ts=0.1, past=Past.PA)
        assert set(np.unique(sig.samples)) == {-1.0, 1.0}
        chips = sig.samples.reshape(15, 3)
        assert np.all(chips == chips[:, :1])  # each chip held `divider` samples

    def test_tiles_beyond_one_period(self):
        sig = generate_prbs(3, divider=2, length=30, ts=0.1)
        assert np.array_equal(sig.samples[:14], sig.samples[14:28])

    def test_deterministic_in_seed(self):
        a = generate_prbs(6, 2, length=50, seed=11)
        b = generate_prbs(6, 2, length=50, seed=11)
        c = generate_prbs(6, 2, length=50, seed=12)
        assert np.array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            generate_prbs(1, 1)
