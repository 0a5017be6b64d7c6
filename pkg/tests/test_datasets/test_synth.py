"""Unit tests for single-example synthesis."""

import math

import numpy as np
import pytest
from scipy import stats

from syncbase.choices import Fading
from syncbase.datasets.synth import gen_cfo_example, gen_timing_example
from syncbase.models.burst import BurstSpec
from syncbase.models.channel import ChannelConfig


class TestGenCfoExample:
    """Tests the gen_cfo_example() function."""

    @pytest.mark.parametrize("block_len", [32, 100, 1024])
    def test_shape(self, block_len: int, noiseless: ChannelConfig) -> None:
        """Test the block length, sample rate and label."""
        example = gen_cfo_example(BurstSpec.for_cfo(block_len), noiseless, block_len, np.random.default_rng(0))
        assert len(example.iq) == block_len
        assert example.iq.sample_rate_hz == 400e3
        assert -50e3 <= example.label < 50e3
        assert example.label == example.meta.cfo_hz
        assert 0 <= example.meta.phase_rad < 2 * math.pi
        assert example.meta.pad_samples == 0

    def test_deterministic(self) -> None:
        """Test that the same generator state yields the same example."""
        chan = ChannelConfig(snr_db=5.0, fading=Fading.RAYLEIGH, sigma=1.0)
        spec = BurstSpec.for_cfo(64)
        a = gen_cfo_example(spec, chan, 64, np.random.default_rng(7))
        b = gen_cfo_example(spec, chan, 64, np.random.default_rng(7))
        np.testing.assert_array_equal(a.iq.samples, b.iq.samples)
        assert a.label == b.label

    def test_snr(self) -> None:
        """Test that the noise power matches the block's signal power at the requested SNR."""
        spec = BurstSpec.for_cfo(1024)
        noisy, clean = [], []
        for seed in range(40):
            noisy.append(gen_cfo_example(spec, ChannelConfig(snr_db=0.0), 1024, np.random.default_rng(seed)))
            clean.append(gen_cfo_example(spec, ChannelConfig(snr_db=math.inf), 1024, np.random.default_rng(seed)))
        noise = np.concatenate([n.iq.samples - c.iq.samples for n, c in zip(noisy, clean)])
        signal = np.concatenate([c.iq.samples for c in clean])
        assert np.mean(np.abs(noise) ** 2) == pytest.approx(np.mean(np.abs(signal) ** 2), rel=0.05)

    def test_label_distribution(self, noiseless: ChannelConfig) -> None:
        """Test that CFO labels are uniform on ±50 kHz."""
        spec = BurstSpec.for_cfo(32)
        labels = [gen_cfo_example(spec, noiseless, 32, np.random.default_rng(i)).label for i in range(10_000)]
        assert stats.kstest(labels, "uniform", args=(-50e3, 100e3)).statistic < 0.02

    def test_block_too_short(self, noiseless: ChannelConfig) -> None:
        """Test that blocks under 32 samples raise a ValueError."""
        with pytest.raises(ValueError):
            gen_cfo_example(BurstSpec.for_cfo(32), noiseless, 31, np.random.default_rng(0))

    def test_block_too_long(self, noiseless: ChannelConfig) -> None:
        """Test that a block longer than the transient-free burst raises a ValueError."""
        with pytest.raises(ValueError):
            gen_cfo_example(BurstSpec.for_cfo(64), noiseless, 1024, np.random.default_rng(0))


class TestGenTimingExample:
    """Tests the gen_timing_example() function."""

    def test_shape(self, timing_spec: BurstSpec, noiseless: ChannelConfig) -> None:
        """Test the window length and label range."""
        example = gen_timing_example(timing_spec, noiseless, np.random.default_rng(0))
        assert len(example.iq) == 2048
        assert example.label == float(example.meta.pad_samples)
        assert 0 <= example.label <= 500
        assert example.meta.cfo_hz == 0.0

    def test_leading_zeros(self, timing_spec: BurstSpec, noiseless: ChannelConfig) -> None:
        """Test that without noise the samples before the burst are zero and the burst starts at the label."""
        for seed in range(20):
            example = gen_timing_example(timing_spec, noiseless, np.random.default_rng(seed))
            pad = example.meta.pad_samples
            assert not np.any(example.iq.samples[:pad])
            assert example.iq.samples[pad] != 0

    def test_label_distribution(self, timing_spec: BurstSpec, noiseless: ChannelConfig) -> None:
        """Test that offsets are uniform on 0..500 samples."""
        labels = [gen_timing_example(timing_spec, noiseless, np.random.default_rng(i)).label for i in range(10_000)]
        assert min(labels) >= 0 and max(labels) <= 500
        assert stats.kstest(labels, "uniform", args=(0, 500)).statistic < 0.02

    def test_snr(self, timing_spec: BurstSpec) -> None:
        """Test that noise in the leading gap is a tenth of the burst power at 10 dB."""
        gap, burst = [], []
        for seed in range(50):
            example = gen_timing_example(timing_spec, ChannelConfig(snr_db=10.0), np.random.default_rng(seed))
            pad = example.meta.pad_samples
            gap.append(example.iq.samples[:pad])
            burst.append(example.iq.samples[pad:])
        ratio = np.mean(np.abs(np.concatenate(gap)) ** 2) / np.mean(np.abs(np.concatenate(burst)) ** 2)
        assert ratio == pytest.approx(1 / 11, rel=0.15)

    def test_missing_preamble(self, noiseless: ChannelConfig) -> None:
        """Test that a burst spec without a 64-symbol preamble raises a ValueError."""
        with pytest.raises(ValueError):
            gen_timing_example(BurstSpec.for_timing((0, 1, 2)), noiseless, np.random.default_rng(0))
