"""Unit tests for the channel impairment operators."""

import math

import numpy as np
import pytest

from syncbase.choices import Fading
from syncbase.dsp.channel import (
    apply_cfo,
    apply_channel,
    apply_phase,
    awgn,
    draw_fading,
    impair,
    phasor,
    rayleigh_taps,
)
from syncbase.models.channel import ChannelConfig, FadingRealization
from syncbase.models.signal import IqBuffer

FS = 400e3


@pytest.fixture
def signal() -> IqBuffer:
    """A random unit-power complex signal."""
    rng = np.random.default_rng(5)
    return IqBuffer(samples=np.exp(2j * np.pi * rng.random(256)), sample_rate_hz=FS)


class TestApplyCfo:
    """Tests the apply_cfo() function."""

    def test_zero_offset(self, signal: IqBuffer) -> None:
        """Test that a zero offset returns an identical copy."""
        y = apply_cfo(signal, 0.0)
        np.testing.assert_array_equal(y.samples, signal.samples)
        assert y.samples is not signal.samples

    def test_rotation(self) -> None:
        """Test that an eighth of the sample rate rotates by π/4 per sample."""
        x = IqBuffer(samples=np.ones(16), sample_rate_hz=FS)
        y = apply_cfo(x, FS / 8)
        np.testing.assert_allclose(y.samples, np.exp(1j * np.pi / 4 * np.arange(16)), atol=1e-12)

    def test_preserves_magnitude(self, signal: IqBuffer) -> None:
        """Test that the magnitude of every sample is unchanged."""
        np.testing.assert_allclose(np.abs(apply_cfo(signal, 12345.0).samples), np.abs(signal.samples))

    @pytest.mark.parametrize("offset", [FS / 2, -FS / 2, FS])
    def test_nyquist(self, signal: IqBuffer, offset: float) -> None:
        """Test that offsets at or beyond Nyquist raise a ValueError."""
        with pytest.raises(ValueError):
            apply_cfo(signal, offset)


class TestApplyPhase:
    """Tests the apply_phase() and phasor() functions."""

    def test_pi_negates(self, signal: IqBuffer) -> None:
        """Test that a phase of π yields exactly −x."""
        np.testing.assert_array_equal(apply_phase(signal, math.pi).samples, -signal.samples)

    def test_zero_identity(self, signal: IqBuffer) -> None:
        """Test that a zero phase leaves the samples unchanged."""
        np.testing.assert_array_equal(apply_phase(signal, 0.0).samples, signal.samples)

    @pytest.mark.parametrize("phi, expected", [(0.0, 1), (math.pi / 2, 1j), (math.pi, -1), (-math.pi / 2, -1j)])
    def test_phasor_exact(self, phi: float, expected: complex) -> None:
        """Test that quarter turns give exact unit phasors."""
        assert phasor(phi) == expected


class TestAwgn:
    """Tests the awgn() function."""

    def test_infinite_snr(self, signal: IqBuffer) -> None:
        """Test that +inf SNR returns the input unchanged without drawing."""
        rng = np.random.default_rng(0)
        state = rng.bit_generator.state
        np.testing.assert_array_equal(awgn(signal, math.inf, rng).samples, signal.samples)
        assert rng.bit_generator.state == state

    @pytest.mark.parametrize("snr_db", [0.0, 10.0, -5.0])
    def test_noise_power(self, snr_db: float) -> None:
        """Test that the added noise power matches the requested SNR."""
        x = IqBuffer(samples=np.ones(200_000), sample_rate_hz=FS)
        y = awgn(x, snr_db, np.random.default_rng(1))
        noise = y.samples - x.samples
        assert np.mean(np.abs(noise) ** 2) == pytest.approx(10 ** (-snr_db / 10), rel=0.02)
        # circular: I and Q carry half each
        assert np.var(noise.real) == pytest.approx(np.var(noise.imag), rel=0.03)

    def test_reference_power(self) -> None:
        """Test that a reference power overrides the measured power."""
        x = IqBuffer(samples=np.zeros(200_000), sample_rate_hz=FS)
        y = awgn(x, 0.0, np.random.default_rng(1), reference_power=4.0)
        assert y.power == pytest.approx(4.0, rel=0.02)

    def test_empty(self) -> None:
        """Test that an empty signal raises a ValueError."""
        with pytest.raises(ValueError):
            awgn(IqBuffer(samples=np.zeros(0), sample_rate_hz=FS), 10.0, np.random.default_rng(0))

    def test_nan(self, signal: IqBuffer) -> None:
        """Test that a NaN SNR raises a ValueError."""
        with pytest.raises(ValueError):
            awgn(signal, math.nan, np.random.default_rng(0))


class TestRayleighTaps:
    """Tests the rayleigh_taps() function."""

    @pytest.mark.parametrize("sigma, n_taps", [(0.5, 5), (1.0, 9), (2.0, 17)])
    def test_tap_count(self, sigma: float, n_taps: int) -> None:
        """Test that the channel holds ceil(8σ) + 1 taps."""
        h = rayleigh_taps(sigma, np.random.default_rng(0))
        assert len(h.taps) == n_taps
        assert h.sigma == sigma

    def test_profile(self) -> None:
        """Test that the profile sums to 1 and decays by exp(−1/σ) per tap."""
        h = rayleigh_taps(2.0, np.random.default_rng(0))
        assert h.profile.sum() == pytest.approx(1.0)
        np.testing.assert_allclose(h.profile[1:] / h.profile[:-1], math.exp(-0.5))

    def test_mean_power(self) -> None:
        """Test that the expected total tap power is 1."""
        rng = np.random.default_rng(3)
        powers = [np.sum(np.abs(rayleigh_taps(1.0, rng).taps) ** 2) for _ in range(4000)]
        assert np.mean(powers) == pytest.approx(1.0, rel=0.05)

    @pytest.mark.parametrize("sigma", [0.0, -1.0, math.inf])
    def test_invalid(self, sigma: float) -> None:
        """Test that a non-positive or infinite spread raises a ValueError."""
        with pytest.raises(ValueError):
            rayleigh_taps(sigma, np.random.default_rng(0))


class TestApplyChannel:
    """Tests the apply_channel() function."""

    def test_identity(self, signal: IqBuffer) -> None:
        """Test that a single unit tap leaves the signal unchanged."""
        h = FadingRealization(taps=np.ones(1), sigma=1.0, profile=np.ones(1))
        np.testing.assert_array_equal(apply_channel(signal, h).samples, signal.samples)

    def test_delay(self, signal: IqBuffer) -> None:
        """Test that a pure delay tap shifts the signal and keeps its length."""
        h = FadingRealization(taps=np.array([0, 1]), sigma=1.0, profile=np.array([0.5, 0.5]))
        y = apply_channel(signal, h)
        assert len(y) == len(signal)
        assert y.samples[0] == 0
        np.testing.assert_array_equal(y.samples[1:], signal.samples[:-1])

    def test_empty(self) -> None:
        """Test that an empty signal raises a ValueError."""
        h = rayleigh_taps(1.0, np.random.default_rng(0))
        with pytest.raises(ValueError):
            apply_channel(IqBuffer(samples=np.zeros(0), sample_rate_hz=FS), h)


class TestImpair:
    """Tests the impair() and draw_fading() functions."""

    def test_clean(self, signal: IqBuffer, noiseless: ChannelConfig) -> None:
        """Test that a noiseless AWGN channel with no offsets is the identity."""
        y = impair(signal, noiseless, np.random.default_rng(0))
        np.testing.assert_array_equal(y.samples, signal.samples)

    def test_order(self, signal: IqBuffer, noiseless: ChannelConfig) -> None:
        """Test that the chain equals fade, then CFO, then phase."""
        h = rayleigh_taps(1.0, np.random.default_rng(4))
        y = impair(signal, noiseless, np.random.default_rng(0), cfo_hz=1000.0, phase_rad=0.7, fading=h)
        expected = apply_phase(apply_cfo(apply_channel(signal, h), 1000.0), 0.7)
        np.testing.assert_allclose(y.samples, expected.samples)

    def test_burst_reference(self) -> None:
        """Test that the SNR refers to the burst slice only."""
        samples = np.zeros(200_000, dtype=complex)
        samples[:1000] = 1.0
        x = IqBuffer(samples=samples, sample_rate_hz=FS)
        y = impair(x, ChannelConfig(snr_db=0.0), np.random.default_rng(2), burst=slice(0, 1000))
        assert np.mean(np.abs(y.samples[1000:]) ** 2) == pytest.approx(1.0, rel=0.02)

    def test_draw_fading(self) -> None:
        """Test that AWGN draws no channel and Rayleigh draws one."""
        rng = np.random.default_rng(0)
        assert draw_fading(ChannelConfig(snr_db=10.0), rng) is None
        h = draw_fading(ChannelConfig(snr_db=10.0, fading=Fading.RAYLEIGH, sigma=0.5), rng)
        assert h is not None and len(h.taps) == 5
