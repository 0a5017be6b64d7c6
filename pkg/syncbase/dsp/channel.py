"""Channel impairment operators.

The dataset chain applies them in a fixed order: fade, CFO, phase, noise.
"""

import math

import numpy as np

from syncbase.models.channel import ChannelConfig, FadingRealization
from syncbase.models.signal import IqBuffer

# |sin(pi)| and friends come out around 1e-16
_PHASOR_SNAP = 4 * np.finfo(np.float64).eps


def apply_cfo(x: IqBuffer, offset_hz: float) -> IqBuffer:
    """Rotate the samples by a carrier frequency offset.

    output[k] = x[k] · exp(j2π·offset_hz·k / sample_rate).

    Args:
        x (IqBuffer): The input signal.
        offset_hz (float): The offset in Hz.

    Raises:
        ValueError: If the offset is at or beyond Nyquist.

    Returns:
        IqBuffer: The rotated signal.
    """
    if not abs(offset_hz) < x.sample_rate_hz / 2:
        raise ValueError(
            f"Offset {offset_hz:g} Hz is at or beyond Nyquist ({x.sample_rate_hz / 2:g} Hz)."
        )
    if offset_hz == 0:
        return x.with_samples(x.samples.copy())
    k = np.arange(len(x))
    return x.with_samples(x.samples * np.exp(2j * np.pi * offset_hz * k / x.sample_rate_hz))


def phasor(phi: float) -> complex:
    """exp(jφ) with components that are within rounding of 0 set to exactly 0."""
    re, im = math.cos(phi), math.sin(phi)
    re = 0.0 if abs(re) < _PHASOR_SNAP else re
    im = 0.0 if abs(im) < _PHASOR_SNAP else im
    return complex(re, im)


def apply_phase(x: IqBuffer, phi: float) -> IqBuffer:
    """Rotate the samples by a constant phase.

    Args:
        x (IqBuffer): The input signal.
        phi (float): The phase in radians.

    Returns:
        IqBuffer: The rotated signal.
    """
    return x.with_samples(x.samples * phasor(phi))


def awgn(
    x: IqBuffer,
    snr_db: float,
    rng: np.random.Generator,
    reference_power: float | None = None,
) -> IqBuffer:
    """Add circularly-symmetric complex Gaussian noise.

    The per-sample noise variance is P_sig / 10^(snr_db/10), where P_sig is
    `reference_power` if given (the data-bearing portion of a padded burst)
    or else the mean power of x. An SNR of +inf adds nothing.

    Args:
        x (IqBuffer): The input signal.
        snr_db (float): The SNR in dB.
        rng (np.random.Generator): The generator to draw from.
        reference_power (float | None, optional): Signal power to reference the SNR to. Defaults to None.

    Raises:
        ValueError: If x is empty or the SNR is NaN.

    Returns:
        IqBuffer: The noisy signal.
    """
    if len(x) == 0:
        raise ValueError("Cannot add noise to an empty signal.")
    if math.isnan(snr_db):
        raise ValueError("SNR must not be NaN.")
    if snr_db == math.inf:
        return x.with_samples(x.samples.copy())
    p_sig = x.power if reference_power is None else reference_power
    variance = p_sig / 10 ** (snr_db / 10)
    noise = rng.standard_normal((2, len(x)))
    return x.with_samples(x.samples + math.sqrt(variance / 2) * (noise[0] + 1j * noise[1]))


def rayleigh_taps(sigma: float, rng: np.random.Generator) -> FadingRealization:
    """Draw a quasi-static Rayleigh multipath channel.

    Taps are independent complex Gaussians with an exponential power-delay
    profile p[l] ∝ exp(−l/σ), l = 0..L−1, L = ceil(8σ) + 1, normalised so the
    expected total power is 1.

    Args:
        sigma (float): Mean delay spread in samples.
        rng (np.random.Generator): The generator to draw from.

    Raises:
        ValueError: If sigma is not positive and finite.

    Returns:
        FadingRealization: The channel draw.
    """
    if not (math.isfinite(sigma) and sigma > 0):
        raise ValueError(f"Delay spread must be positive, got {sigma}.")
    n_taps = math.ceil(8 * sigma) + 1
    profile = np.exp(-np.arange(n_taps) / sigma)
    profile /= profile.sum()
    g = rng.standard_normal((2, n_taps))
    taps = np.sqrt(profile / 2) * (g[0] + 1j * g[1])
    return FadingRealization(taps=taps, sigma=sigma, profile=profile)


def apply_channel(x: IqBuffer, h: FadingRealization) -> IqBuffer:
    """Convolve the signal with the channel, keeping the first len(x) samples.

    output[k] = Σ_l h[l] · x[k − l].

    Args:
        x (IqBuffer): The input signal.
        h (FadingRealization): The channel.

    Raises:
        ValueError: If x is empty.

    Returns:
        IqBuffer: The faded signal.
    """
    if len(x) == 0:
        raise ValueError("Cannot fade an empty signal.")
    return x.with_samples(np.convolve(x.samples, h.taps)[: len(x)])


def draw_fading(chan: ChannelConfig, rng: np.random.Generator) -> FadingRealization | None:
    """Draw a channel realization for the config, or None for AWGN."""
    return None if chan.sigma is None else rayleigh_taps(chan.sigma, rng)


def impair(
    x: IqBuffer,
    chan: ChannelConfig,
    rng: np.random.Generator,
    cfo_hz: float = 0.0,
    phase_rad: float = 0.0,
    fading: FadingRealization | None = None,
    burst: slice | None = None,
) -> IqBuffer:
    """Apply the impairment chain fade → CFO → phase → noise.

    Args:
        x (IqBuffer): The clean signal.
        chan (ChannelConfig): The channel recipe (SNR).
        rng (np.random.Generator): The generator for the noise.
        cfo_hz (float, optional): The carrier offset. Defaults to 0.0.
        phase_rad (float, optional): The phase offset. Defaults to 0.0.
        fading (FadingRealization | None, optional): The multipath draw, if any. Defaults to None.
        burst (slice | None, optional): The data-bearing samples the SNR refers to; all samples if None. Defaults to None.

    Returns:
        IqBuffer: The received signal.
    """
    y = x if fading is None else apply_channel(x, fading)
    y = apply_phase(apply_cfo(y, cfo_hz), phase_rad)
    reference = None if burst is None else float(np.mean(np.abs(y.samples[burst]) ** 2))
    return awgn(y, chan.snr_db, rng, reference_power=reference)
