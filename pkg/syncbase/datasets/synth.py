"""Synthesis of single labeled examples for the two estimation tasks."""

import math

import numpy as np

from syncbase.dsp.channel import draw_fading, impair
from syncbase.dsp.sigproc import modulate_psk
from syncbase.expert import pulse_for
from syncbase.models.burst import (
    CFO_LIMIT_HZ,
    MIN_CFO_BLOCK_LEN,
    PREAMBLE_SYMBOLS,
    TIMING_INPUT_LEN,
    BurstSpec,
    ExampleMeta,
    LabeledExample,
)
from syncbase.models.channel import ChannelConfig
from syncbase.models.signal import IqBuffer


def gen_cfo_example(
    spec: BurstSpec,
    chan: ChannelConfig,
    block_len: int,
    rng: np.random.Generator,
    stream_index: int = 0,
) -> LabeledExample:
    """Synthesize one CFO example.

    Draw order from `rng`: data symbols, CFO ~ U[−50 kHz, 50 kHz), phase ~ U[0, 2π),
    fading taps (Rayleigh only), noise. The returned block starts one filter
    delay into the burst so neither pulse-shaping transient is included, and
    the SNR refers to the power of that block.

    Args:
        spec (BurstSpec): The waveform parameters.
        chan (ChannelConfig): The channel recipe.
        block_len (int): Samples per example, ≥ 32.
        rng (np.random.Generator): The per-example generator.
        stream_index (int, optional): Position of the example in its stream. Defaults to 0.

    Raises:
        ValueError: If block_len is below 32 or longer than the transient-free part of the burst.

    Returns:
        LabeledExample: The example, labeled with its CFO in Hz.
    """
    if block_len < MIN_CFO_BLOCK_LEN:
        raise ValueError(f"CFO block length must be ≥ {MIN_CFO_BLOCK_LEN}, got {block_len}.")
    start = spec.filter_delay
    available = spec.n_data_symbols * spec.sps - 2 * spec.filter_delay
    if block_len > available:
        raise ValueError(
            f"Block of {block_len} samples does not fit the {available} transient-free samples of the burst."
        )
    symbols = rng.integers(0, spec.order, spec.n_data_symbols)
    cfo_hz = float(rng.uniform(-CFO_LIMIT_HZ, CFO_LIMIT_HZ))
    phase_rad = float(rng.uniform(0.0, 2 * math.pi))
    fading = draw_fading(chan, rng)

    clean = modulate_psk(symbols, spec.order, pulse_for(spec), spec.sample_rate_hz)
    window = slice(start, start + block_len)
    # noise is drawn for the whole burst, then cropped
    received = impair(clean, chan, rng, cfo_hz=cfo_hz, phase_rad=phase_rad, fading=fading, burst=window)
    return LabeledExample(
        iq=received.with_samples(received.samples[window]),
        label=cfo_hz,
        channel=chan,
        meta=ExampleMeta(phase_rad=phase_rad, cfo_hz=cfo_hz, pad_samples=0, stream_index=stream_index),
    )


def gen_timing_example(
    spec: BurstSpec,
    chan: ChannelConfig,
    rng: np.random.Generator,
    stream_index: int = 0,
) -> LabeledExample:
    """Synthesize one timing example.

    Draw order from `rng`: pad p ~ U{0..max_pad}, data symbols, phase, fading
    taps (Rayleigh only), noise. The burst (preamble then data) is preceded by
    p zero samples, the window is cropped or zero-extended to 2048 samples, and
    noise at the burst's SNR covers the whole window. CFO is zero.

    Args:
        spec (BurstSpec): The waveform parameters, carrying the 64-symbol preamble.
        chan (ChannelConfig): The channel recipe.
        rng (np.random.Generator): The per-example generator.
        stream_index (int, optional): Position of the example in its stream. Defaults to 0.

    Raises:
        ValueError: If the preamble does not hold 64 symbols.

    Returns:
        LabeledExample: The example, labeled with the preamble start in samples.
    """
    if len(spec.preamble_symbols) != PREAMBLE_SYMBOLS:
        raise ValueError(
            f"Timing bursts need a {PREAMBLE_SYMBOLS}-symbol preamble, got {len(spec.preamble_symbols)}."
        )
    pad = int(rng.integers(0, spec.max_pad_samples + 1))
    data = rng.integers(0, spec.order, spec.n_data_symbols)
    phase_rad = float(rng.uniform(0.0, 2 * math.pi))
    fading = draw_fading(chan, rng)

    symbols = np.concatenate([np.asarray(spec.preamble_symbols, dtype=np.int64), data])
    clean = modulate_psk(symbols, spec.order, pulse_for(spec), spec.sample_rate_hz)
    padded = np.zeros(max(TIMING_INPUT_LEN, pad + len(clean)), dtype=np.complex128)
    padded[pad : pad + len(clean)] = clean.samples
    window = IqBuffer(samples=padded[:TIMING_INPUT_LEN], sample_rate_hz=spec.sample_rate_hz)
    burst = slice(pad, min(pad + len(clean), TIMING_INPUT_LEN))
    received = impair(window, chan, rng, phase_rad=phase_rad, fading=fading, burst=burst)
    return LabeledExample(
        iq=received,
        label=float(pad),
        channel=chan,
        meta=ExampleMeta(phase_rad=phase_rad, cfo_hz=0.0, pad_samples=pad, stream_index=stream_index),
    )
