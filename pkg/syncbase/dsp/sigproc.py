"""Pulse shaping, PSK modulation, radix-2 DFT and correlation."""

from collections.abc import Sequence
from functools import lru_cache

import numpy as np

from syncbase.models.signal import IqBuffer, PulseShape
from syncbase.types.annotated import ComplexArray, RealArray
from syncbase.utils.validate import validate_is_power_of_2, validate_symbol_indices

PSK_ORDERS = (2, 4, 8)


def rrc_taps(beta: float, span_symbols: int, samples_per_symbol: int) -> PulseShape:
    """Sample a unit-energy root-raised-cosine impulse response.

    The filter covers ±span_symbols/2 symbols. The removable singularities at
    t = 0 and |t| = T/(4β) take their analytic limits.

    Args:
        beta (float): Roll-off in [0, 1].
        span_symbols (int): Total span in symbols.
        samples_per_symbol (int): Samples per symbol.

    Raises:
        ValueError: If the roll-off is outside [0, 1], the filter would be empty or
            its length span_symbols × samples_per_symbol is odd.

    Returns:
        PulseShape: The sampled pulse.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"Roll-off {beta} is outside [0, 1].")
    if span_symbols < 1 or samples_per_symbol < 1:
        raise ValueError("Filter span and samples per symbol must both be ≥ 1.")
    if span_symbols * samples_per_symbol % 2:
        raise ValueError(
            f"span_symbols × samples_per_symbol = {span_symbols * samples_per_symbol} must be even "
            "for the filter to centre on a sample."
        )

    delay = span_symbols * samples_per_symbol // 2
    n = np.arange(span_symbols * samples_per_symbol + 1) - delay
    t = n / samples_per_symbol
    taps = np.empty(t.shape, dtype=np.float64)

    at_zero = n == 0
    # 4βt = ±1  <=>  4β|n| = sps
    at_quarter = (
        np.isclose(4.0 * beta * np.abs(n), samples_per_symbol, rtol=0.0, atol=1e-9)
        if beta > 0
        else np.zeros_like(at_zero)
    )
    regular = ~(at_zero | at_quarter)

    taps[at_zero] = 1.0 - beta + 4.0 * beta / np.pi
    if at_quarter.any():
        q = np.pi / (4.0 * beta)
        taps[at_quarter] = (beta / np.sqrt(2.0)) * (
            (1.0 + 2.0 / np.pi) * np.sin(q) + (1.0 - 2.0 / np.pi) * np.cos(q)
        )
    tr = t[regular]
    taps[regular] = (
        np.sin(np.pi * tr * (1.0 - beta)) + 4.0 * beta * tr * np.cos(np.pi * tr * (1.0 + beta))
    ) / (np.pi * tr * (1.0 - (4.0 * beta * tr) ** 2))

    # exact symmetry before normalising
    taps = 0.5 * (taps + taps[::-1])
    taps /= np.sqrt(np.sum(taps**2))
    return PulseShape(
        beta=beta,
        span_symbols=span_symbols,
        samples_per_symbol=samples_per_symbol,
        taps=taps,
    )


def psk_constellation(order: int) -> ComplexArray:
    """Unit-magnitude PSK points exp(j(2πk/m + π/m)) for k = 0..m-1.

    Args:
        order (int): The modulation order.

    Raises:
        ValueError: If the order is not 2, 4 or 8.

    Returns:
        ComplexArray: The constellation points.
    """
    if order not in PSK_ORDERS:
        raise ValueError(f"Modulation order {order} is not one of {PSK_ORDERS}.")
    k = np.arange(order)
    return np.exp(1j * (2.0 * np.pi * k / order + np.pi / order))


def modulate_psk(
    symbols: Sequence[int] | np.ndarray,
    order: int,
    pulse: PulseShape,
    sample_rate_hz: float,
) -> IqBuffer:
    """Map symbols to PSK points and pulse-shape them.

    The output holds exactly len(symbols) × sps samples: symbol k's pulse
    peaks at sample k·sps and the filter transients at both ends are kept.

    Args:
        symbols (Sequence[int] | np.ndarray): Symbol indices in [0, order).
        order (int): The modulation order (2, 4 or 8).
        pulse (PulseShape): The pulse shape.
        sample_rate_hz (float): The sample rate of the output.

    Raises:
        ValueError: If any symbol index is out of range.

    Returns:
        IqBuffer: The shaped burst.
    """
    points = psk_constellation(order)
    indices = np.asarray(symbols, dtype=np.int64).ravel()
    validate_symbol_indices(indices.tolist(), order)
    sps = pulse.samples_per_symbol
    train = np.zeros(len(indices) * sps, dtype=np.complex128)
    train[::sps] = points[indices]
    full = np.convolve(train, pulse.taps)
    return IqBuffer(samples=full[pulse.delay : pulse.delay + len(train)], sample_rate_hz=sample_rate_hz)


@lru_cache(maxsize=32)
def _bit_reversal(n_fft: int) -> np.ndarray:
    bits = n_fft.bit_length() - 1
    idx = np.arange(n_fft)
    rev = np.zeros(n_fft, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    rev.setflags(write=False)
    return rev


@lru_cache(maxsize=64)
def _twiddles(size: int) -> np.ndarray:
    w = np.exp(-2j * np.pi * np.arange(size // 2) / size)
    w.setflags(write=False)
    return w


def dft(x: Sequence[complex] | np.ndarray, n_fft: int) -> ComplexArray:
    """The n_fft-point DFT of x zero-padded to n_fft.

    Iterative radix-2 decimation in time: bit-reversal permutation followed by
    log2(n_fft) butterfly stages, each stage vectorised over all blocks.

    Args:
        x (Sequence[complex] | np.ndarray): The input samples.
        n_fft (int): The transform size, a power of two ≥ len(x).

    Raises:
        ValueError: If n_fft is not a power of two or is shorter than x.

    Returns:
        ComplexArray: The transform.
    """
    validate_is_power_of_2(n_fft)
    x = np.asarray(x, dtype=np.complex128).ravel()
    if len(x) > n_fft:
        raise ValueError(f"Input length {len(x)} exceeds the transform size {n_fft}.")
    a = np.zeros(n_fft, dtype=np.complex128)
    a[: len(x)] = x
    a = a[_bit_reversal(n_fft)]
    size = 2
    while size <= n_fft:
        half = size // 2
        blocks = a.reshape(-1, size)
        even = blocks[:, :half]
        odd = blocks[:, half:] * _twiddles(size)
        a = np.concatenate([even + odd, even - odd], axis=1).ravel()
        size *= 2
    return a


def cross_correlate(x: IqBuffer, template: Sequence[complex] | np.ndarray) -> RealArray:
    """Magnitude of the valid-mode cross-correlation of x against a template.

    Lag τ holds |Σ_k conj(template[k]) · x[τ + k]|.

    Args:
        x (IqBuffer): The received signal.
        template (Sequence[complex] | np.ndarray): The template, no longer than x.

    Raises:
        ValueError: If the template is empty or longer than the signal.

    Returns:
        RealArray: len(x) − len(template) + 1 correlation magnitudes.
    """
    t = np.asarray(template, dtype=np.complex128).ravel()
    if len(t) == 0:
        raise ValueError("Template must not be empty.")
    if len(t) > len(x):
        raise ValueError(f"Template ({len(t)} samples) is longer than the signal ({len(x)} samples).")
    # numpy conjugates its second argument
    return np.abs(np.correlate(x.samples, t, mode="valid"))
