"""Functions for data validation."""

import math
from collections.abc import Sequence


def validate_is_power_of_2(n: int) -> int:
    """Checks that the value is a positive power of 2.

    Args:
        n (int): The value to check.

    Raises:
        ValueError: If the value is not a power of 2.

    Returns:
        int: The value passed in.
    """
    if not (n > 0 and n & (n - 1) == 0):
        raise ValueError(f"{n} is not a power of 2.")
    return n


def validate_finite(x: float) -> float:
    """Checks that the value is finite.

    Args:
        x (float): The value to check.

    Raises:
        ValueError: If the value is NaN or infinite.

    Returns:
        float: The value passed in.
    """
    if not math.isfinite(x):
        raise ValueError(f"{x} is not finite.")
    return x


def validate_snr_db(x: float) -> float:
    """Checks that the value is a usable SNR in dB.

    Positive infinity is accepted and means "noise disabled".

    Args:
        x (float): The value to check.

    Raises:
        ValueError: If the value is NaN or negative infinity.

    Returns:
        float: The value passed in.
    """
    if math.isnan(x) or x == -math.inf:
        raise ValueError(f"{x} is not a valid SNR in dB.")
    return x


def validate_symbol_indices(symbols: Sequence[int], order: int) -> Sequence[int]:
    """Checks that every symbol index lies in [0, order).

    Args:
        symbols (Sequence[int]): The symbol indices.
        order (int): The modulation order.

    Raises:
        ValueError: If any index is out of range.

    Returns:
        Sequence[int]: The symbols passed in.
    """
    bad = [s for s in symbols if not 0 <= int(s) < order]
    if bad:
        raise ValueError(f"Symbol indices {bad[:5]} are outside [0, {order}).")
    return symbols


def validate_odd_symmetric(taps: Sequence[float], tol: float = 1e-12) -> Sequence[float]:
    """Checks that a filter has an odd number of evenly symmetric taps.

    Args:
        taps (Sequence[float]): The filter taps.
        tol (float, optional): Absolute tolerance. Defaults to 1e-12.

    Raises:
        ValueError: If the taps are even in number or not symmetric.

    Returns:
        Sequence[float]: The taps passed in.
    """
    n = len(taps)
    if n % 2 == 0:
        raise ValueError(f"Filter has an even number of taps ({n}).")
    if any(abs(taps[i] - taps[n - 1 - i]) > tol for i in range(n // 2)):
        raise ValueError("Filter taps are not symmetric.")
    return taps


def validate_channel_name(name: str) -> str:
    """Checks that the value names a channel: 'awgn' or 'fading_<sigma>' with sigma > 0.

    Args:
        name (str): The value to check.

    Raises:
        ValueError: If the value is not a channel name.

    Returns:
        str: The value passed in.
    """
    if name == "awgn":
        return name
    prefix, _, sigma = name.partition("_")
    try:
        ok = prefix == "fading" and math.isfinite(float(sigma)) and float(sigma) > 0
    except ValueError:
        ok = False
    if not ok:
        raise ValueError(f"'{name}' is not a channel name (expected 'awgn' or 'fading_<sigma>').")
    return name
