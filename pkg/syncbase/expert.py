"""Analytically derived baseline estimators.

- CFO: periodogram of the m-th power of the received signal.
- Timing: matched filter against the pulse-shaped known preamble.
"""

import math
from collections.abc import Sequence
from functools import cache
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from syncbase.dsp.sigproc import cross_correlate, dft, modulate_psk, rrc_taps
from syncbase.errors import DegenerateInputError
from syncbase.log import get_logger
from syncbase.models.burst import CFO_LIMIT_HZ, BurstSpec
from syncbase.models.signal import IqBuffer, PulseShape
from syncbase.types.annotated import ComplexArray, PowerOfTwo, PskOrder, RealArray

logger = get_logger(__name__)


class CfoExpertConfig(BaseModel):
    """Configuration of the m-th power periodogram CFO estimator."""

    model_config = ConfigDict(frozen=True)

    m: PskOrder = Field(default=4, description="Modulation order (4 for QPSK).")
    n_fft: PowerOfTwo = Field(default=2**17, description="FFT size.")
    search_band_hz: tuple[float, float] = Field(
        default=(-CFO_LIMIT_HZ, CFO_LIMIT_HZ),
        description="Signal-domain search band, ±R_sym/2 by default.",
    )
    max_resolution_hz: float | None = Field(
        default=None, gt=0, description="Coarsest acceptable grid resolution, if any."
    )

    @model_validator(mode="after")
    def check_band(self) -> "CfoExpertConfig":
        """Require a non-empty search band."""
        lo, hi = self.search_band_hz
        if not lo < hi:
            raise ValueError(f"Search band {self.search_band_hz} is empty.")
        return self

    def resolution_hz(self, sample_rate_hz: float) -> float:
        """Signal-domain grid spacing F_s / (m · n_fft)."""
        return sample_rate_hz / (self.m * self.n_fft)

    def check_resolution(self, sample_rate_hz: float) -> Self:
        """Raise if the grid is coarser than `max_resolution_hz`.

        Args:
            sample_rate_hz (float): The sample rate of the input.

        Raises:
            ValueError: If the resolution requirement is not met.

        Returns:
            Self: This config.
        """
        if self.max_resolution_hz is not None and self.resolution_hz(sample_rate_hz) > self.max_resolution_hz:
            raise ValueError(
                f"n_fft={self.n_fft} gives {self.resolution_hz(sample_rate_hz):.3g} Hz resolution, "
                f"coarser than the requested {self.max_resolution_hz:g} Hz."
            )
        return self

    @classmethod
    def for_resolution(cls, sample_rate_hz: float, resolution_hz: float, m: int = 4) -> Self:
        """The smallest power-of-two FFT meeting a resolution target.

        Args:
            sample_rate_hz (float): The sample rate.
            resolution_hz (float): The target resolution.
            m (int, optional): The modulation order. Defaults to 4.

        Returns:
            Self: The config.
        """
        n_fft = 1 << max(0, math.ceil(math.log2(sample_rate_hz / (m * resolution_hz))))
        return cls(m=m, n_fft=n_fft, max_resolution_hz=resolution_hz)  # type: ignore[arg-type]


def cfo_spectrum(x: IqBuffer, cfg: CfoExpertConfig) -> tuple[RealArray, RealArray]:
    """The m-th power periodogram restricted to the search band.

    Bin k maps to the signed frequency (k or k − n_fft) · F_s / n_fft in the
    m-th power domain, and to that value ÷ m in the signal domain.

    Args:
        x (IqBuffer): The received block.
        cfg (CfoExpertConfig): The estimator configuration.

    Raises:
        ValueError: If x is empty or longer than the FFT.
        DegenerateInputError: If x is all zeros.

    Returns:
        tuple[RealArray, RealArray]: Signal-domain frequencies in Hz and |DFT| magnitudes.
    """
    if len(x) == 0:
        raise ValueError("CFO estimation needs at least one sample.")
    if len(x) > cfg.n_fft:
        raise ValueError(f"Block of {len(x)} samples exceeds n_fft={cfg.n_fft}.")
    if not np.any(x.samples):
        raise DegenerateInputError("All-zero input has no spectral peak.")
    cfg.check_resolution(x.sample_rate_hz)
    logger.debug(f"m={cfg.m} periodogram of {len(x)} samples with n_fft={cfg.n_fft}")
    magnitude = np.abs(dft(x.samples**cfg.m, cfg.n_fft))
    k = np.arange(cfg.n_fft)
    signed = np.where(k < cfg.n_fft // 2, k, k - cfg.n_fft)
    freqs = signed * (x.sample_rate_hz / cfg.n_fft) / cfg.m
    lo, hi = cfg.search_band_hz
    band = (freqs >= lo) & (freqs <= hi)
    return freqs[band], magnitude[band]


def cfo_estimate_expert(x: IqBuffer, cfg: CfoExpertConfig) -> float:
    """Estimate the carrier frequency offset from the m-th power periodogram.

    Ties between equal peaks go to the lowest absolute frequency.

    Args:
        x (IqBuffer): The received block.
        cfg (CfoExpertConfig): The estimator configuration.

    Returns:
        float: The estimate in Hz.
    """
    freqs, magnitude = cfo_spectrum(x, cfg)
    # lexsort: last key is primary
    best = np.lexsort((np.abs(freqs), -magnitude))[0]
    return float(freqs[best])


@cache
def _pulse(beta: float, span_symbols: int, sps: int) -> PulseShape:
    return rrc_taps(beta, span_symbols, sps)


def pulse_for(spec: BurstSpec) -> PulseShape:
    """The RRC pulse described by a burst spec (cached)."""
    return _pulse(spec.beta, spec.span_symbols, spec.sps)


def preamble_template(preamble_symbols: Sequence[int], spec: BurstSpec) -> ComplexArray:
    """The pulse-shaped preamble, len(preamble) × sps samples.

    Args:
        preamble_symbols (Sequence[int]): The known preamble.
        spec (BurstSpec): The waveform parameters.

    Returns:
        ComplexArray: The template.
    """
    return modulate_psk(preamble_symbols, spec.order, pulse_for(spec), spec.sample_rate_hz).samples


def timing_estimate_expert(x: IqBuffer, preamble_symbols: Sequence[int], spec: BurstSpec) -> int:
    """Estimate where the preamble starts by matched filtering.

    The correlation magnitude is used so the estimate does not depend on the
    burst's phase. Ties go to the smallest lag.

    Args:
        x (IqBuffer): The received window.
        preamble_symbols (Sequence[int]): The known preamble.
        spec (BurstSpec): The waveform parameters.

    Raises:
        ValueError: If the template is longer than the window.

    Returns:
        int: The preamble start in samples.
    """
    template = preamble_template(preamble_symbols, spec)
    logger.debug(f"Matched filter of {len(template)} template samples over {len(x)} samples")
    corr = cross_correlate(x, template)
    return int(np.argmax(corr))
