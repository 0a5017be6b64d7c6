"""Containers for complex baseband signals and pulse shapes."""

import math
from dataclasses import dataclass, field
from typing import Self

import numpy as np

from syncbase.types.annotated import ComplexArray, RealArray
from syncbase.utils.validate import validate_odd_symmetric


@dataclass(frozen=True, slots=True, eq=False)
class IqBuffer:
    """Contiguous complex baseband samples with their sample rate."""

    samples: ComplexArray
    sample_rate_hz: float

    def __post_init__(self) -> None:
        """Coerce the samples to a 1-D complex128 array and check the sample rate.

        Raises:
            ValueError: If the sample rate is not finite and positive, or the samples are not 1-D.
        """
        if not (math.isfinite(self.sample_rate_hz) and self.sample_rate_hz > 0):
            raise ValueError(f"Sample rate must be finite and positive, got {self.sample_rate_hz}.")
        samples = np.ascontiguousarray(self.samples, dtype=np.complex128)
        if samples.ndim != 1:
            raise ValueError(f"Samples must be 1-D, got shape {samples.shape}.")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        """Number of samples."""
        return int(self.samples.shape[0])

    @property
    def power(self) -> float:
        """Mean power of the samples (0 for an empty buffer)."""
        return float(np.mean(np.abs(self.samples) ** 2)) if len(self) else 0.0

    def with_samples(self, samples: ComplexArray) -> Self:
        """Return a buffer holding new samples at the same sample rate."""
        return type(self)(samples=samples, sample_rate_hz=self.sample_rate_hz)

    def to_channels(self) -> RealArray:
        """Return the samples as a (length, 2) real array, channel 0 = I, channel 1 = Q."""
        return np.stack([self.samples.real, self.samples.imag], axis=-1)


@dataclass(frozen=True, slots=True, eq=False)
class PulseShape:
    """A sampled root-raised-cosine pulse."""

    beta: float
    span_symbols: int
    samples_per_symbol: int
    taps: RealArray = field(repr=False)

    def __post_init__(self) -> None:
        """Check tap count, symmetry and unit energy.

        Raises:
            ValueError: If the taps violate any of the pulse invariants.
        """
        taps = np.asarray(self.taps, dtype=np.float64)
        expected = self.span_symbols * self.samples_per_symbol + 1
        if taps.shape != (expected,):
            raise ValueError(f"Expected {expected} taps, got shape {taps.shape}.")
        validate_odd_symmetric(taps.tolist())
        if abs(float(np.sum(taps**2)) - 1.0) > 1e-9:
            raise ValueError("Pulse taps must have unit energy.")
        object.__setattr__(self, "taps", taps)

    @property
    def delay(self) -> int:
        """Group delay of the filter in samples."""
        return (len(self.taps) - 1) // 2
