"""Models describing channel impairments."""

import math
from dataclasses import dataclass, field
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from syncbase.choices import Fading, FadingChoice
from syncbase.types.annotated import ComplexArray, DelaySpread, RealArray, SnrDb, Uint64


class ChannelConfig(BaseModel):
    """An impairment recipe for one grid cell."""

    model_config = ConfigDict(frozen=True)

    snr_db: SnrDb = Field(description="Per-sample SNR in dB; +inf disables noise.")
    fading: FadingChoice = Field(default=Fading.AWGN, description="The fading model.")
    sigma: DelaySpread | None = Field(
        default=None, description="Mean delay spread in samples (Rayleigh only)."
    )
    seed: Uint64 = Field(default=0, description="Seed of the generator stream.")

    @model_validator(mode="after")
    def check_sigma(self) -> "ChannelConfig":
        """Require a delay spread for Rayleigh fading and forbid one otherwise."""
        match self.fading:
            case Fading.RAYLEIGH if self.sigma is None:
                raise ValueError("Rayleigh fading requires a mean delay spread `sigma`.")
            case Fading.AWGN if self.sigma is not None:
                raise ValueError("An AWGN channel has no delay spread.")
        return self

    @property
    def name(self) -> str:
        """Channel name as used in file names, e.g. 'awgn' or 'fading_0.5'."""
        return "awgn" if self.sigma is None else f"fading_{self.sigma:g}"

    @property
    def noiseless(self) -> bool:
        """Whether noise is disabled."""
        return self.snr_db == math.inf

    @classmethod
    def from_name(cls, name: str, snr_db: float, seed: int = 0) -> Self:
        """Create a config from a channel name.

        Args:
            name (str): 'awgn' or 'fading_<sigma>'.
            snr_db (float): The SNR in dB.
            seed (int, optional): Seed of the generator stream. Defaults to 0.

        Raises:
            ValueError: If the name is not recognised.

        Returns:
            Self: The channel config.
        """
        match name.split("_"):
            case ["awgn"]:
                return cls(snr_db=snr_db, seed=seed)
            case ["fading", sigma]:
                return cls(snr_db=snr_db, fading=Fading.RAYLEIGH, sigma=float(sigma), seed=seed)
            case _:
                raise ValueError(f"'{name}' is not a channel name.")


@dataclass(frozen=True, slots=True, eq=False)
class FadingRealization:
    """One draw of a quasi-static multipath channel."""

    taps: ComplexArray
    sigma: float
    profile: RealArray = field(repr=False)

    def __post_init__(self) -> None:
        """Check the taps and the normalisation of the power-delay profile.

        Raises:
            ValueError: If there are no taps or the profile does not sum to 1.
        """
        taps = np.asarray(self.taps, dtype=np.complex128)
        profile = np.asarray(self.profile, dtype=np.float64)
        if taps.ndim != 1 or len(taps) < 1:
            raise ValueError("A fading realization needs at least one tap.")
        if profile.shape != taps.shape:
            raise ValueError("Profile and taps must have the same length.")
        if abs(float(profile.sum()) - 1.0) > 1e-9:
            raise ValueError("Power-delay profile must sum to 1.")
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "profile", profile)
