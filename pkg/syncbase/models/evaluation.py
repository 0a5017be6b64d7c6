"""Models for evaluation results."""

import math

from pydantic import BaseModel, ConfigDict, Field, field_validator

from syncbase.types.annotated import Count


class SweepRow(BaseModel):
    """Errors of both estimators at one block length."""

    model_config = ConfigDict(frozen=True)

    len: Count = Field(description="Block length in samples.")
    ml: float | None = Field(default=None, description="Learned estimator error; None for expert-only sweeps.")
    expert: float = Field(description="Expert estimator error.")

    @field_validator("ml", "expert")
    @classmethod
    def check_error(cls, v: float | None) -> float | None:
        """Errors are finite and non-negative."""
        if v is not None and not (math.isfinite(v) and v >= 0):
            raise ValueError(f"Error {v} must be finite and non-negative.")
        return v


class SweepKey(BaseModel):
    """Identifies a sweep file: task, channel and SNR."""

    model_config = ConfigDict(frozen=True)

    task: str = Field(description="The task.")
    channel: str = Field(description="Channel name, e.g. 'awgn' or 'fading_2'.")
    snr_db: float = Field(description="The SNR in dB.")

    @property
    def file_name(self) -> str:
        """e.g. 'cfo_fading_0.5_10.csv'."""
        return f"{self.task}_{self.channel}_{self.snr_db:g}.csv"

    @classmethod
    def from_file_name(cls, name: str) -> "SweepKey":
        """Parse a sweep file name.

        Args:
            name (str): The file name.

        Raises:
            ValueError: If the name does not follow the sweep naming scheme.

        Returns:
            SweepKey: The key.
        """
        stem = name.removesuffix(".csv")
        match stem.split("_"):
            case [task, "awgn", snr]:
                return cls(task=task, channel="awgn", snr_db=float(snr))
            case [task, "fading", sigma, snr]:
                return cls(task=task, channel=f"fading_{sigma}", snr_db=float(snr))
            case _:
                raise ValueError(f"'{name}' is not a sweep file name.")


class RatioRow(BaseModel):
    """Fading-to-AWGN error ratios of one (channel, SNR, block length) cell."""

    model_config = ConfigDict(frozen=True)

    channel: str = Field(description="The fading channel.")
    snr_db: float = Field(description="The SNR in dB.")
    len: Count = Field(description="Block length in samples.")
    ml_ratio: float | None = Field(default=None, description="Learned estimator degradation.")
    expert_ratio: float = Field(description="Expert estimator degradation.")


class WinnerRow(BaseModel):
    """The better estimator of one (channel, SNR, block length) cell."""

    model_config = ConfigDict(frozen=True)

    channel: str = Field(description="The channel.")
    snr_db: float = Field(description="The SNR in dB.")
    len: Count = Field(description="Block length in samples.")
    winner: str = Field(description="'ml', 'expert', 'tie' or 'n/a' when there is no learned result.")


class ComparisonReport(BaseModel):
    """Degradation ratios and per-cell winners across channels."""

    model_config = ConfigDict(frozen=True)

    task: str = Field(description="The task.")
    ratios: tuple[RatioRow, ...] = Field(default=(), description="Fading/AWGN ratios.")
    winners: tuple[WinnerRow, ...] = Field(default=(), description="Per-cell winners.")
