"""Models for burst synthesis and labeled datasets."""

import math
from dataclasses import dataclass
from typing import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from syncbase import __version__
from syncbase.choices import Fading, FadingChoice, SplitChoice, Task, TaskChoice
from syncbase.models.channel import ChannelConfig
from syncbase.models.signal import IqBuffer
from syncbase.types.annotated import (
    Count,
    DelaySpread,
    PskOrder,
    RollOff,
    SampleRate,
    SnrDb,
    SymbolIndex,
    Uint32,
    Uint64,
)

CFO_LIMIT_HZ = 50e3
MIN_CFO_BLOCK_LEN = 32
PREAMBLE_SYMBOLS = 64
TIMING_INPUT_LEN = 2048
MAX_PAD_SECONDS = 1.25e-3
FORMAT_VERSION = 1


class BurstSpec(BaseModel):
    """Waveform parameters shared by every burst in a dataset."""

    model_config = ConfigDict(frozen=True)

    n_data_symbols: Count = Field(description="Number of random data symbols per burst.")
    preamble_symbols: tuple[SymbolIndex, ...] = Field(
        default=(), description="Known preamble symbols (timing task only)."
    )
    order: PskOrder = Field(default=4, description="PSK modulation order.")
    sps: Count = Field(default=4, description="Samples per symbol.")
    symbol_rate_hz: SampleRate = Field(default=100e3, description="Symbol rate in Hz.")
    sample_rate_hz: SampleRate = Field(default=400e3, description="Sample rate in Hz.")
    beta: RollOff = Field(default=0.25, description="RRC roll-off.")
    span_symbols: Count = Field(
        default=6, description="Total RRC filter span in symbols (not one-sided)."
    )

    @model_validator(mode="after")
    def check_rates(self) -> "BurstSpec":
        """Require sample_rate_hz = sps × symbol_rate_hz."""
        if not math.isclose(self.sample_rate_hz, self.sps * self.symbol_rate_hz):
            raise ValueError(
                f"Sample rate {self.sample_rate_hz:g} Hz must equal sps ({self.sps}) × symbol rate ({self.symbol_rate_hz:g} Hz)."
            )
        return self

    @property
    def filter_delay(self) -> int:
        """Half the RRC filter length in samples."""
        return self.span_symbols * self.sps // 2

    @property
    def max_pad_samples(self) -> int:
        """Largest timing offset in samples (1.25 ms at the sample rate)."""
        return round(MAX_PAD_SECONDS * self.sample_rate_hz)

    @classmethod
    def for_cfo(cls, block_len: int, **kwargs: float) -> Self:
        """Size a CFO burst so a transient-free window of `block_len` samples fits.

        Args:
            block_len (int): The estimator input length in samples.
            **kwargs: Overrides for the other waveform fields.

        Returns:
            Self: The burst spec.
        """
        base = cls(n_data_symbols=1, **kwargs)  # type: ignore[arg-type]
        n = math.ceil((block_len + 2 * base.filter_delay) / base.sps)
        return base.model_copy(update={"n_data_symbols": n})

    @classmethod
    def for_timing(cls, preamble_symbols: tuple[int, ...], **kwargs: float) -> Self:
        """Size a timing burst so preamble and data fill the network input.

        Args:
            preamble_symbols (tuple[int, ...]): The known preamble.
            **kwargs: Overrides for the other waveform fields.

        Returns:
            Self: The burst spec.
        """
        base = cls(n_data_symbols=1, preamble_symbols=preamble_symbols, **kwargs)  # type: ignore[arg-type]
        n = max(1, TIMING_INPUT_LEN // base.sps - len(preamble_symbols))
        return base.model_copy(update={"n_data_symbols": n})


@dataclass(frozen=True, slots=True)
class ExampleMeta:
    """Nuisance values drawn for one example."""

    phase_rad: float
    cfo_hz: float
    pad_samples: int
    stream_index: int


@dataclass(frozen=True, slots=True, eq=False)
class LabeledExample:
    """One received burst and its ground-truth label.

    The label is in Hz for the CFO task and in samples for the timing task.
    """

    iq: IqBuffer
    label: float
    channel: ChannelConfig
    meta: ExampleMeta


class DatasetHeader(BaseModel):
    """Header of a stored dataset file."""

    model_config = ConfigDict(frozen=True)

    task: TaskChoice = Field(description="The estimation task.")
    split: SplitChoice = Field(description="The dataset partition.")
    example_count: Count = Field(description="Number of stored examples.")
    block_len: Count = Field(description="Samples per example.")
    snr_db: SnrDb = Field(description="SNR of the grid cell in dB.")
    fading: FadingChoice = Field(default=Fading.AWGN, description="Fading model of the grid cell.")
    sigma: DelaySpread | None = Field(default=None, description="Mean delay spread in samples.")
    seed: Uint64 = Field(description="Global seed of the grid.")
    version: Uint32 = Field(default=FORMAT_VERSION, description="File format version.")
    software_version: str = Field(
        default=__version__, max_length=16, description="Generator software version."
    )
    preamble_symbols: tuple[SymbolIndex, ...] = Field(
        default=(), description="Frozen preamble symbols (timing task)."
    )
    payload_crc32: Uint32 = Field(default=0, description="CRC-32 of the example records.")

    @property
    def channel(self) -> ChannelConfig:
        """The channel config of the grid cell."""
        return ChannelConfig(snr_db=self.snr_db, fading=self.fading, sigma=self.sigma, seed=self.seed)

    @model_validator(mode="after")
    def check_task_constraints(self) -> "DatasetHeader":
        """Validate the grid cell against the task."""
        if (self.fading == Fading.RAYLEIGH) != (self.sigma is not None):
            raise ValueError("A delay spread is required for Rayleigh fading and forbidden for AWGN.")
        if self.task == Task.TIMING and len(self.preamble_symbols) == 0:
            raise ValueError("A timing dataset header must record its preamble.")
        if self.task == Task.CFO and self.block_len < MIN_CFO_BLOCK_LEN:
            raise ValueError(f"CFO block length must be ≥ {MIN_CFO_BLOCK_LEN}.")
        return self

    @property
    def burst_spec(self) -> BurstSpec:
        """The waveform the examples were synthesized from."""
        match self.task:
            case Task.CFO:
                return BurstSpec.for_cfo(self.block_len)
            case _:
                return BurstSpec.for_timing(self.preamble_symbols)
