"""Resolved options of each command; every field is a command-line flag."""

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

from syncbase.choices import (
    FlopsTarget,
    Loss,
    MatchedFilterCounting,
    Metric,
    Precision,
    Profile,
    Task,
)
from syncbase.types.annotated import ChannelName, Count, PowerOfTwo, PskOrder, SnrDb, Uint64


class GenerateOptions(BaseModel):
    """Options of `syncbase generate`."""

    model_config = ConfigDict(frozen=True)

    task: Task = Field(description="The estimation task.")
    block_len: tuple[Count, ...] = Field(description="Block lengths (cfo only).")
    snr: tuple[SnrDb, ...] = Field(description="SNRs in dB.")
    channel: tuple[ChannelName, ...] = Field(description="Channel names.")
    n: Count = Field(description="Training examples per cell.")
    n_val: Count = Field(description="Validation examples per cell.")
    n_test: Count = Field(description="Test examples per cell.")
    seed: Uint64 = Field(description="Global seed.")
    out: Path = Field(description="Output directory.")
    force: bool = Field(default=False, description="Overwrite existing files.")
    threads: Count = Field(default=1, description="Worker threads.")
    profile: Profile = Field(default=Profile.DESK, description="Size profile for unset counts.")


class TrainOptions(BaseModel):
    """Options of `syncbase train`."""

    model_config = ConfigDict(frozen=True)

    train: Path = Field(description="Training partition file.")
    val: Path = Field(description="Validation partition file.")
    loss: Loss = Field(default=Loss.MSE, description="Regression loss.")
    seed: Uint64 = Field(default=0, description="Initialization and shuffling seed.")
    epochs: Count = Field(default=100, description="Epochs.")
    batch_size: Count = Field(default=256, description="Batch size.")
    lr: float = Field(default=1e-3, gt=0, description="Initial learning rate.")
    precision: Precision = Field(default=Precision.FLOAT32, description="Tensor precision.")
    threads: Count = Field(default=1, description="Data-parallel worker threads.")
    out: Path | None = Field(default=None, description="Model file; named after the cell if unset.")
    force: bool = Field(default=False, description="Overwrite an existing model.")
    max_pool: Count | None = Field(default=None, description="Max-pool size (timing network variant).")
    max_pool_after: tuple[int, ...] = Field(
        default=(), description="Timing stages followed by max-pooling (the last if empty)."
    )


class EvalOptions(BaseModel):
    """Options of `syncbase eval`."""

    model_config = ConfigDict(frozen=True)

    task: Task = Field(description="The estimation task.")
    data_dir: Path = Field(description="Directory of test partitions.")
    model_dir: Path = Field(description="Directory of trained models.")
    out: Path = Field(description="Directory for sweep CSVs and the report.")
    block_len: tuple[Count, ...] = Field(description="Block lengths (cfo only).")
    snr: tuple[SnrDb, ...] = Field(description="SNRs in dB.")
    channel: tuple[ChannelName, ...] = Field(description="Channel names.")
    expert_only: bool = Field(default=False, description="Skip the learned estimators.")
    n_fft: PowerOfTwo = Field(default=2**17, description="Expert CFO FFT size.")
    metric: Metric = Field(default=Metric.STD, description="Statistic written to the CSVs.")
    threads: Count = Field(default=1, description="Worker threads.")
    save_residuals: bool = Field(default=False, description="Also write residuals as .npy files.")


class FlopsOptions(BaseModel):
    """Options of `syncbase flops`."""

    model_config = ConfigDict(frozen=True)

    target: FlopsTarget = Field(default=FlopsTarget.TABLES, description="What to cost.")
    nsamp: Count = Field(default=1024, description="cfo network input length.")
    max_pool: Count | None = Field(default=None, description="Max-pool size (timing network variant).")
    max_pool_after: tuple[int, ...] = Field(
        default=(), description="Timing stages followed by max-pooling (the last if empty)."
    )
    n_fft: PowerOfTwo = Field(default=2**16, description="Expert CFO FFT size.")
    m: PskOrder = Field(default=4, description="Expert CFO power.")
    n_samples: Count = Field(default=1024, description="Matched-filter input samples.")
    template_len: Count = Field(default=256, description="Matched-filter template samples.")
    counting: MatchedFilterCounting | None = Field(
        default=None, description="Matched-filter counting; valid for expert_timing, full_search for tables if unset."
    )
    csv: Path | None = Field(default=None, description="Also write the breakdown as CSV.")
