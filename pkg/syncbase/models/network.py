"""Models describing estimator networks and how they are trained."""

import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from syncbase.choices import LayerKind, LayerKindChoice, Loss, LossChoice, Precision, PrecisionChoice, TaskChoice
from syncbase.types.annotated import Count, DecayFactor, LearningRate, Uint64

_CONV = (LayerKind.CONV1D,)
_POOL = (LayerKind.AVG_POOL, LayerKind.MAX_POOL)
_DENSE = (LayerKind.DENSE, LayerKind.LINEAR_OUT)


class LayerSpec(BaseModel):
    """One layer, with its input shape resolved.

    Feature maps are (width, channels). Dense layers flatten their input.
    """

    model_config = ConfigDict(frozen=True)

    kind: LayerKindChoice = Field(description="The layer kind.")
    in_width: Count = Field(description="Input width.")
    in_channels: Count = Field(description="Input channels.")
    out_channels: Count | None = Field(default=None, description="Filters (conv) or outputs (dense).")
    filter_len: Count | None = Field(default=None, description="Filter length (conv).")
    stride: Count | None = Field(default=None, description="Stride (conv).")
    pool: Count | None = Field(default=None, description="Pool size (pooling).")

    @model_validator(mode="after")
    def check_shape(self) -> "LayerSpec":
        """Require the fields of the layer kind and a non-empty output."""
        if self.kind in _CONV and None in (self.out_channels, self.filter_len, self.stride):
            raise ValueError("A conv layer needs out_channels, filter_len and stride.")
        if self.kind in _POOL and self.pool is None:
            raise ValueError("A pooling layer needs a pool size.")
        if self.kind in _DENSE and self.out_channels is None:
            raise ValueError("A dense layer needs out_channels.")
        if self.kind == LayerKind.CONV1D and self.filter_len > self.in_width:  # type: ignore[operator]
            raise ValueError(f"Filter of length {self.filter_len} does not fit an input of width {self.in_width}.")
        if self.kind in _POOL and self.pool > self.in_width:  # type: ignore[operator]
            raise ValueError(f"Pool of size {self.pool} does not fit an input of width {self.in_width}.")
        return self

    @property
    def out_width(self) -> int:
        """Output width."""
        match self.kind:
            case LayerKind.CONV1D:
                return (self.in_width - self.filter_len) // self.stride + 1  # type: ignore[operator]
            case LayerKind.AVG_POOL | LayerKind.MAX_POOL:
                return self.in_width // self.pool  # type: ignore[operator]
            case LayerKind.DENSE | LayerKind.LINEAR_OUT:
                return 1
            case _:
                return self.in_width

    @property
    def out_channels_resolved(self) -> int:
        """Output channels."""
        return self.in_channels if self.out_channels is None else self.out_channels

    @property
    def in_size(self) -> int:
        """Number of input elements per example."""
        return self.in_width * self.in_channels

    @property
    def param_shapes(self) -> tuple[tuple[int, ...], ...]:
        """Shapes of the weights and bias, empty for parameter-free layers."""
        match self.kind:
            case LayerKind.CONV1D:
                return (self.out_channels, self.in_channels, self.filter_len), (self.out_channels,)  # type: ignore[return-value]
            case LayerKind.DENSE | LayerKind.LINEAR_OUT:
                return (self.out_channels, self.in_size), (self.out_channels,)  # type: ignore[return-value]
            case _:
                return ()

    @property
    def fan_in(self) -> int:
        """Inputs feeding each output unit."""
        match self.kind:
            case LayerKind.CONV1D:
                return self.in_channels * self.filter_len  # type: ignore[operator]
            case _:
                return self.in_size


class ModelSpec(BaseModel):
    """An estimator network: an ordered chain of layers ending in one linear output."""

    model_config = ConfigDict(frozen=True)

    task: TaskChoice = Field(description="The task the network estimates.")
    input_len: Count = Field(description="Input samples per example.")
    input_channels: Count = Field(default=2, description="Input channels (I and Q).")
    layers: tuple[LayerSpec, ...] = Field(description="The layers in order.")
    label_scale: float = Field(gt=0, description="Labels are divided by this for training.")

    @model_validator(mode="after")
    def check_chain(self) -> "ModelSpec":
        """Require consecutive layer shapes to agree and a single linear output."""
        if not self.layers:
            raise ValueError("A model needs at least one layer.")
        width, channels = self.input_len, self.input_channels
        for i, layer in enumerate(self.layers):
            if (layer.in_width, layer.in_channels) != (width, channels):
                raise ValueError(
                    f"Layer {i} expects ({layer.in_width}, {layer.in_channels}), got ({width}, {channels})."
                )
            width, channels = layer.out_width, layer.out_channels_resolved
        last = self.layers[-1]
        if last.kind != LayerKind.LINEAR_OUT or last.out_channels != 1:
            raise ValueError("The last layer must be a linear output with one unit.")
        return self

    @property
    def n_params(self) -> int:
        """Total number of trainable parameters."""
        return sum(math.prod(s) for layer in self.layers for s in layer.param_shapes)


class TrainConfig(BaseModel):
    """Hyperparameters of a training run."""

    model_config = ConfigDict(frozen=True)

    loss: LossChoice = Field(default=Loss.MSE, description="The regression loss.")
    epochs: Count = Field(default=100, description="Maximum number of epochs.")
    batch_size: Count = Field(default=256, description="Examples per batch.")
    lr_init: LearningRate = Field(default=1e-3, description="Initial learning rate.")
    plateau_patience: Count = Field(default=10, description="Epochs without improvement before decay.")
    decay_factor: DecayFactor = Field(default=0.5, description="Learning-rate decay factor on plateau.")
    seed: Uint64 = Field(default=0, description="Seed for initialization and shuffling.")
    precision: PrecisionChoice = Field(default=Precision.FLOAT32, description="Tensor precision.")
    threads: Count = Field(default=1, description="Data-parallel worker threads.")


class Hyperparameters(BaseModel):
    """Overrides of an architecture's default stage hyperparameters."""

    model_config = ConfigDict(frozen=True)

    filter_lens: tuple[Count, ...] | None = Field(default=None, description="Conv filter length per stage.")
    strides: tuple[Count, ...] | None = Field(default=None, description="Conv stride per stage.")
    channels: tuple[Count, ...] | None = Field(default=None, description="Conv output channels per stage.")
    avg_pool: Count | None = Field(default=None, description="Average-pool size after the first cfo stage.")
    max_pool: Count | None = Field(default=None, description="Max-pool size for the timing network.")
    max_pool_after: tuple[int, ...] = Field(
        default=(), description="Timing stages followed by max-pooling; the last stage if empty."
    )


class ModelHeader(BaseModel):
    """Provenance stored with a trained model."""

    model_config = ConfigDict(frozen=True)

    spec: ModelSpec = Field(description="The architecture.")
    train: TrainConfig = Field(description="The training hyperparameters.")
    precision: PrecisionChoice = Field(default=Precision.FLOAT32, description="Stored parameter precision.")
    channel: str | None = Field(default=None, description="Channel name of the training cell.")
    snr_db: float | None = Field(default=None, description="SNR of the training cell.")
    block_len: Count | None = Field(default=None, description="Block length of the training cell.")
    best_epoch: int = Field(default=0, ge=0, description="Epoch whose parameters were kept.")
    software_version: str = Field(default="", description="Software version that trained the model.")
