"""Estimator networks: architecture builders and the forward/backward engine."""

from dataclasses import dataclass
from typing import Any

import numpy as np

from syncbase.choices import LayerKind, Task
from syncbase.errors import NonFiniteError, StaleCacheError
from syncbase.models.burst import MIN_CFO_BLOCK_LEN
from syncbase.models.network import Hyperparameters, LayerSpec, ModelSpec
from syncbase.models.signal import IqBuffer
from syncbase.nn.layers import Cache, layer_backward, layer_forward
from syncbase.nn.params import ModelParams
from syncbase.types.annotated import RealArray, Tensor
from syncbase.utils.read import read_architecture_defaults


def _stage_values(hyper: Hyperparameters, defaults: dict[str, Any], name: str) -> tuple[int, ...]:
    values = getattr(hyper, name)
    return tuple(defaults[name] if values is None else values)


def _conv_relu(width: int, channels: int, out_channels: int, filter_len: int, stride: int) -> list[LayerSpec]:
    conv = LayerSpec(
        kind=LayerKind.CONV1D,
        in_width=width,
        in_channels=channels,
        out_channels=out_channels,
        filter_len=filter_len,
        stride=stride,
    )
    relu = LayerSpec(kind=LayerKind.RELU, in_width=conv.out_width, in_channels=out_channels)
    return [conv, relu]


def _linear_out(last: LayerSpec) -> LayerSpec:
    return LayerSpec(
        kind=LayerKind.LINEAR_OUT,
        in_width=last.out_width,
        in_channels=last.out_channels_resolved,
        out_channels=1,
    )


def _cfo_layers(nsamp: int, hyper: Hyperparameters, defaults: dict[str, Any]) -> list[LayerSpec]:
    channels = _stage_values(hyper, defaults, "channels")
    filter_lens = _stage_values(hyper, defaults, "filter_lens")
    strides = _stage_values(hyper, defaults, "strides")
    if not len(channels) == len(filter_lens) == len(strides) == 3:
        raise ValueError("The cfo network has exactly three conv stages.")
    pool = hyper.avg_pool or defaults["avg_pool"]

    layers = _conv_relu(nsamp, 2, channels[0], filter_lens[0], strides[0])
    layers.append(
        LayerSpec(kind=LayerKind.AVG_POOL, in_width=layers[-1].out_width, in_channels=channels[0], pool=pool)
    )
    for stage in (1, 2):
        prev = layers[-1]
        layers += _conv_relu(
            prev.out_width, prev.out_channels_resolved, channels[stage], filter_lens[stage], strides[stage]
        )
    return layers


def _timing_layers(hyper: Hyperparameters, defaults: dict[str, Any]) -> list[LayerSpec]:
    channels = _stage_values(hyper, defaults, "channels")
    filter_lens = _stage_values(hyper, defaults, "filter_lens")
    strides = _stage_values(hyper, defaults, "strides")
    if not len(channels) == len(filter_lens) == len(strides) == 4:
        raise ValueError("The timing network has exactly four conv stages.")
    last = len(channels) - 1
    pooled = set(hyper.max_pool_after or (last,)) if hyper.max_pool else set()
    if not pooled <= set(range(last + 1)):
        raise ValueError(f"Max-pool stages {sorted(pooled)} must lie in 0..{last}.")

    layers: list[LayerSpec] = []
    width, in_channels = defaults["input_len"], 2
    conv_widths = []
    for stage in range(4):
        layers += _conv_relu(width, in_channels, channels[stage], filter_lens[stage], strides[stage])
        conv_widths.append(layers[-1].out_width)
        width, in_channels = layers[-1].out_width, channels[stage]
        if stage in pooled:
            layers.append(
                LayerSpec(kind=LayerKind.MAX_POOL, in_width=width, in_channels=in_channels, pool=hyper.max_pool)
            )
            width = layers[-1].out_width
    if not pooled and conv_widths != list(defaults["widths"]):
        raise ValueError(f"Timing conv widths {conv_widths} differ from the required {defaults['widths']}.")
    return layers


def build_model(task: Task, nsamp: int | None = None, hyper: Hyperparameters | None = None) -> ModelSpec:
    """Build one of the two estimator architectures.

    cfo: conv+ReLU (32) → avg-pool → conv+ReLU (128) → conv+ReLU (256) → linear.
    timing: four conv+ReLU stages (32, 64, 128, 256 channels, widths 511, 126,
    30, 2 from a 2048-sample input) → linear. A max-pool override pools after
    the last conv stage unless `max_pool_after` names others, and relaxes the
    width check to the shape chain alone.

    Args:
        task (Task): Which network.
        nsamp (int | None, optional): Input length of the cfo network. Defaults to None.
        hyper (Hyperparameters | None, optional): Stage overrides. Defaults to None.

    Raises:
        ValueError: If nsamp is missing or too short, or the shape chain breaks.

    Returns:
        ModelSpec: The network.
    """
    hyper = hyper or Hyperparameters()
    defaults = read_architecture_defaults()[str(task)]
    match task:
        case Task.CFO:
            if nsamp is None or nsamp < MIN_CFO_BLOCK_LEN:
                raise ValueError(f"The cfo network needs nsamp ≥ {MIN_CFO_BLOCK_LEN}, got {nsamp}.")
            layers, input_len = _cfo_layers(nsamp, hyper, defaults), nsamp
        case _:
            layers, input_len = _timing_layers(hyper, defaults), defaults["input_len"]
    layers.append(_linear_out(layers[-1]))
    return ModelSpec(task=task, input_len=input_len, layers=tuple(layers), label_scale=defaults["label_scale"])


@dataclass(frozen=True, slots=True, eq=False)
class ForwardCache:
    """What a backward pass needs from its forward pass."""

    layers: list[Cache]
    params_version: int
    batch: int


@dataclass(frozen=True, slots=True, eq=False)
class Gradients:
    """Gradients of a scalar objective."""

    params: list[Tensor]
    inputs: Tensor


class Network:
    """A model spec bound to its parameters.

    Forward passes only read the parameters, so `predict` may be called from
    several threads while the parameters are not being trained.
    """

    def __init__(self, spec: ModelSpec, params: ModelParams):
        """Bind parameters to a spec.

        Args:
            spec (ModelSpec): The architecture.
            params (ModelParams): Parameters matching the architecture.

        Raises:
            ValueError: If a parameter shape does not match the ModelSpec.
        """
        params.check_matches(spec)
        self.spec = spec
        self.params = params

    def _as_batch(self, x: Tensor) -> Tensor:
        x = np.asarray(x)
        if x.ndim == 2:
            x = x[None]
        expected = (self.spec.input_len, self.spec.input_channels)
        if x.ndim != 3 or x.shape[1:] != expected:
            raise ValueError(f"Network expects input of shape (batch, {expected[0]}, {expected[1]}), got {x.shape}.")
        return x.astype(self.params.dtype, copy=False)

    def forward(self, x: Tensor) -> tuple[RealArray, ForwardCache]:
        """Run the network on a batch.

        Args:
            x (Tensor): Inputs of shape (batch, input_len, 2) or a single (input_len, 2).

        Raises:
            ValueError: If the input shape is wrong.
            NonFiniteError: If any activation is NaN or infinite.

        Returns:
            tuple[RealArray, ForwardCache]: Normalized predictions of shape (batch,) and the cache.
        """
        h = self._as_batch(x)
        caches: list[Cache] = []
        for i, (layer, p) in enumerate(zip(self.spec.layers, self.params.per_layer)):
            h, cache = layer_forward(layer, h, p)
            if not np.all(np.isfinite(h)):
                raise NonFiniteError(f"Non-finite activation in layer {i} ({layer.kind}).")
            caches.append(cache)
        return h[:, 0, 0], ForwardCache(layers=caches, params_version=self.params.version, batch=h.shape[0])

    def backward(self, cache: ForwardCache, d_pred: RealArray) -> Gradients:
        """Back-propagate d(objective)/d(prediction).

        Args:
            cache (ForwardCache): The cache of the matching forward call.
            d_pred (RealArray): Gradient with respect to each normalized prediction, shape (batch,).

        Raises:
            StaleCacheError: If the parameters changed since the forward call.
            ValueError: If d_pred does not match the batch.

        Returns:
            Gradients: Parameter gradients in `params.flat()` order and the input gradient.
        """
        if cache.params_version != self.params.version:
            raise StaleCacheError("Parameters changed since this forward pass.")
        d_pred = np.asarray(d_pred)
        if d_pred.shape != (cache.batch,):
            raise ValueError(f"Expected an upstream gradient of shape ({cache.batch},), got {d_pred.shape}.")
        g = d_pred.astype(self.params.dtype).reshape(cache.batch, 1, 1)
        per_layer: list[tuple[Tensor, ...]] = []
        for layer, p, c in zip(
            reversed(self.spec.layers), reversed(self.params.per_layer), reversed(cache.layers)
        ):
            g, grads = layer_backward(layer, c, p, g)
            per_layer.append(grads)
        return Gradients(params=[a for grads in reversed(per_layer) for a in grads], inputs=g)

    def predict(self, x: IqBuffer | Tensor) -> float | RealArray:
        """Estimate in physical units (Hz or samples).

        Args:
            x (IqBuffer | Tensor): One received block, or a batch of shape (batch, input_len, 2).

        Returns:
            float | RealArray: The estimate, or one estimate per batch row.
        """
        single = isinstance(x, IqBuffer) or np.ndim(x) == 2
        tensor = x.to_channels() if isinstance(x, IqBuffer) else x
        pred, _ = self.forward(tensor)
        scaled = pred.astype(np.float64) * self.spec.label_scale
        return float(scaled[0]) if single else scaled
