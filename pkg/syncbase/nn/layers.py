"""Forward and backward passes of the individual layers.

Tensors are (batch, width, channels). Conv weights are (out, in, filter_len)
and dense weights are (out, width × channels) over the flattened input.
"""

from typing import Any

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from syncbase.choices import LayerKind
from syncbase.models.network import LayerSpec
from syncbase.types.annotated import Tensor

Params = tuple[Tensor, ...]
Cache = tuple[Any, ...]


def init_layer(layer: LayerSpec, rng: np.random.Generator, dtype: np.dtype) -> Params:
    """Initialize a layer's parameters.

    Weights are uniform in ±sqrt(6 / fan_in) and biases are zero.

    Args:
        layer (LayerSpec): The layer.
        rng (np.random.Generator): The generator to draw from.
        dtype (np.dtype): The tensor dtype.

    Returns:
        Params: (weights, bias), or () for parameter-free layers.
    """
    if not layer.param_shapes:
        return ()
    w_shape, b_shape = layer.param_shapes
    bound = np.sqrt(6.0 / layer.fan_in)
    return rng.uniform(-bound, bound, w_shape).astype(dtype), np.zeros(b_shape, dtype=dtype)


def _conv_forward(layer: LayerSpec, x: Tensor, params: Params) -> tuple[Tensor, Cache]:
    w, b = params
    batch = x.shape[0]
    k = layer.out_width
    # (batch, k, channels, filter_len)
    windows = sliding_window_view(x, layer.filter_len, axis=1)[:, :: layer.stride]  # type: ignore[arg-type]
    cols = windows.reshape(batch * k, -1)
    y = cols @ w.reshape(w.shape[0], -1).T + b
    return y.reshape(batch, k, -1), (cols, x.shape)


def _conv_backward(layer: LayerSpec, cache: Cache, params: Params, g: Tensor) -> tuple[Tensor, Params]:
    cols, x_shape = cache
    w, _ = params
    batch, k, out_channels = g.shape
    g2 = g.reshape(batch * k, out_channels)
    dw = (g2.T @ cols).reshape(w.shape)
    db = g2.sum(axis=0)
    dwin = (g2 @ w.reshape(out_channels, -1)).reshape(batch, k, layer.in_channels, layer.filter_len)
    dx = np.zeros(x_shape, dtype=g.dtype)
    s = layer.stride
    span = s * (k - 1) + 1  # type: ignore[operator]
    for tap in range(layer.filter_len):  # type: ignore[arg-type]
        dx[:, tap : tap + span : s, :] += dwin[..., tap]
    return dx, (dw, db)


def _relu_forward(layer: LayerSpec, x: Tensor, params: Params) -> tuple[Tensor, Cache]:
    mask = x > 0
    return np.where(mask, x, 0).astype(x.dtype), (mask,)


def _relu_backward(layer: LayerSpec, cache: Cache, params: Params, g: Tensor) -> tuple[Tensor, Params]:
    (mask,) = cache
    return np.where(mask, g, 0).astype(g.dtype), ()


def _pooled(layer: LayerSpec, x: Tensor) -> Tensor:
    k, p = layer.out_width, layer.pool
    return x[:, : k * p].reshape(x.shape[0], k, p, x.shape[2])  # type: ignore[operator]


def _avg_pool_forward(layer: LayerSpec, x: Tensor, params: Params) -> tuple[Tensor, Cache]:
    return _pooled(layer, x).mean(axis=2), (x.shape,)


def _avg_pool_backward(layer: LayerSpec, cache: Cache, params: Params, g: Tensor) -> tuple[Tensor, Params]:
    (x_shape,) = cache
    dx = np.zeros(x_shape, dtype=g.dtype)
    used = layer.out_width * layer.pool  # type: ignore[operator]
    dx[:, :used] = np.repeat(g / layer.pool, layer.pool, axis=1)  # type: ignore[operator,arg-type]
    return dx, ()


def _max_pool_forward(layer: LayerSpec, x: Tensor, params: Params) -> tuple[Tensor, Cache]:
    windows = _pooled(layer, x)
    # ties go to the first position in the window
    idx = np.argmax(windows, axis=2)
    y = np.take_along_axis(windows, idx[:, :, None, :], axis=2)[:, :, 0, :]
    return y, (x.shape, idx)


def _max_pool_backward(layer: LayerSpec, cache: Cache, params: Params, g: Tensor) -> tuple[Tensor, Params]:
    x_shape, idx = cache
    p = layer.pool
    mask = np.arange(p)[None, None, :, None] == idx[:, :, None, :]  # type: ignore[arg-type]
    dx = np.zeros(x_shape, dtype=g.dtype)
    used = layer.out_width * p  # type: ignore[operator]
    dx[:, :used] = (mask * g[:, :, None, :]).reshape(x_shape[0], used, x_shape[2])
    return dx, ()


def _dense_forward(layer: LayerSpec, x: Tensor, params: Params) -> tuple[Tensor, Cache]:
    w, b = params
    flat = x.reshape(x.shape[0], -1)
    return (flat @ w.T + b)[:, None, :], (flat, x.shape)


def _dense_backward(layer: LayerSpec, cache: Cache, params: Params, g: Tensor) -> tuple[Tensor, Params]:
    flat, x_shape = cache
    w, _ = params
    g2 = g[:, 0, :]
    return (g2 @ w).reshape(x_shape), (g2.T @ flat, g2.sum(axis=0))


_FORWARD = {
    LayerKind.CONV1D: _conv_forward,
    LayerKind.RELU: _relu_forward,
    LayerKind.AVG_POOL: _avg_pool_forward,
    LayerKind.MAX_POOL: _max_pool_forward,
    LayerKind.DENSE: _dense_forward,
    LayerKind.LINEAR_OUT: _dense_forward,
}

_BACKWARD = {
    LayerKind.CONV1D: _conv_backward,
    LayerKind.RELU: _relu_backward,
    LayerKind.AVG_POOL: _avg_pool_backward,
    LayerKind.MAX_POOL: _max_pool_backward,
    LayerKind.DENSE: _dense_backward,
    LayerKind.LINEAR_OUT: _dense_backward,
}


def layer_forward(layer: LayerSpec, x: Tensor, params: Params) -> tuple[Tensor, Cache]:
    """Run one layer forward.

    Args:
        layer (LayerSpec): The layer.
        x (Tensor): Input of shape (batch, in_width, in_channels).
        params (Params): The layer's parameters.

    Raises:
        ValueError: If the input shape does not match the layer.

    Returns:
        tuple[Tensor, Cache]: The output and what the backward pass needs.
    """
    if x.shape[1:] != (layer.in_width, layer.in_channels):
        raise ValueError(
            f"{layer.kind} layer expects (batch, {layer.in_width}, {layer.in_channels}), got {x.shape}."
        )
    return _FORWARD[layer.kind](layer, x, params)


def layer_backward(layer: LayerSpec, cache: Cache, params: Params, g: Tensor) -> tuple[Tensor, Params]:
    """Propagate an output gradient back through one layer.

    Args:
        layer (LayerSpec): The layer.
        cache (Cache): The cache from the matching forward call.
        params (Params): The layer's parameters.
        g (Tensor): Gradient with respect to the layer output.

    Returns:
        tuple[Tensor, Params]: Gradient with respect to the input, and to each parameter.
    """
    return _BACKWARD[layer.kind](layer, cache, params, g)
