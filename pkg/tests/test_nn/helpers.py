"""Helpers for the network tests."""

import numpy as np

from syncbase.choices import LayerKind, Task
from syncbase.models.network import LayerSpec, ModelSpec


def with_output(*layers: LayerSpec, width: int, channels: int) -> ModelSpec:
    """A model of the given layers followed by a single linear output."""
    last_width = layers[-1].out_width if layers else width
    last_channels = layers[-1].out_channels_resolved if layers else channels
    out = LayerSpec(kind=LayerKind.LINEAR_OUT, in_width=last_width, in_channels=last_channels, out_channels=1)
    return ModelSpec(task=Task.CFO, input_len=width, input_channels=channels, layers=(*layers, out), label_scale=1.0)


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    """Largest elementwise |a − b| / (|a| + |b| + 1e-6)."""
    return float(np.max(np.abs(a - b) / (np.abs(a) + np.abs(b) + 1e-6), initial=0.0))
