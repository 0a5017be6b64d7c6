"""Trainable parameters of a network."""

from dataclasses import dataclass
from itertools import count

import numpy as np

from syncbase.choices import Precision
from syncbase.models.network import ModelSpec
from syncbase.nn.layers import Params, init_layer
from syncbase.types.annotated import Tensor

_versions = count(1)

DTYPES = {Precision.FLOAT32: np.dtype(np.float32), Precision.FLOAT64: np.dtype(np.float64)}


@dataclass(slots=True, eq=False)
class ModelParams:
    """Per-layer parameter arrays plus a version stamp.

    The stamp changes whenever the arrays are updated, so caches computed with
    older values can be recognised.
    """

    per_layer: list[Params]
    version: int = 0

    def __post_init__(self) -> None:
        """Give the parameters a fresh version stamp."""
        self.touch()

    def touch(self) -> None:
        """Mark the parameters as updated."""
        self.version = next(_versions)

    def flat(self) -> list[Tensor]:
        """Every array in layer order, weights before bias."""
        return [a for layer in self.per_layer for a in layer]

    @property
    def dtype(self) -> np.dtype:
        """The dtype of the arrays."""
        arrays = self.flat()
        return arrays[0].dtype if arrays else np.dtype(np.float32)

    def copy(self) -> "ModelParams":
        """A deep copy."""
        return ModelParams([tuple(a.copy() for a in layer) for layer in self.per_layer])

    def astype(self, precision: Precision) -> "ModelParams":
        """A copy cast to another precision."""
        dtype = DTYPES[Precision(precision)]
        return ModelParams([tuple(a.astype(dtype) for a in layer) for layer in self.per_layer])

    def check_matches(self, spec: ModelSpec) -> None:
        """Raise ValueError unless every array has the shape its ModelSpec implies."""
        if len(self.per_layer) != len(spec.layers):
            raise ValueError(f"{len(self.per_layer)} parameter groups for {len(spec.layers)} layers.")
        for i, (layer, arrays) in enumerate(zip(spec.layers, self.per_layer)):
            shapes = tuple(a.shape for a in arrays)
            if shapes != layer.param_shapes:
                raise ValueError(f"Layer {i} parameters have shapes {shapes}, expected {layer.param_shapes}.")


def init_params(spec: ModelSpec, rng: np.random.Generator, precision: Precision = Precision.FLOAT32) -> ModelParams:
    """Draw initial parameters for a network.

    Args:
        spec (ModelSpec): The network.
        rng (np.random.Generator): The generator to draw from.
        precision (Precision, optional): The tensor precision. Defaults to float32.

    Returns:
        ModelParams: The parameters.
    """
    dtype = DTYPES[Precision(precision)]
    return ModelParams([init_layer(layer, rng, dtype) for layer in spec.layers])
