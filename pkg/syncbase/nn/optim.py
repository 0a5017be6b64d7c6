"""The Adam optimizer."""

from dataclasses import dataclass, field

import numpy as np

from syncbase.nn.params import ModelParams
from syncbase.types.annotated import Tensor

BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8


@dataclass(slots=True)
class AdamState:
    """First and second moment estimates, one pair per parameter array."""

    m: list[Tensor] = field(default_factory=list)
    v: list[Tensor] = field(default_factory=list)
    step: int = 0

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "AdamState":
        """Fresh state for a set of parameters."""
        arrays = params.flat()
        return cls(m=[np.zeros_like(a) for a in arrays], v=[np.zeros_like(a) for a in arrays])


def adam_step(
    params: ModelParams,
    grads: list[Tensor],
    state: AdamState,
    lr: float,
) -> tuple[ModelParams, AdamState]:
    """One bias-corrected Adam update, in place.

    Args:
        params (ModelParams): The parameters; updated in place and their version bumped.
        grads (list[Tensor]): Gradients in `params.flat()` order.
        state (AdamState): The moment estimates; updated in place.
        lr (float): The learning rate.

    Raises:
        ValueError: If the gradients do not match the parameters.

    Returns:
        tuple[ModelParams, AdamState]: The updated parameters and state.
    """
    arrays = params.flat()
    if len(grads) != len(arrays) or any(g.shape != p.shape for g, p in zip(grads, arrays)):
        raise ValueError("Gradients do not match the parameters.")
    state.step += 1
    c1 = 1 - BETA1**state.step
    c2 = 1 - BETA2**state.step
    for p, g, m, v in zip(arrays, grads, state.m, state.v):
        m *= BETA1
        m += (1 - BETA1) * g
        v *= BETA2
        v += (1 - BETA2) * g * g
        p -= (lr * (m / c1) / (np.sqrt(v / c2) + EPSILON)).astype(p.dtype)
    params.touch()
    return params, state
