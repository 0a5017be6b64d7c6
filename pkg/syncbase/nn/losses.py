"""Regression losses.

Each loss takes targets y and predictions ŷ, returns the sum over the batch
and its gradient with respect to ŷ. Training divides both by the batch size.
"""

import math
from collections.abc import Callable

import numpy as np

from syncbase.choices import Loss
from syncbase.types.annotated import Tensor

LossFn = Callable[[Tensor, Tensor], tuple[float, Tensor]]


def _check(y: Tensor, y_hat: Tensor) -> tuple[Tensor, Tensor]:
    y, y_hat = np.asarray(y), np.asarray(y_hat)
    if y.shape != y_hat.shape:
        raise ValueError(f"Targets {y.shape} and predictions {y_hat.shape} differ in shape.")
    return y, y_hat


def mse(y: Tensor, y_hat: Tensor) -> tuple[float, Tensor]:
    """Σ (y − ŷ)²."""
    y, y_hat = _check(y, y_hat)
    e = y - y_hat
    return float(np.sum(e * e)), -2 * e


def mae(y: Tensor, y_hat: Tensor) -> tuple[float, Tensor]:
    """Σ |y − ŷ|, with subgradient 0 at e = 0."""
    y, y_hat = _check(y, y_hat)
    e = y - y_hat
    return float(np.sum(np.abs(e))), -np.sign(e)


def logcosh(y: Tensor, y_hat: Tensor) -> tuple[float, Tensor]:
    """Σ log cosh(y − ŷ), evaluated as |e| + log1p(exp(−2|e|)) − log 2 so large errors do not overflow."""
    y, y_hat = _check(y, y_hat)
    e = y - y_hat
    a = np.abs(e)
    value = np.sum(a + np.log1p(np.exp(-2 * a)) - math.log(2))
    return float(value), -np.tanh(e)


def huber(y: Tensor, y_hat: Tensor) -> tuple[float, Tensor]:
    """Σ ½e² for |e| < 1 and |e| − ½ otherwise (δ = 1)."""
    y, y_hat = _check(y, y_hat)
    e = y - y_hat
    a = np.abs(e)
    inside = a < 1
    value = np.sum(np.where(inside, 0.5 * e * e, a - 0.5))
    return float(value), -np.where(inside, e, np.sign(e))


LOSSES: dict[Loss, LossFn] = {
    Loss.MSE: mse,
    Loss.MAE: mae,
    Loss.LOGCOSH: logcosh,
    Loss.HUBER: huber,
}


def get_loss(loss: Loss) -> LossFn:
    """Look up a loss function by name."""
    return LOSSES[Loss(loss)]
