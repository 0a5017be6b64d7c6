"""Helpers for optional values and lazy searches, used by the evaluation pipeline."""

from collections.abc import Callable, Iterable
from typing import TypeVar

V = TypeVar("V")
W = TypeVar("W")


def maybe_apply(value: V | None, fn: Callable[[V], W]) -> W | None:
    """Map `fn` over an optional value.

    A missing learned-estimator result stays missing; falsy values such as
    0.0 are still mapped.

    Args:
        value (V | None): The optional value.
        fn (Callable[[V], W]): Applied when the value is present.

    Returns:
        W | None: `fn(value)`, or None for a missing value.
    """
    if value is None:
        return None
    return fn(value)


def first_true(
    items: Iterable[V],
    default: V | None = None,
    predicate: Callable[[V], bool] | None = None,
) -> V | None:
    """The first item satisfying `predicate` (truthiness if None), else `default`."""
    return next(filter(predicate, items), default)
