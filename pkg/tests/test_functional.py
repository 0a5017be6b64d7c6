"""Test the functional helpers."""

from typing import TypeVar

import pytest

from syncbase.functional import first_true, maybe_apply

T = TypeVar("T")


@pytest.mark.parametrize(
    "x, f",
    [("some_string", str), (1, int), (1.0, float), (True, bool), ([0, 1, 2], list)],
)
def test_maybe_apply_cast(x: T, f: type[T]) -> None:
    """Test that maybe_apply() returns the correct value when casting some value."""
    assert isinstance(maybe_apply(x, f), f)
    assert maybe_apply(x, f) == x


@pytest.mark.parametrize("f", [str, int, float, repr])
def test_maybe_apply_none(f: type[T]) -> None:
    """Test that maybe_apply() returns None when passed None."""
    assert maybe_apply(None, f) is None


def test_maybe_apply_falsy_value() -> None:
    """Test that maybe_apply() applies the function to falsy values other than None."""
    assert maybe_apply(0.0, repr) == "0.0"


def test_first_true() -> None:
    """Tests the first_true() function."""
    assert first_true(range(10), predicate=lambda n: n == 5) == 5


def test_first_true_default() -> None:
    """Tests the first_true() function with a default value provided."""
    assert first_true(range(5), default=-1, predicate=lambda n: n == 5) == -1


def test_first_true_no_predicate() -> None:
    """Tests that first_true() returns the first truthy item without a predicate."""
    assert first_true([0, "", None, "x", "y"]) == "x"
