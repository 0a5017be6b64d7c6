"""Fixtures for the dataset tests."""

import numpy as np
import pytest

from syncbase.models.burst import LabeledExample


def assert_examples_equal(a: LabeledExample, b: LabeledExample) -> None:
    """Assert two examples hold bit-identical samples, labels and metadata."""
    np.testing.assert_array_equal(a.iq.samples, b.iq.samples)
    assert a.iq.sample_rate_hz == b.iq.sample_rate_hz
    assert a.label == b.label
    assert a.meta == b.meta
    assert a.channel == b.channel


@pytest.fixture
def examples_equal() -> type[object]:
    """The example comparison helper."""
    return assert_examples_equal  # type: ignore[return-value]
