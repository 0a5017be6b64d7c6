"""Helpers for the evaluation tests."""

from collections.abc import Sequence

import numpy as np

from syncbase.models.burst import ExampleMeta, LabeledExample
from syncbase.models.channel import ChannelConfig
from syncbase.models.signal import IqBuffer

_CHANNEL = ChannelConfig(snr_db=10.0)


def labeled(labels: Sequence[float], block_len: int = 32) -> list[LabeledExample]:
    """Examples with the given labels whose samples encode their index."""
    return [
        LabeledExample(
            iq=IqBuffer(samples=np.full(block_len, float(i)), sample_rate_hz=400e3),
            label=float(label),
            channel=_CHANNEL,
            meta=ExampleMeta(phase_rad=0.0, cfo_hz=float(label), pad_samples=0, stream_index=i),
        )
        for i, label in enumerate(labels)
    ]
