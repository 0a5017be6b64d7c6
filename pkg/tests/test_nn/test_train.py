"""Unit tests for training."""

import math
from pathlib import Path

import numpy as np
import pytest

from syncbase.choices import Precision, Split, Task
from syncbase.datasets.grid import cell_header, generate_cell
from syncbase.errors import TrainingFault
from syncbase.models.channel import ChannelConfig
from syncbase.models.network import TrainConfig
from syncbase.nn.model import Network, build_model
from syncbase.nn.params import ModelParams
from syncbase.nn.train import ArrayDataset, EpochRecord, train
from tests.test_nn.helpers import with_output


def _linear_data(n: int, seed: int, labels: np.ndarray | None = None) -> ArrayDataset:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 4, 2))
    return ArrayDataset(x=x, y=np.zeros(n) if labels is None else labels)


class TestArrayDataset:
    """Tests the `ArrayDataset` class."""

    def test_shape_checks(self) -> None:
        """Test that mismatched or empty arrays raise a ValueError."""
        with pytest.raises(ValueError):
            ArrayDataset(x=np.zeros((3, 8, 2)), y=np.zeros(2))
        with pytest.raises(ValueError):
            ArrayDataset(x=np.zeros((3, 8, 1)), y=np.zeros(3))
        with pytest.raises(ValueError):
            ArrayDataset(x=np.zeros((0, 8, 2)), y=np.zeros(0))

    def test_check_compatible(self) -> None:
        """Test that a set of the wrong length or task is rejected."""
        spec = build_model(Task.CFO, 32)
        with pytest.raises(ValueError):
            ArrayDataset(x=np.zeros((2, 64, 2)), y=np.zeros(2)).check_compatible(spec)
        with pytest.raises(ValueError):
            ArrayDataset(x=np.zeros((2, 32, 2)), y=np.zeros(2), task=Task.TIMING).check_compatible(spec)

    def test_from_file(self, tmp_path: Path) -> None:
        """Test loading a dataset file."""
        header = cell_header(Task.CFO, 32, ChannelConfig(snr_db=10.0), Split.TRAIN, 8, seed=0)
        data = ArrayDataset.from_file(generate_cell(header, tmp_path))
        assert len(data) == 8
        assert data.task == Task.CFO
        assert data.x.shape == (8, 32, 2)


class TestTrain:
    """Tests the train() function."""

    spec = with_output(width=4, channels=2)

    def test_constant_zero_labels(self) -> None:
        """Test that all-zero labels drive the validation MSE below 1e-6."""
        cfg = TrainConfig(epochs=100, batch_size=8, lr_init=1e-2, plateau_patience=2, precision=Precision.FLOAT64)
        result = train(self.spec, _linear_data(64, 0), _linear_data(16, 1), cfg)
        assert result.best_val_loss < 1e-6
        assert len(result.history) == 100

    def test_best_epoch(self) -> None:
        """Test that the kept parameters come from the epoch with the lowest validation loss."""
        cfg = TrainConfig(epochs=20, batch_size=8, precision=Precision.FLOAT64)
        val = _linear_data(16, 1)
        result = train(self.spec, _linear_data(64, 0), val, cfg)
        losses = [r.val_loss for r in result.history]
        assert result.best_epoch == int(np.argmin(losses))
        pred, _ = Network(self.spec, result.params).forward(val.x)
        assert float(np.mean(pred**2)) == pytest.approx(min(losses))

    def test_deterministic(self) -> None:
        """Test that the same seed gives identical histories and parameters."""
        spec = build_model(Task.CFO, 32)
        rng = np.random.default_rng(3)
        data = ArrayDataset(x=rng.standard_normal((24, 32, 2)).astype(np.float32), y=rng.uniform(-5e4, 5e4, 24))
        for threads in (1, 2):
            cfg = TrainConfig(epochs=2, batch_size=8, seed=5, threads=threads)
            a, b = train(spec, data, data, cfg), train(spec, data, data, cfg)
            assert a.history == b.history
            assert all(np.array_equal(p, q) for p, q in zip(a.params.flat(), b.params.flat()))

    def test_plateau_decay(self) -> None:
        """Test that the learning rate halves after every `plateau_patience` epochs without improvement."""
        zeros = ModelParams([tuple(np.zeros(s) for s in layer.param_shapes) for layer in self.spec.layers])
        cfg = TrainConfig(epochs=7, batch_size=8, lr_init=0.1, plateau_patience=2, precision=Precision.FLOAT64)
        result = train(self.spec, _linear_data(16, 0), _linear_data(8, 1), cfg, params=zeros)
        assert [r.lr for r in result.history] == [0.1, 0.1, 0.1, 0.05, 0.05, 0.025, 0.025]
        assert result.best_epoch == 0

    def test_on_epoch(self) -> None:
        """Test that the callback receives every epoch record."""
        seen: list[EpochRecord] = []
        cfg = TrainConfig(epochs=3, batch_size=8, precision=Precision.FLOAT64)
        result = train(self.spec, _linear_data(16, 0), _linear_data(8, 1), cfg, on_epoch=seen.append)
        assert seen == result.history
        assert [r.epoch for r in seen] == [0, 1, 2]

    def test_nan_labels(self) -> None:
        """Test that a NaN loss raises a TrainingFault naming where it happened."""
        labels = np.zeros(16)
        labels[3] = math.nan
        cfg = TrainConfig(epochs=2, batch_size=16, lr_init=0.01)
        with pytest.raises(TrainingFault) as info:
            train(self.spec, _linear_data(16, 0, labels), _linear_data(8, 1), cfg)
        assert (info.value.epoch, info.value.batch, info.value.lr) == (0, 0, 0.01)

    def test_nan_inputs(self) -> None:
        """Test that a non-finite activation raises a TrainingFault."""
        data = _linear_data(16, 0)
        data.x[5, 0, 0] = math.inf
        with pytest.raises(TrainingFault):
            train(self.spec, data, _linear_data(8, 1), TrainConfig(epochs=1, batch_size=16))


@pytest.mark.slow
def test_desk_training(tmp_path: Path) -> None:
    """Test that a cfo network trained on a small 10 dB cell improves on its first epoch."""
    chan = ChannelConfig(snr_db=10.0)
    train_set = ArrayDataset.from_file(generate_cell(cell_header(Task.CFO, 256, chan, Split.TRAIN, 2000, 0), tmp_path))
    val_set = ArrayDataset.from_file(generate_cell(cell_header(Task.CFO, 256, chan, Split.VAL, 200, 0), tmp_path))
    result = train(build_model(Task.CFO, 256), train_set, val_set, TrainConfig(epochs=10, batch_size=64))
    assert math.isfinite(result.best_val_loss)
    assert result.best_val_loss <= result.history[0].val_loss
