"""Mini-batch training with Adam and plateau learning-rate decay."""

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Self

import numpy as np
from cytoolz import partition_all

from syncbase.choices import Task
from syncbase.datasets.io import read_arrays
from syncbase.errors import NonFiniteError, TrainingFault
from syncbase.log import get_logger
from syncbase.models.burst import DatasetHeader, LabeledExample
from syncbase.models.network import ModelSpec, TrainConfig
from syncbase.nn.losses import LossFn, get_loss
from syncbase.nn.model import Network
from syncbase.nn.optim import AdamState, adam_step
from syncbase.nn.params import ModelParams, init_params
from syncbase.types.annotated import RealArray, Tensor

logger = get_logger(__name__)


@dataclass(frozen=True, slots=True, eq=False)
class ArrayDataset:
    """Network inputs of shape (n, width, 2) with labels in physical units."""

    x: Tensor
    y: RealArray
    task: Task | None = None
    header: DatasetHeader | None = None

    def __post_init__(self) -> None:
        """Check the arrays agree.

        Raises:
            ValueError: If the shapes disagree or the set is empty.
        """
        if self.x.ndim != 3 or self.x.shape[2] != 2:
            raise ValueError(f"Inputs must have shape (n, width, 2), got {self.x.shape}.")
        if self.y.shape != (self.x.shape[0],):
            raise ValueError(f"{self.x.shape[0]} inputs but labels of shape {self.y.shape}.")
        if len(self.y) == 0:
            raise ValueError("A dataset needs at least one example.")

    def __len__(self) -> int:
        """Number of examples."""
        return len(self.y)

    @classmethod
    def from_file(cls, path: Path) -> Self:
        """Load a dataset file."""
        header, x, y = read_arrays(path)
        return cls(x=x, y=y, task=header.task, header=header)

    @classmethod
    def from_examples(cls, examples: Sequence[LabeledExample], task: Task | None = None) -> Self:
        """Stack in-memory examples."""
        x = np.stack([e.iq.to_channels() for e in examples]).astype(np.float32)
        return cls(x=x, y=np.array([e.label for e in examples], dtype=np.float64), task=task)

    def check_compatible(self, spec: ModelSpec) -> None:
        """Raise ValueError unless the set fits the network's input and task."""
        if self.x.shape[1] != spec.input_len:
            raise ValueError(f"Examples hold {self.x.shape[1]} samples, the network expects {spec.input_len}.")
        if self.task is not None and self.task != spec.task:
            raise ValueError(f"A {self.task} dataset cannot train a {spec.task} network.")


@dataclass(frozen=True, slots=True)
class EpochRecord:
    """Summary of one epoch."""

    epoch: int
    train_loss: float
    val_loss: float
    lr: float


@dataclass(slots=True, eq=False)
class TrainResult:
    """The best parameters and the per-epoch history."""

    params: ModelParams
    best_epoch: int
    history: list[EpochRecord] = field(default_factory=list)

    @property
    def best_val_loss(self) -> float:
        """The lowest validation loss seen."""
        return self.history[self.best_epoch].val_loss


def _batch_objective(
    net: Network, loss_fn: LossFn, x: Tensor, y: RealArray
) -> tuple[float, list[Tensor]]:
    """Loss sum and its parameter gradients over one shard."""
    pred, cache = net.forward(x)
    value, d_pred = loss_fn(y.astype(pred.dtype), pred)
    return value, net.backward(cache, d_pred).params


def evaluate_loss(net: Network, data: ArrayDataset, loss_fn: LossFn, batch_size: int) -> float:
    """Mean loss over a dataset, labels normalized as in training."""
    y = data.y / net.spec.label_scale
    total = math.fsum(
        loss_fn(y[list(idx)].astype(net.params.dtype), net.forward(data.x[list(idx)])[0])[0]
        for idx in partition_all(batch_size, range(len(data)))
    )
    return total / len(data)


def train(
    spec: ModelSpec,
    train_set: ArrayDataset,
    val_set: ArrayDataset,
    cfg: TrainConfig,
    params: ModelParams | None = None,
    on_epoch: Callable[[EpochRecord], None] | None = None,
) -> TrainResult:
    """Train a network and keep the parameters of the best validation epoch.

    Each batch minimizes the mean loss. After `plateau_patience` epochs without
    a new validation minimum the learning rate is multiplied by `decay_factor`
    and the counter restarts. With `threads > 1` each batch is split into one
    shard per worker and the shard gradients are summed in worker order.

    Args:
        spec (ModelSpec): The architecture.
        train_set (ArrayDataset): The training partition.
        val_set (ArrayDataset): The validation partition.
        cfg (TrainConfig): The hyperparameters.
        params (ModelParams | None, optional): Starting parameters; drawn from cfg.seed if None. Defaults to None.
        on_epoch (Callable[[EpochRecord], None] | None, optional): Called after each epoch. Defaults to None.

    Raises:
        ValueError: If a dataset does not fit the network.
        TrainingFault: If a loss or activation becomes non-finite.

    Returns:
        TrainResult: The best parameters and the history.
    """
    train_set.check_compatible(spec)
    val_set.check_compatible(spec)
    init_seq, shuffle_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    params = init_params(spec, np.random.default_rng(init_seq), cfg.precision) if params is None else params
    net = Network(spec, params)
    loss_fn = get_loss(cfg.loss)
    shuffle_rng = np.random.default_rng(shuffle_seq)
    state = AdamState.zeros_like(params)
    y_train = train_set.y / spec.label_scale

    lr = cfg.lr_init
    best = TrainResult(params=params.copy(), best_epoch=0)
    best_val = math.inf
    since_best = 0
    history: list[EpochRecord] = []
    pool = ThreadPoolExecutor(max_workers=cfg.threads) if cfg.threads > 1 else None

    def objective(x: Tensor, y: RealArray) -> tuple[float, list[Tensor]]:
        if pool is None:
            return _batch_objective(net, loss_fn, x, y)
        shards = [
            (xs, ys)
            for xs, ys in zip(np.array_split(x, cfg.threads), np.array_split(y, cfg.threads))
            if len(ys)
        ]
        results = list(pool.map(lambda s: _batch_objective(net, loss_fn, *s), shards))
        value = sum(r[0] for r in results)
        grads = [np.sum([r[1][i] for r in results], axis=0) for i in range(len(results[0][1]))]
        return value, grads

    try:
        for epoch in range(cfg.epochs):
            order = shuffle_rng.permutation(len(train_set))
            epoch_total = 0.0
            for batch, idx in enumerate(partition_all(cfg.batch_size, order)):
                rows = np.fromiter(idx, dtype=np.int64)
                try:
                    value, grads = objective(train_set.x[rows], y_train[rows])
                except NonFiniteError as e:
                    raise TrainingFault(epoch, batch, lr, reason=str(e)) from e
                if not math.isfinite(value):
                    raise TrainingFault(epoch, batch, lr)
                n = len(rows)
                adam_step(params, [g / n for g in grads], state, lr)
                epoch_total += value
                logger.debug(f"epoch {epoch} batch {batch}: loss {value / n:.6g}")

            try:
                val_loss = evaluate_loss(net, val_set, loss_fn, cfg.batch_size)
            except NonFiniteError as e:
                raise TrainingFault(epoch, -1, lr, reason=str(e)) from e
            if not math.isfinite(val_loss):
                raise TrainingFault(epoch, -1, lr, reason="non-finite validation loss")
            record = EpochRecord(epoch=epoch, train_loss=epoch_total / len(train_set), val_loss=val_loss, lr=lr)
            history.append(record)
            logger.info(
                f"epoch {epoch}: train {record.train_loss:.6g} val {record.val_loss:.6g} lr {record.lr:.3g}"
            )
            if on_epoch is not None:
                on_epoch(record)

            if val_loss < best_val:
                best_val, since_best = val_loss, 0
                best = TrainResult(params=params.copy(), best_epoch=epoch)
            else:
                since_best += 1
                if since_best >= cfg.plateau_patience:
                    lr *= cfg.decay_factor
                    since_best = 0
                    logger.warning(f"Validation loss plateaued; learning rate reduced to {lr:.3g}.")
    finally:
        if pool is not None:
            pool.shutdown()

    best.history = history
    return best
