"""Block-length sweeps over the channel × SNR grid, written as CSV files."""

import csv
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Self

import numpy as np
from cytoolz import compose

from syncbase.choices import Metric, Split, Task
from syncbase.datasets.grid import DEFAULT_CHANNELS, DEFAULT_SNRS_DB, dataset_path
from syncbase.datasets.io import read_dataset
from syncbase.errors import CellGapError, DataError, ModelFileError
from syncbase.evaluation.stats import ErrorStats, Estimator, evaluate_estimator
from syncbase.expert import CfoExpertConfig, cfo_estimate_expert, cfo_spectrum, timing_estimate_expert
from syncbase.functional import maybe_apply
from syncbase.log import get_logger
from syncbase.models.burst import TIMING_INPUT_LEN, DatasetHeader, LabeledExample
from syncbase.models.channel import ChannelConfig
from syncbase.models.evaluation import SweepKey, SweepRow
from syncbase.nn.model import Network
from syncbase.nn.serialize import SUFFIX as MODEL_SUFFIX
from syncbase.nn.serialize import load_model

logger = get_logger(__name__)

DEFAULT_BLOCK_LENS = (32, 64, 128, 256, 512, 1024)
COLUMNS = ("len", "ml", "expert")
UNITS = {Task.CFO: "Hz", Task.TIMING: "samples"}


def model_name(task: Task, channel: str, snr_db: float, block_len: int) -> str:
    """File name of the model trained on a grid cell, e.g. 'cfo_awgn_10_1024.cem'."""
    return f"{task}_{channel}_{snr_db:g}_{block_len}{MODEL_SUFFIX}"


def cell_name(task: Task, channel: str, snr_db: float, block_len: int) -> str:
    """Human-readable name of a grid cell."""
    return f"{task}/{channel}/{snr_db:g} dB/{block_len}"


@dataclass(slots=True)
class ModelRegistry:
    """Trained models found in a directory, keyed by grid cell."""

    model_dir: Path
    _cache: dict[Path, Network] = field(default_factory=dict)

    def path(self, task: Task, channel: str, snr_db: float, block_len: int) -> Path:
        """Where the model of a cell lives."""
        return self.model_dir / model_name(task, channel, snr_db, block_len)

    def require(self, task: Task, cells: Sequence[tuple[str, float, int]]) -> None:
        """Raise CellGapError naming every (channel, snr, block_len) cell without a model."""
        missing = [cell_name(task, *cell) for cell in cells if not self.path(task, *cell).exists()]
        if missing:
            raise CellGapError(missing)

    def network(self, task: Task, channel: str, snr_db: float, block_len: int) -> Network:
        """Load (once) the model of a cell.

        Raises:
            CellGapError: If the cell has no model.
            ModelFileError: If the model does not fit the cell.
        """
        path = self.path(task, channel, snr_db, block_len)
        if not path.exists():
            raise CellGapError([cell_name(task, channel, snr_db, block_len)])
        if path not in self._cache:
            header, params = load_model(path)
            if header.spec.task != task or header.spec.input_len != block_len:
                raise ModelFileError(f"{path.name} is a {header.spec.task} model for {header.spec.input_len} samples.")
            self._cache[path] = Network(header.spec, params)
        return self._cache[path]

    @classmethod
    def from_dir(cls, model_dir: Path) -> Self:
        """A registry over a directory of model files."""
        return cls(model_dir=model_dir)


def expert_estimator(header: DatasetHeader, cfg: CfoExpertConfig) -> Estimator:
    """The expert estimator matching a dataset's task."""
    match header.task:
        case Task.CFO:
            return lambda iq: cfo_estimate_expert(iq, cfg)
        case _:
            spec = header.burst_spec
            return lambda iq: float(timing_estimate_expert(iq, header.preamble_symbols, spec))


def network_estimator(net: Network) -> Estimator:
    """A trained network as an estimator in physical units."""
    return compose(float, net.predict)


def save_cfo_spectrum(example: LabeledExample, cfg: CfoExpertConfig, path: Path) -> Path:
    """Write the expert's search-band spectrum of one block.

    The .npy file holds a little-endian float64 array of shape (2, n): the
    signal-domain frequencies in Hz, then the |DFT| magnitudes.

    Args:
        example (LabeledExample): The block.
        cfg (CfoExpertConfig): The expert configuration.
        path (Path): The destination.

    Returns:
        Path: The written file.
    """
    freqs, magnitude = cfo_spectrum(example.iq, cfg)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.save(path, np.stack([freqs, magnitude]).astype("<f8"), allow_pickle=False)
    return path


def summarize(stats: ErrorStats, metric: Metric) -> float:
    """The sweep value of a set of statistics."""
    return stats.std if metric == Metric.STD else stats.mean_abs


def write_sweep_csv(path: Path, rows: Sequence[SweepRow], task: Task, metric: Metric = Metric.STD) -> Path:
    """Write a sweep file.

    The first line is a comment naming the statistic and unit, then the
    header `len,ml,expert`. Values use the shortest exact representation; an
    empty `ml` field means no learned result.

    Args:
        path (Path): The destination.
        rows (Sequence[SweepRow]): One row per block length.
        task (Task): The task, which fixes the unit.
        metric (Metric, optional): The statistic in the file. Defaults to std.

    Returns:
        Path: The written file.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    statistic = "population_std" if metric == Metric.STD else "mean_abs"
    with open(path, "w", newline="") as f:
        f.write(f"# metric={statistic} unit={UNITS[Task(task)]}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow((row.len, maybe_apply(row.ml, repr) or "", repr(row.expert)))
    return path


def read_sweep_csv(path: Path) -> list[SweepRow]:
    """Parse a sweep file written by `write_sweep_csv`.

    Raises:
        DataError: If the file is missing or malformed.
    """
    try:
        with open(path, newline="") as f:
            lines = [line for line in f if not line.startswith("#")]
    except OSError as e:
        raise DataError(f"No readable sweep file at {path}.") from e
    reader = csv.reader(lines)
    if tuple(next(reader, ())) != COLUMNS:
        raise DataError(f"{path.name} does not start with the header {','.join(COLUMNS)}.")
    try:
        return [SweepRow(len=int(n), ml=float(ml) if ml else None, expert=float(expert)) for n, ml, expert in reader]
    except ValueError as e:
        raise DataError(f"{path.name} holds a malformed row: {e}") from e


def run_sweep(
    task: Task,
    data_dir: Path,
    out_dir: Path,
    block_lens: Sequence[int] = DEFAULT_BLOCK_LENS,
    channels: Sequence[str] = DEFAULT_CHANNELS,
    snrs_db: Sequence[float] = DEFAULT_SNRS_DB,
    registry: ModelRegistry | None = None,
    expert_cfg: CfoExpertConfig | None = None,
    metric: Metric = Metric.STD,
    threads: int = 1,
    residual_dir: Path | None = None,
) -> list[Path]:
    """Evaluate both estimators on every test cell and write one CSV per (channel, SNR).

    Without a registry the sweep is expert-only and the `ml` column is empty.

    Args:
        task (Task): The task.
        data_dir (Path): Where the test partitions live.
        out_dir (Path): Where the CSV files go.
        block_lens (Sequence[int], optional): Block lengths (ignored for timing). Defaults to 32 … 1024.
        channels (Sequence[str], optional): Channel names. Defaults to the four grid channels.
        snrs_db (Sequence[float], optional): SNRs. Defaults to 0, 5 and 10 dB.
        registry (ModelRegistry | None, optional): Trained models. Defaults to None.
        expert_cfg (CfoExpertConfig | None, optional): CFO expert configuration. Defaults to None.
        metric (Metric, optional): std or mae. Defaults to std.
        threads (int, optional): Worker threads per evaluation. Defaults to 1.
        residual_dir (Path | None, optional): Save residuals, and for cfo the expert spectrum of
            each cell's first test block, here if given. Defaults to None.

    Raises:
        CellGapError: If a cell has no trained model.
        DataError: If a test partition is missing or invalid.

    Returns:
        list[Path]: The written CSV files.
    """
    task = Task(task)
    lens = (TIMING_INPUT_LEN,) if task == Task.TIMING else tuple(block_lens)
    channels = [ChannelConfig.from_name(c, 0.0).name for c in channels]
    cfg = expert_cfg or CfoExpertConfig()
    if registry is not None:
        registry.require(task, [(ch, snr, n) for ch in channels for snr in snrs_db for n in lens])

    written = []
    for channel in channels:
        for snr in snrs_db:
            rows = []
            for block_len in lens:
                path = dataset_path(data_dir, task, ChannelConfig.from_name(channel, snr), block_len, Split.TEST)
                if not path.exists():
                    raise DataError(f"Missing test partition {path}.")
                header, examples = read_dataset(path)
                test_set = list(examples)
                expert = evaluate_estimator(expert_estimator(header, cfg), test_set, threads=threads)
                ml = maybe_apply(
                    registry,
                    lambda r: evaluate_estimator(
                        network_estimator(r.network(task, channel, snr, block_len)), test_set, threads=threads
                    ),
                )
                if residual_dir is not None:
                    stem = model_name(task, channel, snr, block_len).removesuffix(MODEL_SUFFIX)
                    expert.save(residual_dir / f"{stem}_expert.npy")
                    maybe_apply(ml, lambda s: s.save(residual_dir / f"{stem}_ml.npy"))
                    if task == Task.CFO and test_set:
                        save_cfo_spectrum(test_set[0], cfg, residual_dir / f"{stem}_spectrum.npy")
                rows.append(
                    SweepRow(
                        len=block_len,
                        ml=maybe_apply(ml, lambda s: summarize(s, metric)),
                        expert=summarize(expert, metric),
                    )
                )
            key = SweepKey(task=str(task), channel=channel, snr_db=snr)
            written.append(write_sweep_csv(out_dir / key.file_name, rows, task, metric))
            logger.info(f"Wrote {key.file_name}.")
    return written
