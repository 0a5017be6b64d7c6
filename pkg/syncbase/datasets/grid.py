"""The SNR × channel × block-length grid of dataset cells.

Every example draws from its own generator, keyed on the global seed and on
(task, block length, SNR, channel, split, index). Any example can therefore
be regenerated on its own, and the stream does not depend on how many
threads generated the grid.
"""

import math
from collections.abc import Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from returns.curry import partial
from returns.pipeline import flow

from syncbase.choices import Profile, Split, Task
from syncbase.datasets.io import SUFFIX, as_stored, write_dataset
from syncbase.datasets.synth import gen_cfo_example, gen_timing_example
from syncbase.errors import DatasetExistsError
from syncbase.log import get_logger
from syncbase.models.burst import PREAMBLE_SYMBOLS, TIMING_INPUT_LEN, DatasetHeader, LabeledExample
from syncbase.models.channel import ChannelConfig

logger = get_logger(__name__)

DEFAULT_SNRS_DB = (0.0, 5.0, 10.0)
DEFAULT_CHANNELS = ("awgn", "fading_0.5", "fading_1", "fading_2")
PROFILE_SIZES: dict[Profile, tuple[int, int, int]] = {
    Profile.DESK: (20_000, 2_000, 2_000),
    Profile.FULL: (200_000, 20_000, 20_000),
}

_PREAMBLE_KEY = 0xC0FFEE
_NOISELESS_CODE = 2**31


def _snr_code(snr_db: float) -> int:
    if snr_db == math.inf:
        return _NOISELESS_CODE
    return int(round((snr_db + 1000.0) * 1000.0))


def example_rng(
    seed: int,
    task: Task,
    block_len: int,
    chan: ChannelConfig,
    split: Split,
    index: int,
) -> np.random.Generator:
    """The generator of one example.

    Args:
        seed (int): The global seed.
        task (Task): The task.
        block_len (int): Samples per example.
        chan (ChannelConfig): The channel of the cell.
        split (Split): The partition.
        index (int): Position of the example in its file.

    Returns:
        np.random.Generator: A generator independent of every other example's.
    """
    fading_code = 0 if chan.sigma is None else int(round(chan.sigma * 1000.0))
    key = (
        tuple(Task).index(task),
        block_len,
        _snr_code(chan.snr_db),
        fading_code,
        tuple(Split).index(split),
        index,
    )
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def preamble_for(seed: int) -> tuple[int, ...]:
    """The QPSK preamble frozen for a global seed."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_PREAMBLE_KEY,)))
    return tuple(int(s) for s in rng.integers(0, 4, PREAMBLE_SYMBOLS))


def dataset_name(task: Task, chan: ChannelConfig, block_len: int, split: Split) -> str:
    """File name of a grid cell, e.g. 'cfo_fading_0.5_10_256_train.ceb'."""
    return f"{task}_{chan.name}_{chan.snr_db:g}_{block_len}_{split}{SUFFIX}"


def dataset_path(out_dir: Path, task: Task, chan: ChannelConfig, block_len: int, split: Split) -> Path:
    """Path of a grid cell below `out_dir`."""
    return out_dir / dataset_name(task, chan, block_len, split)


def cell_header(
    task: Task,
    block_len: int,
    chan: ChannelConfig,
    split: Split,
    count: int,
    seed: int,
) -> DatasetHeader:
    """The header of a grid cell before its payload is written."""
    return DatasetHeader(
        task=task,
        split=split,
        example_count=count,
        block_len=TIMING_INPUT_LEN if task == Task.TIMING else block_len,
        snr_db=chan.snr_db,
        fading=chan.fading,
        sigma=chan.sigma,
        seed=seed,
        preamble_symbols=preamble_for(seed) if task == Task.TIMING else (),
    )


def regenerate_example(header: DatasetHeader, index: int) -> LabeledExample:
    """Synthesize example `index` of a cell without touching the others.

    Args:
        header (DatasetHeader): The header of the cell.
        index (int): The example position.

    Raises:
        IndexError: If the index is outside the cell.

    Returns:
        LabeledExample: The example, as stored.
    """
    if not 0 <= index < header.example_count:
        raise IndexError(f"Example {index} is outside a cell of {header.example_count}.")
    spec = header.burst_spec
    chan = header.channel
    match header.task:
        case Task.CFO:
            synthesize = partial(gen_cfo_example, spec, chan, header.block_len, stream_index=index)
        case _:
            synthesize = partial(gen_timing_example, spec, chan, stream_index=index)
    return flow(
        example_rng(header.seed, header.task, header.block_len, chan, header.split, index),
        synthesize,
        as_stored,
    )


def generate_examples(header: DatasetHeader) -> Iterator[LabeledExample]:
    """Stream every example of a cell in index order."""
    return (regenerate_example(header, i) for i in range(header.example_count))


def generate_cell(header: DatasetHeader, out_dir: Path, force: bool = False) -> Path:
    """Synthesize and write one dataset file.

    Args:
        header (DatasetHeader): The cell header.
        out_dir (Path): The output directory.
        force (bool, optional): Overwrite an existing file. Defaults to False.

    Returns:
        Path: The written file.
    """
    path = dataset_path(out_dir, header.task, header.channel, header.block_len, header.split)
    write_dataset(path, header, generate_examples(header), force=force)
    logger.info(f"Generated {path.name} ({header.example_count} examples).")
    return path


def grid_headers(
    task: Task,
    block_lens: Sequence[int],
    snrs_db: Sequence[float],
    channels: Sequence[str],
    split_sizes: dict[Split, int],
    seed: int,
) -> list[DatasetHeader]:
    """Headers of every cell in a grid.

    Timing cells always have the fixed 2048-sample input, so `block_lens` is
    ignored for that task.
    """
    lens = (TIMING_INPUT_LEN,) if task == Task.TIMING else tuple(block_lens)
    return [
        cell_header(task, block_len, ChannelConfig.from_name(name, snr, seed), split, count, seed)
        for name in channels
        for snr in snrs_db
        for block_len in lens
        for split, count in split_sizes.items()
    ]


def generate_grid(
    headers: Sequence[DatasetHeader],
    out_dir: Path,
    force: bool = False,
    threads: int = 1,
) -> list[Path]:
    """Write every cell of a grid, in parallel across cells.

    Existing files are checked before anything is written.

    Args:
        headers (Sequence[DatasetHeader]): The cells, see `grid_headers`.
        out_dir (Path): The output directory.
        force (bool, optional): Overwrite existing files. Defaults to False.
        threads (int, optional): Worker threads. Defaults to 1.

    Raises:
        DatasetExistsError: If any file exists and force is False.

    Returns:
        list[Path]: The written files, in header order.
    """
    paths = [dataset_path(out_dir, h.task, h.channel, h.block_len, h.split) for h in headers]
    existing = [p.name for p in paths if p.exists()]
    if existing and not force:
        raise DatasetExistsError(f"Refusing to overwrite {', '.join(existing)}; pass force to overwrite.")
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(lambda h: generate_cell(h, out_dir, force=force), headers))
