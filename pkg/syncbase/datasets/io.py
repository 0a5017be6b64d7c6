"""Binary dataset files.

Layout (little-endian):

    header   magic "CEB1", format version, task/split/fading codes, example
             count, block length, SNR, delay spread, seed, software version,
             preamble, payload CRC-32, header CRC-32
    payload  example_count fixed-size records: float32 I/Q pairs followed by
             label, phase, CFO, pad and stream index

Readers validate magic, version, header checksum, file size and payload
checksum before handing out a single example.
"""

import os
import struct
from collections.abc import Iterable, Iterator
from pathlib import Path
from typing import BinaryIO

import numpy as np
from cytoolz import partition_all
from pydantic import ValidationError

from syncbase.choices import Fading, Split, Task
from syncbase.errors import (
    ChecksumError,
    DataError,
    DatasetExistsError,
    HeaderError,
    MagicError,
    TruncatedError,
    VersionError,
)
from syncbase.log import get_logger
from syncbase.models.burst import FORMAT_VERSION, DatasetHeader, ExampleMeta, LabeledExample
from syncbase.models.signal import IqBuffer
from syncbase.types.annotated import RealArray, Tensor
from syncbase.utils.hash import crc32

logger = get_logger(__name__)

MAGIC = b"CEB1"
SUFFIX = ".ceb"

_TASKS = tuple(Task)
_SPLITS = tuple(Split)
_FADINGS = tuple(Fading)

# magic, version, task, split, fading, reserved, count, block_len, snr, sigma, seed, software, preamble_len
_FIXED = struct.Struct("<4sIBBBBQIddQ16sH")
# payload crc, header crc
_TAIL = struct.Struct("<II")

_CHUNK = 1024


def record_dtype(block_len: int) -> np.dtype:
    """The structured dtype of one stored example."""
    return np.dtype(
        [
            ("iq", "<f4", (block_len, 2)),
            ("label", "<f8"),
            ("phase", "<f8"),
            ("cfo", "<f8"),
            ("pad", "<i8"),
            ("index", "<u8"),
        ]
    )


def encode_header(header: DatasetHeader) -> bytes:
    """Serialize a header, including its trailing checksum.

    Args:
        header (DatasetHeader): The header.

    Returns:
        bytes: The encoded header.
    """
    body = _FIXED.pack(
        MAGIC,
        header.version,
        _TASKS.index(header.task),
        _SPLITS.index(header.split),
        _FADINGS.index(header.fading),
        0,
        header.example_count,
        header.block_len,
        header.snr_db,
        header.sigma or 0.0,
        header.seed,
        header.software_version.encode(),
        len(header.preamble_symbols),
    ) + bytes(header.preamble_symbols)
    body += struct.pack("<I", header.payload_crc32)
    return body + struct.pack("<I", crc32(body))


def _read_exactly(f: BinaryIO, n: int, what: str) -> bytes:
    data = f.read(n)
    if len(data) < n:
        raise TruncatedError(f"File ends inside the {what} ({len(data)} of {n} bytes).")
    return data


def decode_header(f: BinaryIO) -> tuple[DatasetHeader, int]:
    """Read and validate a header from the start of a file.

    Args:
        f (BinaryIO): The open file, positioned at 0.

    Raises:
        MagicError: If the magic bytes are wrong.
        VersionError: If the format version is not supported.
        HeaderError: If the header checksum or contents are invalid.
        TruncatedError: If the file ends inside the header.

    Returns:
        tuple[DatasetHeader, int]: The header and its size in bytes.
    """
    magic = f.read(len(MAGIC))
    if magic != MAGIC:
        if len(magic) < len(MAGIC):
            raise TruncatedError(f"File holds only {len(magic)} bytes.")
        raise MagicError(f"Not a dataset file (magic {magic!r}).")
    fixed = magic + _read_exactly(f, _FIXED.size - len(MAGIC), "header")
    (
        _,
        version,
        task,
        split,
        fading,
        _reserved,
        count,
        block_len,
        snr_db,
        sigma,
        seed,
        software,
        preamble_len,
    ) = _FIXED.unpack(fixed)
    if version != FORMAT_VERSION:
        raise VersionError(f"Dataset format version {version} is not supported (expected {FORMAT_VERSION}).")
    preamble = _read_exactly(f, preamble_len, "preamble")
    payload_crc, header_crc = _TAIL.unpack(_read_exactly(f, _TAIL.size, "header checksum"))
    if crc32(fixed + preamble + struct.pack("<I", payload_crc)) != header_crc:
        raise HeaderError("Header checksum mismatch.")
    try:
        header = DatasetHeader(
            task=_TASKS[task],
            split=_SPLITS[split],
            fading=_FADINGS[fading],
            example_count=count,
            block_len=block_len,
            snr_db=snr_db,
            sigma=None if _FADINGS[fading] == Fading.AWGN else sigma,
            seed=seed,
            version=version,
            software_version=software.rstrip(b"\0").decode(),
            preamble_symbols=tuple(preamble),
            payload_crc32=payload_crc,
        )
    except (IndexError, UnicodeDecodeError, ValidationError) as e:
        raise HeaderError(f"Invalid header contents: {e}") from e
    return header, _FIXED.size + preamble_len + _TAIL.size


def as_stored(example: LabeledExample) -> LabeledExample:
    """The example as it reads back from a file (I/Q rounded to float32)."""
    iq = example.iq.to_channels().astype(np.float32).astype(np.float64)
    return LabeledExample(
        iq=example.iq.with_samples(iq[:, 0] + 1j * iq[:, 1]),
        label=example.label,
        channel=example.channel,
        meta=example.meta,
    )


def to_records(examples: Iterable[LabeledExample], block_len: int) -> np.ndarray:
    """Pack examples into a structured array.

    Args:
        examples (Iterable[LabeledExample]): The examples.
        block_len (int): The expected samples per example.

    Raises:
        ValueError: If an example has the wrong length.

    Returns:
        np.ndarray: The records.
    """
    batch = list(examples)
    records = np.zeros(len(batch), dtype=record_dtype(block_len))
    for i, example in enumerate(batch):
        if len(example.iq) != block_len:
            raise ValueError(f"Example holds {len(example.iq)} samples, expected {block_len}.")
        records["iq"][i] = example.iq.to_channels()
        records["label"][i] = example.label
        records["phase"][i] = example.meta.phase_rad
        records["cfo"][i] = example.meta.cfo_hz
        records["pad"][i] = example.meta.pad_samples
        records["index"][i] = example.meta.stream_index
    return records


def write_dataset(
    path: Path,
    header: DatasetHeader,
    examples: Iterable[LabeledExample],
    force: bool = False,
) -> DatasetHeader:
    """Write a dataset file.

    The file is written under a temporary name and moved into place once
    complete, so a failed write never leaves a partial dataset behind.

    Args:
        path (Path): The destination.
        header (DatasetHeader): The header; its payload checksum is filled in here.
        examples (Iterable[LabeledExample]): Exactly `header.example_count` examples.
        force (bool, optional): Overwrite an existing file. Defaults to False.

    Raises:
        DatasetExistsError: If the file exists and force is False.
        ValueError: If the number of examples differs from the header.

    Returns:
        DatasetHeader: The header as written.
    """
    if path.exists() and not force:
        raise DatasetExistsError(f"{path} exists; pass force to overwrite.")
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".part")
    payload_crc, count = 0, 0
    try:
        with open(tmp, "wb") as f:
            f.write(encode_header(header))
            for chunk in partition_all(_CHUNK, examples):
                data = to_records(chunk, header.block_len).tobytes()
                payload_crc = crc32(data, payload_crc)
                count += len(chunk)
                f.write(data)
            if count != header.example_count:
                raise ValueError(f"Header declares {header.example_count} examples, got {count}.")
            header = header.model_copy(update={"payload_crc32": payload_crc})
            f.seek(0)
            f.write(encode_header(header))
        os.replace(tmp, path)
    finally:
        tmp.unlink(missing_ok=True)
    logger.debug(f"Wrote {count} examples to {path}.")
    return header


def _open_readable(path: Path) -> BinaryIO:
    try:
        return open(path, "rb")
    except OSError as e:
        raise DataError(f"Cannot open dataset {path}: {e.strerror or e}.") from e


def _open_payload(path: Path) -> tuple[DatasetHeader, np.memmap]:
    with _open_readable(path) as f:
        header, header_size = decode_header(f)
    dtype = record_dtype(header.block_len)
    expected = header_size + header.example_count * dtype.itemsize
    actual = path.stat().st_size
    if actual < expected:
        raise TruncatedError(f"{path} holds {actual} bytes, header declares {expected}.")
    if actual > expected:
        raise HeaderError(f"{path} has {actual - expected} bytes beyond the declared payload.")
    records = np.memmap(path, dtype=dtype, mode="r", offset=header_size, shape=(header.example_count,))
    payload_crc = 0
    for start in range(0, header.example_count, _CHUNK):
        payload_crc = crc32(records[start : start + _CHUNK].tobytes(), payload_crc)
    if payload_crc != header.payload_crc32:
        raise ChecksumError(f"{path} payload checksum mismatch.")
    return header, records


def read_header(path: Path) -> DatasetHeader:
    """Read and validate only the header of a dataset file."""
    with _open_readable(path) as f:
        return decode_header(f)[0]


def read_dataset(path: Path) -> tuple[DatasetHeader, Iterator[LabeledExample]]:
    """Open a dataset file for streaming.

    The whole file is validated before this returns.

    Args:
        path (Path): The dataset file.

    Raises:
        DataError: If the file is missing or fails validation.

    Returns:
        tuple[DatasetHeader, Iterator[LabeledExample]]: The header and the examples in stored order.
    """
    header, records = _open_payload(path)
    sample_rate_hz = header.burst_spec.sample_rate_hz
    channel = header.channel

    def examples() -> Iterator[LabeledExample]:
        for record in records:
            iq = np.asarray(record["iq"], dtype=np.float64)
            yield LabeledExample(
                iq=IqBuffer(samples=iq[:, 0] + 1j * iq[:, 1], sample_rate_hz=sample_rate_hz),
                label=float(record["label"]),
                channel=channel,
                meta=ExampleMeta(
                    phase_rad=float(record["phase"]),
                    cfo_hz=float(record["cfo"]),
                    pad_samples=int(record["pad"]),
                    stream_index=int(record["index"]),
                ),
            )

    return header, examples()


def read_arrays(path: Path) -> tuple[DatasetHeader, Tensor, RealArray]:
    """Load a dataset file as network-ready arrays.

    Args:
        path (Path): The dataset file.

    Returns:
        tuple[DatasetHeader, Tensor, RealArray]: The header, float32 inputs of
        shape (n, block_len, 2), and float64 labels of shape (n,).
    """
    header, records = _open_payload(path)
    return header, np.array(records["iq"], dtype=np.float32), np.array(records["label"], dtype=np.float64)
