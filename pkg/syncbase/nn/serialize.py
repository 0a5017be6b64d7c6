"""Model files.

Layout (little-endian): magic "CEM1", u32 format version, u32 JSON header
length, the JSON header, every parameter array in layer order (weights before
bias) as raw values, then a CRC-32 of everything before it. Nothing in the
file depends on when it was written.
"""

import struct
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from syncbase.errors import ModelFileError
from syncbase.models.network import ModelHeader
from syncbase.nn.params import DTYPES, ModelParams
from syncbase.utils.hash import crc32

MAGIC = b"CEM1"
MODEL_FORMAT_VERSION = 1
SUFFIX = ".cem"

_PREFIX = struct.Struct("<4sII")
_CRC = struct.Struct("<I")


def encode_model(header: ModelHeader, params: ModelParams) -> bytes:
    """Serialize a model.

    Args:
        header (ModelHeader): The architecture and provenance.
        params (ModelParams): The parameters.

    Raises:
        ValueError: If the parameters do not match the architecture.

    Returns:
        bytes: The file contents.
    """
    params.check_matches(header.spec)
    dtype = DTYPES[header.precision].newbyteorder("<")
    meta = header.model_dump_json().encode()
    body = _PREFIX.pack(MAGIC, MODEL_FORMAT_VERSION, len(meta)) + meta
    body += b"".join(np.ascontiguousarray(a, dtype=dtype).tobytes() for a in params.flat())
    return body + _CRC.pack(crc32(body))


def decode_model(data: bytes) -> tuple[ModelHeader, ModelParams]:
    """Parse and validate model file contents.

    Args:
        data (bytes): The file contents.

    Raises:
        ModelFileError: If the file is corrupt, of another version, or its arrays do not fit the header.

    Returns:
        tuple[ModelHeader, ModelParams]: The header and parameters.
    """
    if len(data) < _PREFIX.size + _CRC.size:
        raise ModelFileError("Model file is too short.")
    magic, version, meta_len = _PREFIX.unpack_from(data)
    if magic != MAGIC:
        raise ModelFileError(f"Not a model file (magic {magic!r}).")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFileError(f"Model format version {version} is not supported.")
    (stored_crc,) = _CRC.unpack_from(data, len(data) - _CRC.size)
    if crc32(data[: -_CRC.size]) != stored_crc:
        raise ModelFileError("Model file checksum mismatch.")
    try:
        header = ModelHeader.model_validate_json(data[_PREFIX.size : _PREFIX.size + meta_len])
    except ValidationError as e:
        raise ModelFileError(f"Invalid model header: {e}") from e

    dtype = DTYPES[header.precision].newbyteorder("<")
    offset = _PREFIX.size + meta_len
    end = len(data) - _CRC.size
    per_layer = []
    for layer in header.spec.layers:
        arrays = []
        for shape in layer.param_shapes:
            size = int(np.prod(shape)) * dtype.itemsize
            if offset + size > end:
                raise ModelFileError("Model file holds fewer parameters than its header declares.")
            raw = np.frombuffer(data, dtype=dtype, count=size // dtype.itemsize, offset=offset)
            arrays.append(raw.reshape(shape).astype(DTYPES[header.precision]))
            offset += size
        per_layer.append(tuple(arrays))
    if offset != end:
        raise ModelFileError("Model file holds more parameters than its header declares.")
    return header, ModelParams(per_layer)


def save_model(path: Path, header: ModelHeader, params: ModelParams) -> Path:
    """Write a model file.

    Args:
        path (Path): The destination.
        header (ModelHeader): The architecture and provenance.
        params (ModelParams): The parameters.

    Returns:
        Path: The written file.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_model(header, params))
    return path


def load_model(path: Path) -> tuple[ModelHeader, ModelParams]:
    """Read a model file.

    Args:
        path (Path): The model file.

    Raises:
        ModelFileError: If the file is missing or invalid.

    Returns:
        tuple[ModelHeader, ModelParams]: The header and parameters.
    """
    try:
        data = path.read_bytes()
    except OSError as e:
        raise ModelFileError(f"No model file at {path}.") from e
    return decode_model(data)
