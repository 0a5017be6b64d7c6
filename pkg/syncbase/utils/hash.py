"""Utility functions for checksums and digests."""

import hashlib
import zlib
from pathlib import Path


def crc32(data: bytes, value: int = 0) -> int:
    """Returns the CRC-32 of the data, continuing from `value`.

    Args:
        data (bytes): The data to checksum.
        value (int, optional): A running checksum to continue from. Defaults to 0.

    Returns:
        int: The unsigned 32-bit checksum.
    """
    return zlib.crc32(data, value) & 0xFFFFFFFF


def sha256_file(path: Path, chunk_size: int = 1 << 20) -> str:
    """Returns the hex SHA-256 digest of a file's contents.

    Args:
        path (Path): The file to hash.
        chunk_size (int, optional): Read size in bytes. Defaults to 1 MiB.

    Returns:
        str: The hex digest.
    """
    hasher = hashlib.sha256()
    with open(path, "rb") as f:
        while chunk := f.read(chunk_size):
            hasher.update(chunk)
    return hasher.hexdigest()
