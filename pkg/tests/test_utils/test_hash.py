"""Unit tests for the checksum and digest functions."""

from pathlib import Path

from syncbase.utils.hash import crc32, sha256_file


class TestCrc32:
    """Tests the crc32() function."""

    def test_check_value(self) -> None:
        """Test the standard CRC-32 check value."""
        assert crc32(b"123456789") == 0xCBF43926

    def test_running(self) -> None:
        """Test that a running checksum equals the checksum of the concatenation."""
        assert crc32(b"6789", crc32(b"12345")) == crc32(b"123456789")

    def test_empty(self) -> None:
        """Test the checksum of no data."""
        assert crc32(b"") == 0


def test_sha256_file(tmp_path: Path) -> None:
    """Tests the sha256_file() function with a chunk size smaller than the file."""
    path = tmp_path / "hello.txt"
    path.write_bytes(b"hello")
    assert sha256_file(path, chunk_size=2) == "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824"
