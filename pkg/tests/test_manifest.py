"""Unit tests for run manifests."""

from datetime import UTC, datetime
from pathlib import Path

from syncbase.manifest import MANIFEST_NAME, append_manifest, build_manifest, read_manifest_runs, render_manifest
from syncbase.models.manifest import RunManifest
from syncbase.utils.hash import sha256_file

STARTED = datetime(2024, 1, 2, 3, 4, 5, tzinfo=UTC)


def test_render() -> None:
    """Test the key = value layout with sorted config keys."""
    manifest = RunManifest(
        command="flops",
        config={"n_fft": 65536, "counting": "valid"},
        seed=3,
        artifacts={"flops.csv": "ab"},
        software_version="1.0.0",
        started_at=STARTED,
        finished_at=STARTED,
    )
    assert render_manifest(manifest).splitlines() == [
        "[run]",
        "command = flops",
        "software_version = 1.0.0",
        "seed = 3",
        "started_at = 2024-01-02T03:04:05+00:00",
        "finished_at = 2024-01-02T03:04:05+00:00",
        "config.counting = valid",
        "config.n_fft = 65536",
        "artifact.flops.csv = sha256:ab",
    ]


def test_build_hashes_artifacts(tmp_path: Path) -> None:
    """Test that every artifact is recorded by name with its digest."""
    a, b = tmp_path / "b.csv", tmp_path / "a.csv"
    a.write_text("1\n")
    b.write_text("2\n")
    manifest = build_manifest("eval", {}, 0, [a, b], STARTED)
    assert list(manifest.artifacts) == ["a.csv", "b.csv"]
    assert manifest.artifacts["b.csv"] == sha256_file(a)
    assert manifest.finished_at >= STARTED


def test_append_is_append_only(tmp_path: Path) -> None:
    """Test that runs accumulate in one file and parse back in order."""
    out = tmp_path / "out"
    for command in ("generate", "generate", "train"):
        path = append_manifest(out, build_manifest(command, {"force": True}, 9, [], STARTED))
    assert path == out / MANIFEST_NAME
    runs = read_manifest_runs(path)
    assert [r["command"] for r in runs] == ["generate", "generate", "train"]
    assert runs[2]["config.force"] == "True"
    assert runs[0]["seed"] == "9"
