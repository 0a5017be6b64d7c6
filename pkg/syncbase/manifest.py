"""Append-only run manifests, one `manifest.txt` per output directory."""

from collections.abc import Iterable
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

from syncbase.models.manifest import RunManifest
from syncbase.utils.hash import sha256_file

MANIFEST_NAME = "manifest.txt"


def build_manifest(
    command: str,
    config: dict[str, Any],
    seed: int,
    artifacts: Iterable[Path],
    started_at: datetime,
) -> RunManifest:
    """Describe a finished run, hashing every artifact it wrote.

    Args:
        command (str): The subcommand.
        config (dict[str, Any]): The resolved configuration.
        seed (int): The global seed.
        artifacts (Iterable[Path]): The files written.
        started_at (datetime): When the run started.

    Returns:
        RunManifest: The manifest.
    """
    return RunManifest(
        command=command,
        config=config,
        seed=seed,
        artifacts={p.name: sha256_file(p) for p in sorted(artifacts)},
        started_at=started_at,
        finished_at=datetime.now(UTC),
    )


def render_manifest(manifest: RunManifest) -> str:
    """One `key = value` line per field; config and artifacts are flattened with a prefix."""
    lines = [
        "[run]",
        f"command = {manifest.command}",
        f"software_version = {manifest.software_version}",
        f"seed = {manifest.seed}",
        f"started_at = {manifest.started_at.isoformat()}",
        f"finished_at = {manifest.finished_at.isoformat()}",
    ]
    lines += [f"config.{k} = {v}" for k, v in sorted(manifest.config.items())]
    lines += [f"artifact.{name} = sha256:{digest}" for name, digest in manifest.artifacts.items()]
    return "\n".join(lines) + "\n"


def append_manifest(out_dir: Path, manifest: RunManifest) -> Path:
    """Append a run to the manifest of a directory.

    Args:
        out_dir (Path): The output directory.
        manifest (RunManifest): The run.

    Returns:
        Path: The manifest file.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / MANIFEST_NAME
    with open(path, "a") as f:
        if path.stat().st_size:
            f.write("\n")
        f.write(render_manifest(manifest))
    return path


def read_manifest_runs(path: Path) -> list[dict[str, str]]:
    """Parse every run recorded in a manifest file."""
    runs: list[dict[str, str]] = []
    for line in path.read_text().splitlines():
        if line == "[run]":
            runs.append({})
        elif line and runs:
            key, _, value = line.partition(" = ")
            runs[-1][key] = value
    return runs
