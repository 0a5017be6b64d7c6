"""Models for run manifests."""

from datetime import datetime
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from syncbase import __version__


class RunManifest(BaseModel):
    """What one command run did, with what configuration, and what it wrote."""

    model_config = ConfigDict(frozen=True)

    command: str = Field(description="The subcommand.")
    config: dict[str, Any] = Field(description="The fully resolved configuration.")
    seed: int = Field(description="The global seed.")
    artifacts: dict[str, str] = Field(default_factory=dict, description="File name to SHA-256 digest.")
    software_version: str = Field(default=__version__, description="syncbase version.")
    started_at: datetime = Field(description="Start time (UTC).")
    finished_at: datetime = Field(description="End time (UTC).")
