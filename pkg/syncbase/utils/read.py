"""Functions for reading and caching reference data files."""

import tomllib
from functools import cache
from importlib import resources
from typing import Any


@cache
def read_architecture_defaults() -> dict[str, Any]:
    """Read default network hyperparameters from the reference data file.

    Returns:
        dict[str, Any]: Mapping of architecture name to its stage hyperparameters.
    """
    with resources.files("syncbase.data").joinpath("architectures.toml").open("rb") as f:
        return tomllib.load(f)
