"""Exceptions raised by syncbase.

Each error carries the command line exit code it maps to.
"""

from collections.abc import Iterable

from syncbase.choices import ExitCode


class SyncbaseError(Exception):
    """Base class for syncbase errors."""

    exit_code: ExitCode = ExitCode.DATA_ERROR


class ConfigError(SyncbaseError, ValueError):
    """Invalid or inconsistent configuration."""

    exit_code = ExitCode.CONFIG_ERROR


class DataError(SyncbaseError):
    """A dataset, model or report file could not be used."""

    exit_code = ExitCode.DATA_ERROR


class MagicError(DataError):
    """The file does not start with the expected magic bytes."""


class VersionError(DataError):
    """The file format version is not supported."""


class HeaderError(DataError):
    """The file header is corrupt."""


class TruncatedError(DataError):
    """The file ends before the payload its header declares."""


class ChecksumError(DataError):
    """The payload checksum does not match the header."""


class DatasetExistsError(DataError):
    """A dataset file already exists and overwriting was not requested."""


class ModelFileError(DataError):
    """A model file is corrupt or does not match the expected shapes."""


class EvaluationError(DataError):
    """An evaluation could not produce trustworthy statistics."""


class DegenerateInputError(SyncbaseError, ValueError):
    """The estimator input carries no usable signal (e.g. all zeros)."""


class StaleCacheError(SyncbaseError, ValueError):
    """A forward cache was reused after the parameters it was computed with changed."""


class TrainingFault(SyncbaseError):
    """A non-finite loss or activation was produced during training."""

    exit_code = ExitCode.TRAINING_FAULT

    def __init__(self, epoch: int, batch: int, lr: float, reason: str = "non-finite loss"):
        """Record where training failed.

        Args:
            epoch (int): The epoch index (0-based).
            batch (int): The batch index within the epoch (0-based).
            lr (float): The learning rate in effect.
            reason (str, optional): What went wrong. Defaults to "non-finite loss".
        """
        self.epoch = epoch
        self.batch = batch
        self.lr = lr
        self.reason = reason
        super().__init__(f"Training fault ({reason}) at epoch {epoch}, batch {batch}, lr {lr:g}.")


class CellGapError(SyncbaseError):
    """One or more grid cells have no trained model."""

    exit_code = ExitCode.CELL_GAP

    def __init__(self, cells: Iterable[str]):
        """Record the missing cells.

        Args:
            cells (Iterable[str]): Names of the cells without a model.
        """
        self.cells = sorted(cells)
        super().__init__(f"No trained model for cell(s): {', '.join(self.cells)}.")


class NonFiniteError(SyncbaseError, ArithmeticError):
    """A tensor produced by the network holds NaN or infinity."""

    exit_code = ExitCode.TRAINING_FAULT
