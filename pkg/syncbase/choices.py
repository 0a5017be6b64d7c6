"""Enums and enum type aliases for syncbase."""

from enum import IntEnum, StrEnum, auto
from typing import Literal, TypeAlias


class Task(StrEnum):
    """An enumeration of estimation tasks."""

    CFO = auto()
    TIMING = auto()


TaskChoice: TypeAlias = Literal[Task.CFO, Task.TIMING]


class Fading(StrEnum):
    """An enumeration of channel fading models."""

    AWGN = auto()
    RAYLEIGH = auto()


FadingChoice: TypeAlias = Literal[Fading.AWGN, Fading.RAYLEIGH]


class Split(StrEnum):
    """An enumeration of dataset partitions."""

    TRAIN = auto()
    VAL = auto()
    TEST = auto()


SplitChoice: TypeAlias = Literal[Split.TRAIN, Split.VAL, Split.TEST]


class LayerKind(StrEnum):
    """An enumeration of neural network layer kinds."""

    CONV1D = auto()
    AVG_POOL = auto()
    MAX_POOL = auto()
    DENSE = auto()
    RELU = auto()
    LINEAR_OUT = auto()


LayerKindChoice: TypeAlias = Literal[
    LayerKind.CONV1D,
    LayerKind.AVG_POOL,
    LayerKind.MAX_POOL,
    LayerKind.DENSE,
    LayerKind.RELU,
    LayerKind.LINEAR_OUT,
]


class Loss(StrEnum):
    """An enumeration of regression loss functions."""

    MSE = auto()
    MAE = auto()
    LOGCOSH = auto()
    HUBER = auto()


LossChoice: TypeAlias = Literal[Loss.MSE, Loss.MAE, Loss.LOGCOSH, Loss.HUBER]


class Precision(StrEnum):
    """An enumeration of floating point precisions for tensors."""

    FLOAT32 = auto()
    FLOAT64 = auto()


PrecisionChoice: TypeAlias = Literal[Precision.FLOAT32, Precision.FLOAT64]


class Metric(StrEnum):
    """An enumeration of error summary metrics written to sweep files."""

    STD = auto()
    MAE = auto()


MetricChoice: TypeAlias = Literal[Metric.STD, Metric.MAE]


class Profile(StrEnum):
    """An enumeration of dataset size profiles."""

    DESK = auto()
    FULL = auto()


ProfileChoice: TypeAlias = Literal[Profile.DESK, Profile.FULL]


class MatchedFilterCounting(StrEnum):
    """An enumeration of matched filter FLOP counting conventions."""

    VALID = auto()
    FULL_SEARCH = auto()


MatchedFilterCountingChoice: TypeAlias = Literal[
    MatchedFilterCounting.VALID, MatchedFilterCounting.FULL_SEARCH
]


class ExitCode(IntEnum):
    """An enumeration of command line exit codes."""

    OK = 0
    CONFIG_ERROR = 2
    DATA_ERROR = 3
    TRAINING_FAULT = 4
    CELL_GAP = 5


class FlopsTarget(StrEnum):
    """An enumeration of what the flops command can cost."""

    CFO = auto()
    TIMING = auto()
    EXPERT_CFO = auto()
    EXPERT_TIMING = auto()
    TABLES = auto()
