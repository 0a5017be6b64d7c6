"""Error statistics of an estimator over a test partition."""

import math
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Self

import numpy as np

from syncbase.errors import EvaluationError, SyncbaseError
from syncbase.log import get_logger
from syncbase.models.burst import LabeledExample
from syncbase.models.signal import IqBuffer
from syncbase.types.annotated import RealArray

logger = get_logger(__name__)

MAX_FAULT_RATE = 0.01

Estimator = Callable[[IqBuffer], float]


@dataclass(frozen=True, slots=True, eq=False)
class ErrorStats:
    """Summary of the residuals estimate − label.

    Sums are exactly rounded, so the statistics do not depend on the order
    of the examples.
    """

    mean_abs: float
    std: float
    count: int
    fault_count: int = 0
    residuals: RealArray = field(default_factory=lambda: np.zeros(0), repr=False)

    @classmethod
    def from_residuals(cls, residuals: Iterable[float], fault_count: int = 0) -> Self:
        """Summarize residuals with the population standard deviation.

        Args:
            residuals (Iterable[float]): The residuals.
            fault_count (int, optional): Examples the estimator failed on. Defaults to 0.

        Raises:
            EvaluationError: If there are no residuals.

        Returns:
            Self: The statistics.
        """
        e = np.asarray(list(residuals), dtype=np.float64)
        if len(e) == 0:
            raise EvaluationError("No residuals to summarize.")
        n = len(e)
        mean = math.fsum(e) / n
        variance = math.fsum((e - mean) ** 2) / n
        return cls(
            mean_abs=math.fsum(np.abs(e)) / n,
            std=math.sqrt(variance),
            count=n,
            fault_count=fault_count,
            residuals=e,
        )

    @property
    def fault_rate(self) -> float:
        """Failed examples as a fraction of all examples."""
        return self.fault_count / (self.count + self.fault_count)

    def save(self, path: Path) -> Path:
        """Write the residuals as a little-endian float64 .npy file."""
        path.parent.mkdir(parents=True, exist_ok=True)
        np.save(path, self.residuals.astype("<f8"), allow_pickle=False)
        return path

    @classmethod
    def load(cls, path: Path, fault_count: int = 0) -> Self:
        """Recompute statistics from saved residuals."""
        return cls.from_residuals(np.load(path, allow_pickle=False), fault_count=fault_count)


def _residual(estimator: Estimator, example: LabeledExample) -> float | None:
    try:
        estimate = float(estimator(example.iq))
    except (SyncbaseError, ArithmeticError) as e:
        logger.debug(f"Estimator failed on example {example.meta.stream_index}: {e}")
        return None
    if not math.isfinite(estimate):
        return None
    return estimate - example.label


def evaluate_estimator(
    estimator: Estimator,
    examples: Iterable[LabeledExample],
    max_fault_rate: float = MAX_FAULT_RATE,
    threads: int = 1,
) -> ErrorStats:
    """Run an estimator over a test set and summarize its errors.

    Examples the estimator raises a SyncbaseError or ArithmeticError on (or
    returns a non-finite value for) are excluded and counted. Other exceptions
    propagate.

    Args:
        estimator (Estimator): Maps a received block to an estimate.
        examples (Iterable[LabeledExample]): The test set.
        max_fault_rate (float, optional): Largest tolerated fraction of failures. Defaults to 0.01.
        threads (int, optional): Worker threads. Defaults to 1.

    Raises:
        EvaluationError: If the test set is empty or too many examples fail.

    Returns:
        ErrorStats: The statistics.
    """
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(lambda ex: _residual(estimator, ex), examples))
    if not results:
        raise EvaluationError("The test set is empty.")
    residuals = [r for r in results if r is not None]
    faults = len(results) - len(residuals)
    if faults:
        logger.warning(f"Estimator failed on {faults} of {len(results)} examples; they are excluded.")
    if faults / len(results) > max_fault_rate:
        raise EvaluationError(
            f"Estimator failed on {faults} of {len(results)} examples, above the {max_fault_rate:.0%} limit."
        )
    return ErrorStats.from_residuals(residuals, fault_count=faults)
