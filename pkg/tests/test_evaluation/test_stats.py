"""Unit tests for estimator error statistics."""

from pathlib import Path

import numpy as np
import pytest

from syncbase.errors import DegenerateInputError, EvaluationError
from syncbase.evaluation.stats import ErrorStats, evaluate_estimator
from syncbase.models.signal import IqBuffer
from tests.test_evaluation.helpers import labeled


class TestErrorStats:
    """Tests the `ErrorStats` class."""

    def test_population_std(self) -> None:
        """Test mean absolute error and the population (not sample) standard deviation."""
        stats = ErrorStats.from_residuals([1.0, -1.0, 3.0, -3.0])
        assert stats.mean_abs == 2.0
        assert stats.std == pytest.approx(np.sqrt(5.0))
        assert stats.count == 4

    def test_empty(self) -> None:
        """Test that no residuals raise an EvaluationError."""
        with pytest.raises(EvaluationError):
            ErrorStats.from_residuals([])

    def test_order_invariant(self) -> None:
        """Test that permuting residuals leaves the statistics bit-identical."""
        e = np.random.default_rng(0).standard_normal(1000) * 1e4
        a = ErrorStats.from_residuals(e)
        b = ErrorStats.from_residuals(np.random.default_rng(1).permutation(e))
        assert (a.mean_abs, a.std) == (b.mean_abs, b.std)

    def test_save_load(self, tmp_path: Path) -> None:
        """Test that saved residuals reproduce the statistics."""
        stats = ErrorStats.from_residuals([0.5, -2.0, 7.25], fault_count=1)
        loaded = ErrorStats.load(stats.save(tmp_path / "r" / "res.npy"), fault_count=1)
        assert (loaded.mean_abs, loaded.std, loaded.count) == (stats.mean_abs, stats.std, 3)
        assert loaded.fault_rate == pytest.approx(0.25)


class TestEvaluateEstimator:
    """Tests the evaluate_estimator() function."""

    labels = np.random.default_rng(7).uniform(-50e3, 50e3, 10_000)

    def test_oracle(self) -> None:
        """Test that an estimator returning the label has zero error."""
        examples = labeled(self.labels[:100])
        lookup = {e.meta.stream_index: e.label for e in examples}
        stats = evaluate_estimator(lambda iq: lookup[int(iq.samples[0].real)], examples)
        assert stats.mean_abs == 0.0 and stats.std == 0.0

    def test_constant_zero(self) -> None:
        """Test that predicting 0 for uniform ±50 kHz labels gives std ≈ 100 kHz / √12."""
        stats = evaluate_estimator(lambda iq: 0.0, labeled(self.labels))
        assert stats.std == pytest.approx(100e3 / np.sqrt(12), rel=0.02)
        assert stats.mean_abs == pytest.approx(25e3, rel=0.02)

    def test_threads(self) -> None:
        """Test that worker threads give the same statistics."""
        examples = labeled(self.labels[:200])
        a = evaluate_estimator(lambda iq: 1.0, examples)
        b = evaluate_estimator(lambda iq: 1.0, examples, threads=4)
        assert (a.mean_abs, a.std) == (b.mean_abs, b.std)

    def test_faults_excluded(self) -> None:
        """Test that failures under the limit are counted and excluded."""

        def flaky(iq: IqBuffer) -> float:
            index = int(iq.samples[0].real)
            if index == 0:
                raise DegenerateInputError("boom")
            return float("nan") if index == 1 else 0.0

        stats = evaluate_estimator(flaky, labeled(self.labels[:1000]))
        assert stats.fault_count == 2
        assert stats.count == 998

    def test_too_many_faults(self) -> None:
        """Test that failing on more than 1% of examples raises an EvaluationError."""

        def flaky(iq: IqBuffer) -> float:
            if int(iq.samples[0].real) < 2:
                raise DegenerateInputError("boom")
            return 0.0

        with pytest.raises(EvaluationError):
            evaluate_estimator(flaky, labeled(self.labels[:100]))

    def test_arithmetic_fault(self) -> None:
        """Test that a floating-point error counts as a fault."""

        def flaky(iq: IqBuffer) -> float:
            if int(iq.samples[0].real) == 3:
                raise ZeroDivisionError("division by zero")
            return 0.0

        assert evaluate_estimator(flaky, labeled(self.labels[:200])).fault_count == 1

    def test_bug_propagates(self) -> None:
        """Test that an unrelated exception is not swallowed as a fault."""

        def broken(iq: IqBuffer) -> float:
            raise TypeError("bad call")

        with pytest.raises(TypeError):
            evaluate_estimator(broken, labeled(self.labels[:10]))

    def test_empty(self) -> None:
        """Test that an empty test set raises an EvaluationError."""
        with pytest.raises(EvaluationError):
            evaluate_estimator(lambda iq: 0.0, [])
