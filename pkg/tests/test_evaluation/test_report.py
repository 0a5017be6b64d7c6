"""Unit tests for comparing sweeps across channels."""

import math
from pathlib import Path

import pytest

from syncbase.choices import Task
from syncbase.errors import EvaluationError
from syncbase.evaluation.report import compare_report, compare_sweeps, write_report_csv
from syncbase.evaluation.sweep import write_sweep_csv
from syncbase.models.evaluation import SweepKey, SweepRow

AWGN = SweepKey(task="cfo", channel="awgn", snr_db=10.0)
FADING = SweepKey(task="cfo", channel="fading_1", snr_db=10.0)
ROWS = [SweepRow(len=32, ml=2.0, expert=4.0), SweepRow(len=64, ml=1.0, expert=1.0)]


class TestCompareSweeps:
    """Tests the compare_sweeps() function."""

    def test_identical(self) -> None:
        """Test that identical sweeps give ratios of 1."""
        report = compare_sweeps({AWGN: ROWS, FADING: ROWS})
        assert all(r.expert_ratio == 1.0 and r.ml_ratio == 1.0 for r in report.ratios)
        assert len(report.ratios) == 2
        assert report.task == "cfo"

    def test_degradation(self) -> None:
        """Test that a ten times worse expert gives a ratio of 10."""
        worse = [SweepRow(len=r.len, ml=r.ml, expert=10 * r.expert) for r in ROWS]
        report = compare_sweeps({AWGN: ROWS, FADING: worse})
        assert [r.expert_ratio for r in report.ratios] == [10.0, 10.0]
        assert [r.ml_ratio for r in report.ratios] == [1.0, 1.0]

    def test_winners(self) -> None:
        """Test the per-cell winner labels."""
        report = compare_sweeps({AWGN: ROWS, FADING: [SweepRow(len=32, expert=1.0), SweepRow(len=64, ml=3.0, expert=2.0)]})
        winners = {(w.channel, w.len): w.winner for w in report.winners}
        assert winners == {("awgn", 32): "ml", ("awgn", 64): "tie", ("fading_1", 32): "n/a", ("fading_1", 64): "expert"}

    def test_zero_reference(self) -> None:
        """Test ratios against a zero AWGN error."""
        zero = [SweepRow(len=32, expert=0.0)]
        report = compare_sweeps({AWGN: zero, FADING: [SweepRow(len=32, expert=1.0)]})
        assert math.isinf(report.ratios[0].expert_ratio)
        assert report.ratios[0].ml_ratio is None

    def test_mismatched_lengths(self) -> None:
        """Test that sweeps over different block lengths are rejected."""
        with pytest.raises(EvaluationError):
            compare_sweeps({AWGN: ROWS, FADING: ROWS[:1]})

    @pytest.mark.parametrize(
        "sweeps",
        [
            {AWGN: ROWS},
            {FADING: ROWS, SweepKey(task="cfo", channel="fading_2", snr_db=10.0): ROWS},
            {AWGN: ROWS, SweepKey(task="timing", channel="fading_1", snr_db=10.0): ROWS},
            {AWGN: ROWS, SweepKey(task="cfo", channel="fading_1", snr_db=5.0): ROWS},
        ],
    )
    def test_invalid(self, sweeps: dict[SweepKey, list[SweepRow]]) -> None:
        """Test that one channel, no AWGN, mixed tasks or an unmatched SNR are rejected."""
        with pytest.raises(EvaluationError):
            compare_sweeps(sweeps)


def test_compare_report(tmp_path: Path) -> None:
    """Test comparing sweep files and writing the report CSV."""
    paths = [write_sweep_csv(tmp_path / key.file_name, ROWS, Task.CFO) for key in (AWGN, FADING)]
    report = compare_report(paths)
    out = write_report_csv(report, tmp_path / "report.csv")
    assert out.read_text().splitlines() == [
        "channel,snr,len,ml_ratio,expert_ratio,winner",
        "fading_1,10,32,1.0,1.0,ml",
        "fading_1,10,64,1.0,1.0,tie",
    ]
