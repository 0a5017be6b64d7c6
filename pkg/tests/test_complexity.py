"""Unit tests for the analytic FLOP counts."""

import csv
from pathlib import Path

import pytest

from syncbase.choices import LayerKind, MatchedFilterCounting, Task
from syncbase.complexity import (
    cfo_flop_table,
    expert_cfo_flops,
    expert_timing_flops,
    layer_flops,
    model_flops,
    timing_flop_table,
    write_breakdown_csv,
)
from syncbase.models.complexity import OpCount
from syncbase.models.network import LayerSpec
from syncbase.nn.model import build_model

BLOCK_LENS = (32, 64, 128, 256, 512, 1024)


class TestLayerFlops:
    """Tests the layer_flops() function."""

    @pytest.mark.parametrize(
        "layer, expected",
        [
            (
                LayerSpec(kind=LayerKind.CONV1D, in_width=7, in_channels=2, out_channels=4, filter_len=3, stride=2),
                OpCount(multiplies=3 * 2 * 4 * 3, adds=3 * 3 * 4 * 3),
            ),
            (
                LayerSpec(kind=LayerKind.DENSE, in_width=5, in_channels=2, out_channels=3),
                OpCount(multiplies=30, adds=33),
            ),
            (
                LayerSpec(kind=LayerKind.LINEAR_OUT, in_width=2, in_channels=256, out_channels=1),
                OpCount(multiplies=512, adds=513),
            ),
            (LayerSpec(kind=LayerKind.AVG_POOL, in_width=9, in_channels=2, pool=2), OpCount(adds=16)),
            (LayerSpec(kind=LayerKind.RELU, in_width=9, in_channels=2), OpCount()),
            (LayerSpec(kind=LayerKind.MAX_POOL, in_width=9, in_channels=2, pool=3), OpCount()),
        ],
    )
    def test_formulas(self, layer: LayerSpec, expected: OpCount) -> None:
        """Test the per-layer formulas."""
        assert layer_flops(layer) == expected

    def test_in_width_override(self) -> None:
        """Test costing a layer at another input width."""
        layer = LayerSpec(kind=LayerKind.CONV1D, in_width=7, in_channels=1, out_channels=1, filter_len=2, stride=1)
        assert layer_flops(layer, in_width=11).multiplies == 2 * 10


class TestModelFlops:
    """Tests the model_flops() function."""

    def test_timing_default(self) -> None:
        """Test the default timing network total and that it is within a factor of 2 of 9.35 MFLOP."""
        total = model_flops(build_model(Task.TIMING)).total
        assert total == OpCount(multiplies=7_393_280, adds=7_665_537)
        assert 9.35 / 2 <= total.mflops <= 9.35 * 2

    @pytest.mark.parametrize("nsamp", BLOCK_LENS)
    def test_additive(self, nsamp: int) -> None:
        """Test that the model total is exactly the sum of its layers."""
        spec = build_model(Task.CFO, nsamp)
        assert model_flops(spec).total.total == sum(layer_flops(layer).total for layer in spec.layers)

    def test_sorted_by_share(self) -> None:
        """Test that rows are most expensive first and shares sum to 1."""
        breakdown = model_flops(build_model(Task.TIMING))
        totals = [row.count.total for row in breakdown.rows]
        assert totals == sorted(totals, reverse=True)
        assert breakdown.rows[0].name == "2:conv1d"
        assert sum(breakdown.share(row) for row in breakdown.rows) == pytest.approx(1.0)

    def test_empty(self) -> None:
        """Test that an empty model costs nothing."""
        breakdown = model_flops([])
        assert breakdown.total == OpCount()
        assert breakdown.rows == ()

    def test_cfo_grows_with_input(self) -> None:
        """Test that the cfo network cost grows with its input length."""
        rows = cfo_flop_table(BLOCK_LENS)
        nn = [row.nn_mflop for row in rows]
        assert nn == sorted(nn) and nn[0] < nn[-1]


class TestExpertCfoFlops:
    """Tests the expert_cfo_flops() function."""

    @pytest.mark.parametrize("n_fft, fft_flops", [(65536, 5_242_880), (131072, 11_141_120)])
    def test_fft_term(self, n_fft: int, fft_flops: int) -> None:
        """Test the 5·N·log2(N) FFT term."""
        rows = {row.name: row.count for row in expert_cfo_flops(1024, n_fft).rows}
        assert rows["fft"].total == fft_flops

    def test_components(self) -> None:
        """Test the m-th power and magnitude terms at 1024 samples."""
        rows = {row.name: row.count for row in expert_cfo_flops(1024, 2**16).rows}
        assert rows["mth_power"] == OpCount(multiplies=4 * 3 * 1024, adds=2 * 3 * 1024)
        assert rows["magnitude_argmax"] == OpCount(multiplies=2 * 2**16, adds=2**16)
        assert expert_cfo_flops(1024, 2**16).total.total == 5_457_920

    @pytest.mark.parametrize("n_input", BLOCK_LENS)
    def test_reference_total(self, n_input: int) -> None:
        """Test the total is within 5% of 5.374 MFLOP for every input length."""
        assert expert_cfo_flops(n_input, 2**16).total.mflops == pytest.approx(5.374, rel=0.05)

    def test_flat_in_input_length(self) -> None:
        """Test that the count barely moves from 32 to 1024 samples."""
        rows = cfo_flop_table(BLOCK_LENS)
        expert = [row.expert_mflop for row in rows]
        assert max(expert) / min(expert) < 1.01

    def test_search_bins(self) -> None:
        """Test that a narrower scan only changes the magnitude term."""
        rows = {row.name: row.count for row in expert_cfo_flops(32, 2**10, search_bins=100).rows}
        assert rows["magnitude_argmax"] == OpCount(multiplies=200, adds=100)

    @pytest.mark.parametrize("n_input, n_fft", [(32, 1000), (0, 64), (65, 64)])
    def test_invalid(self, n_input: int, n_fft: int) -> None:
        """Test that a bad FFT size or input length raises a ValueError."""
        with pytest.raises(ValueError):
            expert_cfo_flops(n_input, n_fft)


class TestExpertTimingFlops:
    """Tests the expert_timing_flops() function."""

    def test_valid(self) -> None:
        """Test the full-overlap multiply term for 1024 samples and a 256-sample template."""
        rows = {row.name: row.count for row in expert_timing_flops(1024, 256).rows}
        assert rows["correlation"].multiplies == 787_456
        assert rows["correlation"].adds == 2 * 769 * 256
        assert rows["magnitude_argmax"] == OpCount(multiplies=2 * 769, adds=769)

    def test_full_search(self) -> None:
        """Test the full-search convention is within 10% of 1.05165 MFLOP."""
        total = expert_timing_flops(1024, 256, MatchedFilterCounting.FULL_SEARCH).total
        assert total.total == 1_051_648
        assert total.mflops == pytest.approx(1.05165, rel=0.10)
        assert timing_flop_table().expert_mflop == total.mflops

    def test_single_tap(self) -> None:
        """Test that a 1-tap template costs 6 FLOPs per sample plus the magnitude."""
        total = expert_timing_flops(100, 1).total
        assert total == OpCount(multiplies=4 * 100 + 2 * 100, adds=2 * 100 + 100)

    def test_template_equals_input(self) -> None:
        """Test that a template as long as the input has one lag."""
        assert expert_timing_flops(256, 256).total == OpCount(multiplies=4 * 256 + 2, adds=2 * 256 + 1)

    @pytest.mark.parametrize("template_len", [0, 257])
    def test_invalid(self, template_len: int) -> None:
        """Test that an empty or too long template raises a ValueError."""
        with pytest.raises(ValueError):
            expert_timing_flops(256, template_len)


def test_write_breakdown_csv(tmp_path: Path) -> None:
    """Test the CSV columns and that rows match the breakdown."""
    breakdown = expert_cfo_flops(1024, 2**16)
    path = write_breakdown_csv(breakdown, tmp_path / "out" / "flops.csv")
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["layer", "mul", "add", "total"]
    assert rows[1:] == [[r.name, str(r.count.multiplies), str(r.count.adds), str(r.count.total)] for r in breakdown.rows]
