"""Analytic FLOP counts for the networks and the expert estimators.

Counting conventions:

- conv1d: L·ch_i·ch_o·K multiplies and L·(ch_i + 1)·ch_o·K adds.
- dense: N_i·N_o multiplies and (N_i + 1)·N_o adds.
- avg-pool: N_o·p adds, N_o being the number of output elements.
- ReLU and max-pool are comparisons and cost nothing.
- A complex multiply is 4 real multiplies and 2 real adds.
- A radix-2 FFT of size N costs 5·N·log2(N): 2·N·log2(N) multiplies and
  3·N·log2(N) adds.
"""

import csv
import math
from collections.abc import Iterable, Sequence
from pathlib import Path

from rich.table import Table

from syncbase.choices import LayerKind, MatchedFilterCounting, Task
from syncbase.models.complexity import CostBreakdown, CostRow, FlopTableRow, OpCount
from syncbase.models.network import LayerSpec, ModelSpec
from syncbase.nn.model import build_model
from syncbase.utils.validate import validate_is_power_of_2

CSV_COLUMNS = ("layer", "mul", "add", "total")


def layer_flops(layer: LayerSpec, in_width: int | None = None) -> OpCount:
    """The cost of one layer.

    Args:
        layer (LayerSpec): The layer.
        in_width (int | None, optional): Input width, if different from the layer's. Defaults to None.

    Returns:
        OpCount: The count.
    """
    if in_width is not None:
        layer = LayerSpec.model_validate(layer.model_dump() | {"in_width": in_width})
    k = layer.out_width
    match layer.kind:
        case LayerKind.CONV1D:
            taps = layer.filter_len * layer.out_channels_resolved * k  # type: ignore[operator]
            return OpCount(multiplies=taps * layer.in_channels, adds=taps * (layer.in_channels + 1))
        case LayerKind.DENSE | LayerKind.LINEAR_OUT:
            n_out = layer.out_channels_resolved
            return OpCount(multiplies=layer.in_size * n_out, adds=(layer.in_size + 1) * n_out)
        case LayerKind.AVG_POOL:
            return OpCount(adds=k * layer.in_channels * layer.pool)  # type: ignore[operator]
        case _:
            return OpCount()


def model_flops(model: ModelSpec | Sequence[LayerSpec]) -> CostBreakdown:
    """Per-layer costs of a network, most expensive first.

    Args:
        model (ModelSpec | Sequence[LayerSpec]): The network, or a bare list of layers.

    Returns:
        CostBreakdown: Rows named '<index>:<kind>'.
    """
    layers = model.layers if isinstance(model, ModelSpec) else model
    rows = tuple(CostRow(name=f"{i}:{layer.kind}", count=layer_flops(layer)) for i, layer in enumerate(layers))
    return CostBreakdown(rows=rows).by_share()


def expert_cfo_flops(n_input: int, n_fft: int, m: int = 4, search_bins: int | None = None) -> CostBreakdown:
    """Cost of the m-th power periodogram estimator.

    Args:
        n_input (int): Input samples.
        n_fft (int): FFT size.
        m (int, optional): Power the input is raised to. Defaults to 4.
        search_bins (int | None, optional): Bins scanned for the peak; all of them if None. Defaults to None.

    Raises:
        ValueError: If n_fft is not a power of two or is shorter than the input.

    Returns:
        CostBreakdown: Rows 'mth_power', 'fft' and 'magnitude_argmax'.
    """
    validate_is_power_of_2(n_fft)
    if not 0 < n_input <= n_fft:
        raise ValueError(f"Input of {n_input} samples does not fit an FFT of size {n_fft}.")
    stages = n_fft * int(math.log2(n_fft))
    bins = n_fft if search_bins is None else search_bins
    products = (m - 1) * n_input
    return CostBreakdown(
        rows=(
            CostRow(name="mth_power", count=OpCount(multiplies=4 * products, adds=2 * products)),
            CostRow(name="fft", count=OpCount(multiplies=2 * stages, adds=3 * stages)),
            CostRow(name="magnitude_argmax", count=OpCount(multiplies=2 * bins, adds=bins)),
        )
    )


def expert_timing_flops(
    n_samples: int,
    template_len: int,
    counting: MatchedFilterCounting = MatchedFilterCounting.VALID,
) -> CostBreakdown:
    """Cost of the matched-filter timing estimator.

    VALID correlates at the n_samples − template_len + 1 full-overlap lags with
    a complex multiply-accumulate (4 multiplies, 2 adds) per tap. FULL_SEARCH
    correlates at every one of the n_samples lags and counts only the 4 real
    multiplies of each complex product. Both add 2 multiplies and 1 add per lag
    for the magnitude.

    Args:
        n_samples (int): Received samples.
        template_len (int): Template samples.
        counting (MatchedFilterCounting, optional): The convention. Defaults to VALID.

    Raises:
        ValueError: If the template is empty or longer than the input.

    Returns:
        CostBreakdown: Rows 'correlation' and 'magnitude_argmax'.
    """
    if not 0 < template_len <= n_samples:
        raise ValueError(f"Template of {template_len} samples does not fit {n_samples} samples.")
    match counting:
        case MatchedFilterCounting.FULL_SEARCH:
            lags = n_samples
            correlation = OpCount(multiplies=4 * lags * template_len)
        case _:
            lags = n_samples - template_len + 1
            correlation = OpCount(multiplies=4 * lags * template_len, adds=2 * lags * template_len)
    return CostBreakdown(
        rows=(
            CostRow(name="correlation", count=correlation),
            CostRow(name="magnitude_argmax", count=OpCount(multiplies=2 * lags, adds=lags)),
        )
    )


def cfo_flop_table(block_lens: Iterable[int], n_fft: int = 2**16, m: int = 4) -> list[FlopTableRow]:
    """Expert and default cfo-network MFLOPs per block length."""
    return [
        FlopTableRow(
            block_len=n,
            expert_mflop=expert_cfo_flops(n, n_fft, m).total.mflops,
            nn_mflop=model_flops(build_model(Task.CFO, n)).total.mflops,
        )
        for n in block_lens
    ]


def timing_flop_table(
    n_samples: int = 1024,
    template_len: int = 256,
    counting: MatchedFilterCounting = MatchedFilterCounting.FULL_SEARCH,
) -> FlopTableRow:
    """Matched-filter and default timing-network MFLOPs."""
    return FlopTableRow(
        block_len=n_samples,
        expert_mflop=expert_timing_flops(n_samples, template_len, counting).total.mflops,
        nn_mflop=model_flops(build_model(Task.TIMING)).total.mflops,
    )


def breakdown_table(breakdown: CostBreakdown, title: str) -> Table:
    """Render a breakdown with each component's share of the total."""
    table = Table(title=title)
    for column in (*CSV_COLUMNS, "share"):
        table.add_column(column, justify="left" if column == "layer" else "right")
    for row in breakdown.rows:
        c = row.count
        table.add_row(row.name, f"{c.multiplies:,}", f"{c.adds:,}", f"{c.total:,}", f"{breakdown.share(row):.1%}")
    total = breakdown.total
    table.add_row("total", f"{total.multiplies:,}", f"{total.adds:,}", f"{total.total:,}", "100.0%", style="bold")
    table.caption = "ReLU and max-pool comparisons are not counted."
    return table


def flop_table(rows: Sequence[FlopTableRow], title: str) -> Table:
    """Render expert-versus-network MFLOPs."""
    table = Table(title=title)
    for column in ("len", "expert MFLOP", "nn MFLOP"):
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(str(row.block_len), f"{row.expert_mflop:.4g}", f"{row.nn_mflop:.4g}")
    return table


def write_breakdown_csv(breakdown: CostBreakdown, path: Path) -> Path:
    """Write a breakdown as CSV with columns layer, mul, add, total.

    Args:
        breakdown (CostBreakdown): The counts.
        path (Path): The destination.

    Returns:
        Path: The written file.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in breakdown.rows:
            writer.writerow((row.name, row.count.multiplies, row.count.adds, row.count.total))
    return path
