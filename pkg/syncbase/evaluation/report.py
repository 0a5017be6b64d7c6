"""Comparison of sweep results across channel conditions."""

import math
from collections.abc import Iterable
from pathlib import Path

from rich.table import Table

from syncbase.errors import EvaluationError
from syncbase.evaluation.sweep import read_sweep_csv
from syncbase.functional import first_true
from syncbase.models.evaluation import ComparisonReport, RatioRow, SweepKey, SweepRow, WinnerRow

REFERENCE_CHANNEL = "awgn"


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return 1.0 if num == 0 else math.inf
    return num / den


def _winner(row: SweepRow) -> str:
    if row.ml is None:
        return "n/a"
    if row.ml == row.expert:
        return "tie"
    return "ml" if row.ml < row.expert else "expert"


def compare_sweeps(sweeps: dict[SweepKey, list[SweepRow]]) -> ComparisonReport:
    """Degradation of each estimator from AWGN to every fading channel.

    Args:
        sweeps (dict[SweepKey, list[SweepRow]]): Parsed sweep files.

    Raises:
        EvaluationError: If fewer than two channels or several tasks are present,
            AWGN is missing, or channels at one SNR cover different block lengths.

    Returns:
        ComparisonReport: Ratios fading/AWGN per (channel, SNR, block length) and the winner of every cell.
    """
    tasks = {k.task for k in sweeps}
    if len(tasks) != 1:
        raise EvaluationError(f"Sweeps cover {len(tasks)} tasks; compare one task at a time.")
    channels = {k.channel for k in sweeps}
    if len(channels) < 2:
        raise EvaluationError("A comparison needs at least two channel conditions.")
    if REFERENCE_CHANNEL not in channels:
        raise EvaluationError("A comparison needs the AWGN sweep as its reference.")

    ratios, winners = [], []
    for key in sorted(sweeps, key=lambda k: (k.channel, k.snr_db)):
        rows = sweeps[key]
        winners += [WinnerRow(channel=key.channel, snr_db=key.snr_db, len=r.len, winner=_winner(r)) for r in rows]
        if key.channel == REFERENCE_CHANNEL:
            continue
        reference_key = first_true(
            sweeps, predicate=lambda k: k.channel == REFERENCE_CHANNEL and k.snr_db == key.snr_db
        )
        if reference_key is None:
            raise EvaluationError(f"No AWGN sweep at {key.snr_db:g} dB to compare {key.channel} against.")
        reference = {r.len: r for r in sweeps[reference_key]}
        if sorted(reference) != sorted(r.len for r in rows):
            raise EvaluationError(f"{key.file_name} and {reference_key.file_name} cover different block lengths.")
        for row in rows:
            ref = reference[row.len]
            ml_ratio = None if row.ml is None or ref.ml is None else _ratio(row.ml, ref.ml)
            ratios.append(
                RatioRow(
                    channel=key.channel,
                    snr_db=key.snr_db,
                    len=row.len,
                    ml_ratio=ml_ratio,
                    expert_ratio=_ratio(row.expert, ref.expert),
                )
            )
    return ComparisonReport(task=tasks.pop(), ratios=tuple(ratios), winners=tuple(winners))


def compare_report(paths: Iterable[Path]) -> ComparisonReport:
    """Read sweep files and compare them, see `compare_sweeps`."""
    return compare_sweeps({SweepKey.from_file_name(p.name): read_sweep_csv(p) for p in paths})


def report_table(report: ComparisonReport) -> Table:
    """Render the degradation ratios."""
    table = Table(title=f"{report.task}: error ratio fading / awgn")
    for column in ("channel", "snr", "len", "ml", "expert"):
        table.add_column(column, justify="left" if column == "channel" else "right")
    for r in report.ratios:
        ml = "" if r.ml_ratio is None else f"{r.ml_ratio:.3g}"
        table.add_row(r.channel, f"{r.snr_db:g}", str(r.len), ml, f"{r.expert_ratio:.3g}")
    return table


def write_report_csv(report: ComparisonReport, path: Path) -> Path:
    """Write ratios and winners as one CSV keyed by channel, SNR and block length."""
    winners = {(w.channel, w.snr_db, w.len): w.winner for w in report.winners}
    lines = ["channel,snr,len,ml_ratio,expert_ratio,winner"]
    for r in report.ratios:
        ml = "" if r.ml_ratio is None else repr(r.ml_ratio)
        lines.append(
            f"{r.channel},{r.snr_db:g},{r.len},{ml},{r.expert_ratio!r},{winners[(r.channel, r.snr_db, r.len)]}"
        )
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path
