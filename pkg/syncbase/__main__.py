"""The syncbase command line: generate, train, eval and flops."""

import functools
from collections.abc import Callable
from datetime import UTC, datetime
from pathlib import Path
from typing import Annotated, Any, ParamSpec, TypeVar

import typer
from pydantic import ValidationError
from rich.console import Console

from syncbase import __version__
from syncbase.choices import (
    FlopsTarget,
    Loss,
    MatchedFilterCounting,
    Metric,
    Precision,
    Profile,
    Split,
    Task,
)
from syncbase.complexity import (
    breakdown_table,
    cfo_flop_table,
    expert_cfo_flops,
    expert_timing_flops,
    flop_table,
    model_flops,
    timing_flop_table,
    write_breakdown_csv,
)
from syncbase.datasets.grid import (
    DEFAULT_CHANNELS,
    DEFAULT_SNRS_DB,
    PROFILE_SIZES,
    generate_grid,
    grid_headers,
)
from syncbase.errors import ConfigError, DataError, DatasetExistsError, SyncbaseError
from syncbase.evaluation.report import compare_report, report_table, write_report_csv
from syncbase.evaluation.sweep import DEFAULT_BLOCK_LENS, ModelRegistry, model_name, run_sweep
from syncbase.expert import CfoExpertConfig
from syncbase.log import configure_logging, get_logger
from syncbase.manifest import append_manifest, build_manifest
from syncbase.models.commands import EvalOptions, FlopsOptions, GenerateOptions, TrainOptions
from syncbase.models.complexity import CostBreakdown
from syncbase.models.network import Hyperparameters, ModelHeader, ModelSpec, TrainConfig
from syncbase.nn.model import build_model
from syncbase.nn.serialize import save_model
from syncbase.nn.train import ArrayDataset, TrainResult, train
from syncbase.settings import Settings, load_settings

app = typer.Typer(
    name="syncbase",
    help="Learned and expert CFO / timing estimators for QPSK bursts.",
    add_completion=False,
    no_args_is_help=True,
)
console = Console()
err_console = Console(stderr=True)
logger = get_logger(__name__)

P = ParamSpec("P")
R = TypeVar("R")

ConfigOpt = Annotated[Path | None, typer.Option("--config", help="Flat key = value config file.")]
LogLevelOpt = Annotated[str | None, typer.Option("--log-level", help="Log level [default: INFO].")]
ThreadsOpt = Annotated[int | None, typer.Option("--threads", help="Upper bound on worker threads [default: 1].")]
SeedOpt = Annotated[int | None, typer.Option("--seed", help="Global seed [default: 0].")]
ForceOpt = Annotated[bool, typer.Option("--force", help="Overwrite existing outputs.")]
BlockLenOpt = Annotated[
    list[int] | None, typer.Option("--block-len", help=f"Block length, repeatable [default: {DEFAULT_BLOCK_LENS}].")
]
SnrOpt = Annotated[
    list[float] | None, typer.Option("--snr", help=f"SNR in dB, repeatable [default: {DEFAULT_SNRS_DB}].")
]
ChannelOpt = Annotated[
    list[str] | None, typer.Option("--channel", help=f"Channel name, repeatable [default: {DEFAULT_CHANNELS}].")
]
MaxPoolAfterOpt = Annotated[
    list[int] | None,
    typer.Option("--max-pool-after", help="Timing stage (0-3) followed by max-pooling, repeatable [default: 3]."),
]


def exits_on_error(f: Callable[P, R]) -> Callable[P, R]:
    """Report syncbase errors on one line and exit with their code."""

    @functools.wraps(f)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
        try:
            return f(*args, **kwargs)
        except SyncbaseError as e:
            err_console.print(f"[bold red]error:[/] {e}")
            raise typer.Exit(int(e.exit_code)) from e
        except ValidationError as e:
            err_console.print(f"[bold red]configuration error:[/] {e}")
            raise typer.Exit(int(ConfigError.exit_code)) from e

    return wrapper


def _configure_runtime(settings: Settings) -> Settings:
    configure_logging(settings.log_level)
    return settings


def _settings(config: Path | None, **overrides: Any) -> Settings:
    return load_settings(config, **overrides) | _configure_runtime


def _network_spec(
    task: Task,
    nsamp: int | None = None,
    max_pool: int | None = None,
    max_pool_after: tuple[int, ...] = (),
) -> ModelSpec:
    """Build a network from command-line overrides, reporting bad ones as configuration errors."""
    if task == Task.CFO and (max_pool or max_pool_after):
        raise ConfigError("--max-pool and --max-pool-after apply to the timing network only.")
    if max_pool_after and not max_pool:
        raise ConfigError("--max-pool-after needs --max-pool.")
    hyper = Hyperparameters(max_pool=max_pool, max_pool_after=max_pool_after) if max_pool else None
    try:
        return build_model(task, nsamp, hyper)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _record(
    command: str,
    out_dir: Path,
    config: dict[str, Any],
    seed: int,
    artifacts: list[Path],
    started: datetime,
) -> None:
    path = append_manifest(out_dir, build_manifest(command, config, seed, artifacts, started))
    logger.info(f"Recorded run in {path}.")


@app.command()
@exits_on_error
def generate(
    task: Annotated[Task, typer.Option("--task", help="The estimation task.")],
    block_len: BlockLenOpt = None,
    snr: SnrOpt = None,
    channel: ChannelOpt = None,
    n: Annotated[int | None, typer.Option("--n", help="Training examples per cell [default: profile].")] = None,
    n_val: Annotated[int | None, typer.Option("--n-val", help="Validation examples per cell [default: n/10].")] = None,
    n_test: Annotated[int | None, typer.Option("--n-test", help="Test examples per cell [default: n/10].")] = None,
    profile: Annotated[Profile | None, typer.Option("--profile", help="Size profile [default: desk].")] = None,
    seed: SeedOpt = None,
    out: Annotated[Path | None, typer.Option("--out", help="Output directory [default: data].")] = None,
    force: ForceOpt = False,
    threads: ThreadsOpt = None,
    config: ConfigOpt = None,
    log_level: LogLevelOpt = None,
) -> None:
    """Generate train/val/test dataset files for every grid cell."""
    started = datetime.now(UTC)
    settings = _settings(config, seed=seed, threads=threads, log_level=log_level, data_dir=out, profile=profile)
    n_train, n_val_default, n_test_default = PROFILE_SIZES[Profile(settings.profile)]
    if n is not None:
        n_val_default = n_test_default = max(1, n // 10)
    opts = GenerateOptions(
        task=task,
        block_len=tuple(block_len or DEFAULT_BLOCK_LENS),
        snr=tuple(snr or DEFAULT_SNRS_DB),
        channel=tuple(channel or DEFAULT_CHANNELS),
        n=n if n is not None else n_train,
        n_val=n_val if n_val is not None else n_val_default,
        n_test=n_test if n_test is not None else n_test_default,
        seed=settings.seed,
        out=settings.data_dir,
        force=force,
        threads=settings.threads,
        profile=settings.profile,
    )
    sizes = {Split.TRAIN: opts.n, Split.VAL: opts.n_val, Split.TEST: opts.n_test}
    headers = grid_headers(opts.task, opts.block_len, opts.snr, opts.channel, sizes, opts.seed)
    paths = generate_grid(headers, opts.out, force=opts.force, threads=opts.threads)
    console.print(f"Wrote {len(paths)} dataset files to {opts.out}.")
    _record("generate", opts.out, opts.model_dump(mode="json"), opts.seed, paths, started)


def _history_csv(result: TrainResult, path: Path) -> Path:
    lines = ["epoch,train_loss,val_loss,lr"]
    lines += [f"{r.epoch},{r.train_loss!r},{r.val_loss!r},{r.lr!r}" for r in result.history]
    path.write_text("\n".join(lines) + "\n")
    return path


@app.command("train")
@exits_on_error
def train_command(
    train_path: Annotated[Path, typer.Option("--train", help="Training partition file.")],
    val: Annotated[Path, typer.Option("--val", help="Validation partition file.")],
    loss: Annotated[Loss | None, typer.Option("--loss", help="Regression loss [default: mse].")] = None,
    seed: SeedOpt = None,
    epochs: Annotated[int | None, typer.Option("--epochs", help="Epochs [default: 100].")] = None,
    batch_size: Annotated[int | None, typer.Option("--batch-size", help="Batch size [default: 256].")] = None,
    lr: Annotated[float | None, typer.Option("--lr", help="Initial learning rate [default: 0.001].")] = None,
    precision: Annotated[Precision, typer.Option("--precision", help="Tensor precision.")] = Precision.FLOAT32,
    max_pool: Annotated[int | None, typer.Option("--max-pool", help="Max-pool size (timing network).")] = None,
    max_pool_after: MaxPoolAfterOpt = None,
    out: Annotated[Path | None, typer.Option("--out", help="Model file [default: named after the cell].")] = None,
    force: ForceOpt = False,
    threads: ThreadsOpt = None,
    config: ConfigOpt = None,
    log_level: LogLevelOpt = None,
) -> None:
    """Train an estimator network on one grid cell."""
    started = datetime.now(UTC)
    settings = _settings(
        config,
        seed=seed,
        threads=threads,
        log_level=log_level,
        epochs=epochs,
        batch_size=batch_size,
        lr_init=lr,
        loss=loss,
    )
    opts = TrainOptions(
        train=train_path,
        val=val,
        loss=settings.loss,
        seed=settings.seed,
        epochs=settings.epochs,
        batch_size=settings.batch_size,
        lr=settings.lr_init,
        precision=precision,
        threads=settings.threads,
        out=out,
        force=force,
        max_pool=max_pool,
        max_pool_after=tuple(max_pool_after or ()),
    )
    train_set, val_set = ArrayDataset.from_file(opts.train), ArrayDataset.from_file(opts.val)
    header = train_set.header
    if header is None:
        raise DataError(f"{opts.train} has no dataset header.")
    spec = _network_spec(header.task, header.block_len, opts.max_pool, opts.max_pool_after)
    model_path = opts.out or settings.model_dir / model_name(
        header.task, header.channel.name, header.snr_db, header.block_len
    )
    if model_path.exists() and not opts.force:
        raise DatasetExistsError(f"{model_path} exists; pass --force to overwrite.")
    cfg = TrainConfig(
        loss=opts.loss,
        epochs=opts.epochs,
        batch_size=opts.batch_size,
        lr_init=opts.lr,
        seed=opts.seed,
        precision=opts.precision,
        threads=opts.threads,
    )
    result = train(spec, train_set, val_set, cfg)
    model_header = ModelHeader(
        spec=spec,
        train=cfg,
        precision=cfg.precision,
        channel=header.channel.name,
        snr_db=header.snr_db,
        block_len=header.block_len,
        best_epoch=result.best_epoch,
        software_version=__version__,
    )
    saved = save_model(model_path, model_header, result.params)
    history = _history_csv(result, saved.with_name(f"{saved.stem}_history.csv"))
    console.print(
        f"Best validation loss {result.best_val_loss:.6g} at epoch {result.best_epoch}; model written to {saved}."
    )
    _record("train", saved.parent, opts.model_dump(mode="json"), opts.seed, [saved, history], started)


@app.command("eval")
@exits_on_error
def eval_command(
    task: Annotated[Task, typer.Option("--task", help="The estimation task.")],
    data_dir: Annotated[Path | None, typer.Option("--data-dir", help="Test partitions [default: data].")] = None,
    model_dir: Annotated[Path | None, typer.Option("--model-dir", help="Trained models [default: models].")] = None,
    out: Annotated[Path | None, typer.Option("--out", help="Output directory [default: results].")] = None,
    block_len: BlockLenOpt = None,
    snr: SnrOpt = None,
    channel: ChannelOpt = None,
    expert_only: Annotated[bool, typer.Option("--expert-only", help="Skip the learned estimators.")] = False,
    n_fft: Annotated[int | None, typer.Option("--n-fft", help="Expert CFO FFT size [default: 131072].")] = None,
    metric: Annotated[Metric, typer.Option("--metric", help="Statistic written to the CSVs.")] = Metric.STD,
    save_residuals: Annotated[bool, typer.Option("--save-residuals", help="Also write residuals and cfo expert spectra.")] = False,
    threads: ThreadsOpt = None,
    config: ConfigOpt = None,
    log_level: LogLevelOpt = None,
) -> None:
    """Sweep both estimators over the grid and compare channel conditions."""
    started = datetime.now(UTC)
    settings = _settings(
        config,
        threads=threads,
        log_level=log_level,
        data_dir=data_dir,
        model_dir=model_dir,
        output_dir=out,
        n_fft=n_fft,
    )
    opts = EvalOptions(
        task=task,
        data_dir=settings.data_dir,
        model_dir=settings.model_dir,
        out=settings.output_dir,
        block_len=tuple(block_len or DEFAULT_BLOCK_LENS),
        snr=tuple(snr or DEFAULT_SNRS_DB),
        channel=tuple(channel or DEFAULT_CHANNELS),
        expert_only=expert_only,
        n_fft=settings.n_fft,
        metric=metric,
        threads=settings.threads,
        save_residuals=save_residuals,
    )
    paths = run_sweep(
        opts.task,
        opts.data_dir,
        opts.out,
        block_lens=opts.block_len,
        channels=opts.channel,
        snrs_db=opts.snr,
        registry=None if opts.expert_only else ModelRegistry.from_dir(opts.model_dir),
        expert_cfg=CfoExpertConfig(n_fft=opts.n_fft),
        metric=opts.metric,
        threads=opts.threads,
        residual_dir=opts.out / "residuals" if opts.save_residuals else None,
    )
    artifacts = list(paths)
    if len(set(opts.channel)) > 1 and "awgn" in opts.channel:
        report = compare_report(paths)
        console.print(report_table(report))
        artifacts.append(write_report_csv(report, opts.out / f"{opts.task}_report.csv"))
    console.print(f"Wrote {len(paths)} sweep files to {opts.out}.")
    _record("eval", opts.out, opts.model_dump(mode="json"), settings.seed, artifacts, started)


def _breakdown(opts: FlopsOptions) -> tuple[str, CostBreakdown]:
    match opts.target:
        case FlopsTarget.CFO:
            spec = _network_spec(Task.CFO, opts.nsamp, opts.max_pool, opts.max_pool_after)
            return f"cfo network, nsamp={opts.nsamp}", model_flops(spec)
        case FlopsTarget.TIMING:
            spec = _network_spec(Task.TIMING, max_pool=opts.max_pool, max_pool_after=opts.max_pool_after)
            return "timing network", model_flops(spec)
        case FlopsTarget.EXPERT_CFO:
            return (
                f"expert cfo, n_fft={opts.n_fft}",
                expert_cfo_flops(opts.nsamp, opts.n_fft, opts.m),
            )
        case _:
            counting = opts.counting or MatchedFilterCounting.VALID
            return (
                f"matched filter ({counting})",
                expert_timing_flops(opts.n_samples, opts.template_len, counting),
            )


@app.command()
@exits_on_error
def flops(
    target: Annotated[FlopsTarget, typer.Option("--target", help="What to cost.")] = FlopsTarget.TABLES,
    nsamp: Annotated[int, typer.Option("--nsamp", help="cfo network / expert input length.")] = 1024,
    max_pool: Annotated[int | None, typer.Option("--max-pool", help="Max-pool size (timing network).")] = None,
    max_pool_after: MaxPoolAfterOpt = None,
    n_fft: Annotated[int, typer.Option("--n-fft", help="Expert CFO FFT size.")] = 2**16,
    m: Annotated[int, typer.Option("--m", help="Expert CFO power.")] = 4,
    n_samples: Annotated[int, typer.Option("--n-samples", help="Matched-filter input samples.")] = 1024,
    template_len: Annotated[int, typer.Option("--template-len", help="Matched-filter template samples.")] = 256,
    counting: Annotated[
        MatchedFilterCounting | None,
        typer.Option("--counting", help="Matched-filter counting [default: valid, full_search for tables]."),
    ] = None,
    csv: Annotated[Path | None, typer.Option("--csv", help="Also write the breakdown as CSV.")] = None,
    config: ConfigOpt = None,
    log_level: LogLevelOpt = None,
) -> None:
    """Print analytic FLOP counts of the networks and expert estimators."""
    started = datetime.now(UTC)
    settings = _settings(config, log_level=log_level)
    opts = FlopsOptions(
        target=target,
        nsamp=nsamp,
        max_pool=max_pool,
        max_pool_after=tuple(max_pool_after or ()),
        n_fft=n_fft,
        m=m,  # type: ignore[arg-type]
        n_samples=n_samples,
        template_len=template_len,
        counting=counting,
        csv=csv,
    )
    if opts.target not in (FlopsTarget.CFO, FlopsTarget.TIMING) and (opts.max_pool or opts.max_pool_after):
        raise ConfigError(f"--max-pool does not apply to the {opts.target} target.")
    if opts.target == FlopsTarget.TABLES:
        cfo_rows = cfo_flop_table(DEFAULT_BLOCK_LENS, n_fft=opts.n_fft, m=opts.m)
        timing_row = timing_flop_table(
            opts.n_samples, opts.template_len, opts.counting or MatchedFilterCounting.FULL_SEARCH
        )
        console.print(flop_table(cfo_rows, "CFO estimators"))
        console.print(flop_table([timing_row], "Timing estimators"))
        return
    title, breakdown = _breakdown(opts)
    console.print(breakdown_table(breakdown, title))
    if opts.csv is not None:
        written = write_breakdown_csv(breakdown, opts.csv)
        _record("flops", written.parent, opts.model_dump(mode="json"), settings.seed, [written], started)


@app.command()
def version() -> None:
    """Print the syncbase version."""
    console.print(__version__)


if __name__ == "__main__":
    app()
