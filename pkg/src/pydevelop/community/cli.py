"""Command-line interface for pydevelop-community.

JSON results go to stdout; tables, progress and logs go to stderr. Every
failure ends in a single ``error: <kind>: <message>`` line on stderr and a
non-zero exit code (2 usage, 3 dataset, 4 numeric).
"""

import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import click
from rich.console import Console
from rich.logging import RichHandler

from .assignment import load_partition
from .commands import (
    MODE_METHODS,
    BenchCommand,
    DetectCommand,
    EvaluateCommand,
    GenerateCommand,
    SweepCommand,
    ValidateCommand,
    Workload,
    shared_workloads,
    synthetic_workloads,
)
from .config import load_default_map
from .dataset import dumps_canonical, load_dataset
from .display import EnhancedDisplay
from .errors import CommunityError, ConfigError, DatasetValidationError
from .fusion import FusionConfig, FusionMode
from .interactive import run_interactive
from .methods import METHOD_NAMES
from .synth import SOURCE_ORDER, SynthConfig

PACKAGE_LOGGER = "pydevelop.community"


def configure_logging(debug: bool = False, quiet: bool = False) -> None:
    """Send package logs to stderr through rich, replacing earlier handlers."""
    level = logging.DEBUG if debug else logging.WARNING if quiet else logging.INFO
    logger = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)
    handler = RichHandler(
        console=Console(stderr=True), show_path=False, rich_tracebacks=debug
    )
    handler.setLevel(level)
    logger.addHandler(handler)
    logger.setLevel(level)


def emit(payload: Any) -> None:
    """Write a JSON payload to stdout."""
    click.echo(dumps_canonical(payload), nl=False)


def _split(values: Sequence[str]) -> List[str]:
    return [part.strip() for value in values for part in str(value).split(",") if part.strip()]


def _split_strings(ctx, param, values) -> List[str]:
    return _split(values or ())


def _split_ints(ctx, param, values) -> List[int]:
    try:
        return [int(v) for v in _split(values or ())]
    except ValueError:
        raise click.BadParameter("expected integers, e.g. 1,2,3")


def _parse_noise(ctx, param, values) -> Dict[str, float]:
    noise: Dict[str, float] = {}
    for item in _split(values or ()):
        source, sep, rate = item.partition("=")
        source = source.strip().lower()
        if not sep or source not in SOURCE_ORDER:
            raise click.BadParameter(
                f"{item!r}: expected SOURCE=RATE with SOURCE in {', '.join(SOURCE_ORDER)}"
            )
        try:
            noise[source] = float(rate)
        except ValueError:
            raise click.BadParameter(f"{item!r}: rate must be a number")
    return noise


def _apply(options: Sequence[Callable]) -> Callable:
    def decorator(f):
        for option in reversed(options):
            f = option(f)
        return f

    return decorator


def dataset_options(required: bool = True) -> Callable:
    return _apply(
        [
            click.option(
                "--esn",
                "esn_path",
                type=click.Path(dir_okay=False, path_type=Path),
                required=required,
                help="ESN graph JSON (users, groups, posts and their links)",
            ),
            click.option(
                "--chart",
                "chart_path",
                type=click.Path(dir_okay=False, path_type=Path),
                required=required,
                help="Organizational chart JSON",
            ),
            click.option(
                "--alignment",
                "alignment_path",
                type=click.Path(dir_okay=False, path_type=Path),
                help="Explicit user-to-employee alignment JSON (default: equal ids)",
            ),
        ]
    )


fusion_options = _apply(
    [
        click.option("--alpha", type=click.FloatRange(min=0), default=1.0, show_default=True,
                     help="Intra-fusion weight (relaxed mode)"),
        click.option("--beta", type=click.FloatRange(min=0), default=1.0, show_default=True,
                     help="Inter-fusion weight coupling ESN and company factors"),
        click.option("--eta", type=click.FloatRange(min=0, min_open=True), default=0.05,
                     show_default=True, help="Initial step size"),
        click.option("--max-iters", type=click.IntRange(min=1), default=300,
                     show_default=True),
        click.option("--tol", type=click.FloatRange(min=0, min_open=True), default=1e-4,
                     show_default=True, help="Relative objective change to stop at"),
        click.option("--no-normalize", is_flag=True,
                     help="Skip per-source max normalization of the intimacy matrices"),
        click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True,
                     help="Threads for intimacy kernels and benchmark cells"),
    ]
)

synth_options = _apply(
    [
        click.option("--n", "n", type=click.IntRange(min=1), default=120, show_default=True,
                     help="Number of employees"),
        click.option("--k-true", type=click.IntRange(min=2), default=4, show_default=True,
                     help="Number of planted communities"),
        click.option("--p-in", type=click.FloatRange(0, 1), default=0.3, show_default=True,
                     help="Follow probability inside a community"),
        click.option("--p-out", type=click.FloatRange(0, 1), default=0.02, show_default=True,
                     help="Follow probability across communities"),
        click.option("--esn-fraction", type=click.FloatRange(0, 1, min_open=True), default=1.0,
                     show_default=True, help="Share of employees with an ESN account"),
        click.option("--groups-per-community", type=click.IntRange(min=0), default=3,
                     show_default=True),
        click.option("--group-join", type=click.FloatRange(0, 1), default=0.5,
                     show_default=True),
        click.option("--group-noise", type=click.FloatRange(0, 1), default=0.1,
                     show_default=True),
        click.option("--posts-per-community", type=click.IntRange(min=0), default=20,
                     show_default=True),
        click.option("--post-engagement", type=click.FloatRange(0, 1), default=0.3,
                     show_default=True),
        click.option("--post-noise", type=click.FloatRange(0, 1), default=0.1,
                     show_default=True),
        click.option("--title-vocab-per-community", type=click.IntRange(min=1), default=2,
                     show_default=True),
        click.option("--country-count", type=click.IntRange(min=1), default=4,
                     show_default=True),
        click.option("--zone-count", type=click.IntRange(min=1), default=6,
                     show_default=True),
        click.option("--skew", type=click.FloatRange(min=0, min_open=True), default=1.0,
                     show_default=True, help="Geometric ratio between community sizes"),
        click.option("--noise", multiple=True, callback=_parse_noise,
                     metavar="SOURCE=RATE",
                     help="Corrupt one source (social, group, post, chart, title, workplace)"),
    ]
)

_SYNTH_FIELDS = (
    "n", "k_true", "p_in", "p_out", "esn_fraction", "groups_per_community",
    "group_join", "group_noise", "posts_per_community", "post_engagement",
    "post_noise", "title_vocab_per_community", "country_count", "zone_count", "skew",
)


def _synth_config(params: Dict[str, Any], seed: int) -> SynthConfig:
    values = {name: params[name] for name in _SYNTH_FIELDS}
    return SynthConfig(source_noise=params["noise"], seed=seed, **values)


def _fusion_config(params: Dict[str, Any], k: int, seed: int, mode: str = "joint") -> FusionConfig:
    return FusionConfig(
        k=k,
        alpha=params["alpha"],
        beta=params["beta"],
        eta=params["eta"],
        max_iters=params["max_iters"],
        tol=params["tol"],
        seed=seed,
        mode=FusionMode.ALPHA_RELAXED if mode == "relaxed" else FusionMode.JOINT,
    )


def _display(ctx: click.Context) -> EnhancedDisplay:
    return ctx.find_object(EnhancedDisplay) or EnhancedDisplay()


@click.group(invoke_without_command=True)
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Option defaults from a .yaml, .toml or key=value file",
)
@click.option("--debug", is_flag=True, help="Show debug logs")
@click.option("--quiet", "-q", is_flag=True, help="Only warnings and JSON output")
@click.pass_context
def cli(ctx, config_path, debug, quiet):
    """Community detection over an enterprise social network and org chart.

    Run without arguments for interactive mode.
    """
    configure_logging(debug=debug, quiet=quiet)
    ctx.obj = EnhancedDisplay(quiet=quiet, debug=debug)
    if config_path is not None:
        ctx.default_map = load_default_map(cli, config_path)
        ctx.obj.debug(f"Option defaults loaded from {config_path}")
    if ctx.invoked_subcommand is None:
        run_interactive(ctx.obj)


@cli.command()
@synth_options
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path),
              required=True, help="Directory for esn.json, chart.json and truth.json")
@click.pass_context
def generate(ctx, seed, out_dir, **params):
    """Generate a synthetic enterprise with planted communities."""
    cfg = _synth_config(params, seed)
    emit(GenerateCommand(_display(ctx)).run(cfg, out_dir))


@cli.command()
@dataset_options()
@fusion_options
@click.option("--k", type=click.IntRange(min=2), default=4, show_default=True,
              help="Number of communities")
@click.option("--mode", type=click.Choice(list(MODE_METHODS)), default="joint",
              show_default=True, help="Which sources the solver fuses")
@click.option("--method", default=None,
              help=f"Run another registered method instead ({', '.join(METHOD_NAMES)})")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path),
              required=True, help="Directory for partition.json and trace.json")
@click.option("--dump-matrices", is_flag=True, help="Also write the six intimacy matrices")
@click.pass_context
def detect(ctx, esn_path, chart_path, alignment_path, k, mode, method, seed, out_dir,
           dump_matrices, **params):
    """Detect communities and write partition.json plus trace.json."""
    dataset = load_dataset(esn_path, chart_path, alignment_path)
    cfg = _fusion_config(params, k, seed, mode)
    summary = DetectCommand(_display(ctx)).run(
        dataset,
        cfg,
        method or MODE_METHODS[mode],
        out_dir,
        normalized=not params["no_normalize"],
        workers=params["workers"],
        dump_matrices=dump_matrices,
    )
    emit(summary)


@cli.command()
@dataset_options()
@click.option("--pred", "pred_path", type=click.Path(dir_okay=False, path_type=Path),
              required=True, help="Predicted partition JSON")
@click.option("--truth", "truth_path", type=click.Path(dir_okay=False, path_type=Path),
              help="Ground-truth partition JSON")
@click.pass_context
def evaluate(ctx, esn_path, chart_path, alignment_path, pred_path, truth_path):
    """Score a partition; ground-truth metrics need --truth."""
    dataset = load_dataset(esn_path, chart_path, alignment_path)
    pred = load_partition(pred_path)
    truth = load_partition(truth_path) if truth_path is not None else None
    emit(EvaluateCommand(_display(ctx)).run(dataset, pred, truth))


@cli.command()
@dataset_options(required=False)
@click.option("--truth", "truth_path", type=click.Path(dir_okay=False, path_type=Path),
              help="Ground truth for an on-disk dataset")
@synth_options
@fusion_options
@click.option("--k", type=click.IntRange(min=2), default=4, show_default=True)
@click.option("--methods", multiple=True, callback=_split_strings,
              help="Comma-separated method names (default: all)")
@click.option("--seeds", multiple=True, callback=_split_ints,
              help="Comma-separated seeds (default: 0)")
@click.pass_context
def bench(ctx, esn_path, chart_path, alignment_path, truth_path, k, methods, seeds, **params):
    """Compare methods over several seeds; reports the median of each metric.

    With --esn/--chart every seed reruns the methods on that dataset. Without
    them one synthetic dataset is generated per seed from the generator options.
    """
    methods = methods or list(METHOD_NAMES)
    seeds = list(dict.fromkeys(seeds or [0]))
    workers = params["workers"]
    if (esn_path is None) != (chart_path is None):
        raise click.UsageError("--esn and --chart go together")

    if esn_path is not None:
        dataset = load_dataset(esn_path, chart_path, alignment_path)
        truth = load_partition(truth_path) if truth_path is not None else None
        workload = Workload.prepare(
            dataset, truth, normalized=not params["no_normalize"], workers=workers
        )
        workloads = shared_workloads(workload, seeds)
    else:
        if truth_path is not None:
            raise click.UsageError("--truth needs --esn and --chart")
        workloads = synthetic_workloads(_synth_config(params, seeds[0]), seeds, workers)

    cfg = _fusion_config(params, k, seeds[0])
    emit(BenchCommand(_display(ctx)).run(workloads, methods, cfg, workers))


@cli.command()
@dataset_options()
@fusion_options
@click.option("--ks", multiple=True, callback=_split_ints,
              help="Comma-separated community numbers (default: 2,3,4,5,6)")
@click.option("--methods", multiple=True, callback=_split_strings,
              help="Comma-separated method names (default: humor)")
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def sweep(ctx, esn_path, chart_path, alignment_path, ks, methods, seed, **params):
    """Intrinsic metrics of each method across community numbers."""
    ks = list(dict.fromkeys(ks or [2, 3, 4, 5, 6]))
    methods = methods or ["humor"]
    dataset = load_dataset(esn_path, chart_path, alignment_path)
    workload = Workload.prepare(
        dataset, normalized=not params["no_normalize"], workers=params["workers"]
    )
    try:
        cfg = _fusion_config(params, max(ks), seed)
    except ConfigError as e:
        raise click.BadParameter(e.format_message(), param_hint="--ks")
    emit(SweepCommand(_display(ctx)).run(workload, methods, ks, cfg, params["workers"]))


@cli.command()
@dataset_options()
@click.pass_context
def validate(ctx, esn_path, chart_path, alignment_path):
    """Check a dataset; exits 3 when any invariant is broken."""
    violations = ValidateCommand(_display(ctx)).run(esn_path, chart_path, alignment_path)
    emit({"valid": not violations, "violations": [v.to_dict() for v in violations]})
    if violations:
        raise DatasetValidationError(violations, source=str(chart_path))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Console entry point; returns the process exit code."""
    try:
        rv = cli.main(
            args=list(argv) if argv is not None else None,
            prog_name="pydevelop-community",
            standalone_mode=False,
        )
    except CommunityError as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        click.echo("error: aborted", err=True)
        return 1
    except click.ClickException as e:
        message = " ".join(e.format_message().split())
        click.echo(f"error: usage: {message}", err=True)
        return 2
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    raise SystemExit(main())
