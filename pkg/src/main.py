#!/usr/bin/env python3
"""CLI for the monotone codec: compress, decompress, bench, bounds, nml."""
import functools
import logging
import math
import sys
from pathlib import Path

# Handle both script and module execution
if __name__ == '__main__' and __package__ is None:
    # Running as script, add parent directory to path
    sys.path.insert(0, str(Path(__file__).parent.parent))

import click
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from src import bounds as bound_fns
from src.codecs import compress, decompress
from src.codecs.search import SEARCH_MODES
from src.lab import Family, SourceSpec, run_experiment, tail_log_sum, wyner_check
from src.utils.config_loader import get_config
from src.utils.env import EnvLoader
from src.utils.exceptions import MonotoneCodecError, ValidationError
from src.utils.formatter import FORMATS, read_sequence, write_sequence
from src.utils.logger import get_logger, parse_level, setup_logger

console = Console()
err_console = Console(stderr=True)
logger = get_logger(__name__)

EXIT_USAGE = 2
EXIT_IO = 3

BOUND_NAMES = [f"thm{i}" for i in range(1, 9)] + [f"cor{i}" for i in range(1, 5)]

# Every library error is an input problem from the CLI point of view
USAGE_ERRORS = (MonotoneCodecError,)


def handle_errors(command):
    """Map library errors to the stable exit codes (2 input, 3 I/O)."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except USAGE_ERRORS as e:
            err_console.print(f"[red]{type(e).__name__}: {e}[/red]")
            sys.exit(EXIT_USAGE)
        except OSError as e:
            err_console.print(f"[red]I/O Error: {e}[/red]")
            sys.exit(EXIT_IO)
    return wrapper


def _fmt(value: float) -> str:
    return '%.10g' % value


@click.group()
@click.option('--verbose', '-v', is_flag=True, default=False, help='Show debug logging on stderr')
@click.option('--quiet', '-q', is_flag=True, default=False, help='Print plain numbers instead of tables')
@click.pass_context
@handle_errors
def cli(ctx, verbose, quiet):
    """Universal compression of integer sequences from monotone distributions."""
    # MONOCODE_LOG_LEVEL wins over logging.level from the config files
    configured = parse_level(get_config().logging.level)
    level = parse_level(EnvLoader().log_level(), default=configured)
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    # Root logger so that every module logger inherits the level
    setup_logger(name="", level=level, console_output=True)
    ctx.ensure_object(dict)
    ctx.obj['quiet'] = quiet


@cli.command('compress')
@click.argument('input_path', type=click.Path(dir_okay=False))
@click.argument('output_path', type=click.Path(dir_okay=False))
@click.option('--mode', type=click.Choice(SEARCH_MODES), default='auto', show_default=True,
              help='Configurations to search')
@click.option('--k', 'k', type=int, default=None, help='Fix the SMALL_K alphabet size')
@click.option('--m', 'm', type=int, default=None, help='Fix the effective alphabet')
@click.option('--format', 'fmt', type=click.Choice(FORMATS), default='text', show_default=True,
              help='Input file format')
@click.pass_context
@handle_errors
def compress_command(ctx, input_path, output_path, mode, k, m, fmt):
    """Compress INPUT_PATH (positive integers) into a container at OUTPUT_PATH."""
    x = read_sequence(Path(input_path), fmt)
    result = compress(x, mode=mode, k=k, m=m)
    Path(output_path).write_bytes(result.data)
    breakdown = result.breakdown
    logger.info(f"Chose {result.config.label} for n={len(x)}")

    if ctx.obj['quiet']:
        click.echo(f"{breakdown.total} {_fmt(breakdown.ideal_payload)} {_fmt(breakdown.overhead)}")
        return

    table = Table(show_header=False, box=None)
    table.add_row("configuration", result.config.label)
    table.add_row("symbols", str(len(x)))
    for name, value in breakdown.to_dict().items():
        table.add_row(name, _fmt(value))
    table.add_row("overhead", _fmt(breakdown.overhead))
    table.add_row("bytes", str(len(result.data)))
    console.print(Panel.fit(table, title="[bold green]Compressed[/bold green]"))


@cli.command('decompress')
@click.argument('input_path', type=click.Path(dir_okay=False))
@click.argument('output_path', type=click.Path(dir_okay=False))
@click.option('--format', 'fmt', type=click.Choice(FORMATS), default='text', show_default=True,
              help='Output file format')
@click.pass_context
@handle_errors
def decompress_command(ctx, input_path, output_path, fmt):
    """Restore the sequence stored in the container INPUT_PATH."""
    x = decompress(Path(input_path).read_bytes())
    write_sequence(Path(output_path), x, fmt)
    if ctx.obj['quiet']:
        click.echo(str(len(x)))
    else:
        console.print(f"[green]✓[/green] Restored {len(x)} symbols to {output_path}")


def _source(family: str, gamma, p, theta, seed: int) -> SourceSpec:
    if theta:
        theta = tuple(float(t) for t in theta.split(','))
    return SourceSpec(Family(family), gamma=gamma, p=p, theta=theta or None, seed=seed)


def _parse_n_list(value: str):
    try:
        return [int(token) for token in value.split(',') if token.strip()]
    except ValueError:
        raise ValidationError(f"--n-list must be comma-separated integers, got {value!r}")


@cli.command('bench')
@click.option('--family', type=click.Choice([f.value for f in Family]), required=True)
@click.option('--gamma', type=float, default=None, help='Decay parameter (powerlaw, slowlog)')
@click.option('--p', 'p', type=float, default=None, help='Geometric success probability')
@click.option('--theta', default=None, help='Comma-separated probabilities (explicit)')
@click.option('--n-list', 'n_list', required=True, help='Comma-separated sequence lengths')
@click.option('--trials', type=int, default=None, help='Samples per cell (default from config)')
@click.option('--seed', type=int, default=None, help='Base seed (default from config)')
@click.option('--mode', type=click.Choice(SEARCH_MODES), default='auto', show_default=True)
@click.option('--eps', type=float, default=None, help='Slack of the attached bound')
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), default=None,
              help='Write one CSV row per cell')
@click.pass_context
@handle_errors
def bench_command(ctx, family, gamma, p, theta, n_list, trials, seed, mode, eps, csv_path):
    """Measure average redundancy on samples of an example source."""
    seed = get_config().lab.seed if seed is None else seed
    spec = _source(family, gamma, p, theta, seed)
    cells = [(spec, n) for n in _parse_n_list(n_list)]
    reports = run_experiment(cells, Path(csv_path) if csv_path else None, trials, mode, eps)

    if ctx.obj['quiet']:
        for report in reports:
            click.echo(f"{report.n} {_fmt(report.total_redundancy)} {_fmt(report.bound_value)}")
        return

    table = Table(title=f"Redundancy of {spec.label}")
    for column in ("n", "trials", "mean bits", "entropy bits", "redundancy",
                   "per symbol", "bound", "ratio", "configurations"):
        table.add_column(column)
    for report in reports:
        table.add_row(str(report.n), str(report.trials), _fmt(report.mean_total_bits),
                      _fmt(report.entropy_total), _fmt(report.total_redundancy),
                      _fmt(report.per_symbol_redundancy), _fmt(report.bound_value),
                      _fmt(report.bound_ratio), report.histogram_label)
    console.print(table)
    if csv_path:
        console.print(f"[green]✓[/green] CSV written to {csv_path}")


def _require(value, flag: str, which: str):
    if value is None:
        raise ValidationError(f"{flag} is required for {which}")
    return value


def _evaluate_bound(which, n, k, m, eps, family, gamma, p, theta, seed):
    if which == 'thm1':
        return bound_fns.lb_maximin(n, _require(k, '--k', which), eps)
    if which == 'thm2':
        return bound_fns.lb_most_sources(n, _require(k, '--k', which), eps)
    if which == 'thm3':
        return bound_fns.lb_individual(n, _require(k, '--k', which))
    if which == 'thm4':
        return bound_fns.ub_small_large(n, _require(k, '--k', which), eps)
    if which == 'thm5':
        return bound_fns.ub_fast_effective(n, _require(m, '--m', which), eps)
    if which == 'thm6':
        spec = _source(_require(family, '--family', which), gamma, p, theta, seed)
        return bound_fns.ub_fast_min(n, lambda size: tail_log_sum(spec, size), eps)
    if which == 'thm7':
        return bound_fns.ub_individual(n, _require(k, '--k', which), eps)
    if which == 'thm8':
        if m is not None:
            return bound_fns.cal_R_ind(n, m)
        return bound_fns.ub_individual2(n, lambda size: 0.0, eps)
    if which == 'cor2':
        return bound_fns.ub_powerlaw(n, _require(gamma, '--gamma', which), eps)
    if which == 'cor3':
        return bound_fns.ub_geometric(n, _require(p, '--p', which), eps)
    return bound_fns.ub_slow_decay(n, _require(gamma, '--gamma', which), eps)


@cli.command('bounds')
@click.option('--which', type=click.Choice(BOUND_NAMES), required=True, help='Bound to evaluate')
@click.option('--n', 'n', type=int, required=True, help='Sequence length')
@click.option('--k', 'k', type=int, default=None, help='Alphabet size')
@click.option('--m', 'm', type=int, default=None, help='Effective alphabet size')
@click.option('--eps', type=float, default=None, help='Slack parameter (default from config)')
@click.option('--family', type=click.Choice([f.value for f in Family]), default=None,
              help='Source for thm6 and cor1')
@click.option('--gamma', type=float, default=None)
@click.option('--p', 'p', type=float, default=None)
@click.option('--theta', default=None, help='Comma-separated probabilities (explicit)')
@click.pass_context
@handle_errors
def bounds_command(ctx, which, n, k, m, eps, family, gamma, p, theta):
    """Evaluate a redundancy bound at concrete parameters."""
    eps = get_config().bounds.eps if eps is None else eps
    quiet = ctx.obj['quiet']

    if which == 'cor1':
        spec = _source(_require(family, '--family', which), gamma, p, theta, 0)
        check = wyner_check(spec)
        if quiet:
            click.echo(f"{_fmt(check.expected_log)} {_fmt(check.entropy)} {int(check.passed)}")
            return
        table = Table(title=f"E[log2 X] <= H for {spec.label}", show_header=False)
        table.add_row("E[log2 X]", _fmt(check.expected_log))
        table.add_row("H", _fmt(check.entropy))
        table.add_row("holds", "yes" if check.passed else "no")
        console.print(table)
        return

    value = _evaluate_bound(which, n, k, m, eps, family, gamma, p, theta, 0)
    if quiet:
        click.echo(f"{_fmt(value.per_symbol)} {_fmt(value.total)} {value.region}")
        return

    table = Table(title=f"{which}: {value.name}", show_header=False)
    table.add_row("region", value.region)
    table.add_row("per symbol", _fmt(value.per_symbol))
    table.add_row("total", _fmt(value.total))
    for name, alternative in value.alternatives.items():
        table.add_row(f"branch {name}", _fmt(alternative))
    for name, extra in value.extras.items():
        table.add_row(name, _fmt(extra))
    table.add_row("note", value.slack)
    console.print(table)


@cli.command('nml')
@click.option('--n', 'n', type=int, required=True, help='Sequence length')
@click.option('--k', 'k', type=int, required=True, help='Alphabet size')
@click.option('--budget', type=int, default=None, help='Largest k^n to enumerate')
@click.pass_context
@handle_errors
def nml_command(ctx, n, k, budget):
    """Exact individual minimax redundancy of k-letter monotone sources by enumeration."""
    total = bound_fns.shtarkov_sum_monotone(n, k, budget)
    log_sum = math.log2(total.numerator) - math.log2(total.denominator)
    if ctx.obj['quiet']:
        click.echo(_fmt(log_sum))
        return
    iid = bound_fns.shtarkov_sum_iid(n, k, budget)
    table = Table(title=f"Shtarkov sums, n={n}, k={k}", show_header=False)
    table.add_row("monotone sum", str(total))
    table.add_row("log2 monotone sum", _fmt(log_sum))
    table.add_row("i.i.d. sum", str(iid))
    table.add_row("log2 i.i.d. sum", _fmt(math.log2(iid.numerator) - math.log2(iid.denominator)))
    console.print(table)


def main():
    cli(obj={})


if __name__ == '__main__':
    main()
