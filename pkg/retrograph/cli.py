#!/usr/bin/env -S uv run
"""CLI for retrograph: run, verify, generate and benchmark retroactive graph traces.

/// script
requires-python = ">=3.10"
dependencies = [
    "click>=8.0",
    "filelock>=3.0",
    "numpy>=1.22",
    "pyyaml>=6.0",
]
///
"""

import sys
from fractions import Fraction
from pathlib import Path

import click

from retrograph.bench import BenchReportWriter, bench as run_bench
from retrograph.config import PRESETS, load_workload
from retrograph.dynforest import ENGINES
from retrograph.errors import TraceError
from retrograph.parser import TraceParser, format_trace
from retrograph.runner import TraceRunner
from retrograph.structures import STRUCTURES, StructureOptions, compatible_kinds, verifiable_kinds
from retrograph.trace import Trace
from retrograph.workloads import OMV_FAMILIES, OmvInstance, wl_random

EXIT_MISMATCH = 1
EXIT_ERROR = 2


def _parse_epsilon(ctx, param, value: str) -> Fraction:
    try:
        epsilon = Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"'{value}' is not a decimal or fraction") from None
    if epsilon <= 0:
        raise click.BadParameter(f"epsilon must be positive, got {value}")
    return epsilon


def structure_options(f):
    """Options shared by the commands that build structures."""
    f = click.option(
        '--max-weight',
        type=click.IntRange(min=1),
        default=None,
        help='Largest edge weight for approx-msf (default: largest weight in the trace)',
    )(f)
    f = click.option(
        '--epsilon',
        default='1',
        callback=_parse_epsilon,
        help='Approximation factor for approx-msf, e.g. 0.5 or 1/10 (default: 1)',
    )(f)
    f = click.option(
        '-e',
        '--engine',
        type=click.Choice(sorted(ENGINES)),
        default='baseline',
        help='Dynamic forest engine (default: baseline)',
    )(f)
    return f


def _load_trace(trace_path: Path, verbose: bool) -> Trace:
    if verbose:
        click.echo(f"Parsing {trace_path}...", err=True)
    trace = TraceParser(trace_path).parse()
    if verbose:
        counts = trace.counts()
        click.echo(
            f"n={trace.n}: {counts['create']} create(s), {counts['cancel']} cancel(s), "
            f"{counts['query']} query(s)",
            err=True,
        )
    return trace


def _fail(e: Exception):
    click.echo(f"Error: {e}", err=True)
    sys.exit(EXIT_ERROR)


@click.group()
def main():
    """Fully retroactive dynamic graph structures.

    Replay retroactive traces (updates created or cancelled at arbitrary
    past times, queries at any time) through incremental and fully
    retroactive connectivity, MSF, maximum degree and matching structures,
    and check them against a brute-force oracle.

    Examples:

        \b
        # Generate a random fully retroactive trace and verify every kind
        retrograph gen random --mix full -o full.trace
        retrograph verify full.trace

        \b
        # Answer an OMv gadget trace with the incremental structure
        retrograph gen omv-conn -n 8 -o conn.trace
        retrograph run conn.trace -k inc-conn
    """


@main.command()
@click.argument('trace_path', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    '-k',
    '--kind',
    type=click.Choice(list(STRUCTURES)),
    default='oracle',
    help='Structure to replay the trace with (default: oracle)',
)
@structure_options
@click.option('-v', '--verbose', is_flag=True, help='Enable verbose output')
def run(trace_path: Path, kind: str, engine: str, epsilon: Fraction, max_weight: int | None, verbose: bool):
    """Print "<query-index> <answer>" for every query in TRACE_PATH."""
    try:
        trace = _load_trace(trace_path, verbose)
        options = StructureOptions(engine=engine, epsilon=epsilon, max_weight=max_weight)
        runner = TraceRunner(trace, kind, options, output=sys.stderr, verbose=verbose)
        for answer in runner.run():
            click.echo(str(answer))
    except (FileNotFoundError, TraceError, ValueError) as e:
        _fail(e)
    except KeyboardInterrupt:
        click.echo("\nInterrupted", err=True)
        sys.exit(130)


@main.command()
@click.argument('trace_path', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    '-k',
    '--kind',
    'kinds',
    multiple=True,
    type=click.Choice(list(STRUCTURES)),
    help='Structure(s) to check (default: every kind that accepts the updates and answers some query)',
)
@structure_options
@click.option('-v', '--verbose', is_flag=True, help='Enable verbose output')
def verify(
    trace_path: Path,
    kinds: tuple[str, ...],
    engine: str,
    epsilon: Fraction,
    max_weight: int | None,
    verbose: bool,
):
    """Check structures against the oracle and the trace's expect lines.

    Each kind is checked on the queries it answers; the rest are skipped
    and counted. Exits 1 with the first mismatch.
    """
    try:
        trace = _load_trace(trace_path, verbose)
        selected = list(kinds) or verifiable_kinds(trace)
        options = StructureOptions(engine=engine, epsilon=epsilon, max_weight=max_weight)
        for kind in selected:
            runner = TraceRunner(trace, kind, options, output=sys.stderr, verbose=verbose)
            report = runner.verify(stop_at_first=True)
            if not report.ok:
                click.echo(f"✗ {kind}: {report.mismatches[0]}", err=True)
                sys.exit(EXIT_MISMATCH)
            skipped = f" ({report.skipped} skipped)" if report.skipped else ""
            click.echo(f"✓ {kind}: {report.checked} query(s) agree{skipped}", err=True)
    except (FileNotFoundError, TraceError, ValueError) as e:
        _fail(e)
    except KeyboardInterrupt:
        click.echo("\nInterrupted", err=True)
        sys.exit(130)


@main.command()
@click.argument('family', type=click.Choice(['random', *OMV_FAMILIES]))
@click.option(
    '-o',
    '--output',
    'output_path',
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help='Write the trace here (default: stdout)',
)
@click.option(
    '-m',
    '--mix',
    default='full',
    help=f"random: preset ({', '.join(PRESETS)}) or YAML workload file (default: full)",
)
@click.option('-n', '--size', 'n', type=click.IntRange(min=1), default=None,
              help='Vertex count (random) or matrix size (omv-*)')
@click.option('--steps', type=click.IntRange(min=0), default=None, help='random: number of operations')
@click.option('--seed', type=int, default=None, help='Random seed')
@click.option('--max-weight', type=click.IntRange(min=1), default=None, help='random: largest edge weight')
@click.option('--now-ratio', type=click.FloatRange(0, 1), default=None,
              help='random: fraction of queries asked at now')
@click.option('--density', type=click.FloatRange(0, 1), default=0.5, help='omv-*: density of M and v_k')
def gen(
    family: str,
    output_path: Path | None,
    mix: str,
    n: int | None,
    steps: int | None,
    seed: int | None,
    max_weight: int | None,
    now_ratio: float | None,
    density: float,
):
    """Generate a trace of FAMILY (random or an OMv gadget)."""
    try:
        if family == 'random':
            config = load_workload(mix)
            overrides = {'n': n, 'steps': steps, 'seed': seed, 'max_weight': max_weight, 'now_ratio': now_ratio}
            for name, value in overrides.items():
                if value is not None:
                    setattr(config, name, value)
            trace = wl_random(
                config.n,
                config.steps,
                config.mix,
                seed=config.seed,
                max_weight=config.max_weight,
                now_ratio=config.now_ratio,
            )
        else:
            inst = OmvInstance.random(n or 8, density=density, seed=seed or 0)
            trace = OMV_FAMILIES[family](inst)

        text = format_trace(trace)
        if output_path is None:
            click.echo(text, nl=False)
        else:
            output_path.write_text(text)
            counts = trace.counts()
            click.echo(
                f"Wrote {output_path} ({counts['create']} create(s), {counts['cancel']} cancel(s), "
                f"{counts['query']} query(s))",
                err=True,
            )
    except (FileNotFoundError, ValueError) as e:
        _fail(e)


@main.command()
@click.argument('trace_path', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    '-k',
    '--kind',
    'kinds',
    multiple=True,
    type=click.Choice(list(STRUCTURES)),
    help='Structure(s) to time (default: every compatible kind)',
)
@click.option('-r', '--repetitions', type=click.IntRange(min=1), default=1, help='Replays per kind (default: 1)')
@click.option('-j', '--jobs', type=int, default=None, help='Number of parallel kinds (default: one per kind)')
@click.option(
    '--report',
    'report_path',
    type=click.Path(dir_okay=False, path_type=Path),
    default='bench.yaml',
    help='YAML report to append to (default: bench.yaml)',
)
@structure_options
@click.option('-v', '--verbose', is_flag=True, help='Enable verbose output')
def bench(
    trace_path: Path,
    kinds: tuple[str, ...],
    repetitions: int,
    jobs: int | None,
    report_path: Path,
    engine: str,
    epsilon: Fraction,
    max_weight: int | None,
    verbose: bool,
):
    """Time create, cancel and query operations on TRACE_PATH."""
    try:
        trace = _load_trace(trace_path, verbose)
        selected = list(kinds) or compatible_kinds(trace)
        options = StructureOptions(engine=engine, epsilon=epsilon, max_weight=max_weight)
        click.echo(f"Benchmarking {', '.join(selected)} ({repetitions} repetition(s))...", err=True)
        reports = run_bench(trace, selected, repetitions, options, max_workers=jobs, output=sys.stderr)
        BenchReportWriter(report_path).append(trace_path.name, reports)

        click.echo("\nSummary:", err=True)
        for report in reports:
            query = report.operations['query']
            click.echo(
                f"  {report.kind} #{report.repetition}: total {report.total:.4f}s, "
                f"query mean {query.mean * 1e6:.1f}us",
                err=True,
            )
        click.echo(f"Appended {len(reports)} block(s) to {report_path}", err=True)
    except (FileNotFoundError, TraceError, ValueError) as e:
        _fail(e)
    except KeyboardInterrupt:
        click.echo("\nInterrupted", err=True)
        sys.exit(130)


if __name__ == '__main__':
    main()
