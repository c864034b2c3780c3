#!/usr/bin/env python3
"""
Main CLI entry point for notionport.

Exit codes: 0 success, 1 invalid input or configuration, 2 numerical failure.
"""
from __future__ import annotations

import functools
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, TypeVar

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from notionport import __version__
from notionport.core.normalization import last_periods, point_mass
from notionport.core.returns import ReturnKind
from notionport.core.solver import solve_proportions
from notionport.core.statistics import CovarianceReport, StatsReport
from notionport.errors import NotionportError, NumericalError, ValidationError
from notionport.io.config import AnalysisConfig, load_config
from notionport.io.csv_io import (
    read_price_csv,
    read_returns_csv,
    write_closing_csv,
    write_plot_data,
    write_price_csv,
    write_returns_csv,
)
from notionport.pipeline import (
    PreparedData,
    StatsResult,
    build_alpha,
    build_sampler,
    compute_closing,
    compute_notional,
    compute_returns,
    compute_stats,
    convert_notional,
    normalized_prices,
    prepare,
    stats_for_returns,
)

console = Console()
err_console = Console(stderr=True)
logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])

EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False, rich_tracebacks=True)],
        force=True,
    )


def _handle_errors(fn: F) -> F:
    """Map the two error families to exit codes and print one red line."""
    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except ValidationError as e:
            err_console.print(f"[red]❌ {type(e).__name__}: {escape(str(e))}[/red]")
            sys.exit(EXIT_VALIDATION)
        except NumericalError as e:
            err_console.print(f"[red]❌ {type(e).__name__}: {escape(str(e))}[/red]")
            sys.exit(EXIT_NUMERICAL)
        except NotionportError as e:
            err_console.print(f"[red]❌ Error: {escape(str(e))}[/red]")
            sys.exit(EXIT_VALIDATION)
    return wrapper  # type: ignore[return-value]


def _load(input_csv: str, config_path: str | None) -> tuple[AnalysisConfig, PreparedData]:
    config = load_config(config_path)
    return config, prepare(read_price_csv(input_csv), config)


def _destination(out: str | None) -> Any:
    return out if out else click.get_text_stream("stdout")


def _pct(x: float | None, digits: int = 2) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "?"
    return f"{100.0 * x:.{digits}f}"


config_option = click.option(
    "--config", "-c", "config_path", type=click.Path(exists=True, dir_okay=False),
    default=None, help="Path to the YAML analysis config",
)
out_option = click.option(
    "--out", "-o", type=click.Path(dir_okay=False), default=None,
    help="Output CSV (default: stdout)",
)
kind_option = click.option(
    "--kind", "-k", type=click.Choice([k.value for k in ReturnKind]), default=ReturnKind.LINEAR.value,
    show_default=True, help="Return definition",
)


class NotionportGroup(click.Group):
    """Click group whose usage errors (missing files, bad choices) exit with EXIT_VALIDATION."""

    def make_context(self, *args: Any, **kwargs: Any) -> click.Context:
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = EXIT_VALIDATION
            raise

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_VALIDATION
            raise


@click.group(cls=NotionportGroup)
@click.version_option(version=__version__)
@click.option("--verbose", "-v", is_flag=True, help="Debug logging on stderr")
def cli(verbose: bool) -> None:
    """notionport - notional portfolios and linear returns from adjusted prices."""
    _setup_logging(verbose)


@cli.command()
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@config_option
@out_option
@_handle_errors
def normalize(input_csv: str, config_path: str | None, out: str | None) -> None:
    """Alpha-normalized prices of every security plus the portfolio."""
    config, data = _load(input_csv, config_path)
    sampler = build_sampler(data.calendar, config.period)
    alpha = build_alpha(data.calendar, sampler, config.normalization)
    normalized = normalized_prices(data, alpha, config.normalization.level)
    write_price_csv(normalized.with_portfolio(), _destination(out))
    logger.info(f"Normalized {normalized.securities.n + 1} series with alpha {alpha.label}")


@cli.command()
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@config_option
@kind_option
@out_option
@_handle_errors
def returns(input_csv: str, config_path: str | None, kind: str, out: str | None) -> None:
    """Periodic returns (percent, 3 decimals), portfolio in the last column."""
    config, data = _load(input_csv, config_path)
    sampler = build_sampler(data.calendar, config.period)
    alpha = None
    if ReturnKind(kind) is ReturnKind.LINEAR:
        alpha = build_alpha(data.calendar, sampler, config.normalization)
    matrix = compute_returns(data, sampler, kind, alpha, config.normalization.level)
    write_returns_csv(matrix, _destination(out))


@cli.command()
@click.argument("returns_csv", type=click.Path(exists=True, dir_okay=False))
@config_option
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output")
@_handle_errors
def solve(returns_csv: str, config_path: str | None, as_json: bool) -> None:
    """Sum-constrained least-squares proportions; the last column is the portfolio."""
    config = load_config(config_path)
    matrix = read_returns_csv(returns_csv)
    if len(matrix.tickers) < 2:
        raise ValidationError("A returns file needs at least one security column and the portfolio column")
    solution = solve_proportions(
        matrix.securities,
        matrix.portfolio,
        tickers=matrix.tickers[:-1],
        rank_tolerance=config.solver.rank_tolerance,
    )
    if as_json:
        click.echo(json.dumps(solution.to_dict(), indent=2))
        return

    table = Table(title=f"Solution proportions in {escape(matrix.tickers[-1])}")
    for ticker in solution.as_mapping():
        table.add_column(escape(ticker), justify="right")
    table.add_column("error", justify="right")
    table.add_row(
        *[_pct(v) for v in solution.proportions],
        f"{100.0 * solution.residual_rel:.1f}% ({solution.residual_abs:.1e})",
    )
    console.print(table)


@cli.command()
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@config_option
@click.option("--from-returns", is_flag=True, help="INPUT_CSV is a returns table, not prices")
@kind_option
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output")
@_handle_errors
def stats(input_csv: str, config_path: str | None, from_returns: bool, kind: str, as_json: bool) -> None:
    """Annualized e, sigma, e/sigma per return kind and the correlation matrix."""
    if from_returns:
        config = load_config(config_path)
        result = stats_for_returns(read_returns_csv(input_csv, kind), config)
    else:
        config, data = _load(input_csv, config_path)
        result = compute_stats(data, config)

    if as_json:
        click.echo(json.dumps(_stats_dict(result), indent=2))
        return
    for block in result.blocks:
        console.print(_stats_table(block.report))
    console.print(_correlation_table(result.correlations))


@cli.command()
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@config_option
@click.option("--out", "-o", "out_dir", type=click.Path(file_okay=False), required=True,
              help="Directory for one CSV per ticker")
@click.option("--exclude", "-x", multiple=True, help="Ticker to leave out (repeatable)")
@click.option("--filter/--no-filter", "use_filter", default=False,
              help="Also leave out the tickers listed under plot.exclude in the config")
@_handle_errors
def plotdata(
        input_csv: str, config_path: str | None, out_dir: str, exclude: tuple[str, ...], use_filter: bool
) -> None:
    """Normalized price series per ticker, for growth charts."""
    config, data = _load(input_csv, config_path)
    sampler = build_sampler(data.calendar, config.period)
    alpha = build_alpha(data.calendar, sampler, config.normalization)
    normalized = normalized_prices(data, alpha, config.normalization.level)
    skip = set(exclude) | (set(config.plot.exclude) if use_filter else set())
    written = write_plot_data(normalized.with_portfolio(), Path(out_dir), skip)
    console.print(f"[green]✅ Wrote {len(written)} series to {escape(out_dir)}[/green]")


@cli.command()
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@config_option
@out_option
@_handle_errors
def closing(input_csv: str, config_path: str | None, out: str | None) -> None:
    """Closing portfolios (percent) on every sampled day."""
    config, data = _load(input_csv, config_path)
    sampler = build_sampler(data.calendar, config.period)
    alpha = build_alpha(data.calendar, sampler, config.normalization)
    matrix = compute_closing(data, sampler, alpha, config)
    write_closing_csv(matrix, _destination(out), config.portfolio.label)


@cli.command()
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@config_option
@click.option("--to-date", default=None, help="Convert to the point mass at this market day")
@click.option("--to-last-periods", type=click.IntRange(min=1), default=None,
              help="Convert to uniform averaging over the last K sampled days")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output")
@_handle_errors
def notional(
        input_csv: str, config_path: str | None, to_date: str | None, to_last_periods: int | None, as_json: bool
) -> None:
    """The alpha-notional portfolio, optionally converted to a second averaging vector."""
    if to_date and to_last_periods:
        raise ValidationError("Use either --to-date or --to-last-periods, not both")
    config, data = _load(input_csv, config_path)
    sampler = build_sampler(data.calendar, config.period)
    alpha = build_alpha(data.calendar, sampler, config.normalization)
    level = config.normalization.level
    portfolios = [compute_notional(data, alpha, level, config.solver)]
    if to_date or to_last_periods:
        beta = point_mass(data.calendar, to_date) if to_date else last_periods(sampler, int(to_last_periods or 0))
        portfolios.append(convert_notional(portfolios[0], data, alpha, beta, level))

    if as_json:
        click.echo(json.dumps([p.to_dict() for p in portfolios], indent=2))
        return
    table = Table(title=f"Notional portfolio {escape(data.portfolio.label)}")
    table.add_column("normalization")
    for ticker in data.securities.tickers:
        table.add_column(escape(ticker), justify="right")
    for p in portfolios:
        table.add_row(escape(p.normalization), *[_pct(v) for v in p.proportions])
    console.print(table)


# ----------------------------------------------------------------------------
# Rendering helpers
# ----------------------------------------------------------------------------

def _stats_table(report: StatsReport) -> Table:
    suffix = " (annualized)" if report.periods_per_year != 1 else ""
    table = Table(title=f"{escape(report.title)} returns{suffix}")
    table.add_column("")
    for c in report.columns:
        table.add_column(escape(c.ticker), justify="right")
    table.add_row("p", *[_pct(c.proportion) for c in report.columns])
    table.add_row("e", *[_pct(c.e) for c in report.columns])
    table.add_row("σ", *[_pct(c.sigma) for c in report.columns])
    table.add_row("e/σ", *[f"{c.ratio:.4f}" if c.ratio is not None else "?" for c in report.columns])
    return table


def _correlation_table(report: CovarianceReport) -> Table:
    table = Table(title="Correlations")
    table.add_column("")
    for t in report.tickers:
        table.add_column(escape(t), justify="right")
    for i, t in enumerate(report.tickers):
        row = [("?" if math.isnan(v) else f"{v:.3f}") for v in report.C[i]]
        table.add_row(escape(t), *row)
    return table


def _stats_dict(result: StatsResult) -> dict[str, Any]:
    C = result.correlations.C
    return {
        "blocks": [block.report.to_dict() for block in result.blocks],
        "correlations": {
            "tickers": list(result.correlations.tickers),
            "matrix": [[None if math.isnan(v) else float(v) for v in row] for row in C],
        },
    }


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
