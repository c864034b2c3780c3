# src/notionport/io/csv_io.py
"""
CSV ingestion and emission.

Layout (prices, returns and closing portfolios alike):

    date,<ticker 1>,...,<ticker N>
    2010-04-01,101.413,...

Comma separated, ISO 8601 dates in strictly increasing order, UTF-8, Unix newlines.
Prices are written with 3 decimals; returns in percent with 3 decimals; closing
portfolios in percent with 2 decimals.
"""
from __future__ import annotations

import logging
import re
from pathlib import Path
from typing import IO, Iterable, Sequence, Union

import numpy as np
import pandas as pd

from notionport.core.calendar import MarketCalendar
from notionport.core.portfolio import ClosingPortfolioMatrix, PriceMatrix
from notionport.core.returns import ReturnKind, ReturnMatrix
from notionport.errors import CsvParseError, ValidationError

logger = logging.getLogger(__name__)

Source = Union[str, Path, IO[str]]

PRICE_DECIMALS = 3
RETURN_DECIMALS = 3
PROPORTION_DECIMALS = 2

_PARSER_LINE = re.compile(r"line (\d+)")


def _name(source: Source) -> str | None:
    if isinstance(source, (str, Path)):
        return str(source)
    return getattr(source, "name", None)


def _read_raw(source: Source) -> tuple[list[str], pd.DataFrame]:
    path = _name(source)
    try:
        frame = pd.read_csv(
            source, header=None, dtype=str, keep_default_na=False, skipinitialspace=True,
            skip_blank_lines=False,
        )
    except FileNotFoundError as e:
        raise CsvParseError("file not found", path=path) from e
    except pd.errors.EmptyDataError as e:
        raise CsvParseError("file is empty", path=path) from e
    except pd.errors.ParserError as e:
        match = _PARSER_LINE.search(str(e))
        raise CsvParseError(
            f"malformed row ({e})", path=path, line=int(match.group(1)) if match else None
        ) from e

    # frame row k is source line k + 1; trailing blank lines are dropped, interior ones rejected
    stripped = frame.fillna("").apply(lambda col: col.astype(str).str.strip())
    blank = (stripped == "").all(axis=1).to_numpy()
    filled = np.flatnonzero(~blank)
    if filled.size == 0:
        raise CsvParseError("file is empty", path=path)
    frame, blank = frame.iloc[: filled[-1] + 1], blank[: filled[-1] + 1]
    if blank.any():
        raise CsvParseError("blank line", path=path, line=int(np.flatnonzero(blank)[0]) + 1)

    header = [str(h).strip() for h in frame.iloc[0].tolist()]
    if not header or header[0].lower() != "date":
        raise CsvParseError("first header column must be 'date'", path=path, line=1)
    tickers = header[1:]
    if not tickers:
        raise CsvParseError("no data columns after 'date'", path=path, line=1)
    if any(not t for t in tickers):
        raise CsvParseError("empty column name in header", path=path, line=1)
    if len(set(tickers)) != len(tickers):
        raise CsvParseError(f"duplicate column names in header: {tickers}", path=path, line=1)
    body = frame.iloc[1:].reset_index(drop=True)
    if body.empty:
        raise CsvParseError("no data rows", path=path, line=2)
    return header, body


def _parse_dates(body: pd.DataFrame, path: str | None) -> MarketCalendar:
    raw = body.iloc[:, 0].astype(str).str.strip()
    parsed = pd.to_datetime(raw, format="%Y-%m-%d", errors="coerce")
    bad = parsed.isna().to_numpy()
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise CsvParseError(f"not an ISO 8601 date: {raw.iloc[k]!r}", path=path, line=k + 2)
    days = [ts.date() for ts in parsed]
    for k in range(1, len(days)):
        if days[k] <= days[k - 1]:
            raise CsvParseError(
                f"dates must be strictly increasing: {days[k - 1]} then {days[k]}", path=path, line=k + 2
            )
    return MarketCalendar(tuple(days))


def _parse_values(body: pd.DataFrame, tickers: Sequence[str], path: str | None) -> np.ndarray:
    raw = body.iloc[:, 1:]
    values = raw.apply(lambda col: pd.to_numeric(col.str.strip(), errors="coerce")).to_numpy(dtype=np.float64)
    bad = ~np.isfinite(values)
    if bad.any():
        k, j = (int(x) for x in np.argwhere(bad)[0])
        cell = raw.iat[k, j]
        shown = "missing" if pd.isna(cell) or str(cell).strip() == "" else f"{cell!r}"
        raise CsvParseError(f"bad value for {tickers[j]}: {shown}", path=path, line=k + 2)
    return values


def read_price_csv(source: Source) -> PriceMatrix:
    """Every data column as an adjusted price series (the portfolio column included)."""
    path = _name(source)
    header, body = _read_raw(source)
    tickers = header[1:]
    calendar = _parse_dates(body, path)
    values = _parse_values(body, tickers, path)
    nonpositive = values <= 0
    if nonpositive.any():
        k, j = (int(x) for x in np.argwhere(nonpositive)[0])
        raise CsvParseError(
            f"price of {tickers[j]} must be positive, got {values[k, j]}", path=path, line=k + 2
        )
    logger.debug(f"Read {len(calendar)} days x {len(tickers)} columns from {path or 'stream'}")
    return PriceMatrix(calendar, values, tuple(tickers))


def read_returns_csv(source: Source, kind: ReturnKind | str = ReturnKind.LINEAR) -> ReturnMatrix:
    """Percent returns back to fractions; the last column is taken as the portfolio."""
    path = _name(source)
    header, body = _read_raw(source)
    tickers = header[1:]
    calendar = _parse_dates(body, path)
    values = _parse_values(body, tickers, path) / 100.0
    try:
        return ReturnMatrix(calendar.days, kind, values, tuple(tickers))
    except ValidationError as e:
        raise CsvParseError(str(e), path=path) from e


def _frame(days: Iterable, columns: Sequence[str], values: np.ndarray, decimals: int) -> pd.DataFrame:
    # round first so -0.0004 prints as 0.000, not -0.000
    rounded = np.round(np.asarray(values, dtype=np.float64), decimals) + 0.0
    frame = pd.DataFrame(rounded, columns=list(columns))
    frame.insert(0, "date", [d.isoformat() for d in days])
    return frame


def _emit(frame: pd.DataFrame, dest: Source, decimals: int) -> None:
    if isinstance(dest, (str, Path)):
        Path(dest).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(dest, index=False, float_format=f"%.{decimals}f", lineterminator="\n")


def write_price_csv(matrix: PriceMatrix, dest: Source) -> None:
    _emit(_frame(matrix.calendar.days, matrix.tickers, matrix.values, PRICE_DECIMALS), dest, PRICE_DECIMALS)


def write_returns_csv(returns: ReturnMatrix, dest: Source) -> None:
    frame = _frame(returns.period_ends, returns.tickers, returns.values * 100.0, RETURN_DECIMALS)
    _emit(frame, dest, RETURN_DECIMALS)


def write_closing_csv(closing: ClosingPortfolioMatrix, dest: Source, portfolio_label: str = "PORTF") -> None:
    percent = closing.values * 100.0
    values = np.column_stack([percent, percent.sum(axis=1)])
    frame = _frame(closing.calendar.days, list(closing.tickers) + [portfolio_label], values, PROPORTION_DECIMALS)
    _emit(frame, dest, PROPORTION_DECIMALS)


def write_plot_data(matrix: PriceMatrix, out_dir: str | Path, exclude: Iterable[str] = ()) -> list[Path]:
    """One `<ticker>.csv` (date,price) per column not in `exclude`."""
    skip = set(exclude)
    unknown = skip - set(matrix.tickers)
    if unknown:
        logger.warning(f"Plot exclusions not in the data: {', '.join(sorted(unknown))}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for j, ticker in enumerate(matrix.tickers):
        if ticker in skip:
            continue
        target = out / f"{ticker}.csv"
        _emit(_frame(matrix.calendar.days, ["price"], matrix.values[:, j], PRICE_DECIMALS), target, PRICE_DECIMALS)
        written.append(target)
    logger.info(f"Wrote {len(written)} plot series to {out}")
    return written
