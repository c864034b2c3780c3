# src/notionport/tests/test_csv_io.py
from __future__ import annotations

import io
from datetime import date

import numpy as np
import pytest

from notionport.core.calendar import MarketCalendar
from notionport.core.portfolio import ClosingPortfolioMatrix, PriceMatrix
from notionport.core.returns import ReturnKind, ReturnMatrix, return_matrix
from notionport.errors import CsvParseError
from notionport.io.csv_io import (
    read_price_csv,
    read_returns_csv,
    write_closing_csv,
    write_plot_data,
    write_price_csv,
    write_returns_csv,
)

from .helpers import PORTF, TICKERS, fixture_path


def _write(tmp_path, text: str):
    path = tmp_path / "input.csv"
    path.write_text(text)
    return path


def test_read_price_fixture(etf_prices):
    assert etf_prices.tickers == TICKERS + (PORTF,)
    assert len(etf_prices.calendar) == 41
    assert etf_prices.calendar.first == date(2009, 12, 31)
    np.testing.assert_array_equal(etf_prices.values[0], 100.0)
    assert etf_prices.column("IWM").value_on("2010-12-31") == pytest.approx(126.919)


def test_read_returns_converts_percent():
    R = read_returns_csv(fixture_path("returns_compound.csv"), ReturnKind.COMPOUND)
    assert R.kind is ReturnKind.COMPOUND
    assert R.tickers[-1] == PORTF
    assert R.period_ends[0] == date(2010, 4, 9)
    assert R.column("IWB")[0] == pytest.approx(0.01569)
    assert R.sampler is None


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("date,A,B\n2010-01-04,1,2\n2010-01-05,1,x\n", 3, "bad value for B"),
        ("date,A,B\n2010-01-04,1,2\n2010-01-05,1\n", 3, "missing"),
        ("date,A,B\n2010-01-04,1,2\n04/01/2010,1,2\n", 3, "ISO 8601"),
        ("date,A,B\n2010-01-05,1,2\n2010-01-04,1,2\n", 3, "strictly increasing"),
        ("date,A,B\n2010-01-04,1,2\n2010-01-04,1,2\n", 3, "strictly increasing"),
        ("date,A,B\n2010-01-04,1,2\n2010-01-05,1,-2\n", 3, "must be positive"),
        ("date,A,A\n2010-01-04,1,2\n", 1, "duplicate"),
        ("day,A,B\n2010-01-04,1,2\n", 1, "'date'"),
        ("date,A,B\n", 2, "no data rows"),
        ("date,A,B\n2010-01-04,1,2\n\n2010-01-05,1,x\n", 3, "blank line"),
        ("date,A,B\n2010-01-04,1,2\n2010-01-05,1,x\n\n\n", 3, "bad value for B"),
    ],
)
def test_price_parse_errors_name_the_line(tmp_path, text, line, fragment):
    path = _write(tmp_path, text)
    with pytest.raises(CsvParseError) as exc:
        read_price_csv(path)
    assert exc.value.line == line
    assert exc.value.path == str(path)
    assert fragment in str(exc.value)
    assert f"{path}:{line}" in str(exc.value)


def test_extra_field_is_a_parse_error(tmp_path):
    path = _write(tmp_path, "date,A,B\n2010-01-04,1,2\n2010-01-05,1,2,3\n")
    with pytest.raises(CsvParseError) as exc:
        read_price_csv(path)
    assert exc.value.line == 3


def test_missing_and_empty_files(tmp_path):
    with pytest.raises(CsvParseError, match="file not found"):
        read_price_csv(tmp_path / "absent.csv")
    with pytest.raises(CsvParseError, match="file is empty"):
        read_price_csv(_write(tmp_path, ""))


def test_negative_returns_are_accepted():
    R = read_returns_csv(io.StringIO("date,A,PORTF\n2010-01-08,-3.015,-1.5\n2010-01-15,2.0,1.0\n"))
    np.testing.assert_allclose(R.values, [[-0.03015, -0.015], [0.02, 0.01]])


def test_compound_returns_at_or_below_minus_100_percent():
    with pytest.raises(CsvParseError):
        read_returns_csv(io.StringIO("date,A\n2010-01-08,-100.0\n"), "compound")


def test_price_csv_written_with_three_decimals(tmp_path, etf_prices):
    target = tmp_path / "out" / "prices.csv"
    write_price_csv(etf_prices, target)
    lines = target.read_text().splitlines()
    assert lines[0] == "date,IEF,IWB,IWM,EFA,EEM,PORTF"
    assert lines[1] == "2009-12-31,100.000,100.000,100.000,100.000,100.000,100.000"
    assert read_price_csv(target).values.tolist() == etf_prices.values.tolist()


def test_returns_csv_in_percent_without_negative_zero():
    R = ReturnMatrix(
        ("2010-01-08", "2010-01-15"), "linear", np.array([[0.0123456, -0.0000004], [-0.01, 0.0]]), ("A", PORTF)
    )
    out = io.StringIO()
    write_returns_csv(R, out)
    assert out.getvalue() == "date,A,PORTF\n2010-01-08,1.235,0.000\n2010-01-15,-1.000,0.000\n"


def test_returns_csv_reproduces_fixture(etf_securities, etf_portfolio, weekly):
    R = return_matrix(etf_securities, etf_portfolio, weekly, "compound")
    out = io.StringIO()
    write_returns_csv(R, out)
    written = read_returns_csv(io.StringIO(out.getvalue()), "compound")
    expected = read_returns_csv(fixture_path("returns_compound.csv"), "compound")
    assert written.period_ends == expected.period_ends
    np.testing.assert_allclose(written.values, expected.values, atol=0.0015 / 100)


def test_closing_csv_appends_the_portfolio_sum():
    calendar = MarketCalendar.from_dates(["2010-04-01", "2010-04-09"])
    closing = ClosingPortfolioMatrix(calendar, np.array([[0.3418, 0.6582], [0.33941, 0.66059]]), ("IEF", "IWB"))
    out = io.StringIO()
    write_closing_csv(closing, out, portfolio_label="MIX")
    assert out.getvalue() == "date,IEF,IWB,MIX\n2010-04-01,34.18,65.82,100.00\n2010-04-09,33.94,66.06,100.00\n"


def test_plot_data_one_file_per_ticker(tmp_path, etf_prices, caplog):
    written = write_plot_data(etf_prices, tmp_path / "plots", exclude=["PORTF", "SPY"])
    assert [p.name for p in written] == [f"{t}.csv" for t in TICKERS]
    assert "SPY" in caplog.text
    lines = (tmp_path / "plots" / "EEM.csv").read_text().splitlines()
    assert lines[0] == "date,price"
    assert lines[-1] == "2010-12-31,116.523"
    assert len(lines) == 42


def test_price_matrix_round_trip_through_stream():
    calendar = MarketCalendar.from_dates(["2010-01-04", "2010-01-05"])
    matrix = PriceMatrix(calendar, np.array([[1.0, 2.5], [1.25, 2.0]]), ("A", "B"))
    out = io.StringIO()
    write_price_csv(matrix, out)
    back = read_price_csv(io.StringIO(out.getvalue()))
    assert back.tickers == ("A", "B")
    np.testing.assert_array_equal(back.values, matrix.values)
