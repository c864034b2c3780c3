# src/notionport/tests/conftest.py
from __future__ import annotations

import numpy as np
import pandas as pd
import pytest

from notionport.core.calendar import MarketCalendar, PeriodSampler, sample_periodic
from notionport.core.normalization import AveragingVector, last_periods, point_mass
from notionport.core.portfolio import PriceMatrix
from notionport.core.price_series import AdjustedPriceSeries
from notionport.io.csv_io import read_price_csv

from .helpers import FIRST_WEEK, FIXTURES, PORTF, TICKERS


@pytest.fixture(scope="session")
def etf_prices() -> PriceMatrix:
    return read_price_csv(FIXTURES / "prices_20091231.csv")


@pytest.fixture(scope="session")
def etf_prices_last13() -> PriceMatrix:
    return read_price_csv(FIXTURES / "prices_last13.csv")


@pytest.fixture(scope="session")
def etf_securities(etf_prices: PriceMatrix) -> PriceMatrix:
    return etf_prices.select(TICKERS)


@pytest.fixture(scope="session")
def etf_portfolio(etf_prices: PriceMatrix) -> AdjustedPriceSeries:
    return etf_prices.column(PORTF)


@pytest.fixture(scope="session")
def weekly(etf_prices: PriceMatrix) -> PeriodSampler:
    return sample_periodic(etf_prices.calendar, "week-ending", start=FIRST_WEEK)


@pytest.fixture(scope="session")
def alpha_20091231(etf_prices: PriceMatrix) -> AveragingVector:
    return point_mass(etf_prices.calendar, "2009-12-31")


@pytest.fixture(scope="session")
def alpha_last13(weekly: PeriodSampler) -> AveragingVector:
    return last_periods(weekly, 13)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20101231)


@pytest.fixture(scope="session")
def calendar_2010() -> MarketCalendar:
    """2009-12-31 plus the 2010 NYSE trading days."""
    holidays = {
        "2010-01-01", "2010-01-18", "2010-02-15", "2010-04-02", "2010-05-31",
        "2010-07-05", "2010-09-06", "2010-11-25", "2010-12-24",
    }
    days = pd.bdate_range("2010-01-01", "2010-12-31")
    kept = [d.date() for d in days if d.strftime("%Y-%m-%d") not in holidays]
    return MarketCalendar.from_dates([pd.Timestamp("2009-12-31").date(), *kept])

