# src/notionport/tests/helpers.py
"""Constants and builders shared by the test modules."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from notionport.core.calendar import MarketCalendar
from notionport.core.portfolio import PriceMatrix

FIXTURES = Path(__file__).parent / "fixtures"

TICKERS = ("IEF", "IWB", "IWM", "EFA", "EEM")
PORTF = "PORTF"

# first sampled week-end; the 2009-12-31 row is only an anchor
FIRST_WEEK = "2010-04-01"

# (35%, 40%, 0%, 25%, 0%) recovered against [2009-12-31]-normalized prices
PROPORTIONS_20091231 = np.array([0.35, 0.40, 0.0, 0.25, 0.0])
# the same portfolio expressed against the last-13-weeks normalization
PROPORTIONS_LAST13 = np.array([0.3565, 0.4035, 0.0, 0.2401, 0.0])


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def read_table(name: str) -> pd.DataFrame:
    """A fixture CSV as a date-indexed frame of floats."""
    return pd.read_csv(FIXTURES / name, index_col="date")


def random_prices(rng: np.random.Generator, calendar: MarketCalendar, n: int) -> PriceMatrix:
    """Positive geometric random walks, one column per security."""
    steps = rng.normal(0.0004, 0.01, size=(len(calendar), n))
    steps[0] = 0.0
    values = 100.0 * np.exp(np.cumsum(steps, axis=0)) * rng.uniform(0.5, 2.0, size=n)
    return PriceMatrix(calendar, values, tuple(f"S{j}" for j in range(n)))
