# src/notionport/core/returns.py
"""
Periodic returns sampled from adjusted prices.

With period-end positions i_0 < ... < i_m chosen by a PeriodSampler:

  compound:    r_k = x[i_k] / x[i_{k-1}] - 1
  continuous:  r_k = log(x[i_k] / x[i_{k-1}])
  linear:      r_k = (x[i_k] - x[i_{k-1}]) / (alpha^T x)

Only linear returns satisfy r_P = R p exactly for an alpha-notional portfolio p.
All values are fractions; percent formatting happens at the CSV boundary.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import date
from enum import Enum

import numpy as np

from notionport.core.calendar import PeriodSampler, difference_matrix, to_date
from notionport.core.normalization import DEFAULT_LEVEL, AveragingVector, alpha_normalize
from notionport.core.portfolio import PriceMatrix
from notionport.core.price_series import AdjustedPriceSeries, frozen_array, require_same_calendar
from notionport.errors import DimensionMismatchError, ValidationError

logger = logging.getLogger(__name__)


class ReturnKind(str, Enum):
    COMPOUND = "compound"
    CONTINUOUS = "continuous"
    LINEAR = "linear"


@dataclass(frozen=True)
class ReturnMatrix:
    """
    m x k matrix of periodic returns, rows indexed by period-end day.
    `sampler` is kept when the matrix was computed from prices (absent when read from CSV).

    For matrices built by `return_matrix` the last column is the portfolio.
    `denomination` is the averaging vector label of linear returns (empty otherwise).
    """
    period_ends: tuple[date, ...]
    kind: ReturnKind
    values: np.ndarray = field(repr=False)
    tickers: tuple[str, ...]
    denomination: str = ""
    level: float = DEFAULT_LEVEL
    sampler: PeriodSampler | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ReturnKind(self.kind))
        values = frozen_array(self.values)
        if values.ndim == 1:
            values = frozen_array(values.reshape(-1, 1))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "period_ends", tuple(to_date(d) for d in self.period_ends))
        if values.shape != (len(self.period_ends), len(self.tickers)):
            raise DimensionMismatchError(
                f"Return matrix has shape {values.shape}, "
                f"expected ({len(self.period_ends)}, {len(self.tickers)})"
            )
        if self.sampler is not None and self.sampler.period_end_days != self.period_ends:
            raise DimensionMismatchError("Return rows do not match the sampler period ends")
        if self.kind is ReturnKind.COMPOUND and np.any(values <= -1.0):
            raise ValidationError("Compound returns must exceed -100%")

    @property
    def periods(self) -> int:
        return self.values.shape[0]

    @property
    def securities(self) -> np.ndarray:
        """Every column but the portfolio (the last)."""
        return self.values[:, :-1]

    @property
    def portfolio(self) -> np.ndarray:
        return self.values[:, -1]

    def column(self, ticker: str) -> np.ndarray:
        try:
            return self.values[:, self.tickers.index(ticker)]
        except ValueError:
            raise ValidationError(f"No return column named {ticker}") from None

    @property
    def title(self) -> str:
        if self.kind is ReturnKind.LINEAR:
            return f"{self.denomination}-denominated linear"
        return self.kind.value


def _sampled_ratios(series: AdjustedPriceSeries, sampler: PeriodSampler) -> np.ndarray:
    require_same_calendar(series.calendar, sampler.calendar, "Price series and sampler")
    sampled = sampler.select(series.prices)
    return sampled[1:] / sampled[:-1]


def compound_returns(series: AdjustedPriceSeries, sampler: PeriodSampler) -> np.ndarray:
    return _sampled_ratios(series, sampler) - 1.0


def continuous_returns(series: AdjustedPriceSeries, sampler: PeriodSampler) -> np.ndarray:
    return np.log(_sampled_ratios(series, sampler))


def linear_returns(
        series: AdjustedPriceSeries,
        sampler: PeriodSampler,
        alpha: AveragingVector,
        level: float = DEFAULT_LEVEL,
) -> np.ndarray:
    """
    Successive differences of the alpha-normalized series over `level`.

    The alpha-average runs over every calendar day, not only the sampled ones.
    """
    require_same_calendar(series.calendar, sampler.calendar, "Price series and sampler")
    normalized = alpha_normalize(series, alpha, level)
    return np.diff(sampler.select(normalized.prices)) / level


def linear_returns_by_operators(
        series: AdjustedPriceSeries,
        sampler: PeriodSampler,
        alpha: AveragingVector,
        level: float = DEFAULT_LEVEL,
) -> np.ndarray:
    """Delta Theta x^alpha / level with the selection and difference matrices built explicitly."""
    normalized = alpha_normalize(series, alpha, level)
    operator = difference_matrix(sampler.periods) @ sampler.theta()
    return operator @ normalized.prices / level


def return_matrix(
        X: PriceMatrix | None,
        xP: AdjustedPriceSeries,
        sampler: PeriodSampler,
        kind: ReturnKind | str,
        alpha: AveragingVector | None = None,
        level: float = DEFAULT_LEVEL,
) -> ReturnMatrix:
    """
    Returns of every security column followed by the portfolio column.

    X may be None for a portfolio-only matrix. Linear returns need `alpha`.
    """
    kind = ReturnKind(kind)
    series = (X.columns() if X is not None else []) + [xP]
    for s in series:
        require_same_calendar(s.calendar, sampler.calendar, f"Series {s.label} and sampler")

    if kind is ReturnKind.LINEAR:
        if alpha is None:
            raise ValidationError("Linear returns need an averaging vector")
        columns = [linear_returns(s, sampler, alpha, level) for s in series]
        denomination = alpha.label
    elif kind is ReturnKind.COMPOUND:
        columns = [compound_returns(s, sampler) for s in series]
        denomination = ""
    else:
        columns = [continuous_returns(s, sampler) for s in series]
        denomination = ""

    tickers = tuple(s.label for s in series)
    logger.debug(f"Built {kind.value} return matrix: {sampler.periods} periods x {len(tickers)} columns")
    return ReturnMatrix(
        sampler.period_end_days, kind, np.column_stack(columns), tickers, denomination, level, sampler
    )
