# src/notionport/core/portfolio.py
"""
Notional-share algebra.

A static, dividend-reinvesting portfolio P of securities with adjusted prices
X = [x_1, ..., x_n] has adjusted prices x_P = X s for unique notional shares s >= 0.
Choosing different representatives Y = X diag(lambda), y_P = x_P lambda_P changes the
shares to t = diag(lambda)^-1 s lambda_P but nothing observable.

When every series is alpha-normalized to the same level, the notional shares p^alpha
sum to 1 and read as proportions ("alpha-notional portfolio"). The value split on a
given market day i is the closing portfolio p^c_ij = x_ij s_j / x_iP.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from scipy.linalg import lstsq

from notionport.core.calendar import MarketCalendar, PeriodSampler
from notionport.core.normalization import DEFAULT_LEVEL, AveragingVector, alpha_normalize
from notionport.core.price_series import AdjustedPriceSeries, frozen_array, require_same_calendar
from notionport.core.rank import DEFAULT_RANK_TOLERANCE, require_full_column_rank
from notionport.errors import (
    DimensionMismatchError,
    InvalidScaleError,
    InvalidWeightsError,
    NegativeProportionError,
    UnknownTickerError,
    ValidationError,
)

logger = logging.getLogger(__name__)

DEFAULT_PORTFOLIO_LABEL = "PORTF"
DEFAULT_NEGATIVE_TOLERANCE = 1e-10
SUM_WARNING_TOLERANCE = 1e-6


def _check_tickers(tickers: Sequence[str], n: int, what: str) -> tuple[str, ...]:
    labels = tuple(str(t) for t in tickers)
    if len(labels) != n:
        raise DimensionMismatchError(f"{what}: {len(labels)} tickers for {n} columns")
    if len(set(labels)) != len(labels):
        raise ValidationError(f"{what}: duplicate tickers in {list(labels)}")
    return labels


# ----------------------------------------------------------------------------
# Value objects
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PriceMatrix:
    """Adjusted prices of n securities over one calendar, one column per ticker."""
    calendar: MarketCalendar
    values: np.ndarray = field(repr=False)
    tickers: tuple[str, ...]

    def __post_init__(self) -> None:
        values = frozen_array(self.values)
        if values.ndim == 1:
            values = frozen_array(values.reshape(-1, 1))
        object.__setattr__(self, "values", values)
        if values.ndim != 2 or values.shape[0] != len(self.calendar):
            raise DimensionMismatchError(
                f"Price matrix has shape {values.shape}, expected ({len(self.calendar)}, n)"
            )
        if values.shape[1] < 1:
            raise DimensionMismatchError("Price matrix needs at least one security")
        object.__setattr__(self, "tickers", _check_tickers(self.tickers, values.shape[1], "Price matrix"))
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise ValidationError("Adjusted prices must be finite and positive")

    @classmethod
    def from_series(cls, series: Sequence[AdjustedPriceSeries]) -> "PriceMatrix":
        if not series:
            raise DimensionMismatchError("Price matrix needs at least one security")
        calendar = series[0].calendar
        for s in series[1:]:
            require_same_calendar(calendar, s.calendar, f"Series {series[0].label} and {s.label}")
        values = np.column_stack([s.prices for s in series])
        return cls(calendar, values, tuple(s.label for s in series))

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def index(self, ticker: str) -> int:
        try:
            return self.tickers.index(ticker)
        except ValueError:
            raise UnknownTickerError(ticker, self.tickers) from None

    def column(self, ticker: str) -> AdjustedPriceSeries:
        return AdjustedPriceSeries(self.calendar, self.values[:, self.index(ticker)], ticker)

    def columns(self) -> list[AdjustedPriceSeries]:
        return [AdjustedPriceSeries(self.calendar, self.values[:, j], t) for j, t in enumerate(self.tickers)]

    def select(self, tickers: Iterable[str]) -> "PriceMatrix":
        wanted = list(tickers)
        return PriceMatrix(self.calendar, self.values[:, [self.index(t) for t in wanted]], tuple(wanted))

    def normalized(self, alpha: AveragingVector, level: float = DEFAULT_LEVEL) -> "PriceMatrix":
        """Every column alpha-normalized to `level`."""
        return PriceMatrix.from_series([alpha_normalize(s, alpha, level) for s in self.columns()])

    def scaled(self, lambdas: Sequence[float] | np.ndarray) -> "PriceMatrix":
        """X diag(lambda): each column multiplied by its own positive factor."""
        lam = np.asarray(lambdas, dtype=np.float64)
        if lam.shape != (self.n,):
            raise DimensionMismatchError(f"Expected {self.n} scale factors, got shape {lam.shape}")
        if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
            raise InvalidScaleError("Scale factors must be positive")
        return PriceMatrix(self.calendar, self.values * lam, self.tickers)


@dataclass(frozen=True)
class NotionalShares:
    """Notional shares s_j >= 0 per security, not all zero."""
    shares: np.ndarray
    tickers: tuple[str, ...]

    def __post_init__(self) -> None:
        shares = frozen_array(self.shares)
        object.__setattr__(self, "shares", shares)
        if shares.ndim != 1:
            raise DimensionMismatchError(f"Notional shares must be a vector, got shape {shares.shape}")
        object.__setattr__(self, "tickers", _check_tickers(self.tickers, shares.shape[0], "Notional shares"))
        if not np.all(np.isfinite(shares)) or np.any(shares < 0):
            raise InvalidWeightsError("Notional shares must be finite and nonnegative")
        if not shares.sum() > 0:
            raise InvalidWeightsError("At least one notional share must be positive")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float], tickers: Sequence[str]) -> "NotionalShares":
        """Shares ordered by `tickers`; tickers missing from `mapping` hold 0."""
        known = tuple(tickers)
        for t in mapping:
            if t not in known:
                raise UnknownTickerError(t, known)
        return cls(np.array([float(mapping.get(t, 0.0)) for t in known]), known)

    def as_mapping(self) -> dict[str, float]:
        return {t: float(v) for t, v in zip(self.tickers, self.shares)}


@dataclass(frozen=True)
class NotionalPortfolio:
    """Proportions p_j of an alpha-notional portfolio; `normalization` names alpha."""
    proportions: np.ndarray
    tickers: tuple[str, ...]
    normalization: str = ""

    def __post_init__(self) -> None:
        p = frozen_array(self.proportions)
        object.__setattr__(self, "proportions", p)
        object.__setattr__(self, "tickers", _check_tickers(self.tickers, p.shape[0], "Notional portfolio"))

    def as_mapping(self) -> dict[str, float]:
        return {t: float(v) for t, v in zip(self.tickers, self.proportions)}

    def to_dict(self) -> dict[str, Any]:
        return {
            "normalization": self.normalization,
            "proportions": self.as_mapping(),
            "sum": float(self.proportions.sum()),
        }


@dataclass(frozen=True)
class ClosingPortfolioMatrix:
    """Rows: market days; columns: the value fraction of each security in the portfolio."""
    calendar: MarketCalendar
    values: np.ndarray = field(repr=False)
    tickers: tuple[str, ...]

    def __post_init__(self) -> None:
        values = frozen_array(self.values)
        object.__setattr__(self, "values", values)
        if values.shape != (len(self.calendar), len(self.tickers)):
            raise DimensionMismatchError(
                f"Closing portfolio matrix has shape {values.shape}, "
                f"expected ({len(self.calendar)}, {len(self.tickers)})"
            )

    def row(self, day: Any) -> dict[str, float]:
        i = self.calendar.position(day)
        return {t: float(v) for t, v in zip(self.tickers, self.values[i])}


# ----------------------------------------------------------------------------
# Operations
# ----------------------------------------------------------------------------

def _require_share_match(X: PriceMatrix, s: NotionalShares) -> None:
    if X.n != s.shares.shape[0]:
        raise DimensionMismatchError(f"{X.n} price columns but {s.shares.shape[0]} notional shares")
    if X.tickers != s.tickers:
        raise DimensionMismatchError(
            f"Share tickers {list(s.tickers)} do not match price columns {list(X.tickers)}"
        )


def synthesize(X: PriceMatrix, s: NotionalShares, label: str = DEFAULT_PORTFOLIO_LABEL) -> AdjustedPriceSeries:
    """Portfolio adjusted prices x_P = X s."""
    _require_share_match(X, s)
    return AdjustedPriceSeries(X.calendar, X.values @ s.shares, label)


def closing_portfolios(
        X: PriceMatrix,
        s: NotionalShares,
        sampler: PeriodSampler | None = None,
) -> ClosingPortfolioMatrix:
    """
    Market-day-closing portfolios p^c_ij = x_ij s_j / x_iP.

    With a sampler only the sampled days are returned (e.g. week closings).
    """
    _require_share_match(X, s)
    holdings = X.values * s.shares
    values = holdings / holdings.sum(axis=1, keepdims=True)
    if sampler is None:
        return ClosingPortfolioMatrix(X.calendar, values, X.tickers)
    require_same_calendar(X.calendar, sampler.calendar, "Price matrix and sampler")
    return ClosingPortfolioMatrix(sampler.sampled_calendar(), sampler.select(values), X.tickers)


def _tidy_proportions(
        p: np.ndarray,
        tickers: Sequence[str],
        negative_tolerance: float,
        what: str,
) -> np.ndarray:
    total = float(p.sum())
    if abs(total - 1.0) > SUM_WARNING_TOLERANCE:
        logger.warning(
            f"{what}: proportions sum to {total:.8f}; inputs are probably not normalized consistently"
        )
    worst = int(np.argmin(p))
    if p[worst] < -negative_tolerance:
        raise NegativeProportionError(
            f"{what}: proportion of {tickers[worst]} is {p[worst]:.3e}; "
            f"the portfolio is not a long-only combination of these securities"
        )
    if np.any(p < 0):
        logger.warning(
            f"{what}: clamping {int(np.sum(p < 0))} slightly negative proportion(s) to 0 "
            f"(min {p[worst]:.3e})"
        )
        p = np.clip(p, 0.0, None)
    return p / p.sum()


def notional_portfolio(
        X_alpha: PriceMatrix,
        xP_alpha: AdjustedPriceSeries,
        normalization: str = "",
        *,
        rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
        negative_tolerance: float = DEFAULT_NEGATIVE_TOLERANCE,
) -> NotionalPortfolio:
    """
    Recover p^alpha from x^alpha_P = X^alpha p^alpha.

    The overdetermined system is solved by unconstrained least squares; the sum-to-one
    property is checked afterwards, not imposed.
    """
    require_same_calendar(X_alpha.calendar, xP_alpha.calendar, "Price matrix and portfolio series")
    require_full_column_rank(X_alpha.values, "Security price matrix", rank_tolerance)

    p, _, _, _ = lstsq(X_alpha.values, xP_alpha.prices)
    residual = float(np.linalg.norm(X_alpha.values @ p - xP_alpha.prices))
    logger.debug(
        f"Notional portfolio {normalization}: residual {residual:.3e} "
        f"(relative {residual / np.linalg.norm(xP_alpha.prices):.3e})"
    )
    p = _tidy_proportions(p, X_alpha.tickers, negative_tolerance, "Notional portfolio")
    return NotionalPortfolio(p, X_alpha.tickers, normalization)


def convert_portfolio(
        p_alpha: NotionalPortfolio,
        X_alpha: PriceMatrix,
        xP_alpha: AdjustedPriceSeries,
        beta: AveragingVector,
) -> NotionalPortfolio:
    """p^beta_j = (beta^T x^alpha_j / beta^T x^alpha_P) p^alpha_j, renormalized to sum 1."""
    require_same_calendar(X_alpha.calendar, beta.calendar, "Price matrix and averaging vector")
    require_same_calendar(xP_alpha.calendar, beta.calendar, "Portfolio series and averaging vector")
    if p_alpha.tickers != X_alpha.tickers:
        raise DimensionMismatchError(
            f"Portfolio tickers {list(p_alpha.tickers)} do not match price columns {list(X_alpha.tickers)}"
        )
    factors = (beta.weights @ X_alpha.values) / float(beta.weights @ xP_alpha.prices)
    p = factors * p_alpha.proportions
    total = float(p.sum())
    if abs(total - 1.0) > SUM_WARNING_TOLERANCE:
        logger.warning(
            f"Converted proportions sum to {total:.8f} before renormalizing; "
            f"the portfolio does not reproduce its price series closely"
        )
    return NotionalPortfolio(p / total, p_alpha.tickers, beta.label)


def change_coordinates(
        s: NotionalShares,
        lambdas: Sequence[float] | np.ndarray,
        lambda_P: float,
) -> NotionalShares:
    """Shares t = diag(lambda)^-1 s lambda_P for Y = X diag(lambda), y_P = x_P lambda_P."""
    lam = np.asarray(lambdas, dtype=np.float64)
    if lam.shape != s.shares.shape:
        raise DimensionMismatchError(f"Expected {s.shares.shape[0]} scale factors, got shape {lam.shape}")
    if not np.all(np.isfinite(lam)) or np.any(lam <= 0) or not lambda_P > 0:
        raise InvalidScaleError("Scale factors must be positive")
    return NotionalShares(s.shares / lam * lambda_P, s.tickers)
