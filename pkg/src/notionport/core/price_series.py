# src/notionport/core/price_series.py
"""
Adjusted closing prices.

An adjusted price series x measures total-return growth: x_i/x_{i-1} is the growth of
an investment from the close of day i-1 to the close of day i with dividends reinvested.
On an ex-date the ratio is corrected for the action:

  cash dividend d:   c_i / (c_{i-1} - d)
  share dividend s:  (1 + s) * c_i / c_{i-1}
  split tau:1:       tau * c_i / c_{i-1}

Any positive multiple of an adjusted series is again an adjusted series for the same
security, so `adjust` pins one representative by choosing the value on an anchor day.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from notionport.core.calendar import DateLike, MarketCalendar, to_date
from notionport.errors import (
    CalendarMismatchError,
    ConflictingActionError,
    DimensionMismatchError,
    InvalidDividendError,
    InvalidScaleError,
    ValidationError,
)

logger = logging.getLogger(__name__)


def frozen_array(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Float64 copy of `values` that cannot be written to."""
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


class ActionKind(str, Enum):
    """Corporate actions that change the close-to-close growth ratio."""
    CASH_DIVIDEND = "cash-dividend"
    SHARE_DIVIDEND = "share-dividend"
    SPLIT = "split"


# Same-day actions compose in this order.
_COMPOSITION_ORDER = (ActionKind.CASH_DIVIDEND, ActionKind.SHARE_DIVIDEND, ActionKind.SPLIT)


@dataclass(frozen=True)
class CorporateAction:
    """A cash dividend d (currency/share), share dividend s (shares/share) or split tau."""
    ex_date: date
    kind: ActionKind
    amount: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "ex_date", to_date(self.ex_date))
        object.__setattr__(self, "kind", ActionKind(self.kind))
        amount = float(self.amount)
        object.__setattr__(self, "amount", amount)
        if not np.isfinite(amount):
            raise ValidationError(f"Corporate action amount must be finite: {amount}")
        if self.kind is ActionKind.CASH_DIVIDEND and amount < 0:
            raise InvalidDividendError(f"Cash dividend must be >= 0, got {amount} on {self.ex_date}")
        if self.kind is ActionKind.SHARE_DIVIDEND and amount <= -1:
            raise ValidationError(f"Share dividend must be > -1, got {amount} on {self.ex_date}")
        if self.kind is ActionKind.SPLIT and amount <= 0:
            raise ValidationError(f"Split ratio must be > 0, got {amount} on {self.ex_date}")

    @classmethod
    def cash_dividend(cls, ex_date: DateLike, d: float) -> "CorporateAction":
        return cls(to_date(ex_date), ActionKind.CASH_DIVIDEND, d)

    @classmethod
    def share_dividend(cls, ex_date: DateLike, s: float) -> "CorporateAction":
        return cls(to_date(ex_date), ActionKind.SHARE_DIVIDEND, s)

    @classmethod
    def split(cls, ex_date: DateLike, tau: float) -> "CorporateAction":
        return cls(to_date(ex_date), ActionKind.SPLIT, tau)


def _check_positive_vector(values: np.ndarray, calendar: MarketCalendar, what: str) -> None:
    if values.ndim != 1 or values.shape[0] != len(calendar):
        raise DimensionMismatchError(
            f"{what} has shape {values.shape}, expected ({len(calendar)},) to match the calendar"
        )
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        bad = int(np.flatnonzero(~(np.isfinite(values) & (values > 0)))[0])
        raise ValidationError(
            f"{what} must be positive; found {values[bad]} on {calendar.days[bad]}"
        )


@dataclass(frozen=True)
class RawCloseSeries:
    """Unadjusted closing prices c_i of one security."""
    calendar: MarketCalendar
    closes: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "closes", frozen_array(self.closes))
        _check_positive_vector(self.closes, self.calendar, f"Closes of {self.label or 'series'}")


@dataclass(frozen=True)
class AdjustedPriceSeries:
    """Positive adjusted closing prices x_i of one security (or portfolio)."""
    calendar: MarketCalendar
    prices: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "prices", frozen_array(self.prices))
        _check_positive_vector(self.prices, self.calendar, f"Adjusted prices of {self.label or 'series'}")

    def __len__(self) -> int:
        return len(self.calendar)

    def value_on(self, day: DateLike) -> float:
        return float(self.prices[self.calendar.position(day)])

    def with_prices(self, prices: np.ndarray, label: str | None = None) -> "AdjustedPriceSeries":
        return AdjustedPriceSeries(self.calendar, prices, self.label if label is None else label)


def require_same_calendar(a: MarketCalendar, b: MarketCalendar, what: str = "inputs") -> None:
    if a is not b and a != b:
        raise CalendarMismatchError(
            f"{what} use different market calendars "
            f"({a.first}..{a.last}, {len(a)} days vs {b.first}..{b.last}, {len(b)} days)"
        )


def growth_ratios(raw: RawCloseSeries, actions: Iterable[CorporateAction] = ()) -> np.ndarray:
    """
    Close-to-close adjusted growth ratios x_i/x_{i-1} for i = 1..M.

    Element 0 of the returned vector is 1 (no prior day).
    """
    closes = raw.closes
    ratios = np.ones_like(closes)
    ratios[1:] = closes[1:] / closes[:-1]

    by_day: dict[int, dict[ActionKind, CorporateAction]] = {}
    for action in actions:
        pos = raw.calendar.position(action.ex_date)
        if pos == 0:
            raise ValidationError(
                f"Ex-date {action.ex_date} is the first calendar day; no prior close to adjust"
            )
        day_actions = by_day.setdefault(pos, {})
        if action.kind in day_actions:
            raise ConflictingActionError(
                f"Two {action.kind.value} actions on {action.ex_date} for {raw.label or 'series'}"
            )
        day_actions[action.kind] = action

    for pos, day_actions in sorted(by_day.items()):
        prev_close = closes[pos - 1]
        ratio = closes[pos] / prev_close
        for kind in _COMPOSITION_ORDER:
            action = day_actions.get(kind)
            if action is None:
                continue
            if kind is ActionKind.CASH_DIVIDEND:
                d = action.amount
                if d >= prev_close:
                    raise InvalidDividendError(
                        f"Cash dividend {d} on {action.ex_date} is not below the prior close {prev_close}"
                    )
                ratio = closes[pos] / (prev_close - d)
            elif kind is ActionKind.SHARE_DIVIDEND:
                ratio = ratio * (1.0 + action.amount)
            else:
                ratio = ratio * action.amount
        ratios[pos] = ratio
    return ratios


def adjust(
        raw: RawCloseSeries,
        actions: Iterable[CorporateAction] = (),
        anchor: int = 0,
        anchor_value: float = 100.0,
) -> AdjustedPriceSeries:
    """
    Build adjusted prices with x[anchor] = anchor_value.

    Ratios are chained forward from the anchor and inverted backward, so every
    successive ratio of the result equals the corrected close-to-close ratio.
    """
    n = len(raw.calendar)
    if not 0 <= anchor < n:
        raise ValidationError(f"Anchor position {anchor} outside calendar bounds [0, {n - 1}]")
    if not anchor_value > 0:
        raise InvalidScaleError(f"Anchor value must be positive, got {anchor_value}")

    ratios = growth_ratios(raw, actions)
    growth = np.cumprod(ratios)
    prices = anchor_value * (growth / growth[anchor])
    prices[anchor] = anchor_value
    logger.debug(f"Adjusted {raw.label or 'series'}: {n} days anchored at {raw.calendar.days[anchor]}")
    return AdjustedPriceSeries(raw.calendar, prices, raw.label)


def rescale(series: AdjustedPriceSeries, lam: float) -> AdjustedPriceSeries:
    """The same security's adjusted prices multiplied by lam > 0."""
    if not (np.isfinite(lam) and lam > 0):
        raise InvalidScaleError(f"Scale factor must be positive, got {lam}")
    return series.with_prices(series.prices * lam)
