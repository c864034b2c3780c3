# src/notionport/core/calendar.py
"""
Market-day calendar and periodic sampling.

A MarketCalendar is the ordered index (days 0..M) shared by every price series.
A PeriodSampler picks m+1 of those days (i_0 < ... < i_m); selecting then
differencing is the Theta/Delta operator pair used for linear returns.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import date, datetime
from functools import cached_property
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
import pandas as pd

from notionport.errors import DegenerateSamplerError, UnknownDateError, ValidationError

logger = logging.getLogger(__name__)

DateLike = date | str


def to_date(value: DateLike) -> date:
    """Coerce an ISO 8601 string (or date) to a date."""
    if isinstance(value, pd.Timestamp):
        return value.date()
    if isinstance(value, datetime):
        return value.date()
    if isinstance(value, date):
        return value
    try:
        return date.fromisoformat(str(value).strip())
    except ValueError as e:
        raise ValidationError(f"Not an ISO 8601 date: {value!r}") from e


class PeriodRule(str, Enum):
    """How sample_periodic picks period-end market days."""
    EVERY_DAY = "every-day"
    WEEK_ENDING = "week-ending"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class MarketCalendar:
    """Strictly increasing, nonempty sequence of market days."""
    days: tuple[date, ...]

    def __post_init__(self) -> None:
        if not self.days:
            raise ValidationError("Market calendar must not be empty")
        for prev, cur in zip(self.days, self.days[1:]):
            if cur <= prev:
                raise ValidationError(
                    f"Market calendar must be strictly increasing: {prev} is followed by {cur}"
                )

    @classmethod
    def from_dates(cls, days: Iterable[DateLike]) -> "MarketCalendar":
        return cls(tuple(to_date(d) for d in days))

    def __len__(self) -> int:
        return len(self.days)

    def __contains__(self, day: object) -> bool:
        try:
            self.position(day)  # type: ignore[arg-type]
        except (UnknownDateError, ValidationError):
            return False
        return True

    @property
    def first(self) -> date:
        return self.days[0]

    @property
    def last(self) -> date:
        return self.days[-1]

    def position(self, day: DateLike) -> int:
        """Index of `day` in the calendar."""
        d = to_date(day)
        idx = int(np.searchsorted(self._ordinals, d.toordinal()))
        if idx >= len(self.days) or self.days[idx] != d:
            raise UnknownDateError(d)
        return idx

    def positions(self, days: Iterable[DateLike]) -> list[int]:
        return [self.position(d) for d in days]

    def iso_days(self) -> list[str]:
        return [d.isoformat() for d in self.days]

    @cached_property
    def _ordinals(self) -> np.ndarray:
        return np.fromiter((d.toordinal() for d in self.days), dtype=np.int64, count=len(self.days))


def difference_matrix(m: int) -> np.ndarray:
    """The m x (m+1) matrix Delta with (Delta y)_k = y_k - y_{k-1}."""
    if m < 1:
        raise DegenerateSamplerError("Difference matrix needs at least one period")
    delta = np.zeros((m, m + 1))
    rows = np.arange(m)
    delta[rows, rows] = -1.0
    delta[rows, rows + 1] = 1.0
    return delta


@dataclass(frozen=True)
class PeriodSampler:
    """Positions i_0 < i_1 < ... < i_m of period-end days within a calendar."""
    calendar: MarketCalendar
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.indices) < 2:
            raise DegenerateSamplerError(
                f"A sampler needs at least 2 market days (one return period), got {len(self.indices)}"
            )
        n = len(self.calendar)
        for prev, cur in zip(self.indices, self.indices[1:]):
            if cur <= prev:
                raise ValidationError(f"Sampler indices must be strictly increasing: {self.indices}")
        if self.indices[0] < 0 or self.indices[-1] >= n:
            raise ValidationError(f"Sampler indices out of calendar bounds [0, {n - 1}]")

    @property
    def periods(self) -> int:
        """Number of return periods m."""
        return len(self.indices) - 1

    @property
    def days(self) -> tuple[date, ...]:
        return tuple(self.calendar.days[i] for i in self.indices)

    @property
    def period_end_days(self) -> tuple[date, ...]:
        return self.days[1:]

    def select(self, values: np.ndarray) -> np.ndarray:
        """Theta applied to a calendar-indexed vector (or matrix, row-wise)."""
        arr = np.asarray(values)
        if arr.shape[0] != len(self.calendar):
            raise ValidationError(
                f"Vector of length {arr.shape[0]} does not match calendar length {len(self.calendar)}"
            )
        return arr[list(self.indices)]

    def theta(self) -> np.ndarray:
        """The (m+1) x (M+1) selection matrix [delta_{i_k, i}]."""
        theta = np.zeros((len(self.indices), len(self.calendar)))
        theta[np.arange(len(self.indices)), list(self.indices)] = 1.0
        return theta

    def sampled_calendar(self) -> MarketCalendar:
        return MarketCalendar(self.days)


def _week_ending_positions(calendar: MarketCalendar, candidates: Sequence[int]) -> list[int]:
    # last listed market day <= Friday within each ISO week
    idx = pd.DatetimeIndex([pd.Timestamp(calendar.days[i]) for i in candidates])
    frame = pd.DataFrame({"pos": list(candidates), "weekday": idx.dayofweek})
    iso = idx.isocalendar()
    frame["year"] = iso["year"].to_numpy()
    frame["week"] = iso["week"].to_numpy()
    frame = frame[frame["weekday"] <= 4]
    if frame.empty:
        return []
    ends = frame.groupby(["year", "week"], sort=True)["pos"].max()
    return sorted(int(p) for p in ends.tolist())


def sample_periodic(
        calendar: MarketCalendar,
        rule: PeriodRule | str,
        *,
        dates: Iterable[DateLike] | None = None,
        start: DateLike | None = None,
        end: DateLike | None = None,
) -> PeriodSampler:
    """
    Pick the last market day of each period.

    rule:
      - every-day:   every calendar day
      - week-ending: per ISO week, the last listed day on or before Friday
                     (a Friday holiday falls back to Thursday)
      - explicit:    exactly `dates` (each a calendar day inside start/end; repeats collapse)

    start/end (inclusive) restrict the candidate days before the rule is applied.
    """
    rule = PeriodRule(rule)
    lo = to_date(start) if start is not None else calendar.first
    hi = to_date(end) if end is not None else calendar.last
    candidates = [i for i, d in enumerate(calendar.days) if lo <= d <= hi]

    if rule is PeriodRule.EVERY_DAY:
        positions = candidates
    elif rule is PeriodRule.WEEK_ENDING:
        positions = _week_ending_positions(calendar, candidates)
    else:
        if dates is None:
            raise ValidationError("The explicit period rule needs a list of dates")
        listed = calendar.positions(dates)
        positions = sorted(set(listed))
        if len(positions) < len(listed):
            logger.warning(
                f"Explicit period dates repeat {len(listed) - len(positions)} day(s); each is sampled once"
            )
        outside = [calendar.days[p].isoformat() for p in positions if not lo <= calendar.days[p] <= hi]
        if outside:
            raise ValidationError(f"Explicit period dates outside {lo}..{hi}: {', '.join(outside)}")

    if len(positions) < 2:
        raise DegenerateSamplerError(
            f"Rule '{rule.value}' sampled {len(positions)} market day(s) between {lo} and {hi}; need at least 2"
        )
    logger.debug(f"Sampled {len(positions)} of {len(calendar)} market days with rule '{rule.value}'")
    return PeriodSampler(calendar, tuple(positions))
