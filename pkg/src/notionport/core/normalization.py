# src/notionport/core/normalization.py
"""
Market-day-averaging vectors and alpha-normalization.

An averaging vector alpha puts nonnegative weights summing to 1 on the market days of a
calendar. Normalizing an adjusted price series x with alpha picks the representative of
its positive-multiple class whose alpha-average equals `level`:

    x_alpha = x * level / (alpha^T x)
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable

import numpy as np

from notionport.core.calendar import DateLike, MarketCalendar, PeriodSampler, to_date
from notionport.core.price_series import AdjustedPriceSeries, frozen_array, require_same_calendar
from notionport.errors import DimensionMismatchError, InvalidScaleError, InvalidWeightsError

logger = logging.getLogger(__name__)

DEFAULT_LEVEL = 100.0
WEIGHT_SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class AveragingVector:
    """Dense weights over every day of `calendar`; `label` names the normalization, e.g. [2009-12-31]."""
    calendar: MarketCalendar
    weights: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self) -> None:
        weights = frozen_array(self.weights)
        object.__setattr__(self, "weights", weights)
        if weights.shape != (len(self.calendar),):
            raise DimensionMismatchError(
                f"Averaging vector has shape {weights.shape}, expected ({len(self.calendar)},)"
            )
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise InvalidWeightsError("Averaging weights must be finite and nonnegative")
        total = float(weights.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise InvalidWeightsError(f"Averaging weights must sum to 1, got {total!r}")

    @property
    def support(self) -> tuple[date, ...]:
        """Market days carrying positive weight."""
        return tuple(self.calendar.days[i] for i in np.flatnonzero(self.weights > 0))

    def average(self, values: np.ndarray) -> np.ndarray | float:
        """alpha^T values over the calendar axis (vector -> scalar, matrix -> row)."""
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape[0] != len(self.calendar):
            raise DimensionMismatchError(
                f"Cannot average {arr.shape[0]} values with a {len(self.calendar)}-day averaging vector"
            )
        out = self.weights @ arr
        return float(out) if np.ndim(out) == 0 else out


def _describe(days: list) -> str:
    if len(days) == 1:
        return f"[{days[0].isoformat()}]"
    return f"[{days[0].isoformat()}..{days[-1].isoformat()}; {len(days)} days]"


def point_mass(calendar: MarketCalendar, day: DateLike) -> AveragingVector:
    """Weight 1 on `day`, 0 elsewhere."""
    pos = calendar.position(day)
    weights = np.zeros(len(calendar))
    weights[pos] = 1.0
    return AveragingVector(calendar, weights, _describe([calendar.days[pos]]))


def uniform_over(calendar: MarketCalendar, days: Iterable[DateLike]) -> AveragingVector:
    """Weight 1/k on each of k distinct market days."""
    wanted = [to_date(d) for d in days]
    if not wanted:
        raise InvalidWeightsError("uniform_over needs at least one date")
    if len(set(wanted)) != len(wanted):
        dupes = sorted({d for d in wanted if wanted.count(d) > 1})
        raise InvalidWeightsError(f"Duplicate averaging dates: {', '.join(d.isoformat() for d in dupes)}")
    positions = calendar.positions(wanted)
    weights = np.zeros(len(calendar))
    weights[positions] = 1.0 / len(positions)
    return AveragingVector(calendar, weights, _describe(sorted(wanted)))


def last_periods(sampler: PeriodSampler, k: int) -> AveragingVector:
    """Uniform averaging over the last k sampled days (e.g. the last 13 week-endings)."""
    sampled = sampler.days
    if not 1 <= k <= len(sampled):
        raise InvalidWeightsError(f"last_periods needs 1 <= k <= {len(sampled)}, got {k}")
    return uniform_over(sampler.calendar, sampled[-k:])


def alpha_normalize(
        series: AdjustedPriceSeries,
        alpha: AveragingVector,
        level: float = DEFAULT_LEVEL,
) -> AdjustedPriceSeries:
    """Rescale `series` so that its alpha-average equals `level`."""
    if not (np.isfinite(level) and level > 0):
        raise InvalidScaleError(f"Normalization level must be positive, got {level}")
    require_same_calendar(series.calendar, alpha.calendar, "Price series and averaging vector")
    denominator = float(alpha.weights @ series.prices)
    logger.debug(f"Normalizing {series.label or 'series'} with alpha {alpha.label}: divisor {denominator:.6g}")
    return series.with_prices(series.prices * (level / denominator))
