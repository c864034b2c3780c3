# src/notionport/io/config.py
from __future__ import annotations

import datetime as dt
import logging
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from notionport.core.calendar import PeriodRule
from notionport.core.rank import DEFAULT_RANK_TOLERANCE
from notionport.core.statistics import WEEKS_PER_YEAR
from notionport.errors import ConfigurationError

logger = logging.getLogger(__name__)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PortfolioSection(_Section):
    label: str = "PORTF"
    # ticker -> notional shares; None means "take the portfolio column from the CSV"
    shares: dict[str, float] | None = None

    @field_validator("shares")
    @classmethod
    def _shares_nonnegative(cls, v: dict[str, float] | None) -> dict[str, float] | None:
        if v is None:
            return v
        if any(s < 0 for s in v.values()):
            raise ValueError("notional shares must be >= 0")
        if not any(s > 0 for s in v.values()):
            raise ValueError("at least one notional share must be positive")
        return v


class NormalizationSection(_Section):
    kind: Literal["point-mass", "uniform"] = "point-mass"
    date: dt.date | None = None
    dates: list[dt.date] = []
    last_periods: int | None = Field(default=None, ge=1)
    level: float = Field(default=100.0, gt=0)

    @model_validator(mode="after")
    def _uniform_needs_days(self) -> "NormalizationSection":
        if self.kind == "uniform":
            if self.dates and self.last_periods is not None:
                raise ValueError("give either dates or last_periods for uniform normalization, not both")
            if not self.dates and self.last_periods is None:
                raise ValueError("uniform normalization needs dates or last_periods")
        return self


class PeriodSection(_Section):
    rule: PeriodRule = PeriodRule.WEEK_ENDING
    start: dt.date | None = None
    end: dt.date | None = None
    dates: list[dt.date] = []

    @model_validator(mode="after")
    def _explicit_needs_dates(self) -> "PeriodSection":
        if self.rule is PeriodRule.EXPLICIT and len(self.dates) < 2:
            raise ValueError("the explicit period rule needs at least two dates")
        if self.start and self.end and self.start > self.end:
            raise ValueError(f"period start {self.start} is after end {self.end}")
        return self


class StatisticsSection(_Section):
    # "uniform" or explicit per-period weights (positive, summing to 1)
    weights: Literal["uniform"] | list[float] = "uniform"
    periods_per_year: float = Field(default=WEEKS_PER_YEAR, gt=0)
    # extra denominations for linear-return blocks; the main normalization is always included
    linear_denominations: list[NormalizationSection] = []


class SolverSection(_Section):
    rank_tolerance: float = Field(default=DEFAULT_RANK_TOLERANCE, gt=0)
    negative_tolerance: float = Field(default=1e-10, ge=0)


class PlotSection(_Section):
    exclude: list[str] = []


class AnalysisConfig(_Section):
    portfolio: PortfolioSection = Field(default_factory=PortfolioSection)
    normalization: NormalizationSection = Field(default_factory=NormalizationSection)
    period: PeriodSection = Field(default_factory=PeriodSection)
    statistics: StatisticsSection = Field(default_factory=StatisticsSection)
    solver: SolverSection = Field(default_factory=SolverSection)
    plot: PlotSection = Field(default_factory=PlotSection)


def _format_pydantic_error(e: ValidationError) -> str:
    parts = []
    for err in e.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def config_from_mapping(data: dict[str, Any] | None) -> AnalysisConfig:
    try:
        return AnalysisConfig.model_validate(data or {})
    except ValidationError as e:
        raise ConfigurationError(f"Invalid configuration: {_format_pydantic_error(e)}") from e


def load_config(path: str | Path | None) -> AnalysisConfig:
    """Read and validate a YAML analysis config; None gives the defaults."""
    if path is None:
        return AnalysisConfig()
    p = Path(path)
    try:
        raw = yaml.safe_load(p.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigurationError(f"Cannot read config {p}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Config {p} is not valid YAML: {e}") from e
    if raw is not None and not isinstance(raw, dict):
        raise ConfigurationError(f"Config {p} must be a mapping at top level")
    logger.debug(f"Loaded config from {p}")
    return config_from_mapping(raw)
