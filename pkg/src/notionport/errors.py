# src/notionport/errors.py
"""
Exception hierarchy for notionport.

Two families, mapped to CLI exit codes in one place (cli.main):
  - ValidationError -> 1 (bad input, bad config, inconsistent shapes/calendars)
  - NumericalError  -> 2 (rank deficiency, undefined statistics, infeasible recovery)
"""
from __future__ import annotations


class NotionportError(Exception):
    """Base exception for notionport."""
    pass


# ----------------------------------------------------------------------------
# Validation family
# ----------------------------------------------------------------------------

class ValidationError(NotionportError, ValueError):
    """Raised when inputs violate a documented precondition."""
    pass


class UnknownDateError(ValidationError):
    """Raised when a date is not part of the market calendar."""

    def __init__(self, day: object, message: str | None = None):
        self.day = day
        super().__init__(message or f"Date not in market calendar: {day}")


class DegenerateSamplerError(ValidationError):
    """Raised when fewer than two market days are sampled."""
    pass


class CalendarMismatchError(ValidationError):
    """Raised when two objects are indexed by different market calendars."""
    pass


class DimensionMismatchError(ValidationError):
    """Raised when vector/matrix shapes do not agree."""
    pass


class InvalidDividendError(ValidationError):
    """Raised when a cash dividend is not below the prior close."""
    pass


class ConflictingActionError(ValidationError):
    """Raised for two corporate actions of the same kind on the same ex-date."""
    pass


class InvalidScaleError(ValidationError):
    """Raised for non-positive scale factors or normalization levels."""
    pass


class InvalidWeightsError(ValidationError):
    """Raised when averaging vectors, weight systems or shares break their invariants."""
    pass


class UnknownTickerError(ValidationError):
    """Raised when a ticker is not a column of the price data."""

    def __init__(self, ticker: str, known: list[str] | tuple[str, ...] = ()):
        self.ticker = ticker
        detail = f" (known: {', '.join(known)})" if known else ""
        super().__init__(f"Unknown ticker: {ticker}{detail}")


class CsvParseError(ValidationError):
    """Raised for malformed CSV input. `line` is 1-based and counts the header."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class ConfigurationError(ValidationError):
    """Raised for invalid analysis configuration."""
    pass


# ----------------------------------------------------------------------------
# Numerical family
# ----------------------------------------------------------------------------

class NumericalError(NotionportError):
    """Raised when a computation is numerically undefined for the given data."""
    pass


class RankDeficiencyError(NumericalError):
    """Raised when a matrix that must have full column rank does not."""

    def __init__(self, message: str, *, ratio: float):
        self.ratio = ratio
        super().__init__(f"{message} (smallest/largest singular value ratio {ratio:.3e})")


class UnderdeterminedError(NumericalError):
    """Raised when there are fewer equations than unknowns."""
    pass


class NegativeProportionError(NumericalError):
    """Raised when a recovered long-only proportion is materially negative."""
    pass


class UndefinedRatioError(NumericalError):
    """Raised when a return-risk ratio is requested for a zero-variance column."""
    pass
