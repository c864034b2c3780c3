# src/notionport/core/statistics.py
"""
Weighted return statistics.

With a weight system omega (omega_i > 0, sum 1) over the m return periods:

  e_j   = omega^T r_j                      expected periodic return
  z_j   = r_j - 1 e_j                      deviations (omega-mean zero)
  v_jk  = sum_i omega_i z_ij z_ik          covariance (no small-sample correction)
  c_jk  = v_jk / (sigma_j sigma_k)         correlation
  v_P   = p^T V p,  e_P = e^T p            portfolio moments under r_P = R p

For linear returns the ratio e/sigma and the correlations do not depend on the
averaging vector used to denominate the returns.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from notionport.core.price_series import frozen_array
from notionport.core.returns import ReturnKind, ReturnMatrix
from notionport.errors import (
    DimensionMismatchError,
    InvalidScaleError,
    InvalidWeightsError,
    UndefinedRatioError,
)

logger = logging.getLogger(__name__)

WEEKS_PER_YEAR = 52
WEIGHT_SUM_TOLERANCE = 1e-12
# variances at or below this are treated as zero (returns are fractions)
ZERO_VARIANCE = 1e-24


@dataclass(frozen=True)
class WeightSystem:
    weights: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        w = frozen_array(self.weights)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or w.size == 0:
            raise InvalidWeightsError(f"Weights must be a nonempty vector, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InvalidWeightsError("Weights must be finite and strictly positive")
        total = float(w.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise InvalidWeightsError(f"Weights must sum to 1, got {total!r}")

    @classmethod
    def uniform(cls, m: int) -> "WeightSystem":
        if m < 1:
            raise InvalidWeightsError("A weight system needs at least one period")
        return cls(np.full(m, 1.0 / m))

    def __len__(self) -> int:
        return self.weights.shape[0]


def _as_matrix(R: np.ndarray | ReturnMatrix) -> np.ndarray:
    values = R.values if isinstance(R, ReturnMatrix) else np.asarray(R, dtype=np.float64)
    return values.reshape(-1, 1) if values.ndim == 1 else values


def _require_rows(rows: int, omega: WeightSystem) -> None:
    if rows != len(omega):
        raise DimensionMismatchError(f"{rows} return periods but {len(omega)} weights")


def expected_return(r: np.ndarray, omega: WeightSystem) -> float:
    r = np.asarray(r, dtype=np.float64)
    _require_rows(r.shape[0], omega)
    return float(omega.weights @ r)


def deviations(R: np.ndarray | ReturnMatrix, omega: WeightSystem) -> np.ndarray:
    values = _as_matrix(R)
    _require_rows(values.shape[0], omega)
    return values - omega.weights @ values


def weighted_norm(v: np.ndarray, omega: WeightSystem) -> float:
    """sqrt(sum_i omega_i v_i^2)."""
    v = np.asarray(v, dtype=np.float64)
    _require_rows(v.shape[0], omega)
    return math.sqrt(float(omega.weights @ (v * v)))


def centering_matrix(omega: WeightSystem) -> np.ndarray:
    """I - 1 omega^T; applied to a return column it yields the deviation column."""
    m = len(omega)
    return np.eye(m) - np.outer(np.ones(m), omega.weights)


@dataclass(frozen=True)
class CovarianceReport:
    """
    V, C and Z for the columns of a return matrix.

    Correlations involving a zero-variance column are NaN.
    `kind` is the return kind when known; only linear returns make covariances
    consistent with r_P = R p (see `within_linear_model`).
    """
    V: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)
    Z: np.ndarray = field(repr=False)
    tickers: tuple[str, ...] = ()
    kind: ReturnKind | None = None

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.V), 0.0, None))

    @property
    def within_linear_model(self) -> bool:
        return self.kind in (None, ReturnKind.LINEAR)

    def correlation(self, a: str, b: str) -> float:
        return float(self.C[self.tickers.index(a), self.tickers.index(b)])


def covariance(
        R: np.ndarray | ReturnMatrix,
        omega: WeightSystem,
        tickers: Sequence[str] = (),
) -> CovarianceReport:
    values = _as_matrix(R)
    kind = None
    if isinstance(R, ReturnMatrix):
        kind = R.kind
        tickers = tickers or R.tickers
    if tickers and len(tickers) != values.shape[1]:
        raise DimensionMismatchError(f"{len(tickers)} tickers for {values.shape[1]} return columns")

    Z = deviations(values, omega)
    V = (Z * omega.weights[:, None]).T @ Z
    V = (V + V.T) / 2.0

    variances = np.diag(V).copy()
    defined = variances > ZERO_VARIANCE
    sigma = np.sqrt(np.where(defined, variances, 1.0))
    C = V / np.outer(sigma, sigma)
    np.fill_diagonal(C, 1.0)
    C[~defined, :] = np.nan
    C[:, ~defined] = np.nan
    if not defined.all():
        logger.warning(f"{int((~defined).sum())} zero-variance column(s): correlations undefined")
    if kind is not None and kind is not ReturnKind.LINEAR:
        logger.info(f"Covariances of {kind.value} returns are not those of the linear portfolio model")

    return CovarianceReport(frozen_array(V), frozen_array(C), frozen_array(Z), tuple(tickers), kind)


def portfolio_variance(V: np.ndarray, p: np.ndarray) -> float:
    """p^T V p."""
    V = np.asarray(V, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if V.shape != (p.shape[0], p.shape[0]):
        raise DimensionMismatchError(f"Covariance matrix {V.shape} and proportions {p.shape} do not agree")
    return float(p @ V @ p)


def portfolio_expected_return(E: np.ndarray, p: np.ndarray) -> float:
    """e_P = sum_j e_j p_j."""
    E = np.asarray(E, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if E.shape != p.shape:
        raise DimensionMismatchError(f"Expected returns {E.shape} and proportions {p.shape} do not agree")
    return float(E @ p)


def return_risk_ratio(r: np.ndarray, omega: WeightSystem) -> float:
    e = expected_return(r, omega)
    variance = weighted_norm(np.asarray(r, dtype=np.float64) - e, omega) ** 2
    if variance <= ZERO_VARIANCE:
        raise UndefinedRatioError("Return-risk ratio is undefined for a zero-variance return column")
    return e / math.sqrt(variance)


# ----------------------------------------------------------------------------
# Reports
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ColumnStats:
    ticker: str
    e: float
    sigma: float
    proportion: float | None = None

    @property
    def variance(self) -> float:
        return self.sigma * self.sigma

    @property
    def ratio(self) -> float | None:
        """e/sigma, None when sigma is 0."""
        if self.sigma * self.sigma <= ZERO_VARIANCE:
            return None
        return self.e / self.sigma


@dataclass(frozen=True)
class StatsReport:
    """Per-column e, sigma and e/sigma; `periods_per_year` records annualization (1 = periodic)."""
    title: str
    columns: tuple[ColumnStats, ...]
    periods_per_year: float = 1.0

    def column(self, ticker: str) -> ColumnStats:
        for c in self.columns:
            if c.ticker == ticker:
                return c
        raise KeyError(ticker)

    def to_dict(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "periods_per_year": self.periods_per_year,
            "columns": {
                c.ticker: {"p": c.proportion, "e": c.e, "sigma": c.sigma, "ratio": c.ratio}
                for c in self.columns
            },
        }


def return_statistics(
        R: np.ndarray | ReturnMatrix,
        omega: WeightSystem,
        tickers: Sequence[str] = (),
        *,
        title: str = "",
        proportions: Sequence[float] | None = None,
        portfolio_proportion: float | None = None,
) -> StatsReport:
    """
    e and sigma of every column.

    `proportions`, when given, label the security columns (the portfolio column,
    last, gets the sum). Without them, `portfolio_proportion` labels the last column only.
    """
    values = _as_matrix(R)
    if isinstance(R, ReturnMatrix):
        tickers = tickers or R.tickers
        title = title or R.title
    if not tickers:
        tickers = tuple(f"x{j + 1}" for j in range(values.shape[1]))
    if len(tickers) != values.shape[1]:
        raise DimensionMismatchError(f"{len(tickers)} tickers for {values.shape[1]} return columns")

    labels: list[float | None] = [None] * values.shape[1]
    if proportions is not None:
        props = [float(x) for x in proportions]
        if len(props) != values.shape[1] - 1:
            raise DimensionMismatchError(
                f"{len(props)} proportions for {values.shape[1] - 1} security columns"
            )
        labels = props + [float(sum(props))]
    elif portfolio_proportion is not None:
        labels[-1] = float(portfolio_proportion)

    _require_rows(values.shape[0], omega)
    e = omega.weights @ values
    Z = values - e
    sigma = np.sqrt(omega.weights @ (Z * Z))
    columns = tuple(
        ColumnStats(str(t), float(e[j]), float(sigma[j]), labels[j]) for j, t in enumerate(tickers)
    )
    return StatsReport(title, columns)


def annualize(report: StatsReport, periods_per_year: float = WEEKS_PER_YEAR) -> StatsReport:
    """e times P, variance times P (sigma times sqrt P), so e/sigma scales by sqrt P."""
    if not (np.isfinite(periods_per_year) and periods_per_year > 0):
        raise InvalidScaleError(f"Periods per year must be positive, got {periods_per_year}")
    root = math.sqrt(periods_per_year)
    columns = tuple(replace(c, e=c.e * periods_per_year, sigma=c.sigma * root) for c in report.columns)
    return StatsReport(report.title, columns, report.periods_per_year * periods_per_year)
