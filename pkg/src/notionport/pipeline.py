# src/notionport/pipeline.py
"""
Orchestration shared by the CLI and the tests: config + price table in, analysis objects out.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from notionport.core.calendar import MarketCalendar, PeriodSampler, sample_periodic
from notionport.core.normalization import (
    AveragingVector,
    alpha_normalize,
    last_periods,
    point_mass,
    uniform_over,
)
from notionport.core.portfolio import (
    ClosingPortfolioMatrix,
    NotionalPortfolio,
    NotionalShares,
    PriceMatrix,
    closing_portfolios,
    convert_portfolio,
    notional_portfolio,
    synthesize,
)
from notionport.core.price_series import AdjustedPriceSeries
from notionport.core.returns import ReturnKind, ReturnMatrix, return_matrix
from notionport.core.statistics import (
    CovarianceReport,
    StatsReport,
    WeightSystem,
    annualize,
    covariance,
    return_statistics,
)
from notionport.errors import ConfigurationError, InvalidWeightsError, UnknownTickerError
from notionport.io.config import AnalysisConfig, NormalizationSection, PeriodSection, SolverSection

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PreparedData:
    """Securities X and portfolio x_P on one calendar; `shares` set when x_P was synthesized."""
    securities: PriceMatrix
    portfolio: AdjustedPriceSeries
    shares: NotionalShares | None = None

    @property
    def calendar(self) -> MarketCalendar:
        return self.securities.calendar

    def with_portfolio(self) -> PriceMatrix:
        """Securities followed by the portfolio column."""
        return PriceMatrix(
            self.calendar,
            np.column_stack([self.securities.values, self.portfolio.prices]),
            self.securities.tickers + (self.portfolio.label,),
        )


def prepare(prices: PriceMatrix, config: AnalysisConfig) -> PreparedData:
    label = config.portfolio.label
    shares_cfg = config.portfolio.shares

    if shares_cfg is not None:
        tickers = [t for t in prices.tickers if t != label]
        if len(tickers) != prices.n:
            logger.warning(f"Dropping the '{label}' column from the input; the portfolio is synthesized from shares")
        if not tickers:
            raise ConfigurationError("No security columns left after dropping the portfolio column")
        securities = prices.select(tickers)
        try:
            shares = NotionalShares.from_mapping(shares_cfg, securities.tickers)
        except UnknownTickerError as e:
            raise ConfigurationError(f"portfolio.shares: {e}") from e
        portfolio = synthesize(securities, shares, label)
        logger.info(f"Synthesized {label} from {len(shares_cfg)} notional share position(s)")
        return PreparedData(securities, portfolio, shares)

    if label not in prices.tickers:
        raise ConfigurationError(
            f"Input has no '{label}' column and portfolio.shares is not configured"
        )
    tickers = [t for t in prices.tickers if t != label]
    if not tickers:
        raise ConfigurationError(f"Input has only the portfolio column '{label}'")
    return PreparedData(prices.select(tickers), prices.column(label))


def build_sampler(calendar: MarketCalendar, period: PeriodSection) -> PeriodSampler:
    return sample_periodic(
        calendar,
        period.rule,
        dates=period.dates or None,
        start=period.start,
        end=period.end,
    )


def build_alpha(
        calendar: MarketCalendar,
        sampler: PeriodSampler,
        normalization: NormalizationSection,
) -> AveragingVector:
    if normalization.kind == "point-mass":
        return point_mass(calendar, normalization.date or calendar.first)
    if normalization.last_periods is not None:
        return last_periods(sampler, normalization.last_periods)
    return uniform_over(calendar, normalization.dates)


def build_weights(config: AnalysisConfig, periods: int) -> WeightSystem:
    weights = config.statistics.weights
    if weights == "uniform":
        return WeightSystem.uniform(periods)
    if len(weights) != periods:
        raise ConfigurationError(f"statistics.weights has {len(weights)} entries for {periods} return periods")
    try:
        return WeightSystem(np.asarray(weights, dtype=np.float64))
    except InvalidWeightsError as e:
        raise ConfigurationError(f"statistics.weights: {e}") from e


def normalized_prices(data: PreparedData, alpha: AveragingVector, level: float) -> PreparedData:
    """Every series alpha-normalized to `level`."""
    return PreparedData(data.securities.normalized(alpha, level), alpha_normalize(data.portfolio, alpha, level))


def compute_returns(
        data: PreparedData,
        sampler: PeriodSampler,
        kind: ReturnKind | str,
        alpha: AveragingVector | None = None,
        level: float = 100.0,
) -> ReturnMatrix:
    return return_matrix(data.securities, data.portfolio, sampler, kind, alpha, level)


def compute_notional(
        data: PreparedData,
        alpha: AveragingVector,
        level: float,
        solver: SolverSection,
) -> NotionalPortfolio:
    normalized = normalized_prices(data, alpha, level)
    return notional_portfolio(
        normalized.securities,
        normalized.portfolio,
        alpha.label,
        rank_tolerance=solver.rank_tolerance,
        negative_tolerance=solver.negative_tolerance,
    )


def convert_notional(
        p_alpha: NotionalPortfolio,
        data: PreparedData,
        alpha: AveragingVector,
        beta: AveragingVector,
        level: float,
) -> NotionalPortfolio:
    normalized = normalized_prices(data, alpha, level)
    return convert_portfolio(p_alpha, normalized.securities, normalized.portfolio, beta)


def compute_closing(
        data: PreparedData,
        sampler: PeriodSampler,
        alpha: AveragingVector,
        config: AnalysisConfig,
) -> ClosingPortfolioMatrix:
    """Closing portfolios on the sampled days, from configured shares or the alpha-notional portfolio."""
    if data.shares is not None:
        return closing_portfolios(data.securities, data.shares, sampler)
    level = config.normalization.level
    p = compute_notional(data, alpha, level, config.solver)
    normalized = normalized_prices(data, alpha, level)
    return closing_portfolios(normalized.securities, NotionalShares(p.proportions, p.tickers), sampler)


@dataclass(frozen=True)
class StatsBlock:
    report: StatsReport
    returns: ReturnMatrix
    notional: NotionalPortfolio | None = None


@dataclass(frozen=True)
class StatsResult:
    blocks: tuple[StatsBlock, ...]
    correlations: CovarianceReport


def compute_stats(data: PreparedData, config: AnalysisConfig) -> StatsResult:
    """
    One block each for compound and continuous returns, then one linear block per
    denomination (the main normalization first), annualized; correlations of the
    main linear returns over the securities.
    """
    sampler = build_sampler(data.calendar, config.period)
    omega = build_weights(config, sampler.periods)
    per_year = config.statistics.periods_per_year
    blocks: list[StatsBlock] = []

    for kind in (ReturnKind.COMPOUND, ReturnKind.CONTINUOUS):
        returns = compute_returns(data, sampler, kind)
        # only the portfolio column has a proportion for these kinds
        report = annualize(return_statistics(returns, omega, portfolio_proportion=1.0), per_year)
        blocks.append(StatsBlock(report, returns))

    denominations = [config.normalization] + list(config.statistics.linear_denominations)
    for section in denominations:
        alpha = build_alpha(data.calendar, sampler, section)
        returns = compute_returns(data, sampler, ReturnKind.LINEAR, alpha, section.level)
        notional = compute_notional(data, alpha, section.level, config.solver)
        report = annualize(
            return_statistics(returns, omega, proportions=notional.proportions), per_year
        )
        blocks.append(StatsBlock(report, returns, notional))

    main_linear = blocks[2].returns
    correlations = covariance(main_linear.securities, omega, main_linear.tickers[:-1])
    logger.info(f"Computed {len(blocks)} statistics blocks over {sampler.periods} periods")
    return StatsResult(tuple(blocks), correlations)


def stats_for_returns(returns: ReturnMatrix, config: AnalysisConfig) -> StatsResult:
    """Single annualized block for a precomputed return table (e.g. read back from CSV)."""
    omega = build_weights(config, returns.periods)
    report = annualize(return_statistics(returns, omega), config.statistics.periods_per_year)
    columns = returns.securities if len(returns.tickers) > 1 else returns.values
    tickers = returns.tickers[:-1] if len(returns.tickers) > 1 else returns.tickers
    correlations = covariance(columns, omega, tickers)
    return StatsResult((StatsBlock(report, returns),), correlations)
