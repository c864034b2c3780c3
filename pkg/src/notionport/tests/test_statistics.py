# src/notionport/tests/test_statistics.py
from __future__ import annotations

import logging
import math

import numpy as np
import pytest

from notionport.core.calendar import sample_periodic
from notionport.core.normalization import AveragingVector
from notionport.core.portfolio import NotionalShares, synthesize
from notionport.core.returns import ReturnKind, ReturnMatrix, return_matrix
from notionport.core.statistics import (
    WEEKS_PER_YEAR,
    ColumnStats,
    StatsReport,
    WeightSystem,
    annualize,
    centering_matrix,
    covariance,
    deviations,
    expected_return,
    portfolio_expected_return,
    portfolio_variance,
    return_risk_ratio,
    return_statistics,
    weighted_norm,
)
from notionport.errors import (
    DimensionMismatchError,
    InvalidScaleError,
    InvalidWeightsError,
    UndefinedRatioError,
)
from notionport.io.csv_io import read_returns_csv

from .helpers import PORTF, PROPORTIONS_LAST13, TICKERS, fixture_path, random_prices

COLUMNS = TICKERS + (PORTF,)

# annualized percent: e, sigma and e/sigma per column
ANNUAL_TABLE = {
    "returns_compound.csv": (
        (10.28, 13.30, 22.61, 8.94, 17.90, 10.45),
        (6.53, 18.70, 25.66, 22.13, 23.98, 11.47),
        (1.575, 0.711, 0.881, 0.404, 0.746, 0.911),
    ),
    "returns_continuous.csv": (
        (10.06, 11.52, 19.24, 6.46, 14.97, 9.78),
        (6.54, 18.82, 25.92, 22.36, 24.13, 11.50),
        (1.539, 0.612, 0.742, 0.289, 0.621, 0.850),
    ),
    "returns_linear_20091231.csv": (
        (10.60, 12.81, 22.74, 6.82, 16.50, 10.54),
        (7.19, 19.09, 27.72, 21.30, 24.24, 11.83),
        (1.474, 0.671, 0.820, 0.320, 0.681, 0.890),
    ),
    "returns_linear_last13.csv": (
        (9.43, 11.51, 19.05, 6.43, 14.59, 9.55),
        (6.40, 17.16, 23.23, 20.11, 21.42, 10.73),
        (1.474, 0.671, 0.820, 0.320, 0.681, 0.890),
    ),
}

# lower triangle of the linear-return correlation matrix of the five securities
CORRELATIONS = {
    ("IEF", "IWB"): -0.470, ("IEF", "IWM"): -0.497, ("IEF", "EFA"): -0.334, ("IEF", "EEM"): -0.296,
    ("IWB", "IWM"): 0.948, ("IWB", "EFA"): 0.911, ("IWB", "EEM"): 0.887,
    ("IWM", "EFA"): 0.817, ("IWM", "EEM"): 0.829,
    ("EFA", "EEM"): 0.904,
}


def _annual_report(name: str, kind: str) -> StatsReport:
    R = read_returns_csv(fixture_path(name), kind)
    return annualize(return_statistics(R, WeightSystem.uniform(R.periods)), WEEKS_PER_YEAR)


@pytest.mark.parametrize(
    "name, kind",
    [
        ("returns_compound.csv", "compound"),
        ("returns_continuous.csv", "continuous"),
        ("returns_linear_20091231.csv", "linear"),
        ("returns_linear_last13.csv", "linear"),
    ],
)
def test_annualized_statistics_match_table(name, kind):
    report = _annual_report(name, kind)
    es, sigmas, ratios = ANNUAL_TABLE[name]
    assert report.periods_per_year == WEEKS_PER_YEAR
    assert [c.ticker for c in report.columns] == list(COLUMNS)
    for column, e, sigma, ratio in zip(report.columns, es, sigmas, ratios):
        assert column.e * 100 == pytest.approx(e, abs=0.02), column.ticker
        assert column.sigma * 100 == pytest.approx(sigma, abs=0.02), column.ticker
        assert column.ratio == pytest.approx(ratio, abs=0.005), column.ticker


def test_linear_ratios_do_not_depend_on_the_denomination():
    first = _annual_report("returns_linear_20091231.csv", "linear")
    last13 = _annual_report("returns_linear_last13.csv", "linear")
    for a, b in zip(first.columns, last13.columns):
        assert a.ratio == pytest.approx(b.ratio, abs=0.002)


def test_correlations_match_table():
    R = read_returns_csv(fixture_path("returns_linear_20091231.csv"), "linear")
    report = covariance(R.securities, WeightSystem.uniform(R.periods), TICKERS)
    for (a, b), expected in CORRELATIONS.items():
        assert report.correlation(a, b) == pytest.approx(expected, abs=0.001)
        assert report.correlation(b, a) == report.correlation(a, b)
    np.testing.assert_array_equal(np.diag(report.C), 1.0)


def test_portfolio_moments_from_proportions():
    R = read_returns_csv(fixture_path("returns_linear_last13.csv"), "linear")
    omega = WeightSystem.uniform(R.periods)
    report = covariance(R.securities, omega, TICKERS)
    sigma_P = math.sqrt(WEEKS_PER_YEAR * portfolio_variance(report.V, PROPORTIONS_LAST13))
    assert sigma_P * 100 == pytest.approx(10.73, abs=0.02)
    e = omega.weights @ R.securities
    e_P = WEEKS_PER_YEAR * portfolio_expected_return(e, PROPORTIONS_LAST13)
    assert e_P * 100 == pytest.approx(9.55, abs=0.02)


def test_proportion_labels():
    R = read_returns_csv(fixture_path("returns_linear_last13.csv"), "linear")
    report = return_statistics(R, WeightSystem.uniform(R.periods), proportions=PROPORTIONS_LAST13)
    assert report.column("IWB").proportion == pytest.approx(0.4035)
    assert report.column(PORTF).proportion == pytest.approx(1.0)
    assert report.to_dict()["columns"]["IEF"]["p"] == pytest.approx(0.3565)
    with pytest.raises(DimensionMismatchError):
        return_statistics(R, WeightSystem.uniform(R.periods), proportions=[0.5, 0.5])
    with pytest.raises(KeyError):
        report.column("SPY")


def test_portfolio_proportion_labels_only_the_portfolio():
    R = read_returns_csv(fixture_path("returns_compound.csv"), "compound")
    report = return_statistics(R, WeightSystem.uniform(R.periods), portfolio_proportion=1.0)
    assert report.column(PORTF).proportion == 1.0
    assert all(report.column(t).proportion is None for t in TICKERS)


def test_ratio_and_correlation_invariance(calendar_2010, rng):
    weekly_2010 = sample_periodic(calendar_2010, "week-ending")
    X = random_prices(rng, calendar_2010, 4)
    xP = synthesize(X, NotionalShares(np.array([1.0, 2.0, 0.0, 0.5]), X.tickers))
    omega = WeightSystem.uniform(weekly_2010.periods)
    reference = None
    for _ in range(100):
        w = rng.uniform(size=len(calendar_2010)) * (rng.uniform(size=len(calendar_2010)) < 0.2)
        w[rng.integers(len(calendar_2010))] += 1.0
        alpha = AveragingVector(calendar_2010, w / w.sum())
        lam = rng.uniform(0.1, 10.0, size=4)
        R = return_matrix(X.scaled(lam), xP, weekly_2010, "linear", alpha, level=float(rng.uniform(1, 500)))
        stats = return_statistics(R, omega)
        ratios = np.array([c.ratio for c in stats.columns])
        C = covariance(R, omega).C
        if reference is None:
            reference = (ratios, C)
            continue
        np.testing.assert_allclose(ratios, reference[0], rtol=1e-10)
        np.testing.assert_allclose(C, reference[1], atol=1e-12)


def test_centering_identity(rng):
    R = rng.normal(size=(12, 3))
    w = rng.uniform(0.5, 1.5, size=12)
    omega = WeightSystem(w / w.sum())
    K = centering_matrix(omega)
    np.testing.assert_allclose(K @ R, deviations(R, omega), atol=1e-14)
    np.testing.assert_allclose(omega.weights @ deviations(R, omega), 0.0, atol=1e-15)
    for j in range(3):
        z = deviations(R, omega)[:, j]
        assert weighted_norm(z, omega) ** 2 == pytest.approx(covariance(R, omega).V[j, j], rel=1e-12)
        assert expected_return(R[:, j], omega) == pytest.approx(float(omega.weights @ R[:, j]))


def test_covariance_as_weighted_projection(rng):
    R = rng.normal(size=(12, 3))
    w = rng.uniform(0.5, 1.5, size=12)
    omega = WeightSystem(w / w.sum())
    W = np.diag(omega.weights) - np.outer(omega.weights, omega.weights)
    np.testing.assert_allclose(R.T @ W @ R, covariance(R, omega).V, atol=1e-13)
    K = centering_matrix(omega)
    np.testing.assert_allclose(K.T @ np.diag(omega.weights) @ K, W, atol=1e-15)


def test_weights_change_the_moments():
    r = np.array([0.01, 0.02, -0.01, 0.03])
    uniform = WeightSystem.uniform(4)
    recent = WeightSystem(np.array([0.1, 0.1, 0.3, 0.5]))
    assert expected_return(r, uniform) == pytest.approx(0.0125)
    assert expected_return(r, recent) == pytest.approx(0.015)


def test_zero_variance_column(caplog):
    R = np.array([[0.01, 0.02], [0.01, -0.01], [0.01, 0.03]])
    omega = WeightSystem.uniform(3)
    with caplog.at_level(logging.WARNING, logger="notionport.core.statistics"):
        report = covariance(R, omega, ("FLAT", "MOVE"))
    assert "zero-variance" in caplog.text
    assert np.isnan(report.correlation("FLAT", "MOVE"))
    assert np.isnan(report.C[0, 0])
    assert report.C[1, 1] == 1.0
    assert report.V[0, 0] == pytest.approx(0.0, abs=1e-30)
    with pytest.raises(UndefinedRatioError):
        return_risk_ratio(R[:, 0], omega)
    stats = return_statistics(R, omega, ("FLAT", "MOVE"))
    assert stats.column("FLAT").ratio is None
    assert stats.to_dict()["columns"]["FLAT"]["ratio"] is None


def test_non_linear_kinds_are_flagged(rng, caplog):
    R = ReturnMatrix(("2010-01-08", "2010-01-15", "2010-01-22"), "compound", rng.normal(0, 0.01, (3, 2)), ("A", "B"))
    with caplog.at_level(logging.INFO, logger="notionport.core.statistics"):
        report = covariance(R, WeightSystem.uniform(3))
    assert report.kind is ReturnKind.COMPOUND
    assert not report.within_linear_model
    assert "not those of the linear portfolio model" in caplog.text
    assert covariance(R.values, WeightSystem.uniform(3)).within_linear_model


def test_annualize():
    report = StatsReport("weekly", (ColumnStats("A", 0.002, 0.01),))
    yearly = annualize(report, 52)
    assert yearly.columns[0].e == pytest.approx(0.104)
    assert yearly.columns[0].variance == pytest.approx(0.0052)
    assert yearly.columns[0].ratio == pytest.approx(0.2 * math.sqrt(52))
    assert annualize(report, 1).columns == report.columns
    for bad in (0, -52, float("nan")):
        with pytest.raises(InvalidScaleError):
            annualize(report, bad)


def test_weight_system_validation():
    with pytest.raises(InvalidWeightsError):
        WeightSystem(np.array([0.5, 0.6]))
    with pytest.raises(InvalidWeightsError):
        WeightSystem(np.array([1.0, 0.0]))
    with pytest.raises(InvalidWeightsError):
        WeightSystem.uniform(0)
    with pytest.raises(DimensionMismatchError):
        expected_return(np.zeros(3), WeightSystem.uniform(4))
    with pytest.raises(DimensionMismatchError):
        portfolio_variance(np.eye(3), np.ones(2))
    with pytest.raises(DimensionMismatchError):
        portfolio_expected_return(np.ones(3), np.ones(2))
