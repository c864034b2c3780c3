# src/notionport/tests/test_config.py
from __future__ import annotations

from datetime import date
from pathlib import Path

import pytest

from notionport.core.calendar import PeriodRule
from notionport.errors import ConfigurationError
from notionport.io.config import AnalysisConfig, config_from_mapping, load_config

from .helpers import fixture_path

EXAMPLE_CONFIG = Path(__file__).resolve().parents[3] / "config.example.yaml"


def test_defaults():
    config = load_config(None)
    assert config == AnalysisConfig()
    assert config.portfolio.label == "PORTF"
    assert config.portfolio.shares is None
    assert config.normalization.kind == "point-mass"
    assert config.normalization.date is None
    assert config.normalization.level == 100.0
    assert config.period.rule is PeriodRule.WEEK_ENDING
    assert config.statistics.weights == "uniform"
    assert config.statistics.periods_per_year == 52
    assert config.solver.rank_tolerance == 1e-8
    assert config.solver.negative_tolerance == 1e-10


def test_study_config():
    config = load_config(fixture_path("study_config.yaml"))
    assert config.normalization.date == date(2009, 12, 31)
    assert config.period.start == date(2010, 4, 1)
    [extra] = config.statistics.linear_denominations
    assert extra.kind == "uniform" and extra.last_periods == 13
    assert config.solver.negative_tolerance == 1e-3
    assert config.plot.exclude == ["IWM", "EEM"]


@pytest.mark.skipif(not EXAMPLE_CONFIG.exists(), reason="source checkout only")
def test_example_config_is_valid():
    config = load_config(EXAMPLE_CONFIG)
    assert config.period.rule is PeriodRule.WEEK_ENDING
    assert config.statistics.linear_denominations[0].last_periods == 13


def test_shares_mapping():
    config = config_from_mapping({"portfolio": {"shares": {"IEF": 350, "IWB": 400, "EFA": 250}}})
    assert config.portfolio.shares == {"IEF": 350.0, "IWB": 400.0, "EFA": 250.0}


@pytest.mark.parametrize(
    "data, fragment",
    [
        ({"portfolio": {"shares": {"IEF": -1}}}, "portfolio.shares"),
        ({"portfolio": {"shares": {"IEF": 0}}}, "at least one"),
        ({"normalization": {"kind": "uniform"}}, "needs dates or last_periods"),
        ({"normalization": {"kind": "uniform", "dates": ["2010-12-31"], "last_periods": 3}}, "not both"),
        ({"normalization": {"level": 0}}, "normalization.level"),
        ({"normalization": {"kind": "geometric"}}, "normalization.kind"),
        ({"period": {"rule": "monthly"}}, "period.rule"),
        ({"period": {"rule": "explicit", "dates": ["2010-12-31"]}}, "at least two dates"),
        ({"period": {"start": "2010-12-31", "end": "2010-01-01"}}, "after end"),
        ({"statistics": {"periods_per_year": 0}}, "statistics.periods_per_year"),
        ({"statistics": {"weights": "recent"}}, "statistics.weights"),
        ({"solver": {"negative_tolerance": -1}}, "solver.negative_tolerance"),
        ({"output": {"format": "xlsx"}}, "output"),
        ({"period": {"rule": "every-day", "step": 2}}, "period.step"),
    ],
)
def test_invalid_configs(data, fragment):
    with pytest.raises(ConfigurationError) as exc:
        config_from_mapping(data)
    assert fragment in str(exc.value)


def test_file_errors(tmp_path):
    with pytest.raises(ConfigurationError, match="Cannot read config"):
        load_config(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("period: [unclosed\n")
    with pytest.raises(ConfigurationError, match="not valid YAML"):
        load_config(bad)
    scalar = tmp_path / "scalar.yaml"
    scalar.write_text("42\n")
    with pytest.raises(ConfigurationError, match="mapping at top level"):
        load_config(scalar)
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    assert load_config(empty) == AnalysisConfig()
