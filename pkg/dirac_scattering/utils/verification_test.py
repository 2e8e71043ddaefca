import math

import pytest

from ..exceptions import ConfigurationError
from . import verification
from .verification import CheckResult, SuiteReport, expand_suites, run_suites


def test_check_result_bound():
    ok = CheckResult.bound('kernel', 'x', 1e-14, 1e-13)
    assert ok.passed
    assert ok.margin == pytest.approx(9e-14)
    bad = CheckResult.bound('kernel', 'x', 2e-13, 1e-13)
    assert not bad.passed
    assert bad.as_dict()['margin'] < 0


def test_nan_never_passes():
    assert not CheckResult.bound('kernel', 'x', math.nan, 1.0).passed


def test_exact_zero_tolerance():
    assert CheckResult.bound('limits', 'bitwise', 0.0, 0.0).passed
    assert not CheckResult.bound('limits', 'bitwise', 5e-324, 0.0).passed


def test_suite_report_counts():
    report = SuiteReport('kernel', [
        CheckResult.bound('kernel', 'a', 0.0, 1.0),
        CheckResult.bound('kernel', 'b', 2.0, 1.0),
    ], elapsed=0.5)
    assert not report.passed
    assert report.failed == 1
    data = report.as_dict()
    assert data['total'] == 2
    assert [c['name'] for c in data['checks']] == ['a', 'b']


def test_expand_suites():
    assert expand_suites(['all']) == list(verification.SUITE_NAMES)
    assert expand_suites(['limits', 'kernel']) == ['kernel', 'limits']
    assert expand_suites(['kernel', 'all']) == list(verification.SUITE_NAMES)
    with pytest.raises(ConfigurationError, match='unknown suite'):
        expand_suites(['quantum'])


def test_kernel_suite_passes():
    [report] = run_suites(['kernel'])
    assert report.passed, [c for c in report.checks if not c.passed]
    assert len(report.checks) == 6


def test_unitarity_suite_has_thirty_two_checks():
    [report] = run_suites(['unitarity'])
    assert len(report.checks) == 32
    assert report.passed


def test_limits_suite_passes():
    [report] = run_suites(['limits'])
    assert report.passed, [c for c in report.checks if not c.passed]


def test_seed_is_reproducible():
    first = run_suites(['kernel'], seed=7)[0].as_dict()
    second = run_suites(['kernel'], seed=7)[0].as_dict()
    assert [c['value'] for c in first['checks']] == [c['value'] for c in second['checks']]


@pytest.mark.slow
def test_closed_vs_series_suite_passes():
    [report] = run_suites(['closed_vs_series'])
    assert report.passed, [c for c in report.checks if not c.passed]


@pytest.mark.slow
def test_series_gap_bounds_are_tight():
    [report] = run_suites(['closed_vs_series'])
    relative = [c for c in report.checks if c.name.startswith('series relative gap')]
    absolute = [c for c in report.checks if c.name.startswith('series gap')]
    assert len(relative) == len(absolute) == len(verification.SERIES_ANGLES)
    assert all(c.tolerance <= 5e-3 for c in relative)
    assert all(c.passed for c in relative + absolute)


def test_gap_constant_stays_close_to_observed_peak():
    assert verification.GAP_CONSTANT <= 5.0


@pytest.fixture
def small_oracle(monkeypatch):
    monkeypatch.setattr(verification, 'ORACLE_GAMMAS', (0.1,))
    monkeypatch.setattr(verification, 'ORACLE_ENERGIES', (1.25,))


@pytest.mark.slow
def test_oracle_suite_passes(small_oracle):
    [report] = run_suites(['oracle'])
    assert len(report.checks) == len(verification.ORACLE_CHANNELS)
    assert report.passed, [c for c in report.checks if not c.passed]


@pytest.mark.slow
def test_gamma_fault_is_detected(small_oracle):
    [report] = run_suites(['oracle'], gamma_fault=1e-6)
    assert not report.passed
    failing = {c.name.split()[0] for c in report.checks if not c.passed}
    assert 'j=5/2' in failing
    assert 'j=-5/2' in failing
