"""
Tests for the special-function kernel.

Reference values come from mpmath at 30-40 significant digits, evaluated
inside the tests.
"""

import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ..exceptions import ConvergenceError, DomainError, PoleError
from .specfun import (
    gamma_ratio,
    gauss_f_unit,
    gauss_f_unit_with_error,
    inject_gamma_fault,
    kummer_phi,
    kummer_phi_derivative,
    kummer_recurrence_check,
    kummer_series_partial,
    log_gamma,
    reciprocal_gamma,
)


def mp_log_gamma(z) -> complex:
    with mpmath.workdps(40):
        return complex(mpmath.loggamma(mpmath.mpc(z)))


def mp_kummer(a, b, z) -> complex:
    with mpmath.workdps(40 + int(min(abs(z), 200.0) / 2.3)):
        return complex(mpmath.hyp1f1(mpmath.mpc(a), mpmath.mpf(b), mpmath.mpc(z)))


def mp_gauss(a2, b1, w) -> complex:
    with mpmath.workdps(30):
        return complex(mpmath.hyp2f1(1, mpmath.mpc(a2), mpmath.mpc(b1), mpmath.mpc(w)))


def relative_error(value, reference) -> float:
    return abs(value - reference) / abs(reference)


# =============================================================================
# log-gamma and gamma ratios
# =============================================================================

def test_log_gamma_at_one_half():
    assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-15)


@pytest.mark.parametrize('beta', [0.0, 0.3, 1.0, 2.5, 5.0])
def test_gamma_modulus_identity(beta):
    modulus_sq = np.exp(2 * log_gamma(0.5 + 1j * beta).real)
    assert modulus_sq * math.cosh(math.pi * beta) / math.pi == pytest.approx(1.0, abs=1e-13)


def test_log_gamma_off_axis_against_mpmath():
    z = 3.7 + 2.1j
    assert relative_error(log_gamma(z), mp_log_gamma(z)) <= 1e-13


@pytest.mark.parametrize('z', [0, -1, -7.0, -3 + 0j])
def test_log_gamma_poles(z):
    with pytest.raises(PoleError):
        log_gamma(z)


def test_log_gamma_vectorises():
    zs = np.array([0.5, 1.0 + 1j, 20.0 - 3j])
    values = log_gamma(zs)
    assert values.shape == (3,)
    for z, value in zip(zs, values):
        assert abs(value - mp_log_gamma(z)) <= 1e-13 * max(1.0, abs(value))


@settings(max_examples=100, deadline=None)
@given(
    x=st.floats(min_value=1e-3, max_value=700.0),
    y=st.floats(min_value=-700.0, max_value=700.0),
)
def test_log_gamma_contract_domain(x, y):
    z = complex(x, y)
    value = log_gamma(z)
    assert abs(value - mp_log_gamma(z)) <= 1e-13 * max(1.0, abs(value))
    assert log_gamma(z.conjugate()) == pytest.approx(value.conjugate(), rel=1e-13, abs=1e-13)


def test_gamma_ratio_values():
    assert gamma_ratio(2.5 + 1j, 2.5 + 1j) == pytest.approx(1.0, abs=1e-15)
    assert gamma_ratio(0.5, 1.5) == pytest.approx(2.0, rel=1e-14)
    assert abs(gamma_ratio(1.5 - 0.2j, 1.5 + 0.2j)) == pytest.approx(1.0, abs=1e-13)


def test_gamma_ratio_without_overflow():
    # Gamma(400) alone overflows a double
    ratio = gamma_ratio(400.5, 400.0)
    assert ratio == pytest.approx(math.sqrt(400.0), rel=1e-3)


@settings(max_examples=100, deadline=None)
@given(x=st.floats(min_value=0.05, max_value=500.0), y=st.floats(min_value=-200.0, max_value=200.0))
def test_conjugate_gamma_ratio_is_unimodular(x, y):
    assert abs(gamma_ratio(complex(x, -y), complex(x, y))) == pytest.approx(1.0, abs=1e-13)


def test_reciprocal_gamma_is_smooth_at_zero():
    assert reciprocal_gamma(0.0) == 0
    assert reciprocal_gamma(-2.0) == 0
    beta = 1e-8
    assert reciprocal_gamma(1j * beta) == pytest.approx(1j * beta, rel=1e-7)


def test_gamma_fault_is_scoped():
    z = 1.0 + 1.0j
    clean = log_gamma(z)
    with inject_gamma_fault(1e-6):
        shifted = log_gamma(z)
        conjugate = log_gamma(z.conjugate())
    assert shifted - clean == pytest.approx(1j * 1e-6 * abs(z), abs=1e-15)
    assert conjugate == pytest.approx(clean.conjugate() - 1j * 1e-6 * abs(z), abs=1e-14)
    assert log_gamma(z) == clean


# =============================================================================
# Kummer function
# =============================================================================

@pytest.mark.parametrize('a, b', [(0.5 - 0.2j, 2.0), (1.3 + 0.7j, 4.0), (-2.0, 1.5)])
def test_kummer_at_origin(a, b):
    assert kummer_phi(a, b, 0) == 1


@pytest.mark.parametrize('z', [-0.5j, -40j, -3000j, 2.0 + 1.0j])
def test_kummer_with_vanishing_first_parameter(z):
    assert kummer_phi(0, 2.0, z) == 1


@pytest.mark.parametrize('rho', [0.05, 1.0, 4.5, 8.0, 12.0, 25.0, 50.0, 150.0, 5000.0])
@pytest.mark.parametrize('a, b', [(0.5 - 0.2j, 2.0), (0.49 - 0.012j, 1.98), (2.5 + 0.4j, 6.0)])
def test_kummer_on_oscillatory_axis(a, b, rho):
    z = -2j * rho
    assert relative_error(kummer_phi(a, b, z), mp_kummer(a, b, z)) <= 1e-10


def test_kummer_regimes_agree_across_asymptotic_switchover():
    a, b, z = 0.5 - 0.2j, 2.0, -100j
    asymptotic = kummer_phi(a, b, z)
    extended = kummer_phi(a, b, z, asymptotic_limit=1e9)
    assert relative_error(asymptotic, extended) <= 1e-10


def test_kummer_without_fallback_reports_achieved_error():
    with pytest.raises(ConvergenceError) as excinfo:
        kummer_phi(0.5 - 0.2j, 2.0, -40j, series_limit=0.0, asymptotic_limit=1e9, extended=False)
    assert excinfo.value.achieved_error is None or excinfo.value.achieved_error > 0


def test_kummer_rejects_non_positive_b():
    with pytest.raises(DomainError):
        kummer_phi(0.5, 0.0, -1j)


@pytest.mark.parametrize('rho', [0.3, 6.0, 60.0])
def test_kummer_conjugation_symmetry(rho):
    a, b = 0.7 - 0.3j, 2.4
    value = kummer_phi(a, b, -2j * rho)
    mirrored = kummer_phi(a.conjugate(), b, 2j * rho)
    assert abs(mirrored - value.conjugate()) <= 1e-12 * abs(value)


def test_extended_regime_is_thread_safe():
    # 2*rho in [11, 29] lies between the series and asymptotic regimes
    rhos = np.linspace(5.5, 14.5, 400)
    dps_before = mpmath.mp.dps
    serial = [kummer_phi(0.5 - 0.2j, 2.0, -2j * rho) for rho in rhos]
    with ThreadPoolExecutor(max_workers=8) as pool:
        threaded = list(pool.map(lambda rho: kummer_phi(0.5 - 0.2j, 2.0, -2j * rho), rhos))
    assert mpmath.mp.dps == dps_before
    assert threaded == serial


def test_kummer_partial_series_converges_to_full_value():
    a, b, z = 0.45 - 0.1j, 1.9, -2e-4j
    assert kummer_series_partial(a, b, z, 1) == 1
    assert relative_error(kummer_series_partial(a, b, z, 8), kummer_phi(a, b, z)) <= 1e-15


def test_kummer_derivative_against_mpmath():
    a, b, z = 0.5 - 0.3j, 2.2, -10j
    with mpmath.workdps(40):
        reference = complex(mpmath.diff(lambda t: mpmath.hyp1f1(a, b, t), mpmath.mpc(z)))
    assert relative_error(kummer_phi_derivative(a, b, z), reference) <= 1e-10


def test_recurrence_residual_examples():
    assert kummer_recurrence_check(1.0, 2.0, -0.5j) <= 1e-12
    assert kummer_recurrence_check(0.5 - 0.3j, 2.2, -10j) <= 1e-8
    assert kummer_recurrence_check(0.5 - 0.3j, 2.2, 0) == 0


@settings(max_examples=60, deadline=None)
@given(
    s=st.floats(min_value=0.43, max_value=5.5),
    beta=st.floats(min_value=-0.6, max_value=0.6),
    rho=st.floats(min_value=0.0, max_value=5000.0),
)
def test_recurrence_residual_over_contract_domain(s, beta, rho):
    assert kummer_recurrence_check(s - 1j * beta, 2 * s + 1, -2j * rho) <= 1e-8


# =============================================================================
# Gauss function on the unit circle
# =============================================================================

def test_gauss_at_origin():
    assert gauss_f_unit(0.5 - 0.3j, 1.5 + 0.3j, 0) == 1


def test_gauss_arctangent_closed_form():
    assert gauss_f_unit(0.5, 1.5, -1.0) == pytest.approx(math.pi / 4, rel=1e-10)


@pytest.mark.parametrize('theta', [math.pi / 16, math.pi / 2, 2.0, math.pi, 5 * math.pi / 4, 31 * math.pi / 16])
@pytest.mark.parametrize('beta', [0.0, 0.1, -0.2])
def test_gauss_on_unit_circle_against_mpmath(theta, beta):
    a2, b1 = 0.5 - 1j * beta, 1.5 + 1j * beta
    w = cmath.exp(1j * theta)
    assert relative_error(gauss_f_unit(a2, b1, w), mp_gauss(a2, b1, w)) <= 1e-9


def test_gauss_closed_form_for_artanh():
    # F(1, 1/2; 3/2; w) = artanh(sqrt(w))/sqrt(w)
    w = cmath.exp(2.2j)
    root = cmath.sqrt(w)
    assert relative_error(gauss_f_unit(0.5, 1.5, w), cmath.atanh(root) / root) <= 1e-10


def test_gauss_tighter_tolerance_is_stable():
    a2, b1, w = 0.5 - 0.2j, 1.5 + 0.2j, cmath.exp(0.4j)
    loose = gauss_f_unit(a2, b1, w)
    tight = gauss_f_unit(a2, b1, w, tol=1e-15, min_terms=512)
    assert relative_error(loose, tight) <= 1e-8


def test_gauss_error_estimate_is_small_away_from_forward_direction():
    value, error = gauss_f_unit_with_error(0.5 - 0.1j, 1.5 + 0.1j, cmath.exp(1.0j))
    assert error <= 1e-10 * abs(value)


@pytest.mark.parametrize('theta', [1e-13, 1e-4])
def test_gauss_diverges_in_forward_direction(theta):
    with pytest.raises(ConvergenceError):
        gauss_f_unit(0.5 - 0.1j, 1.5 + 0.1j, cmath.exp(1j * theta))


def test_gauss_warns_about_slow_convergence(caplog):
    with caplog.at_level(logging.WARNING, logger='dirac_scattering.physics.specfun'):
        gauss_f_unit(0.5 - 0.1j, 1.5 + 0.1j, cmath.exp(0.003j))
    assert 'slow 2F1 convergence' in caplog.text


def test_gauss_domain_checks():
    with pytest.raises(DomainError):
        gauss_f_unit(0.5, 1.5, 1.2)
    with pytest.raises(DomainError):
        gauss_f_unit(2.0, 1.5, -1.0)
