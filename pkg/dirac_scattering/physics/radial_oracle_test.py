"""Tests for the radial solutions and the asymptotic phase extraction."""

import math
from types import SimpleNamespace

import mpmath
import numpy as np
import pytest

from ..exceptions import ConfigurationError, PoorFitError, StepUnderflowError
from . import radial_oracle
from .kinematics import ParticleSpec, derive_kinematics, kinematics_at_energy
from .phase_shift import AngularMomentum, exponent_s, s_matrix_exact
from .radial_oracle import (
    analytic_phase,
    asymptotic_amplitude,
    extract_phase,
    fold_phase,
    initial_data,
    kummer_radial,
    ode_integrate,
    origin_exponent,
    phase_difference_mod_pi,
    radial_residual,
    second_order_residual,
    solve_channels,
    window_shift,
)

ALPHA = 1 / 137.0
FIT_GRID = np.linspace(100.0, 200.0, 2001)
MIXED_GRID = np.concatenate([np.geomspace(1e-4, 1.0, 30), np.linspace(1.5, 300.0, 60)])


@pytest.fixture
def kin_electron():
    return derive_kinematics(ParticleSpec('electron', 1, ALPHA), 1.25)


def mp_u(j: AngularMomentum, kin, rho: float) -> complex:
    """u(rho) of the normalised regular solution, entirely in extended precision."""
    with mpmath.workdps(30):
        jj = mpmath.mpf(j.two_j) / 2
        beta = mpmath.mpf(kin.beta)
        beta_prime = mpmath.mpf(kin.beta_prime)
        energy = mpmath.mpf(kin.energy_ratio)
        s = mpmath.sqrt(jj ** 2 - mpmath.mpf(kin.gamma_coupling) ** 2)
        amplitude = 1j * mpmath.sqrt((energy + 1) / (2 * energy)) * mpmath.sqrt(2 / (mpmath.pi * mpmath.mpf(kin.k)))
        a_j = (amplitude * 2 ** s * (jj + 1j * beta_prime) * mpmath.gamma(s - 1j * beta) / mpmath.gamma(2 * s + 1)
               * mpmath.exp(beta * mpmath.pi / 2 + 1j * (mpmath.pi * j.m - mpmath.pi * s / 2 + mpmath.pi / 4)))
        value = a_j * mpmath.mpf(rho) ** s * mpmath.hyp1f1(s - 1j * beta, 2 * s + 1, -2j * mpmath.mpf(rho))
        return complex(value)


# =============================================================================
# Phase bookkeeping
# =============================================================================

def test_fold_phase_range():
    assert fold_phase(math.pi / 2) == pytest.approx(math.pi / 2)
    assert fold_phase(-math.pi / 2) == pytest.approx(math.pi / 2)
    assert fold_phase(math.pi + 0.1) == pytest.approx(0.1)
    assert fold_phase(-0.3) == pytest.approx(-0.3)


def test_phase_difference_wraps_at_half_turn():
    assert phase_difference_mod_pi(math.pi / 2 - 1e-9, -math.pi / 2 + 1e-9) == pytest.approx(2e-9, abs=1e-15)
    assert phase_difference_mod_pi(0.2, 0.2 + math.pi) == pytest.approx(0.0, abs=1e-15)
    assert phase_difference_mod_pi(0.1, -0.1) == pytest.approx(0.2)


def test_asymptotic_amplitude(kin_electron):
    amplitude = asymptotic_amplitude(kin_electron)
    assert amplitude.real == 0
    assert abs(amplitude) ** 2 == pytest.approx(2.25 / 2.5 * 2 / (math.pi * 0.75), rel=1e-14)


# =============================================================================
# Kummer solution
# =============================================================================

def test_kummer_fixture_at_unit_rho(kin_electron):
    j = AngularMomentum(1)
    sol = kummer_radial(j, kin_electron, np.array([1.0]))
    reference = mp_u(j, kin_electron, 1.0)
    assert abs(sol.u[0] - reference) <= 1e-10 * abs(reference)


@pytest.mark.parametrize('two_j', [1, -1, 3, -3])
def test_origin_exponent(kin_electron, two_j):
    j = AngularMomentum(two_j)
    sol = kummer_radial(j, kin_electron, np.geomspace(1e-4, 1e-3, 25))
    assert origin_exponent(sol) == pytest.approx(exponent_s(j, kin_electron.gamma_coupling), abs=1e-3)


@pytest.mark.parametrize('gamma', [ALPHA, 0.3])
@pytest.mark.parametrize('two_j', [1, -1, 3, -5])
def test_kummer_solution_satisfies_radial_system(gamma, two_j):
    kin = kinematics_at_energy(gamma, 1.25)
    sol = kummer_radial(AngularMomentum(two_j), kin, MIXED_GRID)
    assert radial_residual(sol) <= 1e-8


@pytest.mark.parametrize('two_j', [1, -3])
def test_kummer_solution_satisfies_second_order_equation(kin_electron, two_j):
    grid = np.concatenate([np.geomspace(1e-3, 1.0, 10), np.linspace(2.0, 150.0, 20)])
    assert second_order_residual(AngularMomentum(two_j), kin_electron, grid) <= 1e-8


def test_f_and_g_are_finite_near_origin(kin_electron):
    sol = kummer_radial(AngularMomentum(-1), kin_electron, np.geomspace(1e-4, 1e-2, 10))
    assert np.all(np.isfinite(sol.f))
    assert np.all(np.isfinite(sol.g))


def test_initial_data_matches_kummer_solution(kin_electron):
    j = AngularMomentum(3)
    u0, v0 = initial_data(j, kin_electron, 1e-4)
    sol = kummer_radial(j, kin_electron, np.array([1e-4]))
    assert u0 == pytest.approx(sol.u[0], rel=1e-14)
    assert v0 == pytest.approx(sol.v[0], rel=1e-14)


# =============================================================================
# Phase extraction
# =============================================================================

@pytest.mark.parametrize('two_j', [1, -3])
@pytest.mark.parametrize('component', ['f', 'g'])
def test_kummer_phase_matches_s_matrix(kin_electron, two_j, component):
    j = AngularMomentum(two_j)
    fit = extract_phase(kummer_radial(j, kin_electron, FIT_GRID), component=component)
    assert phase_difference_mod_pi(fit.eta, analytic_phase(j, kin_electron)) <= 1e-6
    assert abs(fit.s_matrix - s_matrix_exact(j, kin_electron).value) <= 1e-6
    assert fit.residual <= 1e-4
    assert fit.fit_window == (100.0, 200.0)
    assert -math.pi / 2 < fit.eta <= math.pi / 2


def test_free_particle_has_no_phase_shift():
    kin = kinematics_at_energy(0.0, 1.25)
    for two_j in (1, -1, 5):
        fit = extract_phase(kummer_radial(AngularMomentum(two_j), kin, FIT_GRID))
        assert phase_difference_mod_pi(fit.eta, 0.0) <= 1e-6


def test_phase_is_stable_under_window_doubling(kin_electron):
    sol = kummer_radial(AngularMomentum(1), kin_electron, np.linspace(100.0, 400.0, 3001))
    assert window_shift(sol) <= 1e-7


def test_poor_fit_is_reported(kin_electron):
    sol = kummer_radial(AngularMomentum(5), kin_electron, np.linspace(1.0, 3.0, 200))
    with pytest.raises(PoorFitError) as excinfo:
        extract_phase(sol, (1.0, 3.0), order=0)
    assert excinfo.value.residual > 1e-4


def test_fit_window_must_lie_on_grid(kin_electron):
    sol = kummer_radial(AngularMomentum(1), kin_electron, FIT_GRID)
    with pytest.raises(ConfigurationError):
        extract_phase(sol, (100.0, 300.0))
    with pytest.raises(ConfigurationError):
        extract_phase(sol, component='h')


# =============================================================================
# Direct integration
# =============================================================================

@pytest.mark.slow
def test_ode_agrees_with_kummer_solution(kin_electron):
    j = AngularMomentum(1)
    grid = np.array([1.0, 10.0, 50.0])
    integrated = ode_integrate(j, kin_electron, (1e-4, 50.0), grid)
    exact = kummer_radial(j, kin_electron, grid)
    assert abs(integrated.u[-1] - exact.u[-1]) <= 1e-7 * abs(exact.u[-1])
    assert abs(integrated.v[-1] - exact.v[-1]) <= 1e-7 * abs(exact.v[-1])


@pytest.mark.slow
def test_ode_is_linear_in_initial_data(kin_electron):
    j = AngularMomentum(-3)
    grid = np.linspace(1.0, 30.0, 50)
    single = ode_integrate(j, kin_electron, (1e-4, 30.0), grid)
    double = ode_integrate(j, kin_electron, (1e-4, 30.0), grid, scale=2.0)
    np.testing.assert_allclose(double.u, 2 * single.u, rtol=1e-12)
    np.testing.assert_allclose(double.v, 2 * single.v, rtol=1e-12)


@pytest.mark.slow
def test_ode_origin_behaviour(kin_electron):
    j = AngularMomentum(-1)
    sol = ode_integrate(j, kin_electron, (1e-4, 1e-2), np.geomspace(1e-4, 1e-3, 25))
    assert origin_exponent(sol) == pytest.approx(exponent_s(j, kin_electron.gamma_coupling), abs=1e-3)


@pytest.mark.slow
def test_ode_output_satisfies_system_on_fine_grid(kin_electron):
    sol = ode_integrate(AngularMomentum(3), kin_electron, (1e-4, 20.0), np.linspace(5.0, 20.0, 3001))
    assert radial_residual(sol) <= 1e-3


@pytest.mark.slow
def test_ode_free_particle():
    kin = kinematics_at_energy(0.0, 1.25)
    sol = ode_integrate(AngularMomentum(1), kin)
    assert phase_difference_mod_pi(extract_phase(sol).eta, 0.0) <= 1e-6


@pytest.mark.slow
@pytest.mark.parametrize('two_j', [1, -3])
def test_ode_phase_matches_s_matrix(kin_electron, two_j):
    j = AngularMomentum(two_j)
    sol = ode_integrate(j, kin_electron)
    target = analytic_phase(j, kin_electron)
    for component in ('f', 'g'):
        assert phase_difference_mod_pi(extract_phase(sol, component=component).eta, target) <= 1e-6


@pytest.mark.slow
def test_solve_channels_reproduces_phase_shifts():
    kin = kinematics_at_energy(0.1, 5.0)
    channels = [1, -1, 3, -3, 5, -5]
    fits = solve_channels(channels, kin)
    assert [fit.j.two_j for fit in fits] == channels
    for fit in fits:
        assert phase_difference_mod_pi(fit.eta, analytic_phase(fit.j, kin)) <= 1e-6


def test_step_underflow_is_reported(kin_electron, monkeypatch):
    failed = SimpleNamespace(status=-1, message='Required step size is less than spacing between numbers.',
                             y=None, nfev=0)
    monkeypatch.setattr(radial_oracle, 'solve_ivp', lambda *args, **kwargs: failed)
    with pytest.raises(StepUnderflowError, match='larger rho0'):
        ode_integrate(AngularMomentum(1), kin_electron)


def test_ode_span_validation(kin_electron):
    with pytest.raises(ConfigurationError):
        ode_integrate(AngularMomentum(1), kin_electron, (0.0, 10.0))
    with pytest.raises(ConfigurationError):
        ode_integrate(AngularMomentum(1), kin_electron, (1e-4, 10.0), np.array([1.0, 20.0]))
