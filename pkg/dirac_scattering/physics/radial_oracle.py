"""
Radial Dirac-Coulomb solutions and phase shifts measured from their asymptotics.

With rho = k r and f = e^{i rho}(u + v)/2, g = -(i/2) sqrt(k2/k1) e^{i rho}(u - v)
the radial equations become the first-order system

    u' = (i beta u + (i beta' + j) v) / rho
    v' = -2i v - (i beta v + (i beta' - j) u) / rho

whose regular solution is

    u = a_j rho^s Phi(s - i beta, 2s + 1, -2i rho)
    v = a_j (s - i beta)/(j + i beta') rho^s Phi(s - i beta + 1, 2s + 1, -2i rho).

a_j is chosen so that f -> A i^m e^{i eta} cos(rho + beta ln 2 rho - m pi/2 - pi/4 + eta).
Fitting that form to either the Kummer solution or a direct integration of the
system gives eta independently of the Gamma-function formula for S_j.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.integrate import solve_ivp

from ..exceptions import ConfigurationError, PoorFitError, StepUnderflowError
from .kinematics import Kinematics
from .phase_shift import AngularMomentum, exponent_s, principal_phase, s_matrix_exact
from .specfun import kummer_phi, kummer_series_partial, log_gamma

logger = logging.getLogger(__name__)

DEFAULT_RHO0 = 1e-4
DEFAULT_RHO_MAX = 200.0
DEFAULT_GRID_POINTS = 8001
DEFAULT_RTOL = 1e-11
DEFAULT_FIT_WINDOW = (100.0, 200.0)
DEFAULT_FIT_ORDER = 4
FIT_TOLERANCE = 1e-4
SERIES_TERMS = 8


@dataclass(eq=False)
class RadialSolution:
    """u, v (and f, g) of one channel on an increasing grid of rho = k r."""
    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray
    j: AngularMomentum
    kin: Kinematics
    method: str
    du: Optional[np.ndarray] = None
    dv: Optional[np.ndarray] = None

    @property
    def s(self) -> float:
        return exponent_s(self.j, self.kin.gamma_coupling)

    @property
    def f(self) -> np.ndarray:
        return 0.5 * np.exp(1j * self.rho) * (self.u + self.v)

    @property
    def g(self) -> np.ndarray:
        ratio = math.sqrt(self.kin.k2 / self.kin.k1)
        return -0.5j * ratio * np.exp(1j * self.rho) * (self.u - self.v)


@dataclass(frozen=True)
class PhaseExtraction:
    """Phase shift measured from the asymptotic form of f or g.

    Attributes:
        j: Channel.
        eta: Phase shift folded into (-pi/2, pi/2].
        fit_window: (rho_min, rho_max) used for the fit.
        residual: Relative l2 misfit of the asymptotic model.
        s_matrix: exp(2 i eta) reconstructed from the fitted amplitude,
            meaningful only when the solution carries the a_j normalisation.
        component: 'f' or 'g'.
    """
    j: AngularMomentum
    eta: float
    fit_window: Tuple[float, float]
    residual: float
    s_matrix: complex
    component: str


def _i_power(m: int) -> complex:
    return (1.0, 1j, -1.0, -1j)[m % 4]


def asymptotic_amplitude(kin: Kinematics) -> complex:
    """A = i sqrt((E + 1)/(2E)) sqrt(2/(pi k)), the common amplitude of the outgoing partial waves."""
    energy = kin.energy_ratio
    return 1j * math.sqrt((energy + 1) / (2 * energy)) * math.sqrt(2 / (math.pi * kin.k))


def normalization_a(j: AngularMomentum, kin: Kinematics) -> complex:
    """a_j fixing the asymptotic form of f to A i^m e^{i eta} cos(... + eta)."""
    s = exponent_s(j, kin.gamma_coupling)
    beta, beta_prime = kin.beta, kin.beta_prime
    log_ratio = log_gamma(s - 1j * beta) - log_gamma(2 * s + 1)
    phase = beta * math.pi / 2 + 1j * (math.pi * j.m - math.pi * s / 2 + math.pi / 4)
    return (asymptotic_amplitude(kin) * 2.0 ** s * (j.j + 1j * beta_prime)
            * complex(np.exp(log_ratio + phase)))


def _parameters(j: AngularMomentum, kin: Kinematics):
    s = exponent_s(j, kin.gamma_coupling)
    a = s - 1j * kin.beta
    b = 2 * s + 1
    a_j = normalization_a(j, kin)
    c_v = a_j * a / (j.j + 1j * kin.beta_prime)
    return s, a, b, a_j, c_v


def _default_grid(rho0: float = DEFAULT_RHO0, rho_max: float = DEFAULT_RHO_MAX) -> np.ndarray:
    return np.linspace(rho0, rho_max, DEFAULT_GRID_POINTS)


def _as_grid(rho_grid) -> np.ndarray:
    rho = np.atleast_1d(np.asarray(rho_grid, dtype=float))
    if rho.ndim != 1 or rho.size == 0:
        raise ConfigurationError('rho grid must be a non-empty 1-D sequence')
    if rho[0] <= 0 or np.any(np.diff(rho) <= 0):
        raise ConfigurationError('rho grid must be positive and strictly increasing')
    return rho


def kummer_radial(j: AngularMomentum, kin: Kinematics, rho_grid=None) -> RadialSolution:
    """
    Regular solution from Kummer functions, with exact derivatives.

    Derivatives use Phi'(a, b, z) = (a/b) Phi(a+1, b+1, z), so the ODE
    residual of this solution measures only the accuracy of Phi.
    """
    rho = _default_grid() if rho_grid is None else _as_grid(rho_grid)
    s, a, b, a_j, c_v = _parameters(j, kin)

    u = np.empty(rho.size, dtype=complex)
    v = np.empty(rho.size, dtype=complex)
    du = np.empty(rho.size, dtype=complex)
    dv = np.empty(rho.size, dtype=complex)
    for i, r in enumerate(rho):
        z = -2j * r
        phi_a = kummer_phi(a, b, z)
        phi_a1 = kummer_phi(a + 1, b, z)
        power = r ** s
        u[i] = a_j * power * phi_a
        v[i] = c_v * power * phi_a1
        du[i] = a_j * (s * power / r * phi_a - 2j * power * a / b * kummer_phi(a + 1, b + 1, z))
        dv[i] = c_v * (s * power / r * phi_a1 - 2j * power * (a + 1) / b * kummer_phi(a + 2, b + 1, z))

    logger.debug('Kummer radial solution j=%s on %d points', j, rho.size)
    return RadialSolution(rho, u, v, j, kin, 'kummer', du, dv)


def initial_data(j: AngularMomentum, kin: Kinematics, rho0: float,
                 terms: int = SERIES_TERMS) -> Tuple[complex, complex]:
    """(u, v) at rho0 from the truncated Taylor series of the regular solution."""
    s, a, b, a_j, c_v = _parameters(j, kin)
    z = -2j * rho0
    power = rho0 ** s
    return (a_j * power * kummer_series_partial(a, b, z, terms),
            c_v * power * kummer_series_partial(a + 1, b, z, terms))


def ode_integrate(j: AngularMomentum, kin: Kinematics,
                  rho_span: Tuple[float, float] = (DEFAULT_RHO0, DEFAULT_RHO_MAX),
                  rho_grid=None, rtol: float = DEFAULT_RTOL, scale: complex = 1.0) -> RadialSolution:
    """
    Integrate the first-order radial system outward from rho0.

    Args:
        j: Channel.
        kin: Scattering kinematics.
        rho_span: (rho0, rho_max).
        rho_grid: Output points inside ``rho_span``; defaults to an even grid.
        rtol: Relative local error target of the DOP853 integrator.
        scale: Factor applied to the initial data.

    Returns:
        RadialSolution sampled on the output grid.

    Raises:
        StepUnderflowError: The integrator could not make progress near the origin.
    """
    rho0, rho_max = float(rho_span[0]), float(rho_span[1])
    if not 0 < rho0 < rho_max:
        raise ConfigurationError(f'rho span must satisfy 0 < rho0 < rho_max, got {rho_span}')
    rho = _default_grid(rho0, rho_max) if rho_grid is None else _as_grid(rho_grid)
    if rho[0] < rho0 or rho[-1] > rho_max:
        raise ConfigurationError('output grid must lie inside the integration span')

    s = exponent_s(j, kin.gamma_coupling)
    u0, v0 = initial_data(j, kin, rho0)
    y0 = scale * np.array([u0, v0], dtype=complex)
    atol = rtol * max(abs(u0), abs(v0)) * abs(scale)

    beta, beta_prime, jj = kin.beta, kin.beta_prime, j.j
    coupling_uv = 1j * beta_prime + jj
    coupling_vu = 1j * beta_prime - jj

    def rhs(r, y):
        u, v = y
        return np.array([
            (1j * beta * u + coupling_uv * v) / r,
            -2j * v - (1j * beta * v + coupling_vu * u) / r,
        ])

    result = solve_ivp(rhs, (rho0, rho_max), y0, method='DOP853', t_eval=rho,
                       rtol=rtol, atol=atol)
    if result.status == -1:
        raise StepUnderflowError(
            f'integration of j={j} failed near rho={rho0:g}: {result.message}; '
            f'try a larger rho0 (s = {s:.4f})'
        )
    logger.debug('ODE j=%s: %d rhs evaluations', j, result.nfev)
    return RadialSolution(rho, result.y[0], result.y[1], j, kin, 'ode')


def radial_residual(sol: RadialSolution) -> float:
    """
    Largest relative residual of the first-order system over the grid.

    Uses the stored derivatives when present, otherwise second-order finite
    differences (then the result is limited by the grid spacing).
    """
    rho, u, v = sol.rho, sol.u, sol.v
    if sol.du is not None and sol.dv is not None:
        du, dv = sol.du, sol.dv
    else:
        du = np.gradient(u, rho, edge_order=2)
        dv = np.gradient(v, rho, edge_order=2)

    kin, jj = sol.kin, sol.j.j
    beta, beta_prime = kin.beta, kin.beta_prime
    terms_u = ((1j * beta * u) / rho, (1j * beta_prime + jj) * v / rho)
    terms_v = (-2j * v, -(1j * beta * v) / rho, -(1j * beta_prime - jj) * u / rho)

    res_u = np.abs(du - sum(terms_u)) / (np.abs(du) + sum(np.abs(t) for t in terms_u))
    res_v = np.abs(dv - sum(terms_v)) / (np.abs(dv) + sum(np.abs(t) for t in terms_v))
    return float(max(res_u.max(), res_v.max()))


def second_order_residual(j: AngularMomentum, kin: Kinematics, rho_grid) -> float:
    """
    Relative residual of rho u'' + (1 + 2i rho) u' + (2 beta - s^2/rho) u = 0
    for the Kummer solution, with u' and u'' from contiguous relations.
    """
    rho = _as_grid(rho_grid)
    s, a, b, a_j, _ = _parameters(j, kin)
    worst = 0.0
    for r in rho:
        z = -2j * r
        phi = kummer_phi(a, b, z)
        d_phi = a / b * kummer_phi(a + 1, b + 1, z)
        d2_phi = a * (a + 1) / (b * (b + 1)) * kummer_phi(a + 2, b + 2, z)
        u = a_j * r ** s * phi
        du = a_j * (s * r ** (s - 1) * phi - 2j * r ** s * d_phi)
        d2u = a_j * (s * (s - 1) * r ** (s - 2) * phi - 4j * s * r ** (s - 1) * d_phi - 4 * r ** s * d2_phi)
        terms = (r * d2u, (1 + 2j * r) * du, (2 * kin.beta - s * s / r) * u)
        worst = max(worst, abs(sum(terms)) / sum(abs(t) for t in terms))
    return worst


def origin_exponent(sol: RadialSolution, decades: float = 1.0) -> float:
    """Log-log slope of |u| over the first ``decades`` of the grid."""
    mask = sol.rho <= sol.rho[0] * 10 ** decades
    if np.count_nonzero(mask) < 2:
        raise ConfigurationError('need at least two grid points in the first decade')
    return float(np.polyfit(np.log(sol.rho[mask]), np.log(np.abs(sol.u[mask])), 1)[0])


def fold_phase(eta):
    """Representative of eta mod pi in (-pi/2, pi/2]."""
    return math.pi / 2 - np.mod(math.pi / 2 - eta, math.pi)


def phase_difference_mod_pi(first: float, second: float) -> float:
    """Distance between two phases on the circle of circumference pi."""
    delta = np.mod(first - second, math.pi)
    return float(min(delta, math.pi - delta))


def extract_phase(sol: RadialSolution, window: Tuple[float, float] = DEFAULT_FIT_WINDOW,
                  component: str = 'f', order: int = DEFAULT_FIT_ORDER,
                  tolerance: float = FIT_TOLERANCE) -> PhaseExtraction:
    """
    Least-squares fit of the log-distorted sinusoid to f (or g) over ``window``.

    The model is C(rho) cos(phi) + D(rho) sin(phi) with
    phi = rho + beta ln 2 rho - m pi/2 - pi/4 and C, D polynomials of degree
    ``order`` in rho_min/rho. Frequency and logarithmic term are fixed by the
    kinematics; only the complex coefficients are free.

    Raises:
        PoorFitError: The relative misfit exceeds ``tolerance``.
    """
    if component not in ('f', 'g'):
        raise ConfigurationError(f"component must be 'f' or 'g', got {component!r}")
    lo, hi = float(window[0]), float(window[1])
    if not 0 < lo < hi:
        raise ConfigurationError(f'invalid fit window {window}')
    if sol.rho[0] > lo or sol.rho[-1] < hi * (1 - 1e-12):
        raise ConfigurationError(
            f'fit window [{lo:g}, {hi:g}] exceeds the solution grid [{sol.rho[0]:g}, {sol.rho[-1]:g}]'
        )

    mask = (sol.rho >= lo) & (sol.rho <= hi)
    n_coeffs = 2 * (order + 1)
    if np.count_nonzero(mask) < 2 * n_coeffs:
        raise ConfigurationError(f'fit window holds too few grid points for order {order}')

    rho = sol.rho[mask]
    data = (sol.f if component == 'f' else sol.g)[mask]
    kin, j = sol.kin, sol.j
    phi = rho + kin.beta * np.log(2 * rho) - j.m * math.pi / 2 - math.pi / 4
    powers = (lo / rho)[:, None] ** np.arange(order + 1)[None, :]
    basis = np.hstack([np.cos(phi)[:, None] * powers, np.sin(phi)[:, None] * powers]).astype(complex)

    coeffs, *_ = np.linalg.lstsq(basis, data, rcond=None)
    residual = float(np.linalg.norm(data - basis @ coeffs) / np.linalg.norm(data))
    c, d = coeffs[0], coeffs[order + 1]

    # leading coefficients: f -> P (cos eta, -sin eta), g -> P' (sin eta, cos eta)
    q = c if abs(c) >= abs(d) else d
    amplitude = asymptotic_amplitude(kin) * _i_power(j.m)
    if component == 'f':
        eta = math.atan2((-d / q).real, (c / q).real)
        s_matrix = (c - 1j * d) / amplitude
    else:
        eta = math.atan2((c / q).real, (d / q).real)
        s_matrix = (d + 1j * c) / (math.sqrt(kin.k2 / kin.k1) * amplitude)

    if residual > tolerance:
        raise PoorFitError(f'asymptotic fit of {component} for j={j} over [{lo:g}, {hi:g}]', residual)
    return PhaseExtraction(j, float(fold_phase(eta)), (lo, hi), residual, complex(s_matrix), component)


def window_shift(sol: RadialSolution, window: Tuple[float, float] = DEFAULT_FIT_WINDOW,
                 component: str = 'f') -> float:
    """Change of the fitted phase (mod pi) when the window is moved out by a factor of two."""
    near = extract_phase(sol, window, component)
    far = extract_phase(sol, (2 * window[0], 2 * window[1]), component)
    return phase_difference_mod_pi(near.eta, far.eta)


def _solve_channel(two_j: int, kin: Kinematics, rho_span, window, component) -> PhaseExtraction:
    j = AngularMomentum(two_j)
    sol = ode_integrate(j, kin, rho_span)
    return extract_phase(sol, window, component)


def solve_channels(channels: Sequence[int], kin: Kinematics,
                   rho_span: Tuple[float, float] = (DEFAULT_RHO0, DEFAULT_RHO_MAX),
                   window: Tuple[float, float] = DEFAULT_FIT_WINDOW,
                   component: str = 'f', n_jobs: int = 1) -> List[PhaseExtraction]:
    """Integrate and fit several channels; each channel runs in its own worker process."""
    logger.info('Integrating %d radial channels (n_jobs=%d)', len(channels), n_jobs)
    return Parallel(n_jobs=n_jobs, prefer='processes')(
        delayed(_solve_channel)(int(two_j), kin, rho_span, window, component) for two_j in channels
    )


def analytic_phase(j: AngularMomentum, kin: Kinematics) -> float:
    """Principal eta of the exact S-matrix element, for comparison with a fit."""
    return float(principal_phase(s_matrix_exact(j, kin).value))
