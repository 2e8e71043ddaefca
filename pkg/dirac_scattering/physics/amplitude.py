"""
Scattering amplitude f(theta) and differential cross section sigma(theta).

The partial-wave series

    f(theta) = -i/sqrt(2 pi k) * sum_j S_j e^{i m theta},   m = j - 1/2,

does not converge in the ordinary sense. It is evaluated off the forward
direction by Abel damping e^{-eps |m|} on a geometric schedule of eps values
followed by Richardson extrapolation to eps -> 0. The forward delta(theta)
term is dropped; angles closer than ``forward_cutoff`` to 0 or 2 pi are
rejected by AngleGrid.

Closed forms (small gamma):

    f0 = -i Gamma(1/2 - i beta)/Gamma(i beta) exp(i beta ln sin^2(theta/2)) / (sqrt(2k) sin(theta/2))
    f1 = -Gamma(1/2 - i beta)/Gamma(i beta) (1 - beta'/beta) e^{-i theta/2} exp(i beta ln sin^2(theta/2)) / sqrt(2k)
    f  = f0 * [1 - i e^{-i theta/2} sin(theta/2) (1 - beta'/beta)]

1/Gamma(i beta) is evaluated as an entire function so beta -> 0 is smooth.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from ..exceptions import ConfigurationError, DomainError
from .kinematics import Kinematics
from .phase_shift import Method, channel_order, s_matrix_table
from .specfun import gamma_ratio, gauss_f_unit_with_error, log_gamma, reciprocal_gamma

logger = logging.getLogger(__name__)

DEFAULT_FORWARD_CUTOFF = math.pi / 64
TWO_PI = 2 * math.pi


class AmplitudeMethod(str, Enum):
    SERIES_EXACT = 'series_exact'
    CLOSED_FORM = 'closed_form'
    SERIES_F1_PLUS_CLOSED_F0 = 'series_f1_plus_closed_f0'
    F1_SERIES = 'f1_series'


@dataclass(frozen=True, eq=False)
class AngleGrid:
    """Scattering angles in (0, 2 pi), strictly increasing, away from the forward direction."""
    thetas: np.ndarray
    forward_cutoff: float = DEFAULT_FORWARD_CUTOFF

    def __post_init__(self):
        thetas = np.atleast_1d(np.asarray(self.thetas, dtype=float))
        object.__setattr__(self, 'thetas', thetas)
        if thetas.ndim != 1 or thetas.size == 0:
            raise ConfigurationError('angle grid must be a non-empty 1-D sequence')
        if not np.all(np.isfinite(thetas)):
            raise ConfigurationError('angle grid contains non-finite values')
        if not 0 < self.forward_cutoff < math.pi:
            raise ConfigurationError(f'forward_cutoff must lie in (0, pi), got {self.forward_cutoff}')
        if np.any(np.diff(thetas) <= 0):
            raise ConfigurationError('angle grid must be strictly increasing')
        slack = self.forward_cutoff * (1 - 1e-12)
        if thetas[0] < slack or TWO_PI - thetas[-1] < slack:
            raise ConfigurationError(
                f'angles must stay at least {self.forward_cutoff:.6g} rad away from 0 and 2 pi'
            )

    @classmethod
    def uniform(cls, count: int, start: Optional[float] = None, stop: Optional[float] = None,
                forward_cutoff: float = DEFAULT_FORWARD_CUTOFF) -> 'AngleGrid':
        """``count`` equally spaced angles, by default spanning [cutoff, 2 pi - cutoff]."""
        if count < 1:
            raise ConfigurationError(f'angle count must be positive, got {count}')
        start = forward_cutoff if start is None else start
        stop = TWO_PI - forward_cutoff if stop is None else stop
        if count == 1:
            return cls(np.array([start]), forward_cutoff)
        return cls(np.linspace(start, stop, count), forward_cutoff)

    def __len__(self):
        return len(self.thetas)


@dataclass(frozen=True)
class SummationOptions:
    """Abel damping schedule, Richardson order and truncation of the channel sum.

    Attributes:
        epsilon0: Largest damping parameter; level l uses epsilon0 / 2**l.
        levels: Number of damping levels.
        richardson_order: Number of Richardson elimination steps.
        tail_tolerance: Target for the damped tail bound; channels are
            added until the bound falls below 0.1 * tail_tolerance.
        two_j_max: Hard cap on |two_j|; None means adaptive truncation only.
        subtract_unity: Sum S_j - 1 instead of S_j (differs by the forward term).
        diagnostic_tolerance: Relative size of the extrapolation diagnostic
            above which an angle is reported as not converged.
        n_jobs: joblib workers over angle chunks (threads).
        chunk_size: Angles per chunk.
    """
    epsilon0: float = 0.1
    levels: int = 6
    richardson_order: int = 3
    tail_tolerance: float = 1e-12
    two_j_max: Optional[int] = None
    subtract_unity: bool = False
    diagnostic_tolerance: float = 1e-6
    n_jobs: int = 1
    chunk_size: int = 32

    def __post_init__(self):
        if not self.epsilon0 > 0:
            raise ConfigurationError('epsilon0 must be positive')
        if self.richardson_order < 0:
            raise ConfigurationError('richardson_order must be non-negative')
        if self.levels < self.richardson_order + 2:
            raise ConfigurationError(
                f'{self.levels} damping levels cannot support Richardson order '
                f'{self.richardson_order} plus a diagnostic (need order + 2)'
            )
        if not self.tail_tolerance > 0:
            raise ConfigurationError('tail_tolerance must be positive')
        if self.two_j_max is not None and (self.two_j_max < 1 or self.two_j_max % 2 == 0):
            raise ConfigurationError(f'two_j_max must be a positive odd integer, got {self.two_j_max}')
        if not self.diagnostic_tolerance > 0:
            raise ConfigurationError('diagnostic_tolerance must be positive')
        if self.chunk_size < 1:
            raise ConfigurationError('chunk_size must be positive')

    @property
    def epsilons(self) -> np.ndarray:
        return self.epsilon0 / 2.0 ** np.arange(self.levels)


@dataclass(eq=False)
class AmplitudeGrid:
    """Complex amplitude on an angle grid (internal units: k^(-1/2) scale, hbar = c = mu = 1)."""
    grid: AngleGrid
    values: np.ndarray
    method: AmplitudeMethod
    diagnostics: np.ndarray = None
    converged: np.ndarray = None

    def __post_init__(self):
        if self.diagnostics is None:
            self.diagnostics = np.zeros(len(self.grid))
        if self.converged is None:
            self.converged = np.ones(len(self.grid), dtype=bool)

    @property
    def thetas(self) -> np.ndarray:
        return self.grid.thetas

    @property
    def sigma(self) -> np.ndarray:
        """|f|^2."""
        return np.abs(self.values) ** 2

    def scaled(self, length_unit: float) -> np.ndarray:
        """Amplitude in physical units (length^(1/2))."""
        return self.values * math.sqrt(length_unit)


@dataclass(eq=False)
class CrossSection:
    grid: AngleGrid
    closed: np.ndarray
    from_amplitude: np.ndarray
    mismatch: float = field(default=0.0)

    def scaled(self, length_unit: float) -> np.ndarray:
        return self.closed * length_unit


def half_angle_sine(thetas: np.ndarray) -> np.ndarray:
    """sin(theta/2), evaluated so that theta and 2 pi - theta give identical bits for theta >= pi."""
    thetas = np.asarray(thetas, dtype=float)
    half = np.where(thetas <= math.pi, thetas, TWO_PI - thetas) / 2
    return np.sin(half)


def _prefactor(kin: Kinematics) -> complex:
    return -1j / math.sqrt(2 * math.pi * kin.k)


def _coulomb_factor(beta: float) -> complex:
    """Gamma(1/2 - i beta) / Gamma(i beta), zero at beta = 0."""
    return complex(np.exp(log_gamma(0.5 - 1j * beta)) * reciprocal_gamma(1j * beta))


def _log_phase(beta: float, sine: np.ndarray) -> np.ndarray:
    return np.exp(1j * beta * np.log(sine * sine))


def richardson_extrapolate(level_values: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Richardson table for values sampled at eps, eps/2, eps/4, ...

    Args:
        level_values: Array of shape (n_points, n_levels), coarsest level first.
        order: Number of elimination steps (powers eps, eps^2, ... removed).

    Returns:
        (best, diagnostic): the finest extrapolant and its distance to the
        previous extrapolant of the same order.
    """
    column = np.asarray(level_values)
    for k in range(1, order + 1):
        column = column[:, 1:] + (column[:, 1:] - column[:, :-1]) / (2.0 ** k - 1.0)
    if column.shape[1] < 2:
        raise ConfigurationError('not enough damping levels for a Richardson diagnostic')
    return column[:, -1], np.abs(column[:, -1] - column[:, -2])


def _truncation_orders(opts: SummationOptions) -> Tuple[np.ndarray, np.ndarray]:
    """Per-level |m| cutoff and the damped tail bound it leaves behind."""
    eps = opts.epsilons
    target = 0.1 * opts.tail_tolerance
    adaptive = np.ceil(np.log(2.0 / ((1.0 - np.exp(-eps)) * target)) / eps - 1.0).astype(int)
    cutoff = np.maximum(adaptive, 0)
    if opts.two_j_max is not None:
        cutoff = np.minimum(cutoff, (opts.two_j_max - 1) // 2)
    tail = 2.0 * np.exp(-eps * (cutoff + 1)) / (1.0 - np.exp(-eps))
    return cutoff, tail


def _abel_chunk(thetas: np.ndarray, m: np.ndarray, weights: np.ndarray) -> np.ndarray:
    phases = np.exp(1j * np.outer(thetas, m))
    # einsum keeps the channel order fixed (no BLAS reordering)
    return np.einsum('tc,lc->tl', phases, weights)


def _abel_sum(grid: AngleGrid, kin: Kinematics, values: np.ndarray, m: np.ndarray,
              opts: SummationOptions, cutoff: np.ndarray, tail: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    eps = opts.epsilons
    m_abs = np.abs(m)
    damping = np.exp(-np.outer(eps, m_abs)) * (m_abs[None, :] <= cutoff[:, None])
    weights = damping * values[None, :]

    thetas = grid.thetas
    chunks = [thetas[i:i + opts.chunk_size] for i in range(0, len(thetas), opts.chunk_size)]
    partials = Parallel(n_jobs=opts.n_jobs, prefer='threads')(
        delayed(_abel_chunk)(chunk, m, weights) for chunk in chunks
    )
    level_values = _prefactor(kin) * np.concatenate(partials, axis=0)

    best, diagnostic = richardson_extrapolate(level_values, opts.richardson_order)
    # a capped channel sum leaves a tail the extrapolation cannot see
    diagnostic = diagnostic + abs(_prefactor(kin)) * tail[-1] * (opts.two_j_max is not None)

    scale = np.maximum(np.abs(best), abs(_prefactor(kin)))
    converged = diagnostic <= opts.diagnostic_tolerance * scale
    if not np.all(converged):
        logger.warning('Abel sum not converged at %d of %d angles (max diagnostic %.3e)',
                       int(np.count_nonzero(~converged)), len(thetas), float(diagnostic.max()))
    return best, diagnostic, converged


def _channels_for(cutoff: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    two_j = channel_order(2 * int(cutoff.max()) + 1)
    return two_j, (two_j - 1) // 2


def f_series_exact(grid: AngleGrid, kin: Kinematics, opts: Optional[SummationOptions] = None) -> AmplitudeGrid:
    """
    Abel-regularised partial-wave sum of the exact S-matrix.

    Args:
        grid: Scattering angles.
        kin: Scattering kinematics.
        opts: Damping schedule and truncation.

    Returns:
        AmplitudeGrid with per-angle Richardson diagnostics.
    """
    opts = opts or SummationOptions()
    cutoff, tail = _truncation_orders(opts)
    two_j, m = _channels_for(cutoff)
    values = s_matrix_table(two_j, kin, Method.EXACT).values
    if opts.subtract_unity:
        values = values - 1.0
    logger.debug('Abel sum over %d channels, %d levels, %d angles', len(two_j), opts.levels, len(grid))

    best, diagnostic, converged = _abel_sum(grid, kin, values, m, opts, cutoff, tail)
    return AmplitudeGrid(grid, best, AmplitudeMethod.SERIES_EXACT, diagnostic, converged)


def f_series_split(grid: AngleGrid, kin: Kinematics, opts: Optional[SummationOptions] = None) -> AmplitudeGrid:
    """Closed small-gamma amplitude plus the Abel sum of (exact - small-gamma) S-matrix elements."""
    opts = opts or SummationOptions()
    cutoff, tail = _truncation_orders(opts)
    two_j, m = _channels_for(cutoff)
    exact = s_matrix_table(two_j, kin, Method.EXACT).values
    approx = s_matrix_table(two_j, kin, Method.SMALL_GAMMA).values

    residual, diagnostic, converged = _abel_sum(grid, kin, exact - approx, m, opts, cutoff, tail)
    closed = f_closed(grid, kin).values
    return AmplitudeGrid(grid, closed + residual, AmplitudeMethod.SERIES_F1_PLUS_CLOSED_F0,
                         diagnostic, converged)


def f0_closed(grid: AngleGrid, kin: Kinematics) -> AmplitudeGrid:
    sine = half_angle_sine(grid.thetas)
    values = (-1j * _coulomb_factor(kin.beta) * _log_phase(kin.beta, sine)
              / (math.sqrt(2 * kin.k) * sine))
    return AmplitudeGrid(grid, values, AmplitudeMethod.CLOSED_FORM)


def f1_closed(grid: AngleGrid, kin: Kinematics) -> AmplitudeGrid:
    """Relativistic correction; vanishes with 1 - beta'/beta as v/c -> 0."""
    sine = half_angle_sine(grid.thetas)
    values = (-_coulomb_factor(kin.beta) * kin.relativistic_deficit
              * np.exp(-0.5j * grid.thetas) * _log_phase(kin.beta, sine) / math.sqrt(2 * kin.k))
    return AmplitudeGrid(grid, values, AmplitudeMethod.CLOSED_FORM)


def f_closed(grid: AngleGrid, kin: Kinematics) -> AmplitudeGrid:
    sine = half_angle_sine(grid.thetas)
    f0 = f0_closed(grid, kin).values
    values = f0 * (1 - 1j * np.exp(-0.5j * grid.thetas) * sine * kin.relativistic_deficit)
    return AmplitudeGrid(grid, values, AmplitudeMethod.CLOSED_FORM)


def f1_series(grid: AngleGrid, kin: Kinematics, tol: float = 1e-12,
              max_terms: int = 100_000) -> AmplitudeGrid:
    """
    Relativistic correction from its two convergent hypergeometric series:

        f1 = -(beta - beta')/sqrt(2 pi k) * Gamma(1/2 - i beta)/Gamma(3/2 + i beta)
             * [F(1, 1/2 - i beta; 3/2 + i beta; e^{i theta})
                - e^{-i theta} F(1, 1/2 - i beta; 3/2 + i beta; e^{-i theta})]
    """
    delta = kin.beta_minus_beta_prime
    n = len(grid)
    if delta == 0:
        return AmplitudeGrid(grid, np.zeros(n, dtype=complex), AmplitudeMethod.F1_SERIES)

    a2 = 0.5 - 1j * kin.beta
    b1 = 1.5 + 1j * kin.beta
    scale = -delta / math.sqrt(2 * math.pi * kin.k) * complex(gamma_ratio(a2, b1))

    values = np.empty(n, dtype=complex)
    errors = np.empty(n)
    for i, theta in enumerate(grid.thetas):
        w = np.exp(1j * theta)
        forward, err_f = gauss_f_unit_with_error(a2, b1, w, tol=tol, max_terms=max_terms)
        backward, err_b = gauss_f_unit_with_error(a2, b1, w.conjugate(), tol=tol, max_terms=max_terms)
        values[i] = scale * (forward - backward / w)
        errors[i] = abs(scale) * (err_f + err_b)
    return AmplitudeGrid(grid, values, AmplitudeMethod.F1_SERIES, errors)


def f_series(grid: AngleGrid, kin: Kinematics, method=AmplitudeMethod.SERIES_EXACT,
             opts: Optional[SummationOptions] = None) -> AmplitudeGrid:
    method = AmplitudeMethod(method)
    if method is AmplitudeMethod.SERIES_EXACT:
        return f_series_exact(grid, kin, opts)
    if method is AmplitudeMethod.SERIES_F1_PLUS_CLOSED_F0:
        return f_series_split(grid, kin, opts)
    if method is AmplitudeMethod.CLOSED_FORM:
        return f_closed(grid, kin)
    return f1_series(grid, kin)


def sigma_closed(thetas, kin: Kinematics) -> np.ndarray:
    sine = half_angle_sine(thetas)
    beta = kin.beta
    v = kin.v_over_c
    return beta * np.tanh(beta * math.pi) / (2 * kin.k * sine * sine) * (1 - v * v * sine * sine)


def sigma(grid: AngleGrid, kin: Kinematics) -> CrossSection:
    """
    Differential cross section from the closed formula, cross-checked against |f_closed|^2.

    The returned ``mismatch`` is the largest relative disagreement between the two.
    """
    closed = sigma_closed(grid.thetas, kin)
    from_amplitude = f_closed(grid, kin).sigma
    nonzero = closed != 0
    mismatch = 0.0
    if np.any(nonzero):
        mismatch = float(np.max(np.abs(from_amplitude[nonzero] - closed[nonzero]) / closed[nonzero]))
    if np.any(~nonzero):
        mismatch = max(mismatch, float(np.max(from_amplitude[~nonzero])))
    return CrossSection(grid, closed, from_amplitude, mismatch)


def born_sigma(grid: AngleGrid, kin: Kinematics) -> np.ndarray:
    """Weak-coupling limit pi beta^2/(2k sin^2(theta/2)) (1 - v^2 sin^2(theta/2))."""
    sine = half_angle_sine(grid.thetas)
    v = kin.v_over_c
    return math.pi * kin.beta ** 2 / (2 * kin.k * sine * sine) * (1 - v * v * sine * sine)


def sigma_classical_form(theta, v_c: float, kappa: float, mu: float = 1.0,
                         hbar: float = 1.0, c: float = 1.0):
    """
    Cross section written with classical quantities only:

        kappa tanh(pi kappa/(hbar v_c)) / (2 mu v_c^2 sin^2(theta/2))
        * (1 - v_c^2/c^2 sin^2(theta/2)) * sqrt(1 - v_c^2/c^2)
    """
    if not 0 < v_c < c:
        raise DomainError(f'velocity must satisfy 0 < v_c < c, got v_c = {v_c}, c = {c}')
    theta_arr = np.asarray(theta, dtype=float)
    if np.any(theta_arr <= 0) or np.any(theta_arr >= TWO_PI):
        raise DomainError('theta must lie in the open interval (0, 2 pi)')
    sine = half_angle_sine(theta_arr)
    ratio = v_c / c
    value = (kappa * np.tanh(math.pi * kappa / (hbar * v_c)) / (2 * mu * v_c * v_c * sine * sine)
             * (1 - ratio * ratio * sine * sine) * math.sqrt((1 - ratio) * (1 + ratio)))
    return value[()] if value.ndim == 0 else value
