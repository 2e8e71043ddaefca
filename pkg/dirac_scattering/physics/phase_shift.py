"""
Partial-wave S-matrix elements exp(2i*eta_j) for the 2D Dirac-Coulomb problem.

Channels are labelled by two_j (odd integer) so half-integer j stays exact.
The exact element is

    S_j = (j + i beta') Gamma(s - i beta) / Gamma(s + 1 + i beta) * exp(i pi (j - s)),

with s = sqrt(j^2 - gamma^2). For j < 0 the phase exp(i pi (j - |j|)) = -1 is
split off so that only the small difference |j| - s = gamma^2/(|j| + s)
enters the exponential.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Tuple

import numpy as np

from ..exceptions import ConfigurationError, DomainError
from .kinematics import Kinematics
from .specfun import gamma_ratio

logger = logging.getLogger(__name__)


class Method(str, Enum):
    EXACT = 'exact'
    SMALL_GAMMA = 'small_gamma'
    NONREL = 'nonrel'


@dataclass(frozen=True, order=True)
class AngularMomentum:
    """Total angular momentum j = two_j/2 of a partial wave."""
    two_j: int

    def __post_init__(self):
        if int(self.two_j) != self.two_j or self.two_j % 2 == 0:
            raise ConfigurationError(f'two_j must be an odd integer, got {self.two_j!r}')
        object.__setattr__(self, 'two_j', int(self.two_j))

    @classmethod
    def from_j(cls, j) -> 'AngularMomentum':
        doubled = Fraction(j) * 2
        if doubled.denominator != 1:
            raise ConfigurationError(f'j must be a half-integer, got {j!r}')
        return cls(int(doubled))

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def m(self) -> int:
        """Orbital label m = j - 1/2."""
        return (self.two_j - 1) // 2

    @property
    def m_abs(self) -> int:
        return abs(self.m)

    def __str__(self):
        return f'{self.two_j}/2'


@dataclass(frozen=True)
class SMatrixElement:
    j: AngularMomentum
    value: complex
    method: Method
    s: float

    @property
    def eta_principal(self) -> float:
        """Phase shift in (-pi/2, pi/2]."""
        return principal_phase(self.value)

    @property
    def unitarity_defect(self) -> float:
        return abs(abs(self.value) - 1.0)


@dataclass(eq=False)
class PhaseShiftTable:
    """S-matrix elements of many channels, in the order they were requested."""
    two_j: np.ndarray
    s: np.ndarray
    values: np.ndarray
    method: Method

    @property
    def m(self) -> np.ndarray:
        return (self.two_j - 1) // 2

    @property
    def eta_principal(self) -> np.ndarray:
        return principal_phase(self.values)

    def elements(self) -> Iterator[SMatrixElement]:
        for two_j, s, value in zip(self.two_j, self.s, self.values):
            yield SMatrixElement(AngularMomentum(int(two_j)), complex(value), self.method, float(s))

    def __len__(self):
        return len(self.two_j)


def principal_phase(value):
    """eta = arg(value)/2, folded into (-pi/2, pi/2]."""
    eta = np.angle(value) / 2
    return eta[()] if np.ndim(eta) == 0 else eta


def channel_order(two_j_max: int) -> np.ndarray:
    """Channels 1, -1, 3, -3, ... up to |two_j| <= two_j_max."""
    if two_j_max < 1:
        raise ConfigurationError(f'two_j_max must be >= 1, got {two_j_max}')
    positive = np.arange(1, int(two_j_max) + 1, 2)
    order = np.empty(2 * len(positive), dtype=int)
    order[0::2] = positive
    order[1::2] = -positive
    return order


def _as_two_j(channels) -> np.ndarray:
    two_j = np.atleast_1d(np.asarray(channels, dtype=int))
    if two_j.size == 0:
        raise ConfigurationError('channel list must not be empty')
    if np.any(two_j % 2 == 0):
        raise ConfigurationError('every channel must have odd two_j')
    return two_j


def _exponents(two_j: np.ndarray, gamma: float) -> np.ndarray:
    j_abs = np.abs(two_j) / 2
    if np.any(j_abs <= abs(gamma)):
        raise DomainError(f'exponent s is not real: j^2 <= gamma^2 (gamma = {gamma})')
    return np.sqrt((j_abs - abs(gamma)) * (j_abs + abs(gamma)))


def exponent_s(j: AngularMomentum, gamma: float) -> float:
    """Positive root s = sqrt(j^2 - gamma^2) of the indicial equation at the origin."""
    return float(_exponents(np.array([j.two_j]), gamma)[0])


def _exact_values(two_j: np.ndarray, kin: Kinematics) -> Tuple[np.ndarray, np.ndarray]:
    gamma = kin.gamma_coupling
    j = two_j / 2
    j_abs = np.abs(j)
    s = _exponents(two_j, gamma)
    deficit = gamma * gamma / (j_abs + s)

    beta, beta_prime = kin.beta, kin.beta_prime
    ratio = gamma_ratio(s - 1j * beta, s + 1j * beta) / (s + 1j * beta)
    sign = np.where(two_j > 0, 1.0, -1.0)
    values = (j + 1j * beta_prime) * ratio * sign * np.exp(1j * np.pi * deficit)
    return s, values


def _nonrel_values(m_abs: np.ndarray, beta: float) -> np.ndarray:
    return gamma_ratio(m_abs + 0.5 - 1j * beta, m_abs + 0.5 + 1j * beta)


def small_gamma_terms(channels, kin: Kinematics) -> Tuple[np.ndarray, np.ndarray]:
    """
    Split the small-gamma element into its nonrelativistic part and the
    relativistic correction, which carries the factor beta - beta'.

    Returns:
        (nonrel, correction) arrays; their sum is the small-gamma S-matrix.
    """
    two_j = _as_two_j(channels)
    j_abs = np.abs(two_j) / 2
    m_abs = np.abs((two_j - 1) // 2)
    beta = kin.beta
    delta = kin.beta_minus_beta_prime

    nonrel = _nonrel_values(m_abs, beta)
    factor = np.where(
        two_j > 0,
        -1j * delta / (j_abs + 1j * beta),
        1j * delta / (j_abs - 1j * beta),
    )
    return nonrel, nonrel * factor


def s_matrix_table(channels, kin: Kinematics, method: Method = Method.EXACT) -> PhaseShiftTable:
    """
    S-matrix elements for every channel in ``channels`` (two_j values).

    Args:
        channels: Iterable of odd integers.
        kin: Scattering kinematics.
        method: exact, small_gamma or nonrel.

    Returns:
        PhaseShiftTable in the order of ``channels``.
    """
    two_j = _as_two_j(channels)
    method = Method(method)
    if method is Method.EXACT:
        s, values = _exact_values(two_j, kin)
    elif method is Method.SMALL_GAMMA:
        nonrel, correction = small_gamma_terms(two_j, kin)
        s, values = np.abs(two_j) / 2, nonrel + correction
    else:
        m_abs = np.abs((two_j - 1) // 2)
        s, values = m_abs + 0.5, _nonrel_values(m_abs, kin.beta)
    logger.debug('%s S-matrix for %d channels (max |two_j| = %d)',
                 method.value, len(two_j), int(np.abs(two_j).max()))
    return PhaseShiftTable(two_j=two_j, s=np.asarray(s, dtype=float), values=values, method=method)


def s_matrix_exact(j: AngularMomentum, kin: Kinematics) -> SMatrixElement:
    return next(s_matrix_table([j.two_j], kin, Method.EXACT).elements())


def s_matrix_small_gamma(j: AngularMomentum, kin: Kinematics) -> SMatrixElement:
    """Small-gamma approximation with s replaced by |j| (valid for gamma^2 << 1)."""
    return next(s_matrix_table([j.two_j], kin, Method.SMALL_GAMMA).elements())


def s_matrix_nonrel(m_abs: int, beta: float) -> complex:
    """Nonrelativistic element Gamma(|m| + 1/2 - i beta)/Gamma(|m| + 1/2 + i beta)."""
    if m_abs < 0:
        raise DomainError(f'm_abs must be non-negative, got {m_abs}')
    return complex(_nonrel_values(np.asarray(m_abs), beta))
