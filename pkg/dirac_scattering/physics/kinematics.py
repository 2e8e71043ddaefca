"""
Scattering kinematics for a Dirac particle in a 2D Coulomb field.

All quantities use hbar = c = mu = 1: momenta are in units of mu*c/hbar,
lengths in hbar/(mu*c). Conversion to physical units happens only at the
command-line boundary through ``length_unit_fm``.
"""

import math
from dataclasses import dataclass
from enum import Enum

from scipy import constants

from ..exceptions import BelowThresholdError, ConfigurationError, CouplingTooStrongError

HBARC_MEV_FM = constants.physical_constants['reduced Planck constant times c in MeV fm'][0]
GAMMA_LIMIT = 0.5


class Species(str, Enum):
    ELECTRON = 'electron'
    POSITRON = 'positron'

    @property
    def coupling_sign(self) -> int:
        # attractive for the electron, repulsive for the positron
        return 1 if self is Species.ELECTRON else -1


@dataclass(frozen=True)
class ParticleSpec:
    """Projectile species and nuclear charge."""
    species: Species = Species.ELECTRON
    z_nucleus: int = 1
    fine_structure_alpha: float = constants.fine_structure

    def __post_init__(self):
        object.__setattr__(self, 'species', Species(self.species))
        if int(self.z_nucleus) != self.z_nucleus or self.z_nucleus < 1:
            raise ConfigurationError(f'z_nucleus must be a positive integer, got {self.z_nucleus!r}')
        if not self.fine_structure_alpha > 0:
            raise ConfigurationError('fine_structure_alpha must be positive')

    @property
    def gamma_coupling(self) -> float:
        """gamma = kappa/(hbar c) = +-Z*alpha."""
        return self.species.coupling_sign * self.z_nucleus * self.fine_structure_alpha


@dataclass(frozen=True)
class Kinematics:
    """Dimensionless scattering parameters derived from energy and coupling.

    Attributes:
        energy_ratio: E / (mu c^2), strictly above 1.
        k1: (E + mu c^2) / (hbar c).
        k2: (E - mu c^2) / (hbar c).
        k: sqrt(k1 * k2), the asymptotic wave number.
        gamma_coupling: kappa / (hbar c).
        beta: kappa / (hbar v_c).
        beta_prime: beta * sqrt(1 - v_c^2/c^2).
        v_over_c: classical velocity of the incident particle.
    """
    energy_ratio: float
    k1: float
    k2: float
    k: float
    gamma_coupling: float
    beta: float
    beta_prime: float
    v_over_c: float

    @property
    def beta_minus_beta_prime(self) -> float:
        """beta - beta' = gamma * sqrt(k2/k1), free of cancellation."""
        return self.gamma_coupling * math.sqrt(self.k2 / self.k1)

    @property
    def relativistic_deficit(self) -> float:
        """1 - beta'/beta = (E - mu c^2)/E; vanishes in the nonrelativistic limit."""
        return self.k2 / self.energy_ratio

    @property
    def kappa(self) -> float:
        """Coupling constant kappa in natural units (equal to gamma)."""
        return self.gamma_coupling

    def as_dict(self) -> dict:
        return {
            'energy_ratio': self.energy_ratio,
            'k1': self.k1,
            'k2': self.k2,
            'k': self.k,
            'gamma': self.gamma_coupling,
            'beta': self.beta,
            'beta_prime': self.beta_prime,
            'v_over_c': self.v_over_c,
        }


def _check_coupling(gamma: float, allow_strong_coupling: bool):
    if abs(gamma) >= GAMMA_LIMIT and not allow_strong_coupling:
        raise CouplingTooStrongError(
            f'|gamma| = {abs(gamma):.6g} >= 1/2: the exponent s is imaginary for j = +-1/2 '
            f'(keep Z*alpha < 1/2, i.e. Z <= 68)'
        )


def _assemble(gamma: float, energy_ratio: float, k1: float, k2: float, k: float) -> Kinematics:
    v_over_c = k / energy_ratio
    return Kinematics(
        energy_ratio=energy_ratio,
        k1=k1,
        k2=k2,
        k=k,
        gamma_coupling=gamma,
        beta=gamma * energy_ratio / k,
        beta_prime=gamma / k,
        v_over_c=v_over_c,
    )


def derive_kinematics(spec: ParticleSpec, energy_ratio: float,
                      allow_strong_coupling: bool = False) -> Kinematics:
    """
    Derive k1, k2, k, gamma, beta, beta' and v/c for a projectile of energy E.

    Args:
        spec: Projectile species and nuclear charge.
        energy_ratio: E / (mu c^2).
        allow_strong_coupling: Skip the |gamma| < 1/2 gate (out of warranty).

    Returns:
        Kinematics record satisfying k^2 = k1 k2 and beta^2 - beta'^2 = gamma^2.
    """
    return kinematics_at_energy(spec.gamma_coupling, energy_ratio, allow_strong_coupling)


def kinematics_at_energy(gamma: float, energy_ratio: float,
                         allow_strong_coupling: bool = False) -> Kinematics:
    """Kinematics for an arbitrary coupling gamma at energy E/(mu c^2)."""
    energy_ratio = float(energy_ratio)
    if not energy_ratio > 1.0 or not math.isfinite(energy_ratio):
        raise BelowThresholdError(
            f'scattering requires E > mu c^2 (got E/mu c^2 = {energy_ratio!r})'
        )
    _check_coupling(gamma, allow_strong_coupling)

    k1 = energy_ratio + 1.0
    k2 = energy_ratio - 1.0
    return _assemble(float(gamma), energy_ratio, k1, k2, math.sqrt(k1 * k2))


def kinematics_from_coupling(gamma: float, v_over_c: float,
                             allow_strong_coupling: bool = False) -> Kinematics:
    """
    Kinematics for an arbitrary coupling gamma at incident velocity v/c.

    Holding beta = gamma/(v/c) fixed while v/c -> 0 is how the
    nonrelativistic limit is probed.
    """
    v = float(v_over_c)
    if not 0.0 < v < 1.0:
        raise BelowThresholdError(f'v/c must lie in (0, 1), got {v_over_c!r}')
    _check_coupling(gamma, allow_strong_coupling)

    root = math.sqrt((1.0 - v) * (1.0 + v))
    energy_ratio = 1.0 / root
    k2 = v * v / (root * (1.0 + root))
    k1 = energy_ratio + 1.0
    return _assemble(float(gamma), energy_ratio, k1, k2, v / root)


def kinematics_from_velocity(spec: ParticleSpec, v_over_c: float,
                             allow_strong_coupling: bool = False) -> Kinematics:
    """Same as ``derive_kinematics`` but parametrised by v/c instead of E."""
    return kinematics_from_coupling(spec.gamma_coupling, v_over_c, allow_strong_coupling)


def length_unit_fm(mass_mev: float) -> float:
    """Reduced Compton wavelength hbar/(mu c) in fm for a particle of mass ``mass_mev``."""
    if not mass_mev > 0:
        raise ConfigurationError('mass must be positive')
    return HBARC_MEV_FM / mass_mev
