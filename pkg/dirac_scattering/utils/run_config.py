"""
Run configuration shared by the management commands.

Values come from three layers, highest priority first: command-line flags,
a flat ``key=value`` config file given with ``--config``, and the defaults in
Django settings.
"""

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

from django.conf import settings

from ..exceptions import ConfigurationError
from ..physics.amplitude import AngleGrid, SummationOptions
from ..physics.kinematics import (
    Kinematics,
    ParticleSpec,
    Species,
    derive_kinematics,
    kinematics_from_velocity,
    length_unit_fm,
)

FORMATS = ('table', 'csv', 'json')
UNITS = ('natural', 'physical')
_TRUE = {'1', 'true', 'yes', 'on'}
_FALSE = {'0', 'false', 'no', 'off'}


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs to run, already validated."""
    particle: str = 'electron'
    z: int = 1
    alpha: float = field(default_factory=lambda: settings.FINE_STRUCTURE_ALPHA)
    energy_ratio: Optional[float] = None
    v_over_c: Optional[float] = None
    allow_strong_coupling: bool = False

    angles: int = field(default_factory=lambda: settings.DEFAULT_ANGLE_COUNT)
    theta_min: Optional[float] = None
    theta_max: Optional[float] = None
    forward_cutoff: float = field(default_factory=lambda: settings.FORWARD_CUTOFF)

    method: Optional[str] = None
    epsilon0: float = field(default_factory=lambda: settings.ABEL_EPSILON0)
    levels: int = field(default_factory=lambda: settings.ABEL_LEVELS)
    richardson_order: int = field(default_factory=lambda: settings.RICHARDSON_ORDER)
    tail_tolerance: float = field(default_factory=lambda: settings.TAIL_TOLERANCE)
    diagnostic_tolerance: float = field(default_factory=lambda: settings.DIAGNOSTIC_TOLERANCE)
    two_j_max: Optional[int] = None
    subtract_unity: bool = False

    format: str = 'table'
    output: Optional[str] = None
    units: str = 'natural'
    mass_mev: float = field(default_factory=lambda: settings.DEFAULT_MASS_MEV)
    jobs: int = field(default_factory=lambda: settings.SCATTERING_N_JOBS)
    no_timestamp: bool = False
    seed: Optional[int] = None

    def validate(self, require_energy: bool = True) -> 'RunConfig':
        if self.particle not in {species.value for species in Species}:
            raise ConfigurationError(f'unknown particle {self.particle!r} (choose electron or positron)')
        if self.z < 1:
            raise ConfigurationError(f'--z must be a positive integer, got {self.z}')
        if require_energy and (self.energy_ratio is None) == (self.v_over_c is None):
            raise ConfigurationError('give exactly one of --energy-ratio and --v-over-c')
        for name in ('alpha', 'energy_ratio', 'v_over_c', 'theta_min', 'theta_max', 'forward_cutoff',
                     'epsilon0', 'tail_tolerance', 'diagnostic_tolerance', 'mass_mev'):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise ConfigurationError(f'--{name.replace("_", "-")} must be finite, got {value}')
        if self.angles < 1:
            raise ConfigurationError(f'--angles must be positive, got {self.angles}')
        if self.format not in FORMATS:
            raise ConfigurationError(f'--format must be one of {", ".join(FORMATS)}')
        if self.units not in UNITS:
            raise ConfigurationError(f'--units must be one of {", ".join(UNITS)}')
        if not self.mass_mev > 0:
            raise ConfigurationError('--mass-mev must be positive')
        if self.jobs == 0:
            raise ConfigurationError('--jobs must be non-zero (negative values count back from all cores)')
        return self

    # -- derived objects ------------------------------------------------------

    @property
    def particle_spec(self) -> ParticleSpec:
        return ParticleSpec(self.particle, self.z, self.alpha)

    def kinematics(self) -> Kinematics:
        if self.energy_ratio is not None:
            return derive_kinematics(self.particle_spec, self.energy_ratio, self.allow_strong_coupling)
        return kinematics_from_velocity(self.particle_spec, self.v_over_c, self.allow_strong_coupling)

    def angle_grid(self) -> AngleGrid:
        return AngleGrid.uniform(self.angles, self.theta_min, self.theta_max, self.forward_cutoff)

    def summation_options(self) -> SummationOptions:
        return SummationOptions(
            epsilon0=self.epsilon0,
            levels=self.levels,
            richardson_order=self.richardson_order,
            tail_tolerance=self.tail_tolerance,
            two_j_max=self.two_j_max,
            subtract_unity=self.subtract_unity,
            diagnostic_tolerance=self.diagnostic_tolerance,
            n_jobs=self.jobs,
        )

    @property
    def length_unit(self) -> float:
        """Length of one internal unit: 1 in natural units, hbar/(mu c) in fm otherwise."""
        return length_unit_fm(self.mass_mev) if self.units == 'physical' else 1.0

    def echo(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_BOOLEAN = {'allow_strong_coupling', 'subtract_unity', 'no_timestamp'}
_INTEGER = {'z', 'angles', 'levels', 'richardson_order', 'two_j_max', 'jobs', 'seed'}
_STRING = {'particle', 'method', 'format', 'output', 'units'}


def _coerce(key: str, raw: str):
    text = raw.strip()
    try:
        if key in _BOOLEAN:
            lowered = text.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(text)
        if key in _INTEGER:
            return int(text)
        if key in _STRING:
            return text
        return float(text)
    except ValueError:
        raise ConfigurationError(f'invalid value for {key}: {raw!r}')


def load_config_file(path) -> Dict[str, Any]:
    """
    Parse a flat ``key=value`` file. Keys mirror the flag names, with either
    dashes or underscores; ``#`` starts a comment.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f'config file not found: {path}')
    values = {}
    for number, line in enumerate(path.read_text(encoding='utf-8').splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigurationError(f'{path}:{number}: expected key=value, got {line!r}')
        key, raw = line.split('=', 1)
        key = key.strip().lstrip('-').replace('-', '_')
        if key not in _FIELDS:
            raise ConfigurationError(f'{path}:{number}: unknown key {key!r}')
        values[key] = _coerce(key, raw)
    return values


def add_common_arguments(parser, energy: bool = True):
    """Flags shared by every command. Defaults stay None so the config file can fill them."""
    parser.add_argument('--config', help='key=value file with defaults for any flag')
    if energy:
        parser.add_argument('--particle', choices=[s.value for s in Species])
        parser.add_argument('--z', type=int, help='Nuclear charge number Z')
        parser.add_argument('--alpha', type=float, help='Fine-structure constant')
        parser.add_argument('--energy-ratio', type=float, help='Total energy in units of mu c^2')
        parser.add_argument('--v-over-c', type=float, help='Incident velocity in units of c')
        parser.add_argument('--allow-strong-coupling', action='store_true', default=None,
                            help='Permit |gamma| >= 1/2 (results not warranted)')
        parser.add_argument('--units', choices=UNITS)
        parser.add_argument('--mass-mev', type=float, help='Particle mass for --units physical')
    parser.add_argument('--format', choices=FORMATS)
    parser.add_argument('--output', help='Write data to this file instead of stdout')
    parser.add_argument('--jobs', type=int, help='joblib workers')
    parser.add_argument('--no-timestamp', action='store_true', default=None,
                        help='Omit the generation time from JSON metadata')


def add_angle_arguments(parser):
    parser.add_argument('--angles', type=int, help='Number of equally spaced angles')
    parser.add_argument('--theta-min', type=float, help='First angle in radians')
    parser.add_argument('--theta-max', type=float, help='Last angle in radians')
    parser.add_argument('--forward-cutoff', type=float, help='Excluded half-width around theta = 0')


def add_summation_arguments(parser):
    parser.add_argument('--epsilon0', type=float, help='Largest Abel damping parameter')
    parser.add_argument('--levels', type=int, help='Number of damping levels')
    parser.add_argument('--richardson-order', type=int)
    parser.add_argument('--tail-tolerance', type=float)
    parser.add_argument('--two-j-max', type=int, help='Hard cap on |2j| (default: adaptive)')
    parser.add_argument('--subtract-unity', action='store_true', default=None,
                        help='Sum S - 1 instead of S')


def build_run_config(options: Dict[str, Any], require_energy: bool = True,
                     overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Merge command options, an optional config file and settings defaults.

    Args:
        options: Parsed command options (Django passes every dest, unset ones as None).
        require_energy: Insist on exactly one of energy_ratio and v_over_c.
        overrides: Command-specific defaults applied below the file layer.

    Returns:
        Validated RunConfig.
    """
    values = dict(overrides or {})
    if options.get('config'):
        values.update(load_config_file(options['config']))
    for key in _FIELDS:
        if options.get(key) is not None:
            values[key] = options[key]
    try:
        config = RunConfig(**values)
    except TypeError as exc:
        raise ConfigurationError(str(exc))
    return config.validate(require_energy)
