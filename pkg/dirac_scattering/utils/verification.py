"""
Verification suites: numerical checks of the whole pipeline with explicit tolerances.

Every check reports the measured error next to its tolerance so a run can be
audited from the JSON report alone.
"""

import contextlib
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np

from ..exceptions import ConfigurationError, NumericalError
from ..physics.amplitude import (
    AngleGrid,
    SummationOptions,
    born_sigma,
    f1_closed,
    f1_series,
    f_closed,
    f_series_exact,
    half_angle_sine,
    sigma,
    sigma_classical_form,
    sigma_closed,
)
from ..physics.kinematics import ParticleSpec, derive_kinematics, kinematics_at_energy, kinematics_from_coupling
from ..physics.phase_shift import AngularMomentum, channel_order, s_matrix_table
from ..physics.radial_oracle import analytic_phase, kummer_radial, phase_difference_mod_pi, radial_residual, solve_channels
from ..physics.specfun import inject_gamma_fault, kummer_recurrence_check, log_gamma

logger = logging.getLogger(__name__)

SUITE_NAMES = ('kernel', 'unitarity', 'oracle', 'closed_vs_series', 'limits')

UNITARITY_GAMMAS = (0.01, -0.01, 0.1, -0.1, 0.3, -0.3, 0.49, -0.49)
UNITARITY_ENERGIES = (1.01, 1.25, 5.0, 50.0)
ORACLE_CHANNELS = (1, -1, 3, -3, 5, -5)
ORACLE_GAMMAS = (0.01, 0.1, 0.3)
ORACLE_ENERGIES = (1.25, 5.0)
SERIES_ANGLES = (math.pi / 6, math.pi / 2, math.pi, 3 * math.pi / 2)
# |f_series - f_closed| sqrt(2k) / gamma^2 peaks near 4.3 on the checked angles
GAP_CONSTANT = 5.0


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ''

    @classmethod
    def bound(cls, suite: str, name: str, value: float, tolerance: float, detail: str = '') -> 'CheckResult':
        value = float(value)
        return cls(suite, name, value, float(tolerance), bool(value <= tolerance), detail)

    @property
    def margin(self) -> float:
        return self.tolerance - self.value

    def as_dict(self) -> dict:
        data = asdict(self)
        data['margin'] = self.margin
        return data


@dataclass
class SuiteReport:
    suite: str
    checks: List[CheckResult] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed(self) -> int:
        return sum(not check.passed for check in self.checks)

    def as_dict(self) -> dict:
        return {
            'suite': self.suite,
            'passed': self.passed,
            'failed': self.failed,
            'total': len(self.checks),
            'elapsed_s': round(self.elapsed, 3),
            'checks': [check.as_dict() for check in self.checks],
        }


@dataclass(frozen=True)
class SuiteContext:
    """Shared knobs: an optional RNG for extra sampled points, and joblib workers."""
    rng: Optional[np.random.Generator] = None
    n_jobs: int = 1

    def extra(self, low: float, high: float, count: int) -> np.ndarray:
        if self.rng is None:
            return np.empty(0)
        return self.rng.uniform(low, high, count)


def _grid_with_extras(base: np.ndarray, ctx: SuiteContext) -> AngleGrid:
    thetas = np.unique(np.concatenate([base, ctx.extra(base[0], base[-1], 16)]))
    return AngleGrid(thetas)


def kernel_suite(ctx: SuiteContext) -> List[CheckResult]:
    checks = []
    betas = np.concatenate([np.linspace(0.0, 5.0, 21), ctx.extra(0.0, 5.0, 8)])
    modulus = np.exp(2 * np.real(log_gamma(0.5 + 1j * betas)))
    identity = np.max(np.abs(modulus * np.cosh(math.pi * betas) / math.pi - 1))
    checks.append(CheckResult.bound('kernel', 'gamma_modulus_identity', identity, 1e-13))

    worst = 0.0
    for s in (0.43, 0.5, 1.5, 2.5, 5.5):
        for beta in (-0.6, 0.0, 0.6):
            for rho in (0.0, 0.5, 5.0, 20.0, 60.0, 500.0, 5000.0):
                worst = max(worst, kummer_recurrence_check(s - 1j * beta, 2 * s + 1, -2j * rho))
    checks.append(CheckResult.bound('kernel', 'kummer_recurrence', worst, 1e-8))

    kin = kinematics_at_energy(0.1, 1.25)
    grid = np.geomspace(1e-3, 300.0, 40)
    for two_j in (1, -1, 3, -3):
        residual = radial_residual(kummer_radial(AngularMomentum(two_j), kin, grid))
        checks.append(CheckResult.bound('kernel', f'kummer_solution_residual j={two_j}/2', residual, 1e-8))
    return checks


def unitarity_suite(ctx: SuiteContext) -> List[CheckResult]:
    checks = []
    channels = channel_order(401)
    for gamma in UNITARITY_GAMMAS:
        for energy in UNITARITY_ENERGIES:
            values = s_matrix_table(channels, kinematics_at_energy(gamma, energy)).values
            defect = np.max(np.abs(np.abs(values) - 1))
            checks.append(CheckResult.bound('unitarity', f'gamma={gamma:+g} E={energy:g}', defect, 1e-12))
    return checks


def oracle_suite(ctx: SuiteContext) -> List[CheckResult]:
    checks = []
    for gamma in ORACLE_GAMMAS:
        for energy in ORACLE_ENERGIES:
            kin = kinematics_at_energy(gamma, energy)
            label = f'gamma={gamma:g} E={energy:g}'
            try:
                fits = solve_channels(ORACLE_CHANNELS, kin, n_jobs=ctx.n_jobs)
            except NumericalError as exc:
                for two_j in ORACLE_CHANNELS:
                    checks.append(CheckResult('oracle', f'j={two_j}/2 {label}', math.inf, 1e-6, False, str(exc)))
                continue
            for fit in fits:
                gap = phase_difference_mod_pi(fit.eta, analytic_phase(fit.j, kin))
                checks.append(CheckResult.bound('oracle', f'j={fit.j} {label}', gap, 1e-6,
                                                f'fit residual {fit.residual:.2e}'))
    return checks


def closed_vs_series_suite(ctx: SuiteContext) -> List[CheckResult]:
    checks = []
    grid = _grid_with_extras(np.linspace(math.pi / 32, 63 * math.pi / 32, 256), ctx)
    for species in ('electron', 'positron'):
        for energy in (1.25, 5.0):
            kin = derive_kinematics(ParticleSpec(species, 1), energy)
            label = f'{species} E={energy:g}'
            checks.append(CheckResult.bound('closed_vs_series', f'|f_closed|^2 vs sigma {label}',
                                            sigma(grid, kin).mismatch, 1e-12))
            closed = sigma_closed(grid.thetas, kin)
            classical = sigma_classical_form(grid.thetas, kin.v_over_c, kin.kappa)
            checks.append(CheckResult.bound('closed_vs_series', f'classical form {label}',
                                            np.max(np.abs(classical - closed) / closed), 1e-12))

    kin = derive_kinematics(ParticleSpec('electron', 1), 1.25)
    gamma = abs(kin.gamma_coupling)
    series_grid = AngleGrid(np.array(SERIES_ANGLES))
    series = f_series_exact(series_grid, kin, SummationOptions(n_jobs=ctx.n_jobs))
    closed_f = f_closed(series_grid, kin).values
    for theta, value, target, diag in zip(SERIES_ANGLES, series.values, closed_f, series.diagnostics):
        name = f'theta={theta / math.pi:.4g}pi'
        gap = abs(value - target)
        allowed = max(GAP_CONSTANT * gamma ** 2 / math.sqrt(2 * kin.k), 3 * diag)
        checks.append(CheckResult.bound('closed_vs_series', f'series gap {name}', gap, allowed))
        relative_limit = 1e-3 if theta == math.pi else 5e-3
        checks.append(CheckResult.bound('closed_vs_series', f'series relative gap {name}',
                                        gap / abs(target), relative_limit))
    checks.append(CheckResult.bound('closed_vs_series', 'series converged',
                                    float(np.count_nonzero(~series.converged)), 0))

    gammas = np.geomspace(3e-3, 3e-2, 5)
    half_turn = AngleGrid(np.array([math.pi / 2]))
    gaps = []
    for g in gammas:
        k_g = kinematics_at_energy(g, 1.25)
        gaps.append(abs(f_series_exact(half_turn, k_g, SummationOptions(n_jobs=ctx.n_jobs)).values[0]
                        - f_closed(half_turn, k_g).values[0]))
    slope = np.polyfit(np.log(gammas), np.log(gaps), 1)[0]
    checks.append(CheckResult.bound('closed_vs_series', 'gap slope in gamma', abs(slope - 2), 0.15,
                                    f'slope {slope:.4f}'))

    f1_grid = _grid_with_extras(np.linspace(math.pi / 16, 31 * math.pi / 16, 31), ctx)
    for beta in (0.05, 0.2):
        for v_c in (0.3, 0.6, 0.9):
            k_f = kinematics_from_coupling(beta * v_c, v_c)
            series_f1 = f1_series(f1_grid, k_f).values
            closed_f1 = f1_closed(f1_grid, k_f).values
            checks.append(CheckResult.bound('closed_vs_series', f'f1 series beta={beta:g} v={v_c:g}',
                                            np.max(np.abs(series_f1 - closed_f1) / np.abs(closed_f1)), 1e-8))
    return checks


def limits_suite(ctx: SuiteContext) -> List[CheckResult]:
    checks = []
    grid = AngleGrid.uniform(64)
    slow = kinematics_from_coupling(0.2 * 1e-3, 1e-3)
    sine = half_angle_sine(grid.thetas)
    reduced = sigma_closed(grid.thetas, slow) * 2 * slow.k * sine ** 2 / (slow.beta * np.tanh(slow.beta * math.pi))
    checks.append(CheckResult.bound('limits', 'nonrelativistic cross section', np.max(np.abs(reduced - 1)), 1e-5))

    velocities = np.geomspace(1e-3, 1e-1, 5)
    half_turn = AngleGrid(np.array([math.pi / 2]))
    sizes = []
    for v_c in velocities:
        kin = kinematics_from_coupling(0.2 * v_c, v_c)
        sizes.append(abs(f1_closed(half_turn, kin).values[0]) * math.sqrt(2 * kin.k))
    slope = np.polyfit(np.log(velocities ** 2), np.log(sizes), 1)[0]
    checks.append(CheckResult.bound('limits', 'f1 slope in v^2', abs(slope - 1), 0.01, f'slope {slope:.4f}'))

    kin = derive_kinematics(ParticleSpec('electron', 1), 1.25)
    upper = np.concatenate([np.linspace(math.pi, 2 * math.pi - math.pi / 32, 101),
                            ctx.extra(math.pi, 2 * math.pi - math.pi / 32, 16)])
    mirror = np.max(np.abs(sigma_closed(upper, kin) - sigma_closed(2 * math.pi - upper, kin)))
    checks.append(CheckResult.bound('limits', 'sigma mirror symmetry (bitwise)', mirror, 0.0))

    thetas = grid.thetas
    parity = np.max(np.abs(sigma_classical_form(thetas, kin.v_over_c, kin.kappa)
                           - sigma_classical_form(thetas, kin.v_over_c, -kin.kappa)))
    checks.append(CheckResult.bound('limits', 'sigma even in kappa (bitwise)', parity, 0.0))

    for beta in (1e-3, 1e-2, 0.1):
        weak = kinematics_from_coupling(beta * 0.6, 0.6)
        ratio = sigma_closed(thetas, weak) / born_sigma(grid, weak)
        bound = (beta * math.pi) ** 2 / 3
        checks.append(CheckResult.bound('limits', f'Born limit beta={beta:g}', np.max(np.abs(ratio - 1)) / bound, 1.0))
        checks.append(CheckResult.bound('limits', f'Born shape beta={beta:g}', np.ptp(ratio) / np.mean(ratio), 1e-13))

    cutoff = math.pi / 64
    near = np.array([cutoff, 2 * cutoff, 4 * cutoff])
    scaled = np.abs(f_closed(AngleGrid(near), kin).values) * half_angle_sine(near)
    spread = np.ptp(scaled) / scaled.max() if scaled.min() > 0 else math.inf
    checks.append(CheckResult.bound('limits', 'forward 1/sin law', spread, 0.01))
    return checks


SUITES: Dict[str, Callable[[SuiteContext], List[CheckResult]]] = {
    'kernel': kernel_suite,
    'unitarity': unitarity_suite,
    'oracle': oracle_suite,
    'closed_vs_series': closed_vs_series_suite,
    'limits': limits_suite,
}


def expand_suites(names: Iterable[str]) -> List[str]:
    """Resolve 'all' and reject unknown suite names, keeping a stable order."""
    requested = set()
    for name in names:
        if name == 'all':
            requested.update(SUITE_NAMES)
        elif name in SUITES:
            requested.add(name)
        else:
            raise ConfigurationError(f'unknown suite {name!r} (choose from {", ".join(SUITE_NAMES)}, all)')
    return [name for name in SUITE_NAMES if name in requested]


def run_suites(names: Iterable[str], seed: Optional[int] = None, n_jobs: int = 1,
               gamma_fault: Optional[float] = None) -> List[SuiteReport]:
    """
    Run the selected suites in order.

    Args:
        names: Suite names, or 'all'.
        seed: Adds randomly sampled angles and parameters when given.
        n_jobs: joblib workers for the heavy suites.
        gamma_fault: Perturb log-Gamma by this relative amount (sensitivity check).

    Returns:
        One SuiteReport per suite.
    """
    ctx = SuiteContext(np.random.default_rng(seed) if seed is not None else None, n_jobs)
    reports = []
    fault = inject_gamma_fault(gamma_fault) if gamma_fault else contextlib.nullcontext()
    with fault:
        if gamma_fault:
            logger.warning('log-Gamma perturbed by %g for this run', gamma_fault)
        for name in expand_suites(names):
            started = time.perf_counter()
            checks = SUITES[name](ctx)
            report = SuiteReport(name, checks, time.perf_counter() - started)
            logger.info('suite %s: %d/%d checks passed in %.1f s',
                        name, len(checks) - report.failed, len(checks), report.elapsed)
            reports.append(report)
    return reports
