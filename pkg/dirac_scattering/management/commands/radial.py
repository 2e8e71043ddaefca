import numpy as np
from django.conf import settings

from ._base import ScatteringCommand
from ...exceptions import ConfigurationError
from ...physics.phase_shift import AngularMomentum
from ...physics.radial_oracle import (
    DEFAULT_GRID_POINTS,
    analytic_phase,
    extract_phase,
    kummer_radial,
    ode_integrate,
    phase_difference_mod_pi,
)
from ...utils.export_manager import RADIAL_HEADERS, ExportManager

SOLVERS = ('ode', 'kummer')


class Command(ScatteringCommand):
    help = 'Radial functions u, v, f, g of one partial wave, optionally with the fitted phase shift'
    title = 'RADIAL SOLUTION'

    def add_command_arguments(self, parser):
        parser.add_argument('--two-j', type=int, default=1, help='Channel label 2j (odd, default 1)')
        parser.add_argument('--method', choices=SOLVERS,
                            help='ode: integrate the radial system (default); kummer: closed solution')
        parser.add_argument('--rho0', type=float, default=settings.ODE_RHO0)
        parser.add_argument('--rho-max', type=float, default=settings.ODE_RHO_MAX)
        parser.add_argument('--points', type=int, default=DEFAULT_GRID_POINTS, help='Output grid size')
        parser.add_argument('--rtol', type=float, default=settings.ODE_RTOL)
        parser.add_argument('--fit', action='store_true', help='Fit the asymptotic form and report eta')
        parser.add_argument('--fit-window', type=float, nargs=2, metavar=('LO', 'HI'),
                            default=list(settings.FIT_WINDOW))
        parser.add_argument('--component', choices=('f', 'g'), default='f')

    def config_overrides(self):
        return {'format': 'csv', 'method': 'ode'}

    def run(self, config, options):
        if config.method not in SOLVERS:
            raise ConfigurationError(f'--method must be one of {", ".join(SOLVERS)} for radial')
        if options['points'] < 2:
            raise ConfigurationError('--points must be at least 2')
        kin = config.kinematics()
        j = AngularMomentum(options['two_j'])
        rho0, rho_max = options['rho0'], options['rho_max']
        if not 0 < rho0 < rho_max:
            raise ConfigurationError(f'need 0 < rho0 < rho-max, got {rho0:g} and {rho_max:g}')
        grid = np.linspace(rho0, rho_max, options['points'])

        if config.method == 'kummer':
            sol = kummer_radial(j, kin, grid)
        else:
            sol = ode_integrate(j, kin, (rho0, rho_max), grid, rtol=options['rtol'])
        self.note(f'j = {j}, s = {sol.s:.8f}, {grid.size} points by {sol.method}')

        checks = None
        if options['fit']:
            fit = extract_phase(sol, tuple(options['fit_window']), options['component'],
                                order=settings.FIT_ORDER)
            exact = analytic_phase(j, kin)
            checks = {
                'eta_fit': fit.eta,
                'eta_exact': exact,
                'difference_mod_pi': phase_difference_mod_pi(fit.eta, exact),
                'fit_residual': fit.residual,
                'fit_window': list(fit.fit_window),
                'component': fit.component,
            }
            self.note(f'eta fit = {fit.eta:+.12f}, eta exact = {exact:+.12f}, '
                      f'|difference| = {checks["difference_mod_pi"]:.2e}', self.style.SUCCESS)

        self.emit(ExportManager.radial_rows(sol), RADIAL_HEADERS, kin, checks=checks, two_j=j.two_j)
