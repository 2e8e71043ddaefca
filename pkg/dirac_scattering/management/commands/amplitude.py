import numpy as np

from ._base import ScatteringCommand
from ...physics.amplitude import AmplitudeMethod, f_series, sigma_closed
from ...utils.export_manager import AMPLITUDE_HEADERS, ExportManager
from ...utils.run_config import add_angle_arguments, add_summation_arguments


class Command(ScatteringCommand):
    help = 'Scattering amplitude f(theta) and cross section on an angle grid'
    title = 'SCATTERING AMPLITUDE'

    def add_command_arguments(self, parser):
        add_angle_arguments(parser)
        add_summation_arguments(parser)
        parser.add_argument('--method', choices=[m.value for m in AmplitudeMethod],
                            help='series_exact (default), series_f1_plus_closed_f0, closed_form or f1_series')

    def config_overrides(self):
        return {'format': 'csv', 'method': AmplitudeMethod.SERIES_EXACT.value}

    def run(self, config, options):
        kin = config.kinematics()
        grid = config.angle_grid()
        amplitude = f_series(grid, kin, config.method, config.summation_options())
        closed = sigma_closed(grid.thetas, kin)

        unconverged = int(np.count_nonzero(~amplitude.converged))
        if unconverged:
            self.note(f'{unconverged} of {len(grid)} angles did not converge; see the diag column',
                      self.style.WARNING)
        else:
            self.note(f'{len(grid)} angles, method {amplitude.method.value}')

        checks = {
            'max_diagnostic': float(np.max(amplitude.diagnostics)),
            'unconverged_angles': unconverged,
        }
        rows = ExportManager.amplitude_rows(amplitude, closed, config.length_unit)
        self.emit(rows, AMPLITUDE_HEADERS, kin, checks=checks, length_unit=config.length_unit)
