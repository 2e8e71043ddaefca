from ._base import ScatteringCommand
from ...physics.amplitude import born_sigma, sigma, sigma_classical_form
from ...utils.export_manager import CROSS_SECTION_HEADERS, ExportManager
from ...utils.run_config import add_angle_arguments


class Command(ScatteringCommand):
    help = 'Closed-form differential cross section with its |f|^2, classical-form and Born counterparts'
    title = 'DIFFERENTIAL CROSS SECTION'

    def add_command_arguments(self, parser):
        add_angle_arguments(parser)

    def config_overrides(self):
        return {'format': 'csv'}

    def run(self, config, options):
        kin = config.kinematics()
        grid = config.angle_grid()
        cs = sigma(grid, kin)
        classical = sigma_classical_form(grid.thetas, kin.v_over_c, kin.kappa)
        born = born_sigma(grid, kin)
        self.note(f'{len(grid)} angles, closed vs |f|^2 mismatch {cs.mismatch:.3e}')
        rows = ExportManager.cross_section_rows(cs, classical, born, config.length_unit)
        self.emit(rows, CROSS_SECTION_HEADERS, kin, checks={'closed_vs_amplitude': cs.mismatch},
                  length_unit=config.length_unit)
