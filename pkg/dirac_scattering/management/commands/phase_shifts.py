from django.conf import settings

from ._base import ScatteringCommand
from ...physics.phase_shift import Method, channel_order, s_matrix_table
from ...utils.export_manager import PHASE_SHIFT_HEADERS, ExportManager


class Command(ScatteringCommand):
    help = 'Tabulate the partial-wave S-matrix elements S_j for |two_j| <= --two-j-max'
    title = 'PHASE SHIFTS'

    def add_command_arguments(self, parser):
        parser.add_argument('--two-j-max', type=int,
                            help=f'Largest |two_j| (odd, default {settings.DEFAULT_TWO_J_MAX})')
        parser.add_argument('--method', choices=[m.value for m in Method],
                            help='exact (default), small_gamma or nonrel')

    def config_overrides(self):
        return {'format': 'csv', 'two_j_max': settings.DEFAULT_TWO_J_MAX, 'method': Method.EXACT.value}

    def run(self, config, options):
        kin = config.kinematics()
        table = s_matrix_table(channel_order(config.two_j_max), kin, Method(config.method))
        defect = max(element.unitarity_defect for element in table.elements())
        self.note(f'{len(table)} channels, max ||S| - 1| = {defect:.3e}')
        self.emit(ExportManager.phase_shift_rows(table), PHASE_SHIFT_HEADERS, kin,
                  checks={'unitarity_defect': defect})
