from ._base import ScatteringCommand
from ...utils.export_manager import KINEMATICS_HEADERS, ExportManager


class Command(ScatteringCommand):
    help = 'Derive k1, k2, k, gamma, beta, beta\' and v/c for a projectile energy or velocity'
    title = 'KINEMATICS'

    def run(self, config, options):
        kin = config.kinematics()
        self.note(f'{config.particle} on Z = {config.z}, gamma = {kin.gamma_coupling:+.6g}')
        self.emit(ExportManager.kinematics_rows(kin), KINEMATICS_HEADERS, kin)
