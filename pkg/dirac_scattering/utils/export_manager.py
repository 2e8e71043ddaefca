import csv
import io
import json
import os

import numpy as np
from django.utils import timezone

from .. import __version__
from ..physics.amplitude import AmplitudeMethod

KINEMATICS_HEADERS = ['energy_ratio', 'k1', 'k2', 'k', 'gamma', 'beta', 'beta_prime', 'v_over_c']
PHASE_SHIFT_HEADERS = ['two_j', 'm', 's', 're_S', 'im_S', 'eta_principal', 'method']
AMPLITUDE_HEADERS = ['theta_rad', 're_f', 'im_f', 'sigma', 'sigma_closed', 'method', 'diag']
CROSS_SECTION_HEADERS = ['theta_rad', 'sigma_closed', 'sigma_amplitude', 'sigma_classical', 'sigma_born']
RADIAL_HEADERS = ['rho', 're_u', 'im_u', 're_v', 'im_v', 're_f', 'im_f', 're_g', 'im_g']


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    return str(value)


class ExportManager:
    """
    Row builders and CSV/JSON writers for every table the commands produce.

    Floats are written with Python's shortest round-trip repr, so the same
    input always gives byte-identical files.
    """

    @staticmethod
    def render_csv(rows, headers):
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=headers, lineterminator='\n')
        writer.writeheader()
        writer.writerows(rows)
        return buffer.getvalue()

    @staticmethod
    def render_json(rows, metadata):
        return json.dumps({'metadata': metadata, 'rows': rows}, indent=2, default=_json_default) + '\n'

    @staticmethod
    def write(text, output_path):
        """Write rendered text, creating the parent directory if needed."""
        directory = os.path.dirname(os.path.abspath(output_path))
        if not os.path.exists(directory):
            os.makedirs(directory)
        with open(output_path, 'w', newline='', encoding='utf-8') as f:
            f.write(text)
        return output_path

    @staticmethod
    def metadata(config=None, kin=None, timestamp=True, checks=None, **extra):
        """Header for JSON exports: version, config echo, kinematics and optional checks."""
        meta = {'version': __version__}
        if config is not None:
            meta['config_echo'] = config.echo()
        if kin is not None:
            meta['kinematics'] = kin.as_dict()
        if timestamp:
            meta['generated_at'] = timezone.now().isoformat()
        if checks is not None:
            meta['checks'] = checks
        meta.update(extra)
        return meta

    # -- row builders ---------------------------------------------------------

    @staticmethod
    def kinematics_rows(kin):
        return [{key: float(value) for key, value in kin.as_dict().items()}]

    @staticmethod
    def phase_shift_rows(table):
        eta = table.eta_principal
        return [
            {
                'two_j': int(two_j),
                'm': int(m),
                's': float(s),
                're_S': float(value.real),
                'im_S': float(value.imag),
                'eta_principal': float(phase),
                'method': table.method.value,
            }
            for two_j, m, s, value, phase in zip(table.two_j, table.m, table.s, table.values, eta)
        ]

    @staticmethod
    def amplitude_rows(amplitude, sigma_closed, length_unit=1.0):
        """f in units of length^(1/2), sigma in units of length; sigma is blank for the f1 part alone."""
        partial = amplitude.method is AmplitudeMethod.F1_SERIES
        values = amplitude.scaled(length_unit)
        sigma = amplitude.sigma * length_unit
        closed = np.asarray(sigma_closed) * length_unit
        diag = amplitude.diagnostics * np.sqrt(length_unit)
        return [
            {
                'theta_rad': float(theta),
                're_f': float(f.real),
                'im_f': float(f.imag),
                'sigma': None if partial else float(s),
                'sigma_closed': float(c),
                'method': amplitude.method.value,
                'diag': float(d),
            }
            for theta, f, s, c, d in zip(amplitude.thetas, values, sigma, closed, diag)
        ]

    @staticmethod
    def cross_section_rows(cross_section, classical, born, length_unit=1.0):
        return [
            {
                'theta_rad': float(theta),
                'sigma_closed': float(closed * length_unit),
                'sigma_amplitude': float(from_f * length_unit),
                'sigma_classical': float(cl * length_unit),
                'sigma_born': float(b * length_unit),
            }
            for theta, closed, from_f, cl, b in zip(
                cross_section.grid.thetas, cross_section.closed, cross_section.from_amplitude, classical, born)
        ]

    @staticmethod
    def radial_rows(solution):
        f, g = solution.f, solution.g
        return [
            {
                'rho': float(rho),
                're_u': float(u.real), 'im_u': float(u.imag),
                're_v': float(v.real), 'im_v': float(v.imag),
                're_f': float(fv.real), 'im_f': float(fv.imag),
                're_g': float(gv.real), 'im_g': float(gv.imag),
            }
            for rho, u, v, fv, gv in zip(solution.rho, solution.u, solution.v, f, g)
        ]
