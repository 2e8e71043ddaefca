"""
Shared plumbing for the scattering management commands.

Each command builds a RunConfig, computes its rows and hands them to
``emit``, which writes a table, CSV or JSON to stdout or ``--output``.
Toolkit errors become CommandError with exit code 2 (configuration) or
3 (numerics).
"""

from django.core.management.base import BaseCommand, CommandError

from ...exceptions import ScatteringError
from ...utils.export_manager import ExportManager
from ...utils.run_config import add_common_arguments, build_run_config


class ScatteringCommand(BaseCommand):
    # Commands that need no projectile (verify) set this to False
    needs_energy = True
    title = ''

    def add_arguments(self, parser):
        add_common_arguments(parser, energy=self.needs_energy)
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def config_overrides(self):
        """Command-specific defaults, below the config file and the flags."""
        return {}

    def handle(self, *args, **options):
        try:
            self.config = build_run_config(options, self.needs_energy, self.config_overrides())
            self.banner(self.title)
            self.run(self.config, options)
        except ScatteringError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code)

    def run(self, config, options):
        raise NotImplementedError('subclasses of ScatteringCommand must provide a run() method')

    # -- output ---------------------------------------------------------------

    @property
    def notes(self):
        """Where human-readable lines go: stderr while stdout carries csv/json data."""
        config = getattr(self, 'config', None)
        if config is not None and config.output is None and config.format != 'table':
            return self.stderr
        return self.stdout

    def banner(self, title):
        self.notes.write('=' * 80, self.style.SUCCESS)
        self.notes.write(f' {title}', self.style.SUCCESS)
        self.notes.write('=' * 80, self.style.SUCCESS)

    def note(self, message, style=None):
        self.notes.write(message, style or (lambda text: text))

    def render_table(self, rows, headers):
        cells = [[self._cell(row.get(name)) for name in headers] for row in rows]
        widths = [max([len(name)] + [len(line[i]) for line in cells]) for i, name in enumerate(headers)]
        lines = ['  '.join(name.rjust(width) for name, width in zip(headers, widths))]
        lines.append('  '.join('-' * width for width in widths))
        for line in cells:
            lines.append('  '.join(cell.rjust(width) for cell, width in zip(line, widths)))
        return '\n'.join(lines) + '\n'

    @staticmethod
    def _cell(value):
        if isinstance(value, float):
            return f'{value:.10g}'
        return '' if value is None else str(value)

    def emit(self, rows, headers, kin=None, checks=None, **extra):
        """Render rows in the configured format and send them to stdout or --output."""
        config = self.config
        if config.format == 'csv':
            text = ExportManager.render_csv(rows, headers)
        elif config.format == 'json':
            meta = ExportManager.metadata(config, kin, timestamp=not config.no_timestamp,
                                          checks=checks, **extra)
            text = ExportManager.render_json(rows, meta)
        else:
            text = self.render_table(rows, headers)

        if config.output:
            ExportManager.write(text, config.output)
            self.note(f'Wrote {len(rows)} rows to {config.output}', self.style.SUCCESS)
        else:
            self.stdout.write(text, ending='')
