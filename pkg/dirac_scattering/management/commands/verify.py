from django.core.management.base import CommandError

from ._base import ScatteringCommand
from ...models import VerificationRun
from ...utils.verification import SUITE_NAMES, run_suites

VERIFY_HEADERS = ['suite', 'check', 'value', 'tolerance', 'margin', 'result', 'detail']


class Command(ScatteringCommand):
    help = 'Run the numerical verification suites; exits 1 when any check fails'
    title = 'VERIFICATION'
    needs_energy = False

    def add_command_arguments(self, parser):
        parser.add_argument('--suite', action='append', choices=SUITE_NAMES + ('all',),
                            help='Suite to run (repeatable, default all)')
        parser.add_argument('--seed', type=int, help='Add randomly sampled points from this seed')
        parser.add_argument('--inject-gamma-fault', type=float, nargs='?', const=1e-6, default=None,
                            metavar='DELTA', help='Perturb log-Gamma by DELTA (default 1e-6); checks must fail')
        parser.add_argument('--record', action='store_true', help='Store the run in the database')

    def run(self, config, options):
        suites = options['suite'] or ['all']
        fault = options['inject_gamma_fault']
        record = None
        if options['record']:
            record = VerificationRun.objects.create(suites=','.join(suites), seed=config.seed, gamma_fault=fault)

        try:
            reports = run_suites(suites, seed=config.seed, n_jobs=config.jobs, gamma_fault=fault)
        except Exception as exc:
            if record is not None:
                record.fail(exc)
            raise
        if record is not None:
            record.finish(reports)

        for report in reports:
            style = self.style.SUCCESS if report.passed else self.style.ERROR
            self.note(f'{report.suite}: {len(report.checks) - report.failed}/{len(report.checks)} passed '
                      f'({report.elapsed:.1f} s)', style)

        rows = [
            {
                'suite': check.suite,
                'check': check.name,
                'value': check.value,
                'tolerance': check.tolerance,
                'margin': check.margin,
                'result': 'PASS' if check.passed else 'FAIL',
                'detail': check.detail,
            }
            for report in reports for check in report.checks
        ]
        summary = {}
        for report in reports:
            entry = report.as_dict()
            del entry['checks']
            summary[report.suite] = entry
        self.emit(rows, VERIFY_HEADERS, checks=summary, seed=config.seed, gamma_fault=fault)

        failed = sum(report.failed for report in reports)
        if failed:
            raise CommandError(f'{failed} verification checks failed', returncode=1)
        self.note('All checks passed', self.style.SUCCESS)
