"""
Management command running the bundlelab checks.
Usage:
    python manage.py bundlelab reduce-tau --tau 1,1
    python manage.py bundlelab holo-basis --spec specs/dps.json --degree 3
    python manage.py bundlelab metric-check --spec specs/t2.json --suite gauduchon,ricci,invariance
    python manage.py bundlelab calabi --profile slow-growth --format csv --out growth.csv

Exit codes: 0 when every check passes, 1 when one fails, 2 on a configuration error.
"""
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from common.exceptions import ConfigError
from cli_reports.jobs import COMMANDS, FORMATS, JobConfig, parse_params, parse_seed, parse_tau, run


class Command(BaseCommand):
    help = 'Classify rank 2 bundles over elliptic curves and verify their metrics and growth'

    def add_arguments(self, parser):
        parser.add_argument('job', choices=COMMANDS, help='Check to run')
        parser.add_argument(
            '--spec',
            action='append',
            default=[],
            help='Bundle spec JSON file (twice for iso and biholo)'
        )
        parser.add_argument('--tau', type=str, default=None, help='Modulus as RE,IM')
        parser.add_argument('--degree', type=int, default=None, help='Fiber degree bound (default: 3)')
        parser.add_argument(
            '--suite',
            type=str,
            default=None,
            help='Comma separated metric checks (default: the suite of the bundle type)'
        )
        parser.add_argument('--tol', type=float, default=None, help='Tolerance (default: BUNDLELAB_TOLERANCE)')
        parser.add_argument('--seed', type=str, default=None, help='Sampling seed (default: BUNDLELAB_SEED)')
        parser.add_argument('--samples', type=int, default=None, help='Sample count (default: BUNDLELAB_SAMPLES)')
        parser.add_argument('--profile', type=str, default=None, help='Calabi profile (default: calabi-log)')
        parser.add_argument(
            '--param',
            action='append',
            default=[],
            help='Profile parameter KEY=VALUE, repeatable'
        )
        parser.add_argument('--out', type=str, default=None, help='Write the report here instead of stdout')
        parser.add_argument('--format', choices=FORMATS, default='json', help='Report format')
        parser.add_argument('--timing', action='store_true', help='Add the wall time to the JSON report')

    def handle(self, *args, **options):
        try:
            config = JobConfig(
                options['job'],
                specs=tuple(options['spec']),
                tau=None if options['tau'] is None else parse_tau(options['tau']),
                degree=options['degree'],
                suite=None if options['suite'] is None else tuple(
                    name.strip() for name in options['suite'].split(',') if name.strip()
                ),
                tolerance=options['tol'],
                seed=None if options['seed'] is None else parse_seed(options['seed'], '--seed'),
                samples=options['samples'],
                out=options['out'],
                format=options['format'],
                timing=options['timing'],
                profile=options['profile'],
                params=parse_params(options['param']) or None,
            )
            report, code = run(config)
        except ConfigError as e:
            raise CommandError(str(e), returncode=2)

        text = report.render(config.format, config.timing)
        if config.out:
            try:
                Path(config.out).write_text(text)
            except OSError as e:
                raise CommandError(f'{config.out}: cannot write report: {e.strerror}', returncode=2)
        else:
            self.stdout.write(text, ending='')

        if code:
            failed = [result.check for result in report.results if not result.passed]
            raise CommandError(f'{len(failed)} check(s) failed: {", ".join(failed)}', returncode=code)
        if config.out:
            self.stderr.write(self.style.SUCCESS(f'{config.command}: all checks passed, report written to {config.out}'))
