import json
import logging

from django.core.management.base import BaseCommand, CommandError

from surfaces.conf import override_tolerances
from surfaces.exceptions import EXIT_CHECK_FAILURE, EXIT_USAGE, BetaLabError
from surfaces.utils import UsageError, parse_tolerance_flags, resolve_run_config, write_text

logger = logging.getLogger('surfaces.commands')


class LabCommand(BaseCommand):
    """Shared flags, config resolution and error reporting for the lab commands.

    Subclasses set ``defaults`` and implement ``run(config)``.
    """

    defaults = {}
    flag_names = ()

    def add_arguments(self, parser):
        parser.add_argument('--config', help='key = value configuration file')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--output', help='output path (stdout when omitted)')
        parser.add_argument('--tolerance', action='append', metavar='NAME=VALUE',
                            help='override a tolerance for this run')

    def add_profile_arguments(self, parser, many_betas=False):
        parser.add_argument('--beta', type=float, nargs='+' if many_betas else None)
        parser.add_argument('--c1', type=float)
        parser.add_argument('--c2', type=float)
        parser.add_argument('--eps', type=float)
        parser.add_argument('--r-max', dest='r_max', type=float)
        parser.add_argument('--samples', type=int)
        parser.add_argument('--f0', type=float)
        parser.add_argument('--g0', type=float)

    def handle(self, *args, **options):
        flags = {name: options.get(name) for name in self.flag_names}
        if flags.get('beta') is not None and not isinstance(flags['beta'], (list, tuple)):
            flags['beta'] = [flags['beta']]
        flags['seed'] = options.get('seed')
        flags['output'] = options.get('output')
        try:
            flags['tolerances'] = parse_tolerance_flags(options.get('tolerance'))
            config = resolve_run_config(self.defaults, flags, options.get('config'))
            with override_tolerances(config.get('tolerances')):
                passed = self.run(config)
        except UsageError as e:
            self.fail(e.as_dict(), EXIT_USAGE)
        except BetaLabError as e:
            logger.error(f"{e.code}: {e}")
            self.fail(e.as_dict(), e.exit_code)
        if passed is False:
            raise CommandError('one or more checks failed', returncode=EXIT_CHECK_FAILURE)

    def run(self, config):
        raise NotImplementedError

    def fail(self, payload, returncode):
        self.stderr.write(json.dumps(payload, sort_keys=True, default=str))
        raise CommandError(payload['message'], returncode=returncode)

    def emit(self, config, content):
        """Write to ``--output`` when given, otherwise to stdout."""
        if config.get('output'):
            write_text(config['output'], content)
        else:
            self.stdout.write(content, ending='')
