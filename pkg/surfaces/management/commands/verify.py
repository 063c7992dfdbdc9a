from surfaces.utils import dump_json, verify_report

from ._base import LabCommand


class Command(LabCommand):
    help = 'Run every check on a rotational profile; exit 0 iff all pass'

    defaults = {'beta': [2.0], 'c1': 1.0, 'c2': 1.0, 'eps': 1e-3, 'r_max': 1e3, 'samples': 4097,
                'f0': 0.0, 'g0': 0.0}
    flag_names = ('beta', 'c1', 'c2', 'eps', 'r_max', 'samples', 'f0', 'g0', 'corrupt_slope')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_profile_arguments(parser)
        parser.add_argument('--corrupt-slope', dest='corrupt_slope', type=float,
                            help="scale f' by this factor before checking (negative control)")

    def run(self, config):
        report = verify_report(config)
        self.emit(config, dump_json(report))
        return report['passed']
