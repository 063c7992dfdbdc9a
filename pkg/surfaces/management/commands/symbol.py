from surfaces.utils import dump_json, symbol_report

from ._base import LabCommand


class Command(LabCommand):
    help = 'Sample the principal symbol determinant and certify ellipticity'

    defaults = {'beta': [1.0], 'directions': 100, 'points': 8}
    flag_names = ('beta', 'directions', 'points')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--beta', type=float)
        parser.add_argument('--directions', type=int, help='sampled unit directions per point')
        parser.add_argument('--points', type=int, help='sample points on the rotational profile')

    def run(self, config):
        report = symbol_report(config)
        self.emit(config, dump_json(report))
        return report['passed']
