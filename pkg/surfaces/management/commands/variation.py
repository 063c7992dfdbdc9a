from surfaces.utils import dump_json, variation_lab_report

from ._base import LabCommand


class Command(LabCommand):
    help = 'First and second variation of L_beta by formula, pre-Stokes form and finite differences'

    defaults = {'beta': [2.0], 'c1': 1.0, 'c2': 1.0, 'eps': 1.0, 'r_max': 2.0, 'field_count': 20,
                'slope_scale': 1.0, 'n_r': 1025}
    flag_names = ('beta', 'c1', 'c2', 'eps', 'r_max', 'field_count', 'slope_scale', 'n_r', 'n_theta')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--beta', type=float)
        parser.add_argument('--c1', type=float)
        parser.add_argument('--c2', type=float)
        parser.add_argument('--r-min', dest='eps', type=float)
        parser.add_argument('--r-max', dest='r_max', type=float)
        parser.add_argument('--fields', dest='field_count', type=int)
        parser.add_argument('--slope-scale', dest='slope_scale', type=float,
                            help='scale the profile to obtain a non-critical surface')
        parser.add_argument('--n-r', dest='n_r', type=int)
        parser.add_argument('--n-theta', dest='n_theta', type=int)

    def run(self, config):
        report = variation_lab_report(config)
        self.emit(config, dump_json(report))
        return report['passed']
