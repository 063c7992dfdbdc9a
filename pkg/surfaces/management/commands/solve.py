from surfaces.plotting import profiles_svg
from surfaces.utils import UsageError, dump_json, profile_columns, profile_csv, solve_profiles

from ._base import LabCommand


class Command(LabCommand):
    help = 'Solve rotational critical profiles and write them as CSV, SVG or JSON'

    defaults = {'beta': [1.0], 'c1': 1.0, 'c2': 1.0, 'eps': 0.1, 'r_max': 10.0, 'samples': 4097,
                'f0': 0.0, 'g0': 0.0, 'format': 'csv'}
    flag_names = ('beta', 'c1', 'c2', 'eps', 'r_max', 'samples', 'f0', 'g0', 'format')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_profile_arguments(parser, many_betas=True)
        parser.add_argument('--format', choices=['csv', 'svg', 'json'])

    def run(self, config):
        if config['format'] == 'csv' and len(config['beta']) != 1:
            raise UsageError({'beta': 'CSV output holds a single profile; use --format svg or the sweep command'})
        solved = solve_profiles(config)
        if config['format'] == 'csv':
            profile, residual = solved[0]
            self.emit(config, profile_csv(profile, residual))
        elif config['format'] == 'svg':
            self.emit(config, profiles_svg([profile for profile, _ in solved]))
        else:
            self.emit(config, dump_json({'profiles': [profile_columns(p, r) for p, r in solved]}))
        return True
