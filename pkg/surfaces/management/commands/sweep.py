from pathlib import Path

from django.conf import settings

from surfaces.plotting import profiles_svg
from surfaces.utils import dump_json, profile_csv, sweep_report, write_text

from ._base import LabCommand


class Command(LabCommand):
    help = 'Solve a beta family and write per-beta CSVs, an overlay SVG and the continuity report'

    defaults = {'beta': [0.5, 1.0, 2.0, 5.0], 'c1': 1.0, 'c2': 1.0, 'eps': 1.0, 'r_max': 10.0, 'samples': 1025,
                'f0': 0.0, 'g0': 0.0}
    flag_names = ('beta', 'c1', 'c2', 'eps', 'r_max', 'samples', 'f0', 'g0')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_profile_arguments(parser, many_betas=True)

    def run(self, config):
        directory = Path(config.get('output') or settings.BETA_LAB.get('OUTPUT_DIR', 'output'))
        solved, report = sweep_report(config)
        files = []
        for profile, residual in solved:
            files.append(write_text(directory / f"profile_beta_{profile.beta:g}.csv", profile_csv(profile, residual)))
        profiles = [profile for profile, _ in solved]
        files.append(write_text(directory / 'sweep.svg',
                                profiles_svg(profiles, catenoid=min(config['beta']) < 0.5, title='beta family')))
        report['files'] = [path.name for path in files]
        files.append(write_text(directory / 'sweep.json', dump_json(report)))
        self.stdout.write(dump_json(report), ending='')
        return True
