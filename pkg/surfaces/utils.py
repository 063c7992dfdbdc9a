import csv
import io
import json
import logging
import os
from pathlib import Path

import numpy as np
from dotenv import dotenv_values

from .conf import default_seed, get_tolerance
from .exceptions import BetaLabError
from .geometry_core import flat_plane, lagrangian_plane, linear_graph, evaluate_geometry
from .rotational import (
    RotationalImmersion, angle_pde_check, beta_sweep, closed_form_check, corrupt_profile, critical_identity_check,
    el_closure, el_two_route_check, limit_bounds_check, make_grid, pde_convergence, plane_rigidity_check,
    solve_profile, verify_asymptotics,
)
from .serializers import RunConfigSerializer
from .symbol import ellipticity_check, symbol_matrix
from .variation import (
    Quadrature, RotatedNormalField, bilinear_symmetry_gap, field_c1_norm, random_bump_fields,
    second_variation_formula, variation_report,
)

logger = logging.getLogger(__name__)

CSV_HEADER = ['r', 'fp', 'gp', 'f', 'g', 'cos_alpha', 'residual']


class UsageError(Exception):
    """Invalid run configuration; carries the serializer errors."""

    code = 'UsageError'

    def __init__(self, errors):
        super().__init__(json.dumps(errors, sort_keys=True))
        self.errors = errors

    def as_dict(self):
        return {'error': self.code, 'message': 'invalid configuration', 'details': self.errors}


# Configuration

def parse_config_file(path):
    """Read ``key = value`` lines (dotenv syntax, ``#`` comments).

    ``beta`` takes a comma-separated list and ``tolerance.NAME`` keys
    collect into the ``tolerances`` mapping.
    """
    if not Path(path).is_file():
        raise UsageError({'config': f"no such config file: {path}"})
    raw = dotenv_values(path, interpolate=False, encoding='utf-8')
    values, tolerances = {}, {}
    for key, value in raw.items():
        if value is None:
            raise UsageError({'config': f"expected key = value, got {key!r}"})
        if key.startswith('tolerance.'):
            tolerances[key.split('.', 1)[1]] = value
        elif key == 'beta':
            values['beta'] = [item.strip() for item in value.split(',') if item.strip()]
        else:
            values[key.replace('-', '_')] = value
    if tolerances:
        values['tolerances'] = tolerances
    return values


def resolve_run_config(defaults, flags=None, config_path=None):
    """Merge defaults < config file < BETA_LAB_SEED < flags and validate the result."""
    data = dict(defaults)
    if config_path:
        data.update(parse_config_file(config_path))
    if os.getenv('BETA_LAB_SEED') is not None:
        data['seed'] = default_seed()
    for key, value in (flags or {}).items():
        if value is None:
            continue
        if key == 'tolerances':
            data['tolerances'] = {**data.get('tolerances', {}), **value}
        else:
            data[key] = value
    data.setdefault('seed', default_seed())

    serializer = RunConfigSerializer(data=data)
    if not serializer.is_valid():
        raise UsageError(serializer.errors)
    return dict(serializer.validated_data)


def parse_tolerance_flags(items):
    tolerances = {}
    for item in items or []:
        if '=' not in item:
            raise UsageError({'tolerance': f"expected NAME=VALUE, got {item!r}"})
        name, value = item.split('=', 1)
        tolerances[name.strip()] = value.strip()
    return tolerances or None


# Output

def format_float(value):
    return format(float(value), '.17g')


def jsonable(value):
    """Convert numpy containers and scalars for json.dumps; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if np.isfinite(value) else None
    return value


def dump_json(report):
    return json.dumps(jsonable(report), sort_keys=True, indent=2) + '\n'


def profile_csv(profile, residual):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    columns = (profile.r_grid, profile.fp, profile.gp, profile.f, profile.g, profile.cos_alpha, residual)
    for row in zip(*columns):
        writer.writerow([format_float(v) for v in row])
    return buffer.getvalue()


def read_profile_csv(text):
    """Columns of a profile CSV as float arrays keyed by header name."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    rows = np.array([[float(v) for v in row] for row in reader])
    return {name: rows[:, k] for k, name in enumerate(header)}


def write_text(path, content):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding='utf-8')
    logger.info(f"Wrote {path}")
    return path


def profile_columns(profile, residual):
    return {
        'beta': profile.beta, 'c1': profile.c1, 'c2': profile.c2,
        'r': profile.r_grid, 'fp': profile.fp, 'gp': profile.gp, 'f': profile.f, 'g': profile.g,
        'cos_alpha': profile.cos_alpha, 'residual': residual,
    }


# Runs

def solve_profiles(config):
    """One profile per requested beta, with its per-node Euler-Lagrange residual."""
    solved = []
    for beta in config['beta']:
        profile = solve_profile(beta, config['c1'], config['c2'], config['eps'], config['r_max'],
                                config['samples'], config['f0'], config['g0'])
        solved.append((profile, el_closure(profile)))
    return solved


def sweep_report(config):
    r_grid = make_grid(config['eps'], config['r_max'], config['samples'])
    sweep = beta_sweep(config['beta'], config['c1'], config['c2'], r_grid, config['f0'], config['g0'])
    solved = [(profile, el_closure(profile)) for profile in sweep.profiles]
    report = {
        'betas': sweep.betas,
        'c1': config['c1'], 'c2': config['c2'],
        'continuity': sweep.continuity,
        'max_continuity': sweep.max_continuity,
    }
    return solved, report


def _check(value, tolerance, passed=None):
    return {'value': value, 'tolerance': tolerance, 'passed': bool(value <= tolerance) if passed is None else bool(passed)}


def verify_report(config):
    """Every rotational check on one profile; ``passed`` is the conjunction."""
    beta, c1, c2 = config['beta'][0], config['c1'], config['c2']
    profile = solve_profile(beta, c1, c2, config['eps'], config['r_max'], config['samples'], config['f0'], config['g0'])
    if config.get('corrupt_slope') is not None:
        profile = corrupt_profile(profile, config['corrupt_slope'])

    checks = {'invariants': profile.invariant_report()}
    interior = el_closure(profile)[1:-1]
    checks['el_closure'] = _check(float(np.max(interior)), get_tolerance('EL_CLOSURE_TOL'))
    checks['el_two_routes'] = el_two_route_check(profile)
    identity = critical_identity_check(profile)
    identity['passed'] = identity['status'] != 'failed'
    checks['critical_identity'] = identity

    asymptotics = verify_asymptotics(profile, raise_on_failure=False)
    for name, part in asymptotics.items():
        part['passed'] = part['status'] != 'failed'
    checks['asymptotics'] = asymptotics

    magnitude = np.hypot(c1, c2)
    r_lo = 2.0 * magnitude if beta == 0 and magnitude > 0 else 1.0
    pde_profile = solve_profile(beta, c1, c2, r_lo, 10.0 * max(1.0, magnitude), 4097)
    _, _, identities = angle_pde_check(pde_profile)
    identities['r_range'] = [float(pde_profile.r_grid[0]), float(pde_profile.r_grid[-1])]
    checks['angle_identities'] = identities
    convergence = pde_convergence(beta, c1, c2, tuple(identities['r_range']), 4097)
    checks['pde_convergence'] = {'ratios': convergence['ratios'], 'threshold': convergence['threshold'],
                                 'passed': convergence['passed']}

    large = limit_bounds_check([10.0, 100.0], (0.5, 50.0), raise_on_failure=False)
    small = limit_bounds_check([0.1, 0.01, 0.001], (2.0, 5.0), raise_on_failure=False)
    checks['limit_bounds'] = {'large_beta': large, 'small_beta': small, 'passed': large['passed'] and small['passed']}

    closed = closed_form_check(profile)
    closed['passed'] = closed['status'] != 'failed'
    checks['closed_form'] = closed
    rigidity = plane_rigidity_check(profile)
    rigidity['passed'] = rigidity['status'] == 'passed'
    checks['plane_rigidity'] = rigidity

    passed = all(_passed(part) for part in checks.values())
    return {
        'config': {key: config[key] for key in ('beta', 'c1', 'c2', 'eps', 'r_max', 'samples', 'f0', 'g0', 'seed')},
        'checks': checks,
        'passed': passed,
    }


def _passed(part):
    if 'passed' in part:
        return bool(part['passed'])
    return all(_passed(sub) for sub in part.values() if isinstance(sub, dict))


def variation_lab_report(config):
    """Three-route first variation and the pair identity over seeded bump fields."""
    beta = config['beta'][0]
    imm = RotationalImmersion(beta, config['c1'], config['c2'], (config['eps'], config['r_max']),
                              slope_scale=config.get('slope_scale') or 1.0)
    quad = Quadrature(config.get('n_r'), config.get('n_theta'))
    fields = random_bump_fields(imm, config.get('field_count') or 20, config['seed'], quad)

    rows, critical = [], None
    for index, X in enumerate(fields):
        report = variation_report(imm, X, quad)
        row = report.as_dict()
        row['index'] = index
        row['c1_norm'] = field_c1_norm(imm, X, quad)
        if report.d2L_pair is not None:
            partner = second_variation_formula(imm, RotatedNormalField(X), quad, check_critical=False)
            total = report.d2L_formula + partner
            row['pair'] = {'formula_sum': total, 'dbar_form': report.d2L_pair,
                           'gap': abs(total - report.d2L_pair)}
        critical = report.critical_residual
        rows.append(row)

    is_critical = critical is not None and critical <= get_tolerance('CRITICAL_TOL')
    first_ok = all(row['first_variation_agrees'] for row in rows)
    second_ok = all(row['second_variation_agrees'] in (True, None) for row in rows)
    pair_tol = get_tolerance('PAIR_REL_TOL')
    pair_ok = all(row['pair']['gap'] <= pair_tol * max(1.0, abs(row['pair']['dbar_form'])) for row in rows if 'pair' in row)
    vanishing = [max(abs(v) for v in row['dL'].values() if v is not None) / row['c1_norm'] for row in rows]
    vanish_tol = get_tolerance('FIRST_VARIATION_ABS_TOL')
    symmetry_tol = get_tolerance('BILINEAR_SYMMETRY_TOL')
    symmetry_gap = max((bilinear_symmetry_gap(imm, X, Y, quad) for X, Y in zip(fields, fields[1:])), default=0.0)
    summary = {
        'critical': is_critical,
        'critical_residual': critical,
        'critical_tolerance': get_tolerance('CRITICAL_TOL'),
        'max_relative_first_variation': max(vanishing),
        'first_variation_tolerance': vanish_tol,
        'first_variation_routes_agree': first_ok,
        'second_variation_routes_agree': second_ok,
        'pair_identity_holds': pair_ok,
        'pair_tolerance': pair_tol,
        'bilinear_symmetry': _check(symmetry_gap, symmetry_tol),
    }
    if is_critical:
        summary['first_variation_vanishes'] = max(vanishing) <= vanish_tol
    else:
        summary['first_variation_nonzero'] = max(vanishing) > vanish_tol
    passed = (first_ok and second_ok and pair_ok and summary['bilinear_symmetry']['passed']
              and summary.get('first_variation_vanishes', summary.get('first_variation_nonzero')))
    return {
        'config': {'beta': beta, 'c1': config['c1'], 'c2': config['c2'], 'r_range': [config['eps'], config['r_max']],
                   'slope_scale': config.get('slope_scale') or 1.0, 'seed': config['seed'],
                   'quadrature': [quad.n_x1, quad.n_x2]},
        'fields': rows,
        'summary': summary,
        'passed': bool(passed),
    }


def symbol_points(beta, points):
    """Named sample geometries: the linear catalogue plus points of a rotational profile."""
    geometries = {
        'flat_plane': evaluate_geometry(flat_plane(beta=beta), (0.5, 0.5)),
        'linear_graph': evaluate_geometry(linear_graph(beta=beta), (0.5, 0.5)),
        'lagrangian_plane': evaluate_geometry(lagrangian_plane(beta=beta), (0.5, 0.5)),
    }
    imm = RotationalImmersion(beta, 1.0, 1.0, (1.0, 10.0), nodes=65)
    radii = np.linspace(1.0, 10.0, points)
    geometries['rotational'] = evaluate_geometry(imm, (radii, 0.3 * np.ones_like(radii)))
    return geometries


def symbol_report(config):
    beta = config['beta'][0]
    samples = config.get('directions') or 100
    report = {'beta': beta, 'seed': config['seed'], 'points': {}}
    for name, geo in symbol_points(beta, config.get('points') or 8).items():
        entry = ellipticity_check(geo, beta, samples, config['seed'])
        tangent = symbol_matrix(geo, geo.u1, beta)
        entry['tangent_det'] = float(np.max(np.abs(tangent.det_direct)))
        entry['tangent_degenerate'] = entry['tangent_det'] < get_tolerance('SYMBOL_DET_NEG_TOL')
        report['points'][name] = entry
    report['passed'] = all(p['passed'] and p['tangent_degenerate'] for p in report['points'].values())
    return report

