"""Tolerances and defaults for the numerical lab.

Every constant here can be overridden through ``settings.BETA_LAB``.
"""
import os
from contextlib import contextmanager
from contextvars import ContextVar

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

DEFAULTS = {
    # geometry_core
    'DET_G_MIN': 1e-14,
    'SYMPLECTIC_EPS': 1e-12,
    'COMPLEX_EPS': 1e-10,
    'SEED_PROJECTION_MIN': 1e-6,
    'FD_REL_STEP': 1e-5,
    'FD_MIN_STEP': 1e-5,
    'SYMMETRY_TOL': 1e-10,
    'EL_TWO_ROUTE_TOL': 1e-9,
    'EL_CLOSURE_TOL': 1e-8,
    'CRITICAL_IDENTITY_TOL': 1e-7,
    # symbol
    'SYMBOL_DET_NEG_TOL': 1e-12,
    'SYMBOL_DET_BUG_TOL': 1e-9,
    'SYMBOL_DEGENERATE_TOL': 1e-6,
    'SYMBOL_REL_TOL': 1e-12,
    # variation
    'QUAD_N_THETA': 64,
    'QUAD_N_R': 257,
    'CRITICAL_TOL': 1e-7,
    'FIRST_VARIATION_ABS_TOL': 1e-6,
    'FIRST_VARIATION_REL_TOL': 1e-4,
    'SECOND_VARIATION_REL_TOL': 1e-3,
    'PAIR_REL_TOL': 1e-6,
    'BILINEAR_SYMMETRY_TOL': 1e-8,
    'FD_STEP_FIRST': 1e-4,
    'FD_STEP_SECOND': 1e-3,
    # rotational
    'BISECTION_TOL': 1e-13,
    'NEWTON_STEPS': 3,
    'FIRST_INTEGRAL_TOL': 1e-10,
    'COS_ALPHA_TOL': 1e-12,
    'FAR_TOL': 0.01,
    'NEAR_REL_TOL': 1e-3,
    'PDE_TOL': 1e-5,
    'PDE_CONVERGENCE_RATIO': 3.5,
    'CLOSED_FORM_LOG_TOL': 1e-10,
    'CLOSED_FORM_CATENOID_TOL': 1e-8,
    'ROUNDOFF_ULPS': 64,
    'GEOMETRIC_DECADES': 2.0,
    # cli
    'SEED': 42,
    'OUTPUT_DIR': 'output',
}


def get_tolerance(name):
    """Return the configured value for ``name``, falling back to DEFAULTS."""
    active = _overrides.get()
    if name in active:
        return active[name]
    try:
        overrides = getattr(settings, 'BETA_LAB', {})
    except ImproperlyConfigured:
        overrides = {}
    if name in overrides:
        return overrides[name]
    return DEFAULTS[name]


def default_seed():
    env_seed = os.getenv('BETA_LAB_SEED')
    if env_seed is not None:
        return int(env_seed)
    return int(get_tolerance('SEED'))


_overrides = ContextVar('beta_lab_overrides', default={})


@contextmanager
def override_tolerances(values=None):
    """Temporarily replace tolerances for the current run."""
    values = dict(values or {})
    unknown = sorted(set(values) - set(DEFAULTS))
    if unknown:
        raise KeyError(f"unknown tolerance(s): {', '.join(unknown)}")
    token = _overrides.set({**_overrides.get(), **values})
    try:
        yield
    finally:
        _overrides.reset(token)
