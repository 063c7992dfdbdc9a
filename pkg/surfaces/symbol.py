"""
Principal symbol of the linearized Euler-Lagrange operator.

At a point with orthonormal tangent frame (u1, u2) and a direction G, the
symbol acts on xi = (xi1, xi2) through the quadratic form

    cos^2 |xi|^2 |G_perp|^2 + beta <G_perp, J(xi1 u2 - xi2 u1)>^2,

whose coefficient matrix O has det O = cos^2 |G_perp|^2 (cos^2 |G_perp|^2 + beta (jg1^2 + jg2^2)).
"""
import logging
from dataclasses import dataclass

import numpy as np

from .conf import default_seed, get_tolerance
from .exceptions import EllipticityViolation, InvalidBeta
from .geometry_core import STANDARD_J

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SymbolData:
    O: np.ndarray
    det_direct: np.ndarray
    det_factored: np.ndarray
    g_perp_norm2: np.ndarray
    jg1: np.ndarray
    jg2: np.ndarray

    def factorization_gap(self):
        """Relative gap between the brute-force and factored determinants."""
        scale = np.maximum(np.abs(self.det_direct), np.finfo(float).tiny)
        return np.abs(self.det_direct - self.det_factored) / scale


def _normal_part(geo, G):
    return np.einsum('...ab,...b->...a', geo.normal_projector, np.asarray(G, dtype=float))


def _beta(geo, beta):
    beta = geo.beta if beta is None else float(beta)
    if beta < 0:
        raise InvalidBeta(f"beta must be >= 0, got {beta}", beta=beta)
    return beta


def symbol_quadratic(geo, G, xi, beta=None, J=STANDARD_J):
    beta = _beta(geo, beta)
    G_perp = _normal_part(geo, G)
    xi = np.asarray(xi, dtype=float)
    xi1, xi2 = xi[..., 0], xi[..., 1]
    twisted = J.apply(xi1[..., None] * geo.u2 - xi2[..., None] * geo.u1)
    c2 = geo.cos_alpha**2
    return c2 * (xi1**2 + xi2**2) * np.sum(G_perp**2, axis=-1) + beta * np.sum(G_perp * twisted, axis=-1) ** 2


def symbol_matrix(geo, G, beta=None, J=STANDARD_J):
    beta = _beta(geo, beta)
    G_perp = _normal_part(geo, G)
    norm2 = np.sum(G_perp**2, axis=-1)
    jg1 = np.sum(G_perp * J.apply(geo.u1), axis=-1)
    jg2 = np.sum(G_perp * J.apply(geo.u2), axis=-1)
    diagonal = geo.cos_alpha**2 * norm2

    O = np.empty(np.broadcast(diagonal, jg1).shape + (2, 2))
    O[..., 0, 0] = diagonal + beta * jg2**2
    O[..., 1, 1] = diagonal + beta * jg1**2
    O[..., 0, 1] = O[..., 1, 0] = -beta * jg1 * jg2
    det_direct = O[..., 0, 0] * O[..., 1, 1] - O[..., 0, 1] * O[..., 1, 0]
    det_factored = diagonal * (diagonal + beta * (jg1**2 + jg2**2))
    return SymbolData(O=O, det_direct=det_direct, det_factored=det_factored,
                      g_perp_norm2=norm2, jg1=jg1, jg2=jg2)


def sample_directions(samples, seed=None):
    """``samples`` unit vectors in R^4 from a seeded generator."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    G = rng.normal(size=(samples, 4))
    return G / np.linalg.norm(G, axis=-1, keepdims=True)


def ellipticity_check(geo, beta, samples=100, seed=None):
    """Sample det O over unit directions and certify it is never negative.

    Directions with cos(alpha) |G_perp| >= SYMBOL_DEGENERATE_TOL must give
    det O >= (cos |G_perp|)^4, i.e. strictly positive.
    """
    beta = _beta(geo, beta)
    G = sample_directions(samples, seed)
    shape = np.shape(geo.cos_alpha)
    directions = G.reshape((samples,) + (1,) * len(shape) + (4,))
    data = symbol_matrix(geo, directions, beta)
    det = data.det_direct

    strength = np.abs(geo.cos_alpha) * np.sqrt(data.g_perp_norm2)
    nondegenerate = strength >= get_tolerance('SYMBOL_DEGENERATE_TOL')
    rel = get_tolerance('SYMBOL_REL_TOL')
    strict = np.all(det[nondegenerate] >= strength[nondegenerate] ** 4 * (1.0 - 1e3 * rel))
    report = {
        'beta': beta,
        'samples': int(samples),
        'min_det': float(np.min(det)),
        'max_factorization_gap': float(np.max(data.factorization_gap())),
        'nondegenerate_samples': int(np.count_nonzero(nondegenerate)),
        'strict': bool(strict),
        'seed': default_seed() if seed is None else seed,
    }

    bug_floor = -get_tolerance('SYMBOL_DET_BUG_TOL')
    if report['min_det'] < bug_floor or not strict:
        logger.error(f"Ellipticity violated: {report}")
        raise EllipticityViolation(f"det O = {report['min_det']:.3e} on a sampled direction", **report)
    report['passed'] = report['min_det'] >= -get_tolerance('SYMBOL_DET_NEG_TOL')
    return report
