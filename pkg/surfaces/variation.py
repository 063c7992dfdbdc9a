"""
The functional L_beta = int cos^-beta(alpha) dmu and its first and second variations.

Variations run along straight lines F + tX in R^4. Every derivative is
available three ways: the closed formulas, the pre-Stokes form, and finite
differences of L_beta along the family.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .conf import default_seed, get_tolerance
from .exceptions import DegenerateImmersion, LagrangianPoint, NotCritical
from .geometry_core import (
    STANDARD_J, FullCatenoid, el_residual_from_geometry, geometry_from_jet, kahler_angle_gradient,
    kahler_twist, surface_gradient,
)

logger = logging.getLogger(__name__)


# Quadrature

@dataclass(frozen=True)
class Quadrature:
    """Composite Simpson in x1; composite midpoint in a periodic x2, Simpson otherwise."""

    n_x1: int = None
    n_x2: int = None

    def __post_init__(self):
        n1 = int(get_tolerance('QUAD_N_R') if self.n_x1 is None else self.n_x1)
        n2 = int(get_tolerance('QUAD_N_THETA') if self.n_x2 is None else self.n_x2)
        if n1 < 3 or n2 < 3:
            raise ValueError(f"quadrature needs at least 3 nodes per direction, got {n1}x{n2}")
        object.__setattr__(self, 'n_x1', n1)
        object.__setattr__(self, 'n_x2', n2)

    def grid(self, imm):
        return QuadratureGrid(imm, self)

    def refined(self):
        return Quadrature(2 * self.n_x1 - 1, 2 * self.n_x2 - 1)


class QuadratureGrid:
    def __init__(self, imm, quad):
        (a1, b1), (a2, b2) = imm.domain
        self.periodic = imm.periodic_x2
        self.x1_nodes = np.linspace(a1, b1, quad.n_x1)
        if self.periodic:
            self.x2_nodes = a2 + (np.arange(quad.n_x2) + 0.5) * (b2 - a2) / quad.n_x2
            self.x2_step = (b2 - a2) / quad.n_x2
        else:
            self.x2_nodes = np.linspace(a2, b2, quad.n_x2)
        self.x1, self.x2 = np.meshgrid(self.x1_nodes, self.x2_nodes, indexing='ij')
        self.geometry = geometry_from_jet(imm.jet(self.x1, self.x2), imm.beta)

    def integrate(self, values):
        """Integrate a function sampled on the grid against dx1 dx2."""
        values = np.asarray(values, dtype=float)
        if self.periodic:
            inner = np.sum(values, axis=1) * self.x2_step
        else:
            inner = simpson(values, x=self.x2_nodes, axis=1)
        return float(simpson(inner, x=self.x1_nodes))


# Variation fields

def bump(s):
    """w(s) = (1 - s^2)^3 on [-1, 1], zero outside, and w'(s)."""
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1.0
    q = np.where(inside, 1.0 - s**2, 0.0)
    return q**3, np.where(inside, -6.0 * s * q**2, 0.0)


def _cutoff(x, support):
    if support is None:
        return np.ones_like(x), np.zeros_like(x)
    lo, hi = support
    half = 0.5 * (hi - lo)
    w, dw = bump((x - 0.5 * (lo + hi)) / half)
    return w, dw / half


@dataclass(frozen=True)
class BumpWeight:
    """phi(x) = amplitude * w(x1) * m(x2).

    ``m`` is a bump when ``support_x2`` is given, otherwise the trigonometric
    modulation 1 + sum a_k cos(k x2) + b_k sin(k x2) over ``modes`` (k, a_k, b_k).
    """

    support_x1: tuple = None
    support_x2: tuple = None
    modes: tuple = ()
    amplitude: float = 1.0

    def __call__(self, x1, x2):
        w1, dw1 = _cutoff(x1, self.support_x1)
        if self.support_x2 is not None:
            w2, dw2 = _cutoff(x2, self.support_x2)
        else:
            w2, dw2 = np.ones_like(x2), np.zeros_like(x2)
            for k, a, b in self.modes:
                w2 = w2 + a * np.cos(k * x2) + b * np.sin(k * x2)
                dw2 = dw2 + k * (b * np.cos(k * x2) - a * np.sin(k * x2))
        phi = self.amplitude * w1 * w2
        return phi, self.amplitude * np.stack([dw1 * w2, w1 * dw2], axis=-1)


def _direction(direction, x1, x2):
    if callable(direction):
        return direction(x1, x2)
    V = np.broadcast_to(np.asarray(direction, dtype=float), np.shape(x1) + (4,))
    return V, np.zeros(np.shape(x1) + (2, 4))


def normal_projector_derivative(geo):
    """Coordinate partials of the normal projector, shape (..., 2, 4, 4)."""
    e, d2, g_inv = geo.jet.d1, geo.jet.d2, geo.g_inv
    d_g = np.einsum('...ika,...ja->...kij', d2, e)
    d_g = d_g + np.swapaxes(d_g, -1, -2)
    d_g_inv = -np.einsum('...ij,...kjl,...lm->...kim', g_inv, d_g, g_inv)
    mixed = np.einsum('...ika,...ij,...jb->...kab', d2, g_inv, e)
    d_tangent = mixed + np.swapaxes(mixed, -1, -2) + np.einsum('...ia,...kij,...jb->...kab', e, d_g_inv, e)
    return -d_tangent


class VariationField:
    """A vector field X along the surface, given in parameter coordinates.

    ``evaluate`` returns X (..., 4) and its coordinate partials (..., 2, 4).
    """

    normal_flag = False

    def evaluate(self, geo, x1, x2):
        raise NotImplementedError

    def scaled(self, factor):
        return ScaledField(self, factor)

    def __neg__(self):
        return ScaledField(self, -1.0)


class ZeroField(VariationField):
    normal_flag = True

    def evaluate(self, geo, x1, x2):
        shape = np.shape(x1)
        return np.zeros(shape + (4,)), np.zeros(shape + (2, 4))


class ScaledField(VariationField):
    def __init__(self, base, factor):
        self.base, self.factor = base, float(factor)
        self.normal_flag = base.normal_flag

    def evaluate(self, geo, x1, x2):
        X, dX = self.base.evaluate(geo, x1, x2)
        return self.factor * X, self.factor * dX


class AmbientField(VariationField):
    """X = phi V with V a fixed vector or a vector field of the parameters."""

    def __init__(self, weight, direction):
        self.weight, self.direction = weight, direction

    def evaluate(self, geo, x1, x2):
        phi, d_phi = self.weight(x1, x2)
        V, dV = _direction(self.direction, x1, x2)
        return phi[..., None] * V, d_phi[..., None] * V[..., None, :] + phi[..., None, None] * dV


class NormalField(VariationField):
    """X = phi N V, the normal projection of an ambient direction."""

    normal_flag = True

    def __init__(self, weight, direction):
        self.weight, self.direction = weight, direction

    def evaluate(self, geo, x1, x2):
        phi, d_phi = self.weight(x1, x2)
        V, dV = _direction(self.direction, x1, x2)
        N = geo.normal_projector
        NV = np.einsum('...ab,...b->...a', N, V)
        d_NV = (np.einsum('...kab,...b->...ka', normal_projector_derivative(geo), V)
                + np.einsum('...ab,...kb->...ka', N, dV))
        return phi[..., None] * NV, d_phi[..., None] * NV[..., None, :] + phi[..., None, None] * d_NV


class RotatedNormalField(VariationField):
    """Y = -(J X)^perp / cos(alpha), the normal field paired with X."""

    normal_flag = True

    def __init__(self, base, J=STANDARD_J):
        if not base.normal_flag:
            raise ValueError("only normal fields can be rotated")
        self.base, self.J = base, J

    def evaluate(self, geo, x1, x2):
        X, dX = self.base.evaluate(geo, x1, x2)
        c = geo.cos_alpha
        if np.any(c < get_tolerance('SYMPLECTIC_EPS')):
            raise LagrangianPoint("rotating a normal field divides by cos(alpha)", cos_alpha=float(np.min(c)))
        N = geo.normal_projector
        JX, dJX = self.J.apply(X), self.J.apply(dX)
        NJX = np.einsum('...ab,...b->...a', N, JX)
        d_NJX = (np.einsum('...kab,...b->...ka', normal_projector_derivative(geo), JX)
                 + np.einsum('...ab,...kb->...ka', N, dJX))
        d_c = kahler_angle_gradient(geo, self.J)
        Y = -NJX / c[..., None]
        dY = -d_NJX / c[..., None, None] + NJX[..., None, :] * (d_c / c[..., None] ** 2)[..., None]
        return Y, dY


def snap_support(support, nodes):
    """Move a support interval onto Simpson panel ends strictly inside ``nodes``.

    The bump is only C^2 at the ends of its support; with the ends on panel
    boundaries the composite rule stays fourth order.
    """
    ends = np.asarray(nodes, dtype=float)[::2]
    if ends.size < 4:
        return tuple(float(v) for v in support)
    panel = ends[1] - ends[0]
    i = int(np.clip(np.rint((support[0] - ends[0]) / panel), 1, ends.size - 3))
    j = int(np.clip(np.rint((support[1] - ends[0]) / panel), i + 1, ends.size - 2))
    if j - i < 2 and j + 1 <= ends.size - 2:
        j += 1
    return float(ends[i]), float(ends[j])


def random_bump_fields(imm, count, seed=None, quad=None):
    """Normal bump fields with seeded random supports, directions and modulations.

    Supports are snapped to the Simpson panels of ``quad``.
    """
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    quad = quad or Quadrature()
    (a1, b1), (a2, b2) = imm.domain
    nodes_x1 = np.linspace(a1, b1, quad.n_x1)
    fields = []
    for _ in range(count):
        half = rng.uniform(0.15, 0.4) * (b1 - a1)
        center = rng.uniform(a1 + half, b1 - half)
        support_x1 = snap_support((center - half, center + half), nodes_x1)
        if imm.periodic_x2:
            modes = tuple((int(rng.integers(1, 4)), *rng.uniform(-0.4, 0.4, size=2)) for _ in range(2))
            weight = BumpWeight(support_x1=support_x1, modes=modes)
        else:
            half2 = rng.uniform(0.15, 0.4) * (b2 - a2)
            center2 = rng.uniform(a2 + half2, b2 - half2)
            support_x2 = snap_support((center2 - half2, center2 + half2), np.linspace(a2, b2, quad.n_x2))
            weight = BumpWeight(support_x1=support_x1, support_x2=support_x2)
        direction = rng.normal(size=4)
        fields.append(NormalField(weight, direction / np.linalg.norm(direction)))
    return fields


def field_c1_norm(imm, X, quad=None):
    grid = (quad or Quadrature()).grid(imm)
    value, partials = X.evaluate(grid.geometry, grid.x1, grid.x2)
    return float(np.max(np.linalg.norm(value, axis=-1)) + np.max(np.linalg.norm(partials, axis=-1)))


# The functional

def density(d1, beta, J=STANDARD_J):
    """cos^-beta(alpha) sqrt(det g) from first partials (..., 2, 4)."""
    g = np.einsum('...ia,...ja->...ij', d1, d1)
    det_g = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] ** 2
    det_min = get_tolerance('DET_G_MIN')
    if np.any(~(det_g >= det_min)):
        raise DegenerateImmersion(f"det g = {float(np.nanmin(det_g)):.3e} below {det_min:g}")
    area = np.sqrt(det_g)
    if beta == 0:
        return area
    cos_alpha = J.omega(d1[..., 0, :], d1[..., 1, :]) / area
    eps = get_tolerance('SYMPLECTIC_EPS')
    if np.any(cos_alpha <= eps):
        worst = float(np.min(cos_alpha))
        raise LagrangianPoint(f"cos(alpha) = {worst:.3e} on the quadrature grid", cos_alpha=worst)
    return area * cos_alpha ** (-beta)


def functional(imm, quad=None):
    """L_beta on the quadrature grid."""
    grid = (quad or Quadrature()).grid(imm)
    return grid.integrate(density(grid.geometry.jet.d1, imm.beta))


def quadrature_convergence(imm, quad=None, levels=3):
    """Values of L_beta on successively refined grids and the ratios of their increments."""
    quad = quad or Quadrature()
    values = []
    for _ in range(levels):
        values.append(functional(imm, quad))
        quad = quad.refined()
    increments = np.abs(np.diff(values))
    ratios = [float(a / b) if b > 0 else float('inf') for a, b in zip(increments, increments[1:])]
    return {'values': values, 'ratios': ratios}


def _along(grid, beta, *steps):
    """L_beta(F + sum t_k X_k) for (t_k, dX_k) pairs."""
    d1 = grid.geometry.jet.d1
    for t, dX in steps:
        d1 = d1 + t * dX
    return grid.integrate(density(d1, beta))


def first_variation_fd(imm, X, h=None, quad=None, richardson=False):
    h = get_tolerance('FD_STEP_FIRST') if h is None else h
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    grid = (quad or Quadrature()).grid(imm)
    _, dX = X.evaluate(grid.geometry, grid.x1, grid.x2)

    def central(step):
        return (_along(grid, imm.beta, (step, dX)) - _along(grid, imm.beta, (-step, dX))) / (2.0 * step)

    if richardson:
        return (4.0 * central(0.5 * h) - central(h)) / 3.0
    return central(h)


def second_variation_fd(imm, X, h=None, quad=None):
    h = get_tolerance('FD_STEP_SECOND') if h is None else h
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    grid = (quad or Quadrature()).grid(imm)
    _, dX = X.evaluate(grid.geometry, grid.x1, grid.x2)
    centre = grid.integrate(density(grid.geometry.jet.d1, imm.beta))
    return (_along(grid, imm.beta, (h, dX)) - 2.0 * centre + _along(grid, imm.beta, (-h, dX))) / h**2


def second_variation_bilinear_fd(imm, X, Y, h=None, quad=None):
    h = get_tolerance('FD_STEP_SECOND') if h is None else h
    grid = (quad or Quadrature()).grid(imm)
    _, dX = X.evaluate(grid.geometry, grid.x1, grid.x2)
    _, dY = Y.evaluate(grid.geometry, grid.x1, grid.x2)
    corners = [sx * sy * _along(grid, imm.beta, (sx * h, dX), (sy * h, dY)) for sx in (1, -1) for sy in (1, -1)]
    return sum(corners) / (4.0 * h**2)


# Pointwise ingredients of the formulas

def _guarded_cos(geo):
    if geo.beta != 0 and np.any(geo.cos_alpha <= get_tolerance('SYMPLECTIC_EPS')):
        worst = float(np.min(geo.cos_alpha))
        raise LagrangianPoint(f"cos(alpha) = {worst:.3e} on the quadrature grid", cos_alpha=worst)
    return geo.cos_alpha


def _frame_derivative(geo, dX):
    """Ambient derivatives of X along u1, u2."""
    return np.einsum('...ai,...ib->...ab', geo.basis, dX)


def _divergence(geo, dX):
    return np.einsum('...ij,...ia,...ja->...', geo.g_inv, dX, geo.jet.d1)


def _twist_density(geo, dX, J=STANDARD_J):
    """W = [omega(X_1, F_2) + omega(F_1, X_2)] / sqrt(det g)."""
    e = geo.jet.d1
    return (J.omega(dX[..., 0, :], e[..., 1, :]) + J.omega(e[..., 0, :], dX[..., 1, :])) / geo.area_element


def _inverse_power(c, beta):
    return np.ones_like(c) if beta == 0 else c ** -beta


def criticality_residual(geo):
    """max |cos^3 H - beta Q|; the mean curvature alone when beta = 0."""
    if geo.beta == 0:
        return float(np.max(np.linalg.norm(geo.H, axis=-1)))
    return float(np.max(el_residual_from_geometry(geo, gradient='analytic').betaequ_norm))


def _require_critical(geo):
    residual = criticality_residual(geo)
    tol = get_tolerance('CRITICAL_TOL')
    if residual > tol:
        logger.warning(f"Second-variation formula refused: residual {residual:.3e} > {tol:g}")
        raise NotCritical(f"Euler-Lagrange residual {residual:.3e} exceeds {tol:g}", residual=residual, tolerance=tol)
    return residual


def _require_normal(X):
    if not X.normal_flag:
        raise ValueError("the variation formulas need a normal field")


# Closed formulas

def first_variation_formula(imm, X, quad=None, J=STANDARD_J):
    """-(beta+1) int X.H / cos^beta + beta(beta+1) int X.(J(J grad cos)^T)^perp / cos^(beta+3)."""
    _require_normal(X)
    grid = (quad or Quadrature()).grid(imm)
    geo, beta = grid.geometry, imm.beta
    c = _guarded_cos(geo)
    value, _ = X.evaluate(geo, grid.x1, grid.x2)
    integrand = -(beta + 1.0) * np.sum(value * geo.H, axis=-1) * _inverse_power(c, beta)
    if beta != 0:
        grad_cos = surface_gradient(geo, kahler_angle_gradient(geo, J))
        integrand = integrand + beta * (beta + 1.0) * np.sum(value * kahler_twist(geo, grad_cos, J), axis=-1) / c ** (beta + 3.0)
    return grid.integrate(integrand * geo.area_element)


def first_variation_prestokes(imm, X, quad=None, J=STANDARD_J):
    """(beta+1) int div X / cos^beta - beta int W / cos^(beta+1)."""
    grid = (quad or Quadrature()).grid(imm)
    geo, beta = grid.geometry, imm.beta
    c = _guarded_cos(geo)
    _, dX = X.evaluate(geo, grid.x1, grid.x2)
    integrand = (beta + 1.0) * _divergence(geo, dX) * _inverse_power(c, beta)
    if beta != 0:
        integrand = integrand - beta * _twist_density(geo, dX, J) / c ** (beta + 1.0)
    return grid.integrate(integrand * geo.area_element)


def second_variation_density(geo, X, dX, J=STANDARD_J):
    """Pointwise terms of the second variation of a normal field in flat C^2."""
    beta = geo.beta
    c = _guarded_cos(geo)
    weight = _inverse_power(c, beta)
    along = _frame_derivative(geo, dX)
    normal_along = np.einsum('...ab,...kb->...ka', geo.normal_projector, along)
    coord_second = np.einsum('...a,...ija->...ij', X, geo.jet.d2)
    second = np.einsum('...ai,...bj,...ij->...ab', geo.basis, geo.basis, coord_second)
    XH = np.sum(X * geo.H, axis=-1)

    terms = {
        'normal_gradient': (beta + 1.0) * np.sum(normal_along**2, axis=(-2, -1)) * weight,
        'second_fundamental_form': -(beta + 1.0) * np.sum(second**2, axis=(-2, -1)) * weight,
        'mean_curvature': (beta + 1.0) ** 2 * XH**2 * weight,
    }
    if beta != 0:
        W = _twist_density(geo, dX, J)
        d_c = kahler_angle_gradient(geo, J)
        twist = J.omega(X, dX[..., 1, :]) * d_c[..., 0] - J.omega(X, dX[..., 0, :]) * d_c[..., 1]
        terms['mixed'] = 2.0 * beta * (beta + 1.0) * XH * W / c ** (beta + 1.0)
        terms['angle_gradient'] = -beta * (beta + 1.0) * twist / (geo.area_element * c ** (beta + 2.0))
        terms['kahler_twist'] = beta * (beta + 1.0) * W**2 / c ** (beta + 2.0)
    return terms


def second_variation_formula(imm, X, quad=None, check_critical=True, J=STANDARD_J):
    _require_normal(X)
    grid = (quad or Quadrature()).grid(imm)
    if check_critical:
        _require_critical(grid.geometry)
    value, dX = X.evaluate(grid.geometry, grid.x1, grid.x2)
    terms = second_variation_density(grid.geometry, value, dX, J)
    return grid.integrate(sum(terms.values()) * grid.geometry.area_element)


def bilinear_density(geo, dX, dY, J=STANDARD_J):
    """Mixed second derivative of cos^-beta sqrt(det g) along F + tX + sY."""
    beta = geo.beta
    c = _guarded_cos(geo)
    weight = _inverse_power(c, beta)
    along_x, along_y = _frame_derivative(geo, dX), _frame_derivative(geo, dY)
    N = geo.normal_projector
    perp_x = np.einsum('...ab,...kb->...ka', N, along_x)
    perp_y = np.einsum('...ab,...kb->...ka', N, along_y)
    frame = geo.tangent_frame
    a = np.einsum('...ia,...ja->...ij', along_x, frame)
    b = np.einsum('...ia,...ja->...ij', along_y, frame)
    div_x, div_y = np.trace(a, axis1=-2, axis2=-1), np.trace(b, axis1=-2, axis2=-1)

    value = (beta + 1.0) * np.sum(perp_x * perp_y, axis=(-2, -1)) * weight
    value = value + (beta + 1.0) ** 2 * div_x * div_y * weight
    value = value - 0.5 * (beta + 1.0) * (np.einsum('...ji,...ij->...', a, b) + np.einsum('...ji,...ij->...', b, a)) * weight
    if beta != 0:
        w_x, w_y = _twist_density(geo, dX, J), _twist_density(geo, dY, J)
        cross = J.omega(along_x[..., 0, :], along_y[..., 1, :]) + J.omega(along_y[..., 0, :], along_x[..., 1, :])
        value = value - beta * (beta + 1.0) * (div_x * w_y + div_y * w_x) / c ** (beta + 1.0)
        value = value - beta * cross / c ** (beta + 1.0)
        value = value + beta * (beta + 1.0) * w_x * w_y / c ** (beta + 2.0)
    return value


def second_variation_bilinear(imm, X, Y, quad=None, J=STANDARD_J):
    """B(X, Y) for arbitrary fields; B(X, X) is the exact second derivative of L_beta."""
    grid = (quad or Quadrature()).grid(imm)
    _, dX = X.evaluate(grid.geometry, grid.x1, grid.x2)
    _, dY = Y.evaluate(grid.geometry, grid.x1, grid.x2)
    return grid.integrate(bilinear_density(grid.geometry, dX, dY, J) * grid.geometry.area_element)


def bilinear_symmetry_gap(imm, X, Y, quad=None):
    return abs(second_variation_bilinear(imm, X, Y, quad) - second_variation_bilinear(imm, Y, X, quad))


def second_variation_pair(imm, X, quad=None, check_critical=True, J=STANDARD_J):
    """II(X) + II(Y) for Y the rotated partner of X, through the d-bar form.

    With x_ai = <D_{u_i} X, e_a> in an oriented normal frame,
    |dbar X|^2 = (x32 + x41)^2 + (x42 - x31)^2.
    """
    _require_normal(X)
    grid = (quad or Quadrature()).grid(imm)
    geo, beta = grid.geometry, imm.beta
    if check_critical:
        _require_critical(geo)
    c = _guarded_cos(geo)
    value, dX = X.evaluate(geo, grid.x1, grid.x2)
    along = _frame_derivative(geo, dX)
    x = np.einsum('...ia,...na->...ni', along, geo.normal_frame)
    dbar2 = (x[..., 0, 1] + x[..., 1, 0]) ** 2 + (x[..., 1, 1] - x[..., 0, 0]) ** 2

    s2 = np.clip(1.0 - c**2, 0.0, None)
    d_c = kahler_angle_gradient(geo, J)
    grad_c2 = np.einsum('...i,...ij,...j->...', d_c, geo.g_inv, d_c)
    floor = get_tolerance('COMPLEX_EPS')
    with np.errstate(divide='ignore', invalid='ignore'):
        grad_alpha2 = np.where(s2 > floor**2, grad_c2 / s2, 0.0)
        ratio = np.zeros_like(c) if beta == 0 else beta * s2 / c**2
    weight = _inverse_power(c, beta)
    integrand = (beta + 1.0) * weight * (2.0 + ratio) * (dbar2 - (1.0 + ratio) * np.sum(value**2, axis=-1) * grad_alpha2)
    return grid.integrate(integrand * geo.area_element)


# Reports

@dataclass
class VariationReport:
    L_value: float
    dL_formula: float = None
    dL_prestokes: float = None
    dL_fd: float = None
    d2L_formula: float = None
    d2L_pair: float = None
    d2L_fd: float = None
    critical_residual: float = None
    notes: list = field(default_factory=list)

    @property
    def discrepancies(self):
        pairs = {
            'dL_formula_prestokes': (self.dL_formula, self.dL_prestokes),
            'dL_formula_fd': (self.dL_formula, self.dL_fd),
            'dL_prestokes_fd': (self.dL_prestokes, self.dL_fd),
            'd2L_formula_fd': (self.d2L_formula, self.d2L_fd),
        }
        return {name: abs(a - b) for name, (a, b) in pairs.items() if a is not None and b is not None}

    def first_variation_agrees(self):
        tol = max(get_tolerance('FIRST_VARIATION_ABS_TOL'), get_tolerance('FIRST_VARIATION_REL_TOL') * abs(self.dL_fd or 0.0))
        gaps = [v for k, v in self.discrepancies.items() if k.startswith('dL_')]
        return all(gap <= tol for gap in gaps)

    def second_variation_agrees(self):
        if self.d2L_formula is None or self.d2L_fd is None:
            return None
        scale = max(abs(self.d2L_fd), 1.0)
        return abs(self.d2L_formula - self.d2L_fd) <= get_tolerance('SECOND_VARIATION_REL_TOL') * scale

    def as_dict(self):
        return {
            'L_value': self.L_value,
            'dL': {'formula': self.dL_formula, 'prestokes': self.dL_prestokes, 'fd': self.dL_fd},
            'd2L': {'formula': self.d2L_formula, 'pair': self.d2L_pair, 'fd': self.d2L_fd},
            'discrepancies': self.discrepancies,
            'critical_residual': self.critical_residual,
            'first_variation_agrees': self.first_variation_agrees(),
            'second_variation_agrees': self.second_variation_agrees(),
            'notes': list(self.notes),
        }


def variation_report(imm, X, quad=None, h_first=None, h_second=None):
    """All routes for one field; the second-variation formulas only on critical surfaces."""
    quad = quad or Quadrature()
    grid = quad.grid(imm)
    report = VariationReport(L_value=functional(imm, quad))
    report.dL_prestokes = first_variation_prestokes(imm, X, quad)
    report.dL_fd = first_variation_fd(imm, X, h_first, quad)
    report.d2L_fd = second_variation_fd(imm, X, h_second, quad)
    if not X.normal_flag:
        report.notes.append('tangential field: closed formulas skipped')
        return report
    report.dL_formula = first_variation_formula(imm, X, quad)
    report.critical_residual = criticality_residual(grid.geometry)
    if report.critical_residual > get_tolerance('CRITICAL_TOL'):
        report.notes.append('not critical: second variation by finite differences only')
        return report
    report.d2L_formula = second_variation_formula(imm, X, quad, check_critical=False)
    if np.all(grid.geometry.cos_alpha > get_tolerance('SYMPLECTIC_EPS')):
        report.d2L_pair = second_variation_pair(imm, X, quad, check_critical=False)
    return report


def catenoid_instability_check(quad=None, half_width=3.0):
    """Second variation of a rotation-invariant normal bump across the catenoid neck (beta = 0)."""
    catenoid = FullCatenoid(s_range=(-half_width - 0.5, half_width + 0.5))
    X = NormalField(BumpWeight(support_x1=(-half_width, half_width)), catenoid.unit_normal)
    quad = quad or Quadrature()
    formula = second_variation_formula(catenoid, X, quad)
    fd = second_variation_fd(catenoid, X, quad=quad)
    logger.info(f"Catenoid instability: II formula {formula:.6g}, finite differences {fd:.6g}")
    return {'formula': formula, 'fd': fd, 'unstable': bool(formula < 0 and fd < 0)}
