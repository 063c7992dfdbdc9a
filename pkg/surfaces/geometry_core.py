"""
Pointwise differential geometry of immersed surfaces in C^2 = R^4.

Every routine is vectorised: a parameter point ``p = (x1, x2)`` may hold
scalars or arrays of any (broadcastable) shape, and every returned field
carries that shape in front of its own trailing axes.
"""
import copy
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .conf import get_tolerance
from .exceptions import ComplexPoint, DegenerateImmersion, GridTooCoarse, LagrangianPoint

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComplexStructure:
    """A linear complex structure on R^4, stored as its 4x4 matrix."""

    matrix: np.ndarray = field(default_factory=lambda: np.array([
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ]))

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        identity = np.eye(4)
        if m.shape != (4, 4):
            raise ValueError(f"complex structure must be 4x4, got {m.shape}")
        if not np.allclose(m @ m, -identity, atol=1e-12):
            raise ValueError("J^2 must equal -Identity")
        if not np.allclose(m.T @ m, identity, atol=1e-12):
            raise ValueError("J must be an isometry")
        if not np.allclose(m.T, -m, atol=1e-12):
            raise ValueError("J must be skew-symmetric")
        object.__setattr__(self, 'matrix', m)

    def apply(self, v):
        return np.einsum('ab,...b->...a', self.matrix, v)

    def omega(self, a, b):
        """Kahler form omega(a, b) = <Ja, b>."""
        return np.sum(self.apply(a) * b, axis=-1)


STANDARD_J = ComplexStructure()


@dataclass(frozen=True)
class Jet:
    """Position with first and second parameter partials.

    Shapes: position (..., 4), d1 (..., 2, 4), d2 (..., 2, 2, 4).
    """

    position: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    @property
    def shape(self):
        return self.position.shape[:-1]


def _jet(position, d1, d2):
    return Jet(np.stack(position, axis=-1),
               np.stack([np.stack(row, axis=-1) for row in d1], axis=-2),
               np.stack([np.stack([np.stack(c, axis=-1) for c in row], axis=-2) for row in d2], axis=-3))


class Immersion:
    """A parametric surface in R^4 over a rectangle of parameter space."""

    periodic_x2 = False

    def __init__(self, domain, beta=0.0):
        (a1, b1), (a2, b2) = domain
        if not (a1 < b1 and a2 < b2):
            raise ValueError(f"empty parameter domain {domain}")
        self.domain = ((float(a1), float(b1)), (float(a2), float(b2)))
        self.beta = float(beta)

    def jet(self, x1, x2):
        raise NotImplementedError

    def __call__(self, x1, x2):
        return self.jet(x1, x2)

    def with_beta(self, beta):
        other = copy.copy(self)
        other.beta = float(beta)
        return other


class LinearImmersion(Immersion):
    """F(x) = offset + x1 * columns[0] + x2 * columns[1]."""

    def __init__(self, columns, offset=(0.0, 0.0, 0.0, 0.0), domain=((0.0, 1.0), (0.0, 1.0)), beta=0.0):
        super().__init__(domain, beta)
        self.columns = np.asarray(columns, dtype=float).reshape(2, 4)
        self.offset = np.asarray(offset, dtype=float)

    def jet(self, x1, x2):
        x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
        shape = x1.shape
        position = self.offset + x1[..., None] * self.columns[0] + x2[..., None] * self.columns[1]
        d1 = np.broadcast_to(self.columns, shape + (2, 4)).copy()
        d2 = np.zeros(shape + (2, 2, 4))
        return Jet(position, d1, d2)


def flat_plane(domain=((0.0, 1.0), (0.0, 1.0)), beta=0.0):
    return LinearImmersion([[1, 0, 0, 0], [0, 1, 0, 0]], domain=domain, beta=beta)


def linear_graph(domain=((0.0, 1.0), (0.0, 1.0)), beta=0.0):
    """The graph F = (x1, x2, x1, 0); cos(alpha) = 1/sqrt(2) everywhere."""
    return LinearImmersion([[1, 0, 1, 0], [0, 1, 0, 0]], domain=domain, beta=beta)


def lagrangian_plane(domain=((0.0, 1.0), (0.0, 1.0)), beta=0.0):
    return LinearImmersion([[1, 0, 0, 0], [0, 0, 1, 0]], domain=domain, beta=beta)


def complex_line(angle=0.0, domain=((0.0, 1.0), (0.0, 1.0)), beta=0.0):
    """A complex line spanned by (a, Ja) with a rotated off the x1 axis."""
    a = np.array([np.cos(angle), 0.0, np.sin(angle), 0.0])
    return LinearImmersion([a, STANDARD_J.apply(a)], domain=domain, beta=beta)


class SurfaceOfRevolution(Immersion):
    """F(r, theta) = (r cos theta, r sin theta, f(r), g(r)).

    ``profile(r)`` returns ``(f, g, fp, gp, fpp, gpp)`` evaluated at ``r``.
    """

    periodic_x2 = True

    def __init__(self, profile, r_range, beta=0.0):
        super().__init__((r_range, (0.0, 2.0 * np.pi)), beta)
        if r_range[0] <= 0:
            raise ValueError("surfaces of revolution need r > 0")
        self.profile = profile

    @classmethod
    def from_slopes(cls, fp, gp, r_range=(0.5, 2.0), beta=0.0):
        """Cone with constant slopes (f', g')."""
        def profile(r):
            zero = np.zeros_like(r)
            return fp * r, gp * r, fp + zero, gp + zero, zero, zero
        return cls(profile, r_range, beta)

    def jet(self, r, theta):
        r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
        f, g, fp, gp, fpp, gpp = (np.broadcast_to(v, r.shape) for v in self.profile(r))
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        zero = np.zeros_like(r)
        return _jet(
            (r * cos_t, r * sin_t, f, g),
            ((cos_t, sin_t, fp, gp), (-r * sin_t, r * cos_t, zero, zero)),
            (((zero, zero, fpp, gpp), (-sin_t, cos_t, zero, zero)),
             ((-sin_t, cos_t, zero, zero), (-r * cos_t, -r * sin_t, zero, zero))),
        )


class FullCatenoid(Immersion):
    """Both sheets of the catenoid with neck radius ``neck``.

    F(s, theta) = (neck cosh s cos theta, neck cosh s sin theta, s, s), which is
    minimal for neck = sqrt(2); cos(alpha) = tanh s changes sign across the neck.
    """

    periodic_x2 = True

    def __init__(self, s_range=(-3.5, 3.5), neck=np.sqrt(2.0), beta=0.0):
        super().__init__((s_range, (0.0, 2.0 * np.pi)), beta)
        self.neck = float(neck)

    def jet(self, s, theta):
        s, theta = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(theta, dtype=float))
        a = self.neck
        ch, sh = np.cosh(s), np.sinh(s)
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        zero, one = np.zeros_like(s), np.ones_like(s)
        return _jet(
            (a * ch * cos_t, a * ch * sin_t, s, s),
            ((a * sh * cos_t, a * sh * sin_t, one, one), (-a * ch * sin_t, a * ch * cos_t, zero, zero)),
            (((a * ch * cos_t, a * ch * sin_t, zero, zero), (-a * sh * sin_t, a * sh * cos_t, zero, zero)),
             ((-a * sh * sin_t, a * sh * cos_t, zero, zero), (-a * ch * cos_t, -a * ch * sin_t, zero, zero))),
        )

    def unit_normal(self, s, theta):
        """Unit normal inside the catenoid's 3-space, with its two partials."""
        s, theta = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(theta, dtype=float))
        ch, th = np.cosh(s), np.tanh(s)
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        k = 1.0 / np.sqrt(2.0)
        zero = np.zeros_like(s)
        value = np.stack([cos_t / ch, sin_t / ch, -k * th, -k * th], axis=-1)
        d_s = np.stack([-cos_t * th / ch, -sin_t * th / ch, -k / ch**2, -k / ch**2], axis=-1)
        d_theta = np.stack([-sin_t / ch, cos_t / ch, zero, zero], axis=-1)
        return value, np.stack([d_s, d_theta], axis=-2)


@dataclass(frozen=True)
class SurfaceGeometry:
    """Pointwise geometric state of an immersion.

    ``e1, e2`` are the coordinate tangent vectors; ``u1, u2`` the
    Gram-Schmidt orthonormal tangent frame with ``u_a = basis[a, i] e_i``.
    ``h[n, a, b]`` is the second fundamental form in (u1, u2) against the
    normal frame vector ``(e3, e4)[n]``.
    """

    jet: Jet
    beta: float
    g: np.ndarray
    g_inv: np.ndarray
    det_g: np.ndarray
    basis: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    tangent_projector: np.ndarray
    normal_projector: np.ndarray
    e3: np.ndarray
    e4: np.ndarray
    h: np.ndarray
    H: np.ndarray
    cos_alpha: np.ndarray
    y: np.ndarray
    z: np.ndarray
    lagrangian: np.ndarray

    @property
    def e1(self):
        return self.jet.d1[..., 0, :]

    @property
    def e2(self):
        return self.jet.d1[..., 1, :]

    @property
    def sin_alpha(self):
        return np.hypot(self.y, self.z)

    @property
    def area_element(self):
        return np.sqrt(self.det_g)

    @property
    def normal_frame(self):
        return np.stack([self.e3, self.e4], axis=-2)

    @property
    def tangent_frame(self):
        return np.stack([self.u1, self.u2], axis=-2)


def _inverse_2x2(g, det):
    inv = np.empty_like(g)
    inv[..., 0, 0] = g[..., 1, 1] / det
    inv[..., 1, 1] = g[..., 0, 0] / det
    inv[..., 0, 1] = -g[..., 0, 1] / det
    inv[..., 1, 0] = -g[..., 1, 0] / det
    return inv


def _first_admissible(candidates, minimum):
    """Per point, pick the first candidate vector whose norm reaches ``minimum``."""
    chosen = candidates[-1]
    for vector in reversed(candidates[:-1]):
        ok = np.linalg.norm(vector, axis=-1) >= minimum
        chosen = np.where(ok[..., None], vector, chosen)
    return chosen / np.linalg.norm(chosen, axis=-1, keepdims=True)


def _seed_normal_frame(normal_projector, u1, u2):
    minimum = get_tolerance('SEED_PROJECTION_MIN')
    seeds = [normal_projector[..., :, k] for k in (2, 3, 0, 1)]
    e3 = _first_admissible(seeds, minimum)
    rest = [v - np.sum(v * e3, axis=-1, keepdims=True) * e3 for v in seeds]
    e4 = _first_admissible(rest, minimum)
    orientation = np.linalg.det(np.stack([u1, u2, e3, e4], axis=-2))
    e4 = np.where((orientation < 0)[..., None], -e4, e4)
    return e3, e4


def geometry_from_jet(jet, beta=0.0, J=STANDARD_J):
    e = jet.d1
    g = np.einsum('...ia,...ja->...ij', e, e)
    det_g = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    det_min = get_tolerance('DET_G_MIN')
    if np.any(~(det_g >= det_min)):
        worst = float(np.nanmin(det_g)) if np.any(np.isfinite(det_g)) else float('nan')
        logger.error(f"Degenerate immersion: det g = {worst:.3e}")
        raise DegenerateImmersion(f"det g = {worst:.3e} below {det_min:g}", det_g=worst)
    asymmetry = np.max(np.abs(jet.d2[..., 0, 1, :] - jet.d2[..., 1, 0, :]), initial=0.0)
    if asymmetry > get_tolerance('SYMMETRY_TOL'):
        raise DegenerateImmersion(f"second partials not symmetric ({asymmetry:.3e})", asymmetry=float(asymmetry))

    g_inv = _inverse_2x2(g, det_g)
    tangent_projector = np.einsum('...ia,...ij,...jb->...ab', e, g_inv, e)
    normal_projector = np.eye(4) - tangent_projector

    len1 = np.linalg.norm(e[..., 0, :], axis=-1)
    u1 = e[..., 0, :] / len1[..., None]
    w = e[..., 1, :] - np.sum(e[..., 1, :] * u1, axis=-1, keepdims=True) * u1
    len_w = np.linalg.norm(w, axis=-1)
    u2 = w / len_w[..., None]
    basis = np.zeros(jet.shape + (2, 2))
    basis[..., 0, 0] = 1.0 / len1
    basis[..., 1, 0] = -g[..., 0, 1] / (len1**2 * len_w)
    basis[..., 1, 1] = 1.0 / len_w

    e3, e4 = _seed_normal_frame(normal_projector, u1, u2)

    second = np.einsum('...ab,...ijb->...ija', normal_projector, jet.d2)
    H = np.einsum('...ij,...ija->...a', g_inv, second)
    second_on = np.einsum('...ai,...bj,...ijc->...abc', basis, basis, second)
    h = np.einsum('...abc,...nc->...nab', second_on, np.stack([e3, e4], axis=-2))

    cos_alpha = J.omega(e[..., 0, :], e[..., 1, :]) / np.sqrt(det_g)
    Ju1 = J.apply(u1)
    y = np.sum(Ju1 * e3, axis=-1)
    z = np.sum(Ju1 * e4, axis=-1)
    lagrangian = cos_alpha < get_tolerance('SYMPLECTIC_EPS')
    if np.any(lagrangian):
        logger.debug(f"{int(np.count_nonzero(lagrangian))} point(s) below the symplectic threshold")

    return SurfaceGeometry(
        jet=jet, beta=float(beta), g=g, g_inv=g_inv, det_g=det_g, basis=basis, u1=u1, u2=u2,
        tangent_projector=tangent_projector, normal_projector=normal_projector,
        e3=e3, e4=e4, h=h, H=H, cos_alpha=cos_alpha, y=y, z=z, lagrangian=lagrangian,
    )


def evaluate_geometry(imm, p):
    x1, x2 = p
    return geometry_from_jet(imm.jet(x1, x2), imm.beta)


def kahler_angle(geo):
    return geo.cos_alpha


def self_dual_coordinates(geo):
    """(x, y, z) = (cos alpha, <Ju1, e3>, <Ju1, e4>); a point of the unit sphere."""
    return np.stack([geo.cos_alpha, geo.y, geo.z], axis=-1)


def mean_curvature(imm, p):
    return evaluate_geometry(imm, p).H


def rotate_normal_frame(geo, angle):
    """Rotate (e3, e4) by ``angle`` inside the normal plane, keeping orientation."""
    c, s = np.cos(angle), np.sin(angle)
    e3 = c * geo.e3 + s * geo.e4
    e4 = -s * geo.e3 + c * geo.e4
    h = np.stack([c * geo.h[..., 0, :, :] + s * geo.h[..., 1, :, :],
                  -s * geo.h[..., 0, :, :] + c * geo.h[..., 1, :, :]], axis=-3)
    return replace(geo, e3=e3, e4=e4, h=h, y=c * geo.y + s * geo.z, z=-s * geo.y + c * geo.z)


def kahler_angle_gradient(geo, J=STANDARD_J):
    """Coordinate partials of cos(alpha), differentiated in closed form."""
    e, d2 = geo.jet.d1, geo.jet.d2
    omega12 = J.omega(e[..., 0, :], e[..., 1, :])
    d_omega = J.omega(d2[..., 0, :, :], e[..., 1, None, :]) + J.omega(e[..., 0, None, :], d2[..., 1, :, :])
    d_g = np.einsum('...ika,...ja->...kij', d2, e)
    d_g = d_g + np.swapaxes(d_g, -1, -2)
    half_trace = 0.5 * np.einsum('...ij,...kji->...k', geo.g_inv, d_g)
    root = np.sqrt(geo.det_g)[..., None]
    return (d_omega - omega12[..., None] * half_trace) / root


def kahler_angle_gradient_fd(imm, p):
    """Central differences of cos(alpha) in each parameter."""
    x1, x2 = np.broadcast_arrays(np.asarray(p[0], dtype=float), np.asarray(p[1], dtype=float))
    rel, floor = get_tolerance('FD_REL_STEP'), get_tolerance('FD_MIN_STEP')
    partials = []
    for k, x in enumerate((x1, x2)):
        step = np.maximum(floor, rel * np.abs(x))
        shift = (step, 0.0) if k == 0 else (0.0, step)
        plus = geometry_from_jet(imm.jet(x1 + shift[0], x2 + shift[1])).cos_alpha
        minus = geometry_from_jet(imm.jet(x1 - shift[0], x2 - shift[1])).cos_alpha
        partials.append((plus - minus) / (2.0 * step))
    return np.stack(partials, axis=-1)


def surface_gradient(geo, coordinate_partials):
    """Raise the index of a coordinate differential: g^{ij} d_j u e_i in R^4."""
    return np.einsum('...ij,...j,...ia->...a', geo.g_inv, coordinate_partials, geo.jet.d1)


def frame_derivatives(geo, coordinate_partials):
    """Directional derivatives along (u1, u2) from coordinate partials."""
    return np.einsum('...ai,...i->...a', geo.basis, coordinate_partials)


def kahler_twist(geo, grad_cos, J=STANDARD_J):
    """(J (J grad cos alpha)^T)^perp."""
    tangential = np.einsum('...ab,...b->...a', geo.tangent_projector, J.apply(grad_cos))
    return np.einsum('...ab,...b->...a', geo.normal_projector, J.apply(tangential))


@dataclass(frozen=True)
class ELResidual:
    p_form: np.ndarray
    betaequ_form: np.ndarray
    cos_alpha: np.ndarray
    grad_cos: np.ndarray

    @property
    def norm(self):
        return np.linalg.norm(self.p_form, axis=-1)

    @property
    def betaequ_norm(self):
        return np.linalg.norm(self.betaequ_form, axis=-1)

    def two_route_gap(self):
        """Relative gap between cos(alpha) * P and the divided-out form."""
        lhs = self.cos_alpha[..., None] * self.p_form
        scale = np.maximum(np.linalg.norm(self.betaequ_form, axis=-1), 1.0)
        return np.linalg.norm(lhs - self.betaequ_form, axis=-1) / scale


def el_residual(imm, p, gradient='fd', J=STANDARD_J):
    """Euler-Lagrange operator of L_beta in its two forms.

    ``p_form`` is cos^2 H - beta (J(d1 cos u2 - d2 cos u1))^perp and
    ``betaequ_form`` is cos^3 H - beta (J (J grad cos)^T)^perp.
    """
    geo = evaluate_geometry(imm, p)
    return el_residual_from_geometry(geo, imm=imm, p=p, gradient=gradient, J=J)


def el_residual_from_geometry(geo, imm=None, p=None, gradient='analytic', J=STANDARD_J):
    eps = get_tolerance('SYMPLECTIC_EPS')
    if np.any(geo.cos_alpha < eps):
        worst = float(np.min(geo.cos_alpha))
        raise LagrangianPoint(f"cos(alpha) = {worst:.3e} at an evaluated point", cos_alpha=worst)
    if gradient == 'fd':
        if imm is None:
            raise ValueError("finite-difference gradient needs the immersion")
        partials = kahler_angle_gradient_fd(imm, p)
    elif gradient == 'analytic':
        partials = kahler_angle_gradient(geo, J)
    else:
        raise ValueError(f"unknown gradient route {gradient!r}")

    beta = geo.beta
    c = geo.cos_alpha[..., None]
    grad_cos = surface_gradient(geo, partials)
    betaequ_form = c**3 * geo.H - beta * kahler_twist(geo, grad_cos, J)

    d_u = frame_derivatives(geo, partials)
    twisted = d_u[..., 0, None] * geo.u2 - d_u[..., 1, None] * geo.u1
    p_form = c**2 * geo.H - beta * np.einsum('...ab,...b->...a', geo.normal_projector, J.apply(twisted))
    return ELResidual(p_form=p_form, betaequ_form=betaequ_form, cos_alpha=geo.cos_alpha, grad_cos=grad_cos)


def adapted_frame(geo):
    """Rotate (e3, e4) so that <Ju1, e3> = sin(alpha) and <Ju1, e4> = 0."""
    s = geo.sin_alpha
    floor = get_tolerance('COMPLEX_EPS')
    if np.any(s <= floor):
        raise ComplexPoint(f"sin(alpha) = {float(np.min(s)):.3e} at an evaluated point", sin_alpha=float(np.min(s)))
    cos_phi, sin_phi = geo.y / s, geo.z / s
    e3 = cos_phi[..., None] * geo.e3 + sin_phi[..., None] * geo.e4
    e4 = -sin_phi[..., None] * geo.e3 + cos_phi[..., None] * geo.e4
    h3, h4 = geo.h[..., 0, :, :], geo.h[..., 1, :, :]
    cp, sp = cos_phi[..., None, None], sin_phi[..., None, None]
    h = np.stack([cp * h3 + sp * h4, -sp * h3 + cp * h4], axis=-3)
    return replace(geo, e3=e3, e4=e4, h=h, y=s, z=np.zeros_like(s))


def critical_identity_residual(imm, p):
    """H - beta (sin^2/cos^2) V in the adapted frame, V = d_u2(alpha) e3 + d_u1(alpha) e4."""
    return critical_identity_from_geometry(evaluate_geometry(imm, p))


def critical_identity_from_geometry(geo):
    geo = adapted_frame(geo)
    eps = get_tolerance('SYMPLECTIC_EPS')
    if np.any(geo.cos_alpha < eps):
        raise LagrangianPoint("adapted-frame identity divides by cos(alpha)")
    s, c = geo.sin_alpha, geo.cos_alpha
    d_alpha = -frame_derivatives(geo, kahler_angle_gradient(geo)) / s[..., None]
    V = d_alpha[..., 1, None] * geo.e3 + d_alpha[..., 0, None] * geo.e4
    return geo.H - geo.beta * (s**2 / c**2)[..., None] * V


def laplace_beltrami_radial(u, A, r):
    """(1/(r sqrt A)) d/dr (r u' / sqrt A) at the interior grid nodes.

    Written in flux form with half-node averages, second order on smooth grids.
    """
    u, A, r = (np.asarray(v, dtype=float) for v in (u, A, r))
    if r.size < 5:
        raise GridTooCoarse(f"need at least 5 nodes, got {r.size}", nodes=int(r.size))
    if not np.all(np.diff(r) > 0):
        raise ValueError("radial grid must be strictly increasing")
    weight = r / np.sqrt(A)
    flux = 0.5 * (weight[1:] + weight[:-1]) * np.diff(u) / np.diff(r)
    span = 0.5 * (r[2:] - r[:-2])
    return np.diff(flux) / span / (r[1:-1] * np.sqrt(A[1:-1]))
