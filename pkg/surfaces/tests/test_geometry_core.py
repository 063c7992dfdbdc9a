import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from surfaces.exceptions import ComplexPoint, DegenerateImmersion, GridTooCoarse, LagrangianPoint
from surfaces.geometry_core import (
    STANDARD_J, ComplexStructure, FullCatenoid, LinearImmersion, SurfaceOfRevolution, adapted_frame, complex_line,
    critical_identity_residual, el_residual, el_residual_from_geometry, evaluate_geometry, flat_plane, kahler_angle,
    kahler_angle_gradient, kahler_angle_gradient_fd, lagrangian_plane, laplace_beltrami_radial,
    linear_graph, mean_curvature, rotate_normal_frame, self_dual_coordinates,
)
from surfaces.rotational import RotationalImmersion

RADII = np.linspace(1.1, 1.9, 5)
ANGLES = np.linspace(0.2, 5.8, 5)


def critical_surface(beta=2.0):
    return RotationalImmersion(beta, 1.0, 1.0, (1.0, 2.0))


class ComplexStructureTests(SimpleTestCase):
    def test_standard_structure_is_valid(self):
        J = ComplexStructure()
        assert_allclose(J.matrix @ J.matrix, -np.eye(4))
        self.assertAlmostEqual(J.omega(np.array([1.0, 0, 0, 0]), np.array([0, 1.0, 0, 0])), 1.0)

    def test_rejects_matrix_that_does_not_square_to_minus_identity(self):
        with self.assertRaises(ValueError):
            ComplexStructure(np.eye(4))


class EvaluateGeometryTests(SimpleTestCase):
    def test_flat_plane(self):
        geo = evaluate_geometry(flat_plane(), (0.3, 0.7))
        assert_allclose(geo.g, np.eye(2))
        assert_allclose(geo.H, 0.0)
        self.assertEqual(kahler_angle(geo), 1.0)
        self.assertAlmostEqual(float(geo.y), 0.0)
        self.assertAlmostEqual(float(geo.z), 0.0)

    def test_cone_with_unit_diagonal_slopes(self):
        slope = 1.0 / np.sqrt(2.0)
        geo = evaluate_geometry(SurfaceOfRevolution.from_slopes(slope, slope), (1.0, 0.4))
        self.assertAlmostEqual(float(geo.det_g), 2.0, places=12)
        self.assertAlmostEqual(float(geo.cos_alpha), slope, places=12)

    def test_linear_graph(self):
        geo = evaluate_geometry(linear_graph(), (np.linspace(0, 1, 4), np.linspace(0, 1, 4)))
        assert_allclose(geo.cos_alpha, 1.0 / np.sqrt(2.0), atol=1e-14)
        assert_allclose(geo.H, 0.0, atol=1e-14)

    def test_lagrangian_plane_is_flagged_not_raised(self):
        geo = evaluate_geometry(lagrangian_plane(), (0.5, 0.5))
        self.assertAlmostEqual(float(geo.cos_alpha), 0.0)
        self.assertTrue(bool(geo.lagrangian))

    def test_complex_line_is_holomorphic(self):
        geo = evaluate_geometry(complex_line(angle=0.7), (0.2, 0.2))
        self.assertAlmostEqual(float(geo.cos_alpha), 1.0, places=14)

    def test_degenerate_immersion(self):
        imm = LinearImmersion([[1, 0, 0, 0], [2, 0, 0, 0]])
        with self.assertRaises(DegenerateImmersion):
            evaluate_geometry(imm, (0.5, 0.5))

    def test_invariants_on_a_curved_surface(self):
        r, theta = np.meshgrid(RADII, ANGLES, indexing='ij')
        geo = evaluate_geometry(critical_surface(), (r, theta))
        assert_allclose(geo.g @ geo.g_inv, np.broadcast_to(np.eye(2), geo.g.shape), atol=1e-12)
        for tangent in (geo.e1, geo.e2):
            assert_allclose(np.sum(geo.H * tangent, axis=-1), 0.0, atol=1e-10)
            assert_allclose(np.sum(geo.e3 * tangent, axis=-1), 0.0, atol=1e-12)
            assert_allclose(np.sum(geo.e4 * tangent, axis=-1), 0.0, atol=1e-12)
        assert_allclose(np.linalg.norm(geo.e3, axis=-1), 1.0, atol=1e-12)
        assert_allclose(np.sum(geo.e3 * geo.e4, axis=-1), 0.0, atol=1e-12)
        assert_allclose(np.linalg.norm(self_dual_coordinates(geo), axis=-1), 1.0, atol=1e-10)
        self.assertTrue(np.all((geo.cos_alpha > 0) & (geo.cos_alpha <= 1)))

    def test_cos_alpha_of_surface_of_revolution(self):
        imm = critical_surface()
        geo = evaluate_geometry(imm, (RADII, ANGLES))
        fp, gp = imm.profile(RADII)[2:4]
        assert_allclose(geo.cos_alpha, 1.0 / np.sqrt(1 + fp**2 + gp**2), rtol=1e-13)

    def test_mean_curvature_of_plane_vanishes(self):
        assert_allclose(mean_curvature(flat_plane(), (0.1, 0.9)), 0.0)

    def test_full_catenoid(self):
        catenoid = FullCatenoid()
        s = np.linspace(-3.0, 3.0, 7)
        geo = evaluate_geometry(catenoid, (s, np.full_like(s, 0.4)))
        assert_allclose(geo.cos_alpha, np.tanh(s), atol=1e-14)
        assert_allclose(geo.H, 0.0, atol=1e-12)
        normal, _ = catenoid.unit_normal(s, 0.4)
        assert_allclose(np.linalg.norm(normal, axis=-1), 1.0, atol=1e-14)
        assert_allclose(np.einsum('...ab,...b->...a', geo.normal_projector, normal), normal, atol=1e-12)


class KahlerAngleGradientTests(SimpleTestCase):
    def test_analytic_matches_finite_differences(self):
        imm = RotationalImmersion(2.0, 1.0, 0.5, (1.0, 2.0), slope_scale=1.3)
        geo = evaluate_geometry(imm, (RADII, ANGLES))
        assert_allclose(kahler_angle_gradient(geo), kahler_angle_gradient_fd(imm, (RADII, ANGLES)), atol=1e-8)


class ELResidualTests(SimpleTestCase):
    def test_vanishes_on_critical_rotational_surface(self):
        for beta in (0.5, 2.0, 5.0):
            imm = critical_surface(beta)
            analytic = el_residual(imm, (RADII, ANGLES), gradient='analytic')
            self.assertLess(float(np.max(analytic.norm)), 1e-8)
            fd = el_residual(imm, (RADII, ANGLES))
            self.assertLess(float(np.max(fd.norm)), 1e-8)

    def test_two_forms_agree(self):
        imm = RotationalImmersion(2.0, 1.0, 1.0, (1.0, 2.0), slope_scale=1.2)
        residual = el_residual(imm, (RADII, ANGLES), gradient='analytic')
        self.assertLess(float(np.max(residual.two_route_gap())), 1e-9)

    def test_non_critical_surface_has_residual(self):
        imm = RotationalImmersion(2.0, 1.0, 1.0, (1.0, 2.0), slope_scale=1.05)
        residual = el_residual(imm, (RADII, ANGLES))
        self.assertGreater(float(np.min(residual.norm)), 1e-5)

    def test_beta_zero_reduces_to_mean_curvature(self):
        imm = RotationalImmersion(0.0, 1.0, 0.0, (2.0, 3.0))
        residual = el_residual(imm, (np.linspace(2.1, 2.9, 4), 0.5), gradient='analytic')
        self.assertLess(float(np.max(residual.norm)), 1e-10)

    def test_lagrangian_point_raises(self):
        with self.assertRaises(LagrangianPoint):
            el_residual(lagrangian_plane(beta=1.0), (0.5, 0.5))

    def test_flat_plane_is_critical_for_every_beta(self):
        residual = el_residual(flat_plane(beta=3.0), (0.5, 0.5), gradient='analytic')
        self.assertEqual(float(residual.norm), 0.0)


class FrameTests(SimpleTestCase):
    def test_adapted_frame_aligns_j_e1(self):
        geo = adapted_frame(evaluate_geometry(critical_surface(), (RADII, ANGLES)))
        assert_allclose(geo.y, geo.sin_alpha, atol=1e-14)
        assert_allclose(geo.z, 0.0, atol=1e-14)
        assert_allclose(np.einsum('...a,...a->...', geo.e3, geo.e4), 0.0, atol=1e-12)

    def test_adapted_frame_normal_pair_carries_cos_alpha(self):
        geo = adapted_frame(evaluate_geometry(critical_surface(), (RADII, ANGLES)))
        assert_allclose(STANDARD_J.omega(geo.e3, geo.e4), geo.cos_alpha, atol=1e-12)
        assert_allclose(STANDARD_J.omega(geo.u1, geo.u2), geo.cos_alpha, atol=1e-12)

    def test_adapted_frame_is_idempotent(self):
        once = adapted_frame(evaluate_geometry(critical_surface(), (RADII, ANGLES)))
        twice = adapted_frame(once)
        for name in ('e3', 'e4', 'h', 'y', 'z'):
            assert_allclose(getattr(twice, name), getattr(once, name), atol=1e-14, err_msg=name)

    def test_residual_norm_ignores_the_normal_frame(self):
        imm = RotationalImmersion(2.0, 1.0, 0.5, (1.0, 2.0), slope_scale=1.05)
        geo = evaluate_geometry(imm, (RADII, ANGLES))
        reference = el_residual_from_geometry(geo)
        for angle in (0.4, 2.0, -1.1):
            rotated = el_residual_from_geometry(rotate_normal_frame(geo, angle))
            assert_allclose(rotated.norm, reference.norm, rtol=1e-10)
            assert_allclose(rotated.betaequ_norm, reference.betaequ_norm, rtol=1e-10)

    def test_adapted_frame_fails_at_complex_point(self):
        with self.assertRaises(ComplexPoint):
            adapted_frame(evaluate_geometry(flat_plane(), (0.5, 0.5)))

    def test_rotation_keeps_self_dual_sphere(self):
        geo = evaluate_geometry(critical_surface(), (RADII, ANGLES))
        rotated = rotate_normal_frame(geo, 0.9)
        assert_allclose(geo.y**2 + geo.z**2, rotated.y**2 + rotated.z**2, atol=1e-14)
        assert_allclose(np.sum(rotated.h**2, axis=(-3, -2, -1)), np.sum(geo.h**2, axis=(-3, -2, -1)), rtol=1e-12)

    def test_critical_identity_in_adapted_frame(self):
        residual = critical_identity_residual(critical_surface(), (RADII, ANGLES))
        self.assertLess(float(np.max(np.linalg.norm(residual, axis=-1))), 1e-7)


class LaplaceBeltramiTests(SimpleTestCase):
    def test_quadratic_on_flat_plane(self):
        r = np.linspace(1.0, 2.0, 33)
        assert_allclose(laplace_beltrami_radial(r**2, np.ones_like(r), r), 4.0, rtol=1e-12)

    def test_needs_five_nodes(self):
        r = np.linspace(1.0, 2.0, 4)
        with self.assertRaises(GridTooCoarse):
            laplace_beltrami_radial(r, np.ones_like(r), r)
