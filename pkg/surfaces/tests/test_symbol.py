from dataclasses import replace
from unittest import mock

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from surfaces import symbol
from surfaces.exceptions import EllipticityViolation, InvalidBeta
from surfaces.geometry_core import evaluate_geometry, flat_plane, lagrangian_plane
from surfaces.rotational import RotationalImmersion
from surfaces.symbol import ellipticity_check, sample_directions, symbol_matrix, symbol_quadratic


def rotational_point(beta=1.0):
    return evaluate_geometry(RotationalImmersion(beta, 1.0, 1.0, (1.0, 2.0)), (1.0, 0.3))


class SymbolQuadraticTests(SimpleTestCase):
    def test_tangent_direction_vanishes(self):
        geo = rotational_point()
        self.assertAlmostEqual(float(symbol_quadratic(geo, geo.u1, (0.3, -1.2), beta=4.0)), 0.0, places=14)

    def test_beta_zero_keeps_only_the_first_term(self):
        geo = rotational_point()
        G, xi = np.array([0.2, -0.4, 0.7, 0.1]), np.array([1.5, 0.5])
        G_perp = geo.normal_projector @ G
        expected = geo.cos_alpha**2 * xi @ xi * G_perp @ G_perp
        self.assertAlmostEqual(float(symbol_quadratic(geo, G, xi, beta=0.0)), float(expected), places=13)

    def test_holomorphic_point(self):
        geo = evaluate_geometry(flat_plane(), (0.5, 0.5))
        G = np.array([0.0, 0.0, 0.6, 0.8])
        self.assertAlmostEqual(float(symbol_quadratic(geo, G, (3.0, 4.0), beta=7.0)), 25.0, places=12)

    def test_quadratic_form_matches_matrix(self):
        geo = rotational_point(2.0)
        rng = np.random.default_rng(7)
        G = rng.normal(size=(100, 4))
        xi = rng.normal(size=(100, 2))
        data = symbol_matrix(geo, G)
        assert_allclose(symbol_quadratic(geo, G, xi), np.einsum('ni,nij,nj->n', xi, data.O, xi), rtol=1e-12)

    def test_negative_beta_rejected(self):
        with self.assertRaises(InvalidBeta):
            symbol_quadratic(rotational_point(), np.ones(4), (1.0, 0.0), beta=-1.0)


class SymbolMatrixTests(SimpleTestCase):
    def test_tangent_direction_gives_zero_matrix(self):
        geo = rotational_point()
        data = symbol_matrix(geo, geo.u2)
        assert_allclose(data.O, 0.0, atol=1e-14)
        self.assertAlmostEqual(float(data.det_direct), 0.0, places=20)

    def test_holomorphic_unit_normal_gives_identity(self):
        data = symbol_matrix(evaluate_geometry(flat_plane(), (0.5, 0.5)), np.array([0.0, 0.0, 1.0, 0.0]), beta=5.0)
        assert_allclose(data.O, np.eye(2))
        self.assertEqual(float(data.det_direct), 1.0)

    def test_determinant_factorization(self):
        geo = rotational_point(2.0)
        data = symbol_matrix(geo, geo.e3, beta=1.0)
        self.assertAlmostEqual(float(geo.cos_alpha), 1.0 / np.sqrt(2.0), places=10)
        self.assertAlmostEqual(float(data.det_direct), float(np.linalg.det(data.O)), places=12)
        self.assertLess(float(data.factorization_gap()), 1e-12)

    def test_factorization_over_random_directions(self):
        geo = rotational_point(3.0)
        data = symbol_matrix(geo, sample_directions(200, seed=3))
        self.assertLess(float(np.max(data.factorization_gap())), 1e-10)

    def test_lagrangian_point_is_degenerate(self):
        geo = evaluate_geometry(lagrangian_plane(), (0.5, 0.5))
        data = symbol_matrix(geo, sample_directions(50, seed=1), beta=2.0)
        assert_allclose(data.det_direct, 0.0, atol=1e-12)


class EllipticityCheckTests(SimpleTestCase):
    def test_plane_passes(self):
        report = ellipticity_check(evaluate_geometry(flat_plane(), (0.5, 0.5)), beta=3.0, seed=11)
        self.assertTrue(report['passed'])
        self.assertGreaterEqual(report['min_det'], 0.0)

    def test_rotational_point_is_strictly_elliptic(self):
        report = ellipticity_check(rotational_point(0.5), beta=0.5, samples=100, seed=5)
        self.assertTrue(report['passed'])
        self.assertTrue(report['strict'])
        self.assertGreater(report['min_det'], 0.0)
        self.assertEqual(report['nondegenerate_samples'], 100)

    def test_many_points_at_once(self):
        imm = RotationalImmersion(2.0, 1.0, 1.0, (1.0, 2.0))
        geo = evaluate_geometry(imm, (np.linspace(1.0, 2.0, 6), np.linspace(0.0, 3.0, 6)))
        self.assertTrue(ellipticity_check(geo, beta=2.0, samples=40, seed=2)['passed'])

    def test_same_seed_same_report(self):
        geo = rotational_point()
        self.assertEqual(ellipticity_check(geo, 1.0, seed=9), ellipticity_check(geo, 1.0, seed=9))

    def test_negative_determinant_raises(self):
        real = symbol.symbol_matrix

        def shifted(*args, **kwargs):
            data = real(*args, **kwargs)
            return replace(data, det_direct=data.det_direct - 1.0)

        with mock.patch('surfaces.symbol.symbol_matrix', side_effect=shifted):
            with self.assertRaises(EllipticityViolation) as ctx:
                ellipticity_check(rotational_point(), beta=1.0, seed=4)
        self.assertEqual(ctx.exception.exit_code, 1)
        self.assertLess(ctx.exception.details['min_det'], 0.0)
