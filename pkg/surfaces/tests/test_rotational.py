from unittest import mock

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from surfaces.exceptions import (
    AsymptoticMismatch, BoundViolation, GridTooCoarse, InvalidBeta, InvalidDomain, NoSolution, SlopeOverflow,
)
from surfaces.geometry_core import evaluate_geometry
from surfaces.rotational import (
    RotationalImmersion, angle_pde_check, asymptotic_far, asymptotic_near, beta_sweep, catenoid_slope,
    closed_form_check, corrupt_profile, critical_identity_check, el_closure, el_two_route_check,
    limit_bounds_check, make_grid, near_coefficients,
    pde_convergence, plane_rigidity_check, profile_geometry, rotational_mean_curvature, solve_profile,
    solve_rho, solve_slope, verify_asymptotics,
)


class SolveSlopeTests(SimpleTestCase):
    def test_beta_one_is_exactly_c_over_r(self):
        fp, gp = solve_slope(2.0, 1.0, 1.0, 1.0)
        self.assertEqual(float(fp), 0.5)
        self.assertEqual(float(gp), 0.5)

    def test_beta_two_quartic_root(self):
        fp, gp = solve_slope(1.0, 2.0, 1.0, 1.0)
        self.assertAlmostEqual(float(fp), 1.0 / np.sqrt(2.0), places=12)
        self.assertAlmostEqual(float(gp), 1.0 / np.sqrt(2.0), places=12)

    def test_beta_zero_catenoid_slope(self):
        fp, gp = solve_slope(2.0, 0.0, 1.0, 0.0)
        self.assertAlmostEqual(float(fp), 1.0 / np.sqrt(3.0), places=12)
        self.assertEqual(float(gp), 0.0)
        r = np.array([3.0])
        assert_allclose(solve_slope(r, 0.0, 1.0, 1.0)[0], catenoid_slope(r), rtol=1e-12)

    def test_zero_constants_give_the_plane(self):
        fp, gp = solve_slope(np.linspace(0.1, 3.0, 7), 2.0, 0.0, 0.0)
        self.assertTrue(np.all(fp == 0) and np.all(gp == 0))

    def test_inside_the_neck_has_no_solution(self):
        with self.assertRaises(NoSolution):
            solve_slope(1.0, 0.0, 1.0, 1.0)

    def test_negative_beta_rejected(self):
        with self.assertRaises(InvalidBeta):
            solve_slope(1.0, -0.5, 1.0, 1.0)

    def test_swapping_constants_swaps_slopes(self):
        r = np.geomspace(0.05, 50.0, 9)
        fp, gp = solve_slope(r, 2.0, 1.0, 0.3)
        gp_swapped, fp_swapped = solve_slope(r, 2.0, 0.3, 1.0)
        assert_allclose(fp, fp_swapped, rtol=1e-14)
        assert_allclose(gp, gp_swapped, rtol=1e-14)

    def test_rho_is_monotone_in_target(self):
        t = np.geomspace(1e-3, 1e3, 25)
        for beta in (0.5, 2.0, 5.0):
            self.assertTrue(np.all(np.diff(solve_rho(t, beta)) > 0))

    def test_far_and_near_examples(self):
        far = float(solve_slope(10.0, 2.0, 1.0, 1.0)[0])
        self.assertLess(abs(far - 0.099) * 1e3, 0.05)
        self.assertLess(abs(far - float(asymptotic_far(10.0, 2.0))) * 1e3, 0.05)

        near = float(solve_slope(0.01, 2.0, 1.0, 1.0)[0])
        expected = 2 ** -0.25 * 0.01 ** -0.5 - 0.5 * 2 ** -1.75 * 0.01 ** 0.5
        self.assertLess(abs(near - expected) / near, 1e-3)
        self.assertAlmostEqual(float(asymptotic_near(0.01, 2.0)), expected, places=12)

    def test_small_beta_overflow_near_the_origin(self):
        for r, beta in ((1e-3, 0.001), (0.5, 0.001), (0.01, 0.01)):
            with self.subTest(r=r, beta=beta):
                with self.assertRaises(SlopeOverflow) as caught:
                    solve_slope(r, beta, 1.0, 1.0)
                self.assertEqual(caught.exception.exit_code, 3)
                self.assertEqual(caught.exception.details['beta'], beta)
                assert_allclose(caught.exception.details['ratio'], np.sqrt(2.0) / r)

    def test_small_beta_stays_finite_when_representable(self):
        fp, gp = solve_slope(0.5, 0.01, 1.0, 1.0)
        self.assertTrue(np.isfinite(fp) and np.isfinite(gp))
        self.assertGreater(float(fp), 1e40)

    def test_overflow_is_not_a_missing_solution(self):
        with self.assertRaises(SlopeOverflow):
            solve_profile(0.001, 1.0, 1.0, 0.1, 1.0, n=9)
        self.assertFalse(issubclass(SlopeOverflow, NoSolution))

    def test_nonpositive_radius(self):
        with self.assertRaises(InvalidDomain) as caught:
            solve_slope(np.array([0.0, 1.0]), 2.0, 1.0, 1.0)
        self.assertEqual(caught.exception.exit_code, 2)
        self.assertEqual(caught.exception.details['r_min'], 0.0)

    def test_near_coefficients(self):
        leading, second = near_coefficients(2.0)
        self.assertAlmostEqual(leading, 2 ** -0.25)
        self.assertAlmostEqual(second, -0.5 * 2 ** -1.75)
        self.assertEqual(near_coefficients(1.0), (1.0, 0.0))
        with self.assertRaises(InvalidBeta):
            near_coefficients(0.0)


class MakeGridTests(SimpleTestCase):
    def test_uniform_for_short_ranges(self):
        grid = make_grid(1.0, 10.0, 9)
        assert_allclose(np.diff(grid), 9.0 / 8.0)

    def test_geometric_for_long_ranges(self):
        grid = make_grid(1e-3, 1e3, 13)
        assert_allclose(grid[1:] / grid[:-1], 10.0 ** 0.5)

    def test_rejects_bad_ranges(self):
        with self.assertRaises(InvalidDomain):
            make_grid(2.0, 1.0, 9)
        with self.assertRaises(GridTooCoarse):
            make_grid(1.0, 2.0, 8)


class SolveProfileTests(SimpleTestCase):
    def test_first_integrals_hold(self):
        for beta in (0.5, 1.0, 2.0, 5.0):
            profile = solve_profile(beta, 1.0, 1.0, 0.01, 1000.0)
            self.assertLessEqual(profile.first_integral_residual(), 1e-10)
            report = profile.invariant_report()
            self.assertTrue(all(part['passed'] for part in report.values()), report)

    def test_beta_one_logarithm(self):
        profile = solve_profile(1.0, 1.0, 1.0, 0.1, 100.0, f0=0.5)
        assert_allclose(profile.f - 0.5, np.log(profile.r_grid / 0.1), atol=1e-10)
        self.assertEqual(closed_form_check(profile)['status'], 'passed')

    def test_beta_zero_catenoid(self):
        profile = solve_profile(0.0, 1.0, 1.0, 2.0, 20.0)
        exact = np.arccosh(profile.r_grid / np.sqrt(2.0)) - np.arccosh(np.sqrt(2.0))
        assert_allclose(profile.f, exact, atol=1e-8)
        self.assertEqual(closed_form_check(profile)['status'], 'passed')

    def test_closed_form_skipped_for_generic_beta(self):
        self.assertEqual(closed_form_check(solve_profile(2.0, 1.0, 1.0, 1.0, 2.0, n=33))['status'], 'skipped')

    def test_needs_a_radial_range(self):
        with self.assertRaises(InvalidDomain):
            solve_profile(2.0, 1.0, 1.0)
        with self.assertRaises(InvalidDomain):
            solve_profile(2.0, 1.0, 1.0, r_grid=np.array([1.0, 0.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]))

    def test_no_solution_inside_the_neck(self):
        with self.assertRaises(NoSolution):
            solve_profile(0.0, 1.0, 1.0, 1.0, 10.0)

    def test_mirror_symmetry(self):
        profile = solve_profile(2.0, 1.0, 0.5, 0.5, 5.0, n=257)
        mirrored = solve_profile(2.0, -1.0, -0.5, 0.5, 5.0, n=257)
        expected = profile.mirrored()
        assert_allclose(mirrored.fp, expected.fp, rtol=1e-14)
        assert_allclose(mirrored.f, expected.f, atol=1e-13)
        assert_allclose(mirrored.g, expected.g, atol=1e-13)

    def test_corrupted_profile_fails_invariants(self):
        report = corrupt_profile(solve_profile(2.0, 1.0, 1.0, 0.1, 10.0, n=257), 1.01).invariant_report()
        self.assertFalse(report['first_integral']['passed'])
        self.assertFalse(report['cos_alpha']['passed'])

    def test_closure_against_the_euler_lagrange_operator(self):
        for beta in (0.5, 2.0, 5.0):
            closure = el_closure(solve_profile(beta, 1.0, 1.0, 0.1, 10.0, n=257))
            self.assertLess(float(np.max(closure)), 1e-8)

    def test_mean_curvature_component_formula(self):
        profile = solve_profile(2.0, 1.0, 0.4, 0.5, 5.0, n=65)
        geo = profile_geometry(profile, theta=0.7)
        H = rotational_mean_curvature(profile.r_grid, 0.7, profile.fp, profile.gp, profile.fpp, profile.gpp)
        assert_allclose(H, geo.H, atol=1e-10)

    def test_catenoid_is_minimal(self):
        imm = RotationalImmersion(0.0, 1.0, 1.0, (2.0, 4.0))
        H = evaluate_geometry(imm, (np.linspace(2.1, 3.9, 7), 1.0)).H
        self.assertLess(float(np.max(np.linalg.norm(H, axis=-1))), 1e-8)

    def test_plane_rigidity(self):
        self.assertEqual(plane_rigidity_check(solve_profile(2.0, 1.0, 1.0, 0.01, 10.0))['status'], 'passed')
        plane = plane_rigidity_check(solve_profile(2.0, 0.0, 0.0, 0.01, 10.0, n=33))
        self.assertEqual(plane['kind'], 'plane')
        self.assertEqual(plane['status'], 'passed')


class AsymptoticsTests(SimpleTestCase):
    def test_beta_two_far_and_near(self):
        report = verify_asymptotics(solve_profile(2.0, 1.0, 1.0, 1e-3, 1e3))
        self.assertEqual(report['far']['status'], 'passed')
        self.assertEqual(report['near']['status'], 'passed')
        remainder = np.abs(report['far']['remainder'])
        self.assertTrue(remainder[0] > remainder[1] > remainder[2])

    def test_beta_one_remainders_vanish(self):
        report = verify_asymptotics(solve_profile(1.0, 1.0, 1.0, 1e-3, 1e3))
        assert_allclose(report['far']['remainder'], 0.0, atol=1e-9)
        self.assertEqual(report['near']['status'], 'passed')

    def test_small_beta_near_expansion(self):
        report = verify_asymptotics(solve_profile(0.5, 1.0, 1.0, 1e-3, 10.0))
        self.assertEqual(report['near']['status'], 'passed')
        self.assertEqual(report['far']['status'], 'skipped')

    def test_skipped_for_other_constants(self):
        report = verify_asymptotics(solve_profile(2.0, 2.0, 1.0, 1e-3, 1e3, n=129))
        self.assertEqual(report['far']['status'], 'skipped')

    def test_corrupted_profile_mismatch(self):
        profile = corrupt_profile(solve_profile(2.0, 1.0, 1.0, 1e-3, 1e3), 1.01)
        with self.assertRaises(AsymptoticMismatch):
            verify_asymptotics(profile)
        report = verify_asymptotics(profile, raise_on_failure=False)
        self.assertEqual(report['far']['status'], 'failed')


class AnglePDETests(SimpleTestCase):
    def test_identities_on_beta_two(self):
        cos_residual, inverse_residual, report = angle_pde_check(solve_profile(2.0, 1.0, 1.0, 1.0, 10.0, n=4097))
        self.assertTrue(report['passed'], report)
        self.assertLess(cos_residual, 1e-5)
        self.assertLess(inverse_residual, 1e-5)

    def test_identities_on_catenoid(self):
        _, _, report = angle_pde_check(solve_profile(0.0, 1.0, 1.0, 3.0, 10.0, n=4097))
        self.assertTrue(report['passed'], report)

    def test_plane_is_exact(self):
        cos_residual, inverse_residual, _ = angle_pde_check(solve_profile(2.0, 0.0, 0.0, 1.0, 10.0, n=33))
        self.assertEqual(cos_residual, 0.0)
        self.assertEqual(inverse_residual, 0.0)

    def test_second_order_convergence(self):
        result = pde_convergence(2.0, 1.0, 1.0, n=2049)
        self.assertTrue(result['passed'], result)
        self.assertGreaterEqual(min(result['ratios']), 3.5)


class IdentityCheckTests(SimpleTestCase):
    def test_two_routes_on_beta_two(self):
        report = el_two_route_check(solve_profile(2.0, 1.0, 1.0, 0.01, 100.0, n=513))
        self.assertTrue(report['passed'], report)
        self.assertEqual(report['tolerance'], 1e-9)

    def test_adapted_frame_identity_on_beta_two(self):
        report = critical_identity_check(solve_profile(2.0, 1.0, 1.0, 0.01, 100.0, n=513))
        self.assertEqual(report['status'], 'passed', report)
        self.assertLessEqual(report['value'], 1e-7)

    def test_adapted_frame_identity_fails_off_criticality(self):
        profile = corrupt_profile(solve_profile(2.0, 1.0, 1.0, 1.0, 10.0, n=257), 1.05)
        with self.assertLogs('surfaces.rotational', level='WARNING'):
            report = critical_identity_check(profile)
        self.assertEqual(report['status'], 'failed')

    def test_adapted_frame_identity_skipped_on_the_plane(self):
        report = critical_identity_check(solve_profile(2.0, 0.0, 0.0, 1.0, 10.0, n=33))
        self.assertEqual(report['status'], 'skipped')

    def test_convergence_at_roundoff_counts_as_settled(self):
        self.assertTrue(pde_convergence(2.0, 0.0, 0.0, n=33)['passed'])


class LimitBoundsTests(SimpleTestCase):
    def test_large_beta_decay_bound(self):
        report = limit_bounds_check([10.0, 100.0], (0.5, 50.0))
        self.assertTrue(report['passed'])
        self.assertTrue(all(row['min_margin'] >= 0 for row in report['large_beta']))

    def test_small_beta_catenoid_limit(self):
        report = limit_bounds_check([0.1, 0.01, 0.001], (2.0, 5.0))
        self.assertTrue(report['passed'], report['violations'])
        self.assertTrue(report['small_beta']['converging'])
        self.assertTrue(report['small_beta']['diverging_at_r0'])

    def test_small_beta_needs_interval_outside_the_neck(self):
        with self.assertRaises(InvalidDomain):
            limit_bounds_check([0.1], (1.0, 5.0))

    def test_violation_raises(self):
        steep = np.full(2049, 10.0)
        with mock.patch('surfaces.rotational.solve_slope', return_value=(steep, steep)):
            with self.assertRaises(BoundViolation):
                limit_bounds_check([10.0], (0.5, 50.0))
            report = limit_bounds_check([10.0], (0.5, 50.0), raise_on_failure=False)
        self.assertFalse(report['passed'])
        self.assertEqual(report['violations'][0]['beta'], 10.0)


class BetaSweepTests(SimpleTestCase):
    def test_continuity_and_refinement(self):
        grid = np.linspace(1.0, 10.0, 65)
        coarse = beta_sweep([1.0, 2.0], 1.0, 1.0, grid)
        fine = beta_sweep([1.0, 1.5, 2.0], 1.0, 1.0, grid)
        self.assertEqual(len(fine.continuity), 2)
        self.assertLess(fine.max_continuity, coarse.max_continuity)

    def test_beta_one_member_matches_solve(self):
        grid = np.linspace(1.0, 10.0, 65)
        sweep = beta_sweep([0.5, 1.0, 2.0], 1.0, 1.0, grid)
        assert_allclose(sweep.profiles[1].f, solve_profile(1.0, 1.0, 1.0, r_grid=grid).f)

    def test_grid_must_increase(self):
        with self.assertRaises(InvalidBeta):
            beta_sweep([2.0, 1.0], 1.0, 1.0, np.linspace(1.0, 2.0, 9))
