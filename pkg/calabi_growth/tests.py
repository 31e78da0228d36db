import math

import numpy as np
from django.test import SimpleTestCase
from scipy.special import expi

from bundle_algebra.angles import AngleParam
from bundle_algebra.bundles import TypeII, TypeIII
from bundle_algebra.line_bundles import LineBundleAH, ah_dual
from common.exceptions import BundleError, ProfileError
from common.numerics import central_difference
from common.results import all_passed
from metric_lab.fields import euclidean_metric

from .distance import (
    calabi_log_lower_bound, completeness_verdict, decay_exponent, fiber_distance, hadamard_order,
    log_fiber_distance,
)
from .od_growth import verify_Od_growth
from .paths import gaugenspe_distance_bounds, path_length, quasi_isometry_distortion
from .profiles import (
    CalabiLog, Custom, Euclidean, LogPower, SlowGrowth, build_profile, check_profile, log_one_plus,
)


def rat(p, q=1):
    return AngleParam.rational(p, q)


def dps_bundle(b2=1.0):
    return TypeIII((rat(0), rat(0)), 0, b2, 1j)


class FiberDistanceTest(SimpleTestCase):
    """Test fiber_distance"""

    def test_euclidean(self):
        """Test d(T) = sqrt(T)"""
        for T in (1.0, 10.0, 100.0, 1e4):
            self.assertAlmostEqual(fiber_distance(Euclidean(), T), math.sqrt(T), delta=1e-8 * math.sqrt(T))

    def test_zero(self):
        """Test the zero section"""
        self.assertEqual(fiber_distance(Euclidean(), 0.0), 0.0)

    def test_log_one_plus(self):
        """Test u = ln(1 + t) gives arctan(sqrt(T))"""
        for T in (1.0, 100.0, 1e8):
            self.assertAlmostEqual(fiber_distance(log_one_plus(), T), math.atan(math.sqrt(T)), places=8)

    def test_calabi_log_bounds(self):
        """Test the certified bounds bracket d(T)"""
        profile = CalabiLog(2.0, 1.0, 3.0)
        for T in (1.0, 1e3, 1e6, 1e12):
            d = fiber_distance(profile, T)
            self.assertLessEqual(calabi_log_lower_bound(profile, T), d)
            self.assertLessEqual(d, profile.upper_bound(T))

    def test_monotone(self):
        """Test d is strictly increasing for every profile"""
        grid = [0.5, 5.0, 50.0, 5e3, 5e6, 5e9]
        for profile in (Euclidean(), CalabiLog(2.0, 1.0, 3.0), SlowGrowth(), LogPower(), log_one_plus()):
            distances = [fiber_distance(profile, T) for T in grid]
            self.assertTrue(all(b > a for a, b in zip(distances, distances[1:])), profile.name)

    def test_negative_norm(self):
        """Test t < 0 is rejected"""
        with self.assertRaises(ProfileError):
            fiber_distance(Euclidean(), -1.0)

    def test_invariant_violation(self):
        """Test the offending t is reported"""
        shrinking = Custom(lambda t: -t, lambda t: -np.ones(np.shape(t)), lambda t: np.zeros(np.shape(t)))
        with self.assertRaises(ProfileError) as context:
            fiber_distance(shrinking, 10.0)
        self.assertAlmostEqual(context.exception.t, 1e-6)

    def test_late_violation(self):
        """Test w turning negative past t = 4 is caught there"""
        late = Custom(lambda t: t, lambda t: np.ones(np.shape(t)), lambda t: -np.asarray(t) / 16)
        with self.assertRaises(ProfileError) as context:
            fiber_distance(late, 100.0)
        self.assertGreaterEqual(context.exception.t, 4.0)
        self.assertLess(context.exception.t, 4.5)


class ProfileTest(SimpleTestCase):
    """Test the radial profiles"""

    def test_calabi_log_parameters(self):
        """Test C > 1 and A > B / ln C"""
        with self.assertRaises(ProfileError):
            CalabiLog(2.0, 1.0, 1.0)
        with self.assertRaises(ProfileError):
            CalabiLog(0.5, 1.0, math.e)
        with self.assertRaises(ProfileError):
            CalabiLog(-1.0, 1.0, 3.0)

    def test_calabi_log_weight(self):
        """Test w = u' + t u''"""
        profile = CalabiLog(2.0, 1.0, 3.0)
        t = np.array([0.0, 0.5, 20.0, 1e6])
        expected = profile.u_prime(t) + t * profile.u_second(t)
        self.assertTrue(np.allclose(profile.weight(t), expected, rtol=1e-12))

    def test_calabi_log_derivative(self):
        """Test u' against a numerical derivative of u"""
        profile = CalabiLog(2.0, 1.0, 3.0)
        for t in (0.5, 7.0, 300.0):
            numeric = float(central_difference(lambda h: profile.u(t + h)))
            self.assertAlmostEqual(numeric, profile.u_prime(t), places=9)

    def test_slow_growth_positivity(self):
        """Test u' > 0 and u' + t u'' > 0 log-uniformly on [1e-6, 1e12]"""
        check_profile(SlowGrowth(), 1e12)

    def test_slow_growth_alpha(self):
        """Test ln ln alpha must exceed 2"""
        with self.assertRaises(ProfileError):
            SlowGrowth(alpha=1000.0)

    def test_slow_growth_equation(self):
        """Test (t u')' = (2k / C) h below the bridge"""
        profile = SlowGrowth(k=2.0)
        for t in (5.0, 1000.0):
            numeric = float(central_difference(lambda h: (t + h) * profile.u_prime(t + h)))
            self.assertAlmostEqual(numeric / profile.weight(t), 1.0, places=6)

    def test_slow_growth_total(self):
        """Test C is the integral of h and u' -> 2k / t"""
        profile = SlowGrowth()
        self.assertAlmostEqual(profile.mass(1e300) / profile.total, 1.0, places=2)
        self.assertAlmostEqual(profile.u_prime(1e12) * 1e12, 2.0, places=3)

    def test_slow_growth_bridge(self):
        """Test h is continuous, positive and eventually decreasing on the bridge"""
        profile = SlowGrowth()
        a = profile.alpha
        for edge in (a, a + 1.0):
            below, above = profile.h(np.array([edge - 1e-9, edge + 1e-9]))
            self.assertAlmostEqual(below / above, 1.0, places=5)
        bridge = profile.h(np.linspace(a + 0.01, a + 1.0, 500))
        self.assertTrue(np.all(bridge > 0))
        self.assertTrue(np.all(np.diff(bridge) < 0))

    def test_log_power_derivative(self):
        """Test u' is finite at 0 and (t u')' matches w"""
        profile = LogPower(delta=1.0, alpha=0.5)
        self.assertAlmostEqual(float(profile.u_prime(0.0)), 1.0 / (2 * math.log(2) ** 1.5))
        for t in (0.3, 12.0):
            numeric = float(central_difference(lambda h: (t + h) * profile.u_prime(t + h)))
            self.assertAlmostEqual(numeric / profile.weight(t), 1.0, places=6)

    def test_build_profile(self):
        """Test profiles by report name"""
        self.assertEqual(build_profile('calabi-log', A=2, B=1, C=3), CalabiLog(2, 1, 3))
        self.assertIsInstance(build_profile('euclidean'), Euclidean)
        with self.assertRaises(ProfileError):
            build_profile('cigar')
        with self.assertRaises(ProfileError):
            build_profile('slow-growth', beta=3)


class CompletenessTest(SimpleTestCase):
    """Test completeness_verdict"""

    def test_divergent(self):
        """Test Euclidean, CalabiLog, SlowGrowth and LogPower(1/2) are complete"""
        for profile in (Euclidean(), CalabiLog(2.0, 1.0, 3.0), SlowGrowth(), LogPower(alpha=0.5)):
            self.assertTrue(completeness_verdict(profile), profile.name)

    def test_convergent(self):
        """Test ln(1 + t) and LogPower(2) have finite fiber length"""
        self.assertFalse(completeness_verdict(log_one_plus()))
        self.assertFalse(completeness_verdict(LogPower(alpha=2.0)))

    def test_exponents(self):
        """Test the fitted exponents of the log-power and Calabi tails"""
        self.assertAlmostEqual(decay_exponent(LogPower(alpha=2.0)), 1.5, places=2)
        self.assertAlmostEqual(decay_exponent(CalabiLog(2.0, 1.0, 3.0)), 1.0, places=2)


class HadamardOrderTest(SimpleTestCase):
    """Test log_fiber_distance and hadamard_order"""

    def test_slow_growth_limit(self):
        """Test ln ln x / ln d is within 5% of 2 at ln ln x = 1000"""
        ratio = 1000.0 / log_fiber_distance(SlowGrowth(), 1000.0)
        self.assertLess(abs(ratio - 2.0), 0.1)

    def test_slow_growth_closed_form(self):
        """Test the doubly exponential tail against the exponential integral"""
        profile = SlowGrowth()
        mu0 = math.log(math.log(profile.tail_start))
        base = fiber_distance(profile, profile.tail_start)
        expected = math.log(base + 0.5 * math.sqrt(profile.scale) * (expi(150.0) - expi(mu0 / 2)))
        self.assertAlmostEqual(log_fiber_distance(profile, 300.0) / expected, 1.0, places=8)

    def test_paths_agree(self):
        """Test the ln ln t substitution agrees with plain quadrature at 1e12"""
        ell = math.log(math.log(1e12))
        for profile in (SlowGrowth(), LogPower(), CalabiLog(2.0, 1.0, 3.0)):
            expected = math.log(fiber_distance(profile, 1e12))
            self.assertAlmostEqual(log_fiber_distance(profile, ell), expected, places=7)

    def test_slow_growth_report(self):
        """Test the default doubly exponential grid"""
        report = hadamard_order(SlowGrowth())
        self.assertTrue(report.divergent)
        self.assertTrue(report.is_monotone())
        self.assertLess(abs(report.estimated_order - 2.0), 0.1)
        self.assertEqual(report.trend, 'decreasing')
        self.assertEqual(report.rows[-1]['t'], math.inf)

    def test_log_power_order(self):
        """Test alpha = 1/2 gives order 2 / (1 - alpha) = 4"""
        report = hadamard_order(LogPower(alpha=0.5), loglog=(1000.0,))
        self.assertAlmostEqual(report.estimated_order, 4.0, delta=0.05)

    def test_euclidean(self):
        """Test ratios decrease towards 0"""
        report = hadamard_order(Euclidean())
        self.assertEqual(len(report.rows), 12)
        self.assertEqual(report.trend, 'decreasing')
        self.assertAlmostEqual(report.estimated_order, math.log(math.log(1e12)) / (0.5 * math.log(1e12)), places=8)

    def test_calabi_log_certificate(self):
        """Test d(x) <= C sqrt(ln x) with certified bounds on the grid"""
        report = hadamard_order(CalabiLog(2.0, 1.0, 3.0))
        self.assertTrue(report.certified)
        self.assertTrue(report.divergent)
        for row in report.rows:
            self.assertLessEqual(row['d'], report.certificate_constant * math.sqrt(math.log(row['t'])) + 1e-12)

    def test_csv(self):
        """Test the t, d, ratio columns"""
        lines = hadamard_order(Euclidean(), xs=[100.0, 1e4]).to_csv().splitlines()
        self.assertEqual(lines[0], 't,d,ratio')
        self.assertEqual(len(lines), 3)
        t, d, _ = lines[1].split(',')
        self.assertEqual(float(t), 100.0)
        self.assertAlmostEqual(float(d), 10.0, places=8)

    def test_small_x(self):
        """Test x <= e is rejected"""
        with self.assertRaises(ProfileError):
            hadamard_order(Euclidean(), xs=[2.0])


class PathTest(SimpleTestCase):
    """Test path_length and gaugenspe_distance_bounds"""

    def test_euclidean_polyline(self):
        """Test straight segments in the flat metric"""
        g = euclidean_metric(3)
        path = [(0, 0, 0), (3, 0, 0), (3, 4j, 0)]
        self.assertAlmostEqual(path_length(g, path), 7.0, places=9)

    def test_pure_fiber(self):
        """Test (0, 0, w) gives lower = upper = |w|"""
        lower, upper = gaugenspe_distance_bounds((0, 0, 3 - 4j))
        self.assertAlmostEqual(lower, 5.0)
        self.assertAlmostEqual(upper, 5.0, delta=1e-6)

    def test_origin(self):
        """Test the base point"""
        self.assertEqual(gaugenspe_distance_bounds((0, 0, 0)), (0.0, 0.0))

    def test_base_direction(self):
        """Test (1, 0, 0) has distance 1"""
        lower, upper = gaugenspe_distance_bounds((1, 0, 0))
        self.assertAlmostEqual(lower, 1.0)
        self.assertAlmostEqual(upper, 1.0, places=9)

    def test_random_points(self):
        """Test lower <= upper = |z| + |z1| + |z2| at 1000 points"""
        rng = np.random.default_rng(5)
        points = (rng.standard_normal((1000, 3)) + 1j * rng.standard_normal((1000, 3))) * 3
        for point in points:
            lower, upper = gaugenspe_distance_bounds(point)
            self.assertLessEqual(lower, upper + 1e-9)
            self.assertAlmostEqual(upper, float(np.sum(np.abs(point))), delta=1e-7)

    def test_fiber_ray_equality(self):
        """Test equality along (0, 0, R)"""
        for R in (1.0, 1e2, 1e4):
            lower, upper = gaugenspe_distance_bounds((0, 0, R))
            self.assertLess(abs(upper - lower), 1e-6 * max(R, 1.0))


class QuasiIsometryTest(SimpleTestCase):
    """Test quasi_isometry_distortion"""

    def test_scaled_twist(self):
        """Test b2 -> 2 b2 has distortion exactly 2"""
        distortion = quasi_isometry_distortion(dps_bundle(1.0), dps_bundle(2.0), samples=50)
        self.assertAlmostEqual(distortion, 2.0, places=8)

    def test_identity(self):
        """Test a bundle against itself"""
        self.assertAlmostEqual(quasi_isometry_distortion(dps_bundle(), dps_bundle(), samples=20), 1.0, places=8)

    def test_not_isomorphic(self):
        """Test different characters have no witness"""
        other = TypeIII((rat(1, 2), rat(0)), 0, 1.0, 1j)
        with self.assertRaises(BundleError):
            quasi_isometry_distortion(dps_bundle(), other)


class OdGrowthTest(SimpleTestCase):
    """Test verify_Od_growth"""

    def test_dps(self):
        """Test z2^2 lies in O_2 and z2^3 does not"""
        report = verify_Od_growth(dps_bundle(), 2)
        self.assertEqual([row.form for row in report.members], ['1', 'z2', 'z2^2'])
        self.assertTrue(all(row.bounded for row in report.members))
        self.assertEqual(report.witness.form, 'z2^3')
        self.assertFalse(report.witness.bounded)
        self.assertTrue(report.passed)
        self.assertTrue(all_passed(report.to_results()))

    def test_constants_only(self):
        """Test an irrational character leaves constants for every d"""
        E = TypeIII((AngleParam.irrational(0.3), rat(0)), 0, 1.0, 1j)
        for d in (0, 3):
            report = verify_Od_growth(E, d)
            self.assertEqual([row.form for row in report.members], ['1'])
            self.assertIsNone(report.witness)
            self.assertTrue(report.passed)

    def test_type_ii_linear_growth(self):
        """Test h = 1, d = 1: the (0, 1) section grows linearly along fibers"""
        first = LineBundleAH(1, 1j, (rat(1, 3), rat(0)))
        report = verify_Od_growth(TypeII(first, ah_dual(first)), 1)
        self.assertEqual([(row.degree, row.bounded) for row in report.members], [(0, True), (1, True)])
        self.assertEqual([row.form for row in report.members], ['1', 'xi1^0 xi2^1 [section = 1]'])
        self.assertEqual(report.witness.form, 'xi1^0 xi2^2 [section = 1]')
        self.assertEqual(report.witness.degree, 2)
        self.assertFalse(report.witness.bounded)
        self.assertTrue(report.passed)

    def test_order_three(self):
        """Test m = 3 skips degrees 1 and 2"""
        E = TypeIII((rat(1, 3), rat(0)), 0, 1.0, 1j)
        report = verify_Od_growth(E, 1)
        self.assertEqual([row.form for row in report.members], ['1'])
        self.assertEqual(report.witness.form, 'z2^3')

    def test_bad_degree(self):
        """Test d must be a nonnegative integer"""
        with self.assertRaises(BundleError):
            verify_Od_growth(dps_bundle(), 1.5)
