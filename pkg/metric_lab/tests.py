import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from bundle_algebra.angles import AngleParam
from bundle_algebra.bundles import TypeII, classify
from bundle_algebra.line_bundles import LineBundleAH
from common.exceptions import BundleError
from common.results import all_passed

from .curvature import (
    ah_fiber_metric, cigar, curvature_grid, fiber_chern_curvature, gauss_curvature,
    identity_fiber_metric, paun_curvature_closed_form, paun_fiber_metric, superharmonic_defect,
    validate_bi_candidate,
)
from .fields import (
    build_bi_metric, build_flat_typeI, build_metric, build_typeII_metric, build_typeIII_metric,
    euclidean_metric, gaugenspe_metric,
)
from .verification import (
    chern_ricci_defect, component_derivative, deck_invariance_defect, determinant_defect,
    gauduchon_defect, kahler_defect, positivity_margin, pullback, run_metric_suite, sample_points,
)

TAU = 0.2 + 1.3j


def rat(p, q=1):
    return AngleParam.rational(p, q)


def typeII_bundle(tau=TAU, degree=1):
    return TypeII(
        LineBundleAH(degree, tau, (rat(1, 3), rat(0))),
        LineBundleAH(-degree, tau, (rat(0), rat(1, 2))),
    )


class EuclideanMetricTest(SimpleTestCase):
    """Test the defects vanish on the Euclidean metric"""

    def setUp(self):
        self.g = euclidean_metric(3)
        self.points = sample_points(self.g, 20)

    def test_defects(self):
        """Test Chern-Ricci, Gauduchon and Kahler defects are zero"""
        self.assertLess(np.max(chern_ricci_defect(self.g, self.points)), 1e-12)
        self.assertLess(np.max(gauduchon_defect(self.g, self.points)), 1e-12)
        self.assertLess(np.max(kahler_defect(self.g, self.points)), 1e-12)

    def test_identity_pullback(self):
        """Test pulling back by the identity map"""
        moved = pullback(self.g, lambda p: p, self.points)
        self.assertTrue(np.allclose(moved, self.g.eval(self.points), atol=1e-12))

    def test_scaling_pullback(self):
        """Test (z, xi) -> (2z, 2xi) pulls back to 4 times the identity"""
        moved = pullback(self.g, lambda p: 2 * p, self.points[:3])
        self.assertTrue(np.allclose(moved, 4 * np.eye(3), atol=1e-12))

    def test_wrong_dimension(self):
        """Test points of the wrong size are rejected"""
        with self.assertRaises(BundleError):
            self.g.eval(np.zeros(2))


class FlatTypeITest(SimpleTestCase):
    """Test build_flat_typeI"""

    def setUp(self):
        self.g = build_flat_typeI(LineBundleAH(0, TAU, (rat(1, 2), rat(0))), LineBundleAH(0, TAU, (rat(0), rat(1, 3))))
        self.points = sample_points(self.g, 50)

    def test_identity(self):
        """Test every point carries the identity matrix"""
        self.assertTrue(np.allclose(self.g.eval(self.points), np.eye(3)))

    def test_deck_invariance(self):
        """Test unitary multipliers preserve the metric"""
        self.assertLess(np.max(deck_invariance_defect(self.g, self.points)), 1e-12)

    def test_kahler(self):
        """Test constant coefficients give zero Kahler defect"""
        self.assertLess(np.max(kahler_defect(self.g, self.points)), 1e-12)

    def test_nonzero_degree(self):
        """Test degree 1 lines are rejected"""
        with self.assertRaises(BundleError):
            build_flat_typeI(LineBundleAH(1, TAU), LineBundleAH(-1, TAU))


class TypeIIMetricTest(SimpleTestCase):
    """Test build_typeII_metric"""

    def setUp(self):
        self.g = build_typeII_metric(typeII_bundle())
        self.points = sample_points(self.g, 200)

    def test_zero_section_origin(self):
        """Test z = 0 gives the identity for any fiber point"""
        points = np.array([[0, 3 + 1j, -2j], [0, 0.5, 7]], dtype=complex)
        self.assertTrue(np.allclose(self.g.eval(points), np.eye(3)))

    def test_first_entry(self):
        """Test g_{z z-bar} = 1 + exp(-pi) pi^2 at H = 1, (1, 1, 0)"""
        g = build_typeII_metric(typeII_bundle(tau=1j))
        value = g.eval(np.array([1.0, 1.0, 0.0]))[0, 0]
        self.assertAlmostEqual(value, 1 + np.exp(-np.pi) * np.pi ** 2, places=12)

    def test_coframe_matches_entries(self):
        """Test the closed-form entries equal Theta^T conj(Theta)"""
        frame = self.g.frame(self.points)
        rebuilt = np.einsum('...ai,...aj->...ij', frame, np.conj(frame))
        G = self.g.eval(self.points)
        scale = np.linalg.norm(G, axis=(-2, -1))
        self.assertLess(np.max(np.linalg.norm(rebuilt - G, axis=(-2, -1)) / scale), 1e-13)

    def test_determinant(self):
        """Test det g = 1 at 1000 points"""
        points = sample_points(self.g, 1000, seed=7)
        self.assertLess(np.max(determinant_defect(self.g, points)), 1e-10)

    def test_positive(self):
        """Test g is positive definite"""
        self.assertGreater(np.min(positivity_margin(self.g, self.points[:50])), 0.0)

    def test_deck_invariance(self):
        """Test both generators preserve the metric"""
        self.assertLess(np.max(deck_invariance_defect(self.g, self.points)), 1e-10)

    def test_chern_ricci(self):
        """Test zero Chern-Ricci curvature"""
        self.assertLess(np.max(chern_ricci_defect(self.g, self.points[:40])), 1e-6)

    def test_gauduchon(self):
        """Test the metric is Gauduchon"""
        self.assertLess(np.max(gauduchon_defect(self.g, self.points[:40])), 1e-6)

    def test_not_kahler(self):
        """Test the Kahler defect is visible away from z = 0"""
        point = np.array([0.5 + 0.5j, 1.0, 0.0])
        self.assertGreater(float(kahler_defect(self.g, point)), 0.1)

    def test_requires_type_ii(self):
        """Test other bundle types are rejected"""
        with self.assertRaises(BundleError):
            build_typeII_metric(classify(rat(0), rat(0), 0, 1, 1j))

    def test_suite(self):
        """Test the gauduchon, ricci and invariance suite passes"""
        results = run_metric_suite(self.g, ('gauduchon', 'ricci', 'invariance'), samples=30)
        self.assertEqual([r.check for r in results], ['gauduchon', 'ricci', 'invariance'])
        self.assertTrue(all_passed(results))
        self.assertTrue(all(r.max_defect < 1e-6 for r in results))


class TypeIIIMetricTest(SimpleTestCase):
    """Test build_typeIII_metric"""

    def setUp(self):
        self.g = gaugenspe_metric(1j)
        self.points = sample_points(self.g, 200)

    def test_closed_form(self):
        """Test b = (1, conj tau) gives [[1, 0, 0], [0, 1, -z], [0, -z-bar, 1 + |z|^2]]"""
        z = self.points[:, 0]
        expected = np.zeros((len(z), 3, 3), dtype=complex)
        expected[:, 0, 0] = expected[:, 1, 1] = 1
        expected[:, 1, 2] = -z
        expected[:, 2, 1] = -np.conj(z)
        expected[:, 2, 2] = 1 + np.abs(z) ** 2
        self.assertTrue(np.allclose(self.g.eval(self.points), expected, atol=1e-13))
        self.assertTrue(np.allclose(self.g.eval(np.array([0, 2.0, 1j])), np.eye(3)))

    def test_determinant(self):
        """Test det g = 1"""
        self.assertLess(np.max(determinant_defect(self.g, self.points)), 1e-10)
        self.assertLess(np.max(np.abs(np.linalg.det(self.g.eval(self.points)) - 1)), 1e-10)

    def test_descends(self):
        """Test the generator tau pulls back to g at 20 points"""
        action = self.g.deck[1]
        points = self.points[:20]
        self.assertTrue(np.allclose(pullback(self.g, action, points), self.g.eval(points), rtol=0, atol=1e-10))

    def test_chern_ricci_and_gauduchon(self):
        """Test zero Chern-Ricci curvature and the Gauduchon identity"""
        self.assertLess(np.max(chern_ricci_defect(self.g, self.points[:40])), 1e-6)
        self.assertLess(np.max(gauduchon_defect(self.g, self.points[:40])), 1e-6)

    def test_kahler_defect_at_one(self):
        """Test d_z g_{z2 z2-bar} = z-bar shows up at z = 1"""
        self.assertGreater(float(kahler_defect(self.g, np.array([1.0, 0.3, -0.2]))), 0.1)

    def test_split_data_is_kahler(self):
        """Test b2 = b1 tau gives a Kahler metric equal to the pullback of the flat one"""
        b1 = 0.7 - 0.4j
        g = build_typeIII_metric(b1, b1 * TAU, (rat(1, 2), rat(0)), TAU)
        points = sample_points(g, 30)
        self.assertLess(np.max(kahler_defect(g, points)), 1e-8)

        def shear(p):
            z, z1, z2 = p[..., 0], p[..., 1], p[..., 2]
            return np.stack([z, z1 - b1 * z * z2, z2], axis=-1)

        flat = pullback(euclidean_metric(3), shear, points)
        self.assertTrue(np.allclose(flat, g.eval(points), atol=1e-9))

    @settings(max_examples=10, deadline=None)
    @given(
        st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
        st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
        st.integers(0, 5),
    )
    def test_general_parameters(self, b1, b2, p):
        """Test invariance, det g = 1 and the Gauduchon identity for arbitrary (b1, b2)"""
        g = build_typeIII_metric(b1, b2, (rat(p, 6), rat(1, 4)), TAU)
        points = sample_points(g, 20, fiber_radius=3.0)
        self.assertLess(np.max(deck_invariance_defect(g, points)), 1e-10)
        self.assertLess(np.max(determinant_defect(g, points)), 1e-10)
        self.assertLess(np.max(gauduchon_defect(g, points)), 1e-6)

    def test_component_derivatives_agree(self):
        """Test complex-step and central differences agree to 1e-8"""
        points = self.points[:10]
        for coord in range(6):
            fast = component_derivative(self.g, points, coord, 'complex_step')
            slow = component_derivative(self.g, points, coord, 'central')
            self.assertLess(np.max(np.abs(fast - slow)), 1e-8)

    def test_component_derivative_value(self):
        """Test d/dx and d/dy of 1 + |z|^2"""
        point = np.array([0.3 + 0.4j, 1.0, 2.0])
        self.assertAlmostEqual(component_derivative(self.g, point, 0)[2, 2], 0.6, places=10)
        self.assertAlmostEqual(component_derivative(self.g, point, 3)[2, 2], 0.8, places=10)

    def test_build_metric_dispatch(self):
        """Test normalized Type III data gets its own metric"""
        E = classify(rat(1, 3), rat(0), 2, 5, 1j)
        g = build_metric(E)
        self.assertEqual(g.label, 'typeIII')
        self.assertLess(np.max(deck_invariance_defect(g, sample_points(g, 30))), 1e-10)


class BIMetricTest(SimpleTestCase):
    """Test the flat line bundle metrics"""

    def test_rational_invariance(self):
        """Test d(z + xi^k) and the cigar descend for a character of order 6"""
        g = build_bi_metric(LineBundleAH(0, TAU, (rat(1, 2), rat(1, 3))))
        points = sample_points(g, 50, fiber_radius=3.0)
        self.assertLess(np.max(deck_invariance_defect(g, points)), 1e-10)
        self.assertGreater(np.min(positivity_margin(g, points)), 0.0)

    def test_irrational_invariance(self):
        """Test the rotationally symmetric metric descends"""
        g = build_bi_metric(LineBundleAH(0, TAU, (AngleParam.irrational(0.3), rat(0))))
        points = sample_points(g, 50)
        self.assertLess(np.max(deck_invariance_defect(g, points)), 1e-10)

    def test_numerical_h_prime(self):
        """Test a user h without derivative"""
        g = build_bi_metric(LineBundleAH(0, TAU, (rat(1, 2), rat(0))), C=2.0, h=lambda xi: xi ** 2 + 3 * xi ** 4)
        point = np.array([0.1, 0.5 + 0.5j])
        expected = 2.0 * np.conj(2 * point[1] + 12 * point[1] ** 3)
        self.assertAlmostEqual(g.eval(point)[0, 1], expected, places=10)

    def test_requires_flat_line(self):
        """Test nonzero degree is rejected"""
        with self.assertRaises(BundleError):
            build_bi_metric(LineBundleAH(1, TAU))


class FiberCurvatureTest(SimpleTestCase):
    """Test fiber_chern_curvature"""

    def test_identity(self):
        """Test a constant metric is flat"""
        R = fiber_chern_curvature(identity_fiber_metric(2), np.array([0.3 + 1j, -2.0]))
        self.assertTrue(np.allclose(R, 0, atol=1e-12))

    def test_paun_at_i(self):
        """Test k = 1, z = i"""
        R = fiber_chern_curvature(paun_fiber_metric(1.0), 1j)
        self.assertTrue(np.allclose(R, 0.25 * np.array([[1, -1], [-1, 0]]), atol=1e-10))

    def test_paun_grid(self):
        """Test the closed form on a 10 x 10 grid for k in {0.5, 1, 2}"""
        ticks = np.linspace(-2, 2, 10)
        z = (ticks[:, None] + 1j * ticks[None, :]).ravel()
        for k in (0.5, 1.0, 2.0):
            R = fiber_chern_curvature(paun_fiber_metric(k), z)
            expected = paun_curvature_closed_form(k, z.imag)
            self.assertLess(np.max(np.abs(R - expected)), 1e-6)

    def test_paun_sign(self):
        """Test the leading entry is +1/4k at y = 0 and matches the computed curvature"""
        R = fiber_chern_curvature(paun_fiber_metric(1.0), np.array([0.3 + 0.0j]))[0]
        self.assertAlmostEqual(float(paun_curvature_closed_form(1.0, 0.0)[0, 0]), 0.25)
        self.assertAlmostEqual(float(R[0, 0].real), 0.25, places=6)

    def test_ah_weight(self):
        """Test the curvature form of exp(-pi H |z|^2) is pi H"""
        H = 1 / 1.3
        metric = ah_fiber_metric(H)
        z = np.array([0.0, 0.5 - 0.2j, 1 + 1j])
        R = fiber_chern_curvature(metric, z)[..., 0, 0]
        self.assertTrue(np.allclose(R / metric.at(z)[..., 0, 0], np.pi * H, atol=1e-10))

    def test_eval(self):
        """Test h(v, v-bar) for the Paun metric"""
        metric = paun_fiber_metric(2.0)
        self.assertAlmostEqual(metric.eval(1j, np.array([1.0, 1.0])), 0 + 2.0)
        self.assertAlmostEqual(metric.eval(0, np.array([1.0, 1.0])), 3.0)

    def test_bad_k(self):
        """Test k must be positive"""
        with self.assertRaises(BundleError):
            paun_fiber_metric(0)


class GaussCurvatureTest(SimpleTestCase):
    """Test gauss_curvature and superharmonic_defect"""

    def setUp(self):
        rng = np.random.default_rng(11)
        self.xi = 5 * np.sqrt(rng.random(500)) * np.exp(2j * np.pi * rng.random(500))

    def test_flat(self):
        """Test the constant factor"""
        self.assertTrue(np.allclose(gauss_curvature(lambda xi: np.ones(np.shape(xi)), self.xi), 0))

    def test_cigar(self):
        """Test K = 2 / (1 + |xi|^2) on |xi| <= 5"""
        K = gauss_curvature(cigar, self.xi)
        self.assertLess(np.max(np.abs(K - 2 / (1 + np.abs(self.xi) ** 2))), 1e-6)

    def test_negative_example(self):
        """Test |xi|^2 + 1 / (1 + |xi|^2) has nonpositive curvature"""
        def conformal(xi):
            t = np.abs(xi) ** 2
            return t + 1 / (1 + t)

        self.assertLessEqual(np.max(gauss_curvature(conformal, self.xi)), 1e-8)

    def test_superharmonic(self):
        """Test the defect for constant, cigar and inverse cigar factors"""
        self.assertEqual(superharmonic_defect(lambda xi: np.ones(np.shape(xi)), self.xi), 0.0)
        self.assertEqual(superharmonic_defect(cigar, self.xi), 0.0)
        self.assertGreater(superharmonic_defect(lambda xi: 1 + np.abs(xi) ** 2, self.xi), 0.0)

    def test_grid(self):
        """Test CSV-ready grid rows"""
        rows = curvature_grid(lambda xi: gauss_curvature(cigar, xi), extent=1.0, steps=3)
        self.assertEqual(len(rows), 9)
        self.assertEqual(set(rows[0]), {'re', 'im', 'value'})
        center = [row for row in rows if row['re'] == 0 and row['im'] == 0][0]
        self.assertAlmostEqual(center['value'], 2.0, places=6)


class ValidateBICandidateTest(SimpleTestCase):
    """Test validate_bi_candidate"""

    def test_order_one(self):
        """Test k = 1 with the cigar and h = xi passes"""
        results = validate_bi_candidate((rat(0), rat(0)), 1, cigar, lambda xi: xi)
        self.assertTrue(all_passed(results))

    def test_h_not_invariant(self):
        """Test k = 2 with h = xi fails on h"""
        results = validate_bi_candidate((rat(1, 2), rat(0)), 2, cigar, lambda xi: xi)
        failed = [r.check for r in results if not r.passed]
        self.assertEqual(failed, ['h_invariance'])

    def test_irrational_nonconstant_h(self):
        """Test an irrational character forces h constant"""
        results = validate_bi_candidate((AngleParam.irrational(0.3), rat(0)), 1, cigar, lambda xi: xi)
        failed = [r.check for r in results if not r.passed]
        self.assertEqual(failed, ['h_constant'])

    def test_wrong_order(self):
        """Test k must be the order of the character"""
        results = validate_bi_candidate((rat(1, 2), rat(1, 3)), 2, cigar, lambda xi: xi ** 2)
        self.assertFalse(results[0].passed)
        self.assertEqual(results[0].check, 'order')

    def test_subharmonic_rejected(self):
        """Test ln(1 + |xi|^2) is rejected"""
        results = validate_bi_candidate((rat(0), rat(0)), 1, lambda xi: 1 + np.abs(xi) ** 2, lambda xi: xi)
        self.assertFalse(results[-1].passed)
