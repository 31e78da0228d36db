from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from common.exceptions import BundleError
from modular_lattice.lattice import ModularMatrix, Tau

from .angles import AngleParam, combine, common_order
from .bundles import (
    TypeI, TypeII, TypeIII, classify, deck_generators, normalize, normalize_witness, transport,
)
from .isomorphism import (
    BIFamily, admits_bi_nonneg, admits_flat_kahler, bundles_isomorphic,
    total_spaces_biholomorphic, verify_witness,
)
from .line_bundles import LineBundleAH, ah_degree, ah_dual, ah_power, ah_tensor, h0_line, is_trivial

TAU = 0.2 + 1.3j


def rat(p, q=1):
    return AngleParam.rational(p, q)


def line(degree, theta=(Fraction(0), Fraction(0)), tau=TAU):
    return LineBundleAH(degree, tau, theta)


def dps(b2=1, tau=1j):
    return TypeIII((rat(0), rat(0)), 0, b2, tau)


def angles():
    rational = st.builds(rat, st.integers(-12, 12), st.integers(1, 12))
    irrational = st.builds(AngleParam.irrational, st.floats(0.01, 0.99))
    return st.one_of(rational, irrational)


class AngleParamTest(SimpleTestCase):
    """Test exact angle arithmetic"""

    def test_rational_reduction(self):
        """Test angles are stored mod 1"""
        self.assertEqual(rat(5, 4), rat(1, 4))
        self.assertTrue((rat(1, 2) + rat(1, 2)).is_zero())
        self.assertEqual(rat(-1, 3).to_json(), ['rat', 2, 3])

    def test_irrational_cancellation(self):
        """Test an irrational angle cancels only against itself"""
        angle = AngleParam.irrational(2 ** 0.5 - 1)
        self.assertTrue((angle - angle).is_zero())
        self.assertFalse((angle + angle).is_zero())
        self.assertFalse((angle - AngleParam.irrational(0.25)).is_rational)
        self.assertEqual(angle.to_json()[0], 'irr')

    def test_combine_and_order(self):
        """Test integer combinations and the common order"""
        self.assertEqual(combine((2, 3), (rat(1, 4), rat(1, 3))), rat(1, 2))
        self.assertEqual(common_order((rat(1, 2), rat(1, 3))), 6)
        self.assertEqual(common_order((rat(0), rat(0))), 1)
        self.assertIsNone(common_order((AngleParam.irrational(0.3), rat(0))))

    def test_phase(self):
        """Test exp(2 pi i theta)"""
        self.assertAlmostEqual(rat(1, 4).phase(), 1j)

    def test_bad_denominator(self):
        """Test a nonpositive denominator is rejected"""
        with self.assertRaises(BundleError):
            AngleParam.rational(1, 0)


class LineBundleTest(SimpleTestCase):
    """Test Appell-Humbert line bundles"""

    def test_degree(self):
        """Test the degree law deg = H Im tau"""
        self.assertEqual(ah_degree(line(0)), 0)
        self.assertEqual(ah_degree(line(1)), 1)
        self.assertEqual(ah_degree(line(-2)), -2)
        self.assertAlmostEqual(line(1).hermitian_form, 1 / TAU.imag)

    def test_tensor(self):
        """Test H adds and alpha multiplies"""
        L = line(1, (rat(1, 3), rat(1, 5)))
        self.assertEqual(ah_tensor(LineBundleAH.trivial(TAU), L), L)
        half = line(0, (rat(1, 2), rat(0)))
        self.assertTrue(is_trivial(ah_tensor(half, half)))
        self.assertEqual(ah_tensor(line(1), line(-1)).degree, 0)
        self.assertTrue(is_trivial(ah_tensor(L, ah_dual(L))))

    def test_power(self):
        """Test powers and negative powers"""
        L = line(1, (rat(1, 3), rat(0)))
        self.assertEqual(ah_power(L, 3), line(3, (rat(0), rat(0))))
        self.assertEqual(ah_power(L, -1), ah_dual(L))
        self.assertTrue(is_trivial(ah_power(L, 0)))

    def test_tensor_needs_same_modulus(self):
        """Test lines over different moduli do not tensor"""
        with self.assertRaises(BundleError):
            ah_tensor(line(0), line(0, tau=2j))

    def test_sections(self):
        """Test h0 of line bundles"""
        self.assertEqual(h0_line(LineBundleAH.trivial(TAU)), 1)
        self.assertEqual(h0_line(line(0, (rat(1, 2), rat(0)))), 0)
        self.assertEqual(h0_line(line(3)), 3)
        self.assertEqual(h0_line(line(-1)), 0)
        self.assertEqual(h0_line(line(0, (AngleParam.irrational(0.3), rat(0)))), 0)

    def test_factor_cocycle(self):
        """Test the automorphy factor is a cocycle on the generators"""
        L = line(2, (rat(1, 3), rat(1, 4)))
        z = np.array([0.1 + 0.2j, -0.3 + 0.7j])
        one, tau = 1.0, TAU
        lhs = L.factor(1, 1, z)
        rhs = L.factor(1, 0, z + tau) * L.factor(0, 1, z)
        self.assertTrue(np.allclose(lhs, rhs, rtol=1e-12))
        rhs = L.factor(0, 1, z + one) * L.factor(1, 0, z)
        self.assertTrue(np.allclose(lhs, rhs, rtol=1e-12))


class ClassifyTest(SimpleTestCase):
    """Test classify and normal forms"""

    def test_dps(self):
        """Test theta = 0, b = (0, 1) over i is Type III"""
        E = classify(rat(0), rat(0), 0, 1, 1j)
        self.assertIsInstance(E, TypeIII)
        self.assertEqual(E.b2, 1)

    def test_split(self):
        """Test b2 = b1 tau gives L + L"""
        E = classify(rat(1, 2), rat(0), 1, TAU, TAU)
        self.assertIsInstance(E, TypeI)
        self.assertEqual(E.first, E.second)

    def test_normalized_twist(self):
        """Test b1 is normalized to 0 and b2 becomes b2 - b1 tau"""
        E = classify(rat(1, 3), rat(0), 2, 5, 1j)
        self.assertIsInstance(E, TypeIII)
        self.assertEqual(E.b1, 0)
        self.assertAlmostEqual(E.b2, 5 - 2j)

    def test_type_iii_rejects_split_data(self):
        """Test Type III needs b2 != b1 tau"""
        with self.assertRaises(BundleError):
            TypeIII((rat(0), rat(0)), 1, 1j, 1j)

    def test_type_ii_degrees(self):
        """Test Type II needs opposite nonzero degrees"""
        with self.assertRaises(BundleError):
            TypeII(line(1), line(-2))
        with self.assertRaises(BundleError):
            TypeI(line(1), line(-1))

    def test_normalize_witness(self):
        """Test (z, z1 - b1 z z2, z2) intertwines the deck actions"""
        E = TypeIII((rat(1, 3), rat(1, 2)), 0.5 - 1j, 2 + 1j, TAU)
        witness = normalize_witness(E)
        self.assertEqual(witness.target, normalize(E))
        ok, defect = verify_witness(witness)
        self.assertTrue(ok, msg=f'defect {defect}')

    @settings(max_examples=40, deadline=None)
    @given(
        st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
        st.integers(0, 5), st.integers(1, 6),
    )
    def test_classification_ignores_b1(self, b1_re, b1_im, b2_re, b2_im, p, q):
        """Test classify depends on (b1, b2) only through b2 - b1 tau"""
        b1, b2 = complex(b1_re, b1_im), complex(b2_re, b2_im)
        first = classify(rat(p, q), rat(0), b1, b2, TAU)
        second = classify(rat(p, q), rat(0), 0, b2 - b1 * TAU, TAU)
        self.assertEqual(first.kind, second.kind)
        if isinstance(first, TypeIII):
            self.assertAlmostEqual(first.b2, second.b2, places=12)


class DeckActionTest(SimpleTestCase):
    """Test deck transformations"""

    def test_type_iii_generators_commute(self):
        """Test the two generators commute on the total space"""
        E = dps(2 + 1j, TAU)
        g1, g2 = deck_generators(E)
        points = np.array([[0.3 + 0.1j, 1.0, 2j], [0.5j, -1.0, 0.5]])
        self.assertTrue(np.allclose(g1.apply(g2.apply(points)), g2.apply(g1.apply(points))))

    def test_line_sum_generators_commute(self):
        """Test commuting generators for a sum of opposite degree lines"""
        E = TypeII(line(1, (rat(1, 3), rat(0))), line(-1))
        g1, g2 = deck_generators(E)
        points = np.array([[0.3 + 0.1j, 1.0, 2j]])
        self.assertTrue(np.allclose(g1.apply(g2.apply(points)), g2.apply(g1.apply(points))))

    def test_jacobian_matches_difference(self):
        """Test the holomorphic Jacobian against a difference quotient"""
        E = TypeII(line(1, (rat(1, 3), rat(0))), line(-1))
        g1 = deck_generators(E)[1]
        point = np.array([0.3 + 0.1j, 1.0, 2j])
        h = 1e-6
        column = (g1.apply(point + [h, 0, 0]) - g1.apply(point - [h, 0, 0])) / (2 * h)
        self.assertTrue(np.allclose(g1.jacobian(point)[:, 0], column, rtol=1e-6))


class BundlesIsomorphicTest(SimpleTestCase):
    """Test bundles_isomorphic"""

    def test_dps_rescaling(self):
        """Test b2 = 1 against b2 = 3 over 2i gives (z, 3 z1, z2)"""
        E, F = dps(1, 2j), dps(3, 2j)
        witness = bundles_isomorphic(E, F)
        self.assertIsNotNone(witness)
        image = witness.apply(np.array([0.25 + 0.5j, 1.0, 1.0]))
        self.assertTrue(np.allclose(image, [0.25 + 0.5j, 3.0, 1.0]))
        self.assertTrue(verify_witness(witness)[0])

    def test_type_ii_identity(self):
        """Test equal Type II data gives A = 1, B = 0"""
        E = TypeII(line(1, (rat(1, 3), rat(0))), line(-1, (rat(0), rat(1, 2))))
        witness = bundles_isomorphic(E, E)
        self.assertEqual(witness.multiplier.value, 1)
        self.assertAlmostEqual(witness.shift, 0)
        self.assertTrue(verify_witness(witness)[0])

    def test_type_ii_translation(self):
        """Test a Type II isomorphism covering a translation"""
        E = TypeII(line(1), line(-1, (rat(1, 3), rat(1, 4))))
        F = TypeII(line(1, (rat(1, 3), rat(1, 4))), line(-1))
        witness = bundles_isomorphic(E, F)
        self.assertIsNotNone(witness)
        self.assertGreater(abs(witness.shift), 1e-3)
        ok, defect = verify_witness(witness)
        self.assertTrue(ok, msg=f'defect {defect}')

    def test_type_ii_degree_mismatch(self):
        """Test different degrees are not isomorphic"""
        E = TypeII(line(1), line(-1))
        F = TypeII(line(2), line(-2))
        self.assertIsNone(bundles_isomorphic(E, F))

    def test_type_i_swap(self):
        """Test swapped summands are matched by (z, z2, z1)"""
        first, second = line(0, (rat(1, 2), rat(0))), line(0, (rat(0), rat(1, 3)))
        witness = bundles_isomorphic(TypeI(first, second), TypeI(second, first))
        self.assertEqual(witness.form, '(A z, z2, z1)')
        self.assertTrue(verify_witness(witness)[0])

    def test_type_i_different_characters(self):
        """Test a torsion character is not matched by the trivial one"""
        E = TypeI(line(0, (rat(1, 2), rat(0))), line(0))
        self.assertIsNone(bundles_isomorphic(E, TypeI(line(0), line(0))))

    def test_mixed_types(self):
        """Test different types give None"""
        self.assertIsNone(bundles_isomorphic(TypeII(line(1), line(-1)), dps(1, TAU)))

    def test_different_moduli(self):
        """Test bundles over different moduli are an error"""
        with self.assertRaises(BundleError):
            bundles_isomorphic(dps(1, 1j), dps(1, 2j))

    def test_unreduced_modulus(self):
        """Test deciding over a modulus outside the fundamental domain"""
        E = TypeII(line(1, (rat(1, 3), rat(0)), tau=TAU + 1), line(-1, tau=TAU + 1))
        witness = bundles_isomorphic(E, E)
        self.assertIsNotNone(witness)
        ok, defect = verify_witness(witness)
        self.assertTrue(ok, msg=f'defect {defect}')

    def test_composition_and_inverse(self):
        """Test witnesses compose and invert"""
        E, F, G = dps(1, 2j), dps(3, 2j), dps(-2j, 2j)
        first = bundles_isomorphic(E, F)
        second = bundles_isomorphic(F, G)
        composite = second.compose(first)
        self.assertIs(composite.source, E)
        self.assertIs(composite.target, G)
        self.assertTrue(verify_witness(composite)[0])
        self.assertTrue(verify_witness(first.inverse())[0])
        point = np.array([0.1 + 0.3j, 2.0, -1j])
        self.assertTrue(np.allclose(first.inverse().apply(first.apply(point)), point))


class TotalSpacesBiholomorphicTest(SimpleTestCase):
    """Test total_spaces_biholomorphic"""

    def test_dps_itself(self):
        """Test the DPS bundle against itself"""
        E = dps()
        witness = total_spaces_biholomorphic(E, E)
        self.assertIsNotNone(witness)
        self.assertTrue(verify_witness(witness)[0])

    def test_type_ii_vs_type_iii(self):
        """Test Type II and Type III total spaces are not biholomorphic"""
        self.assertIsNone(total_spaces_biholomorphic(TypeII(line(1), line(-1)), dps(1, TAU)))

    def test_type_i_after_reduction(self):
        """Test Type I over 1 + i against the same data over i"""
        theta_first, theta_second = (rat(0), rat(1, 2)), (rat(0), rat(1, 3))
        E = TypeI(line(0, theta_first, 1 + 1j), line(0, theta_second, 1 + 1j))
        F = TypeI(line(0, theta_first, 1j), line(0, theta_second, 1j))
        witness = total_spaces_biholomorphic(E, F)
        self.assertIsNotNone(witness)
        self.assertEqual(witness.source, E)
        ok, defect = verify_witness(witness)
        self.assertTrue(ok, msg=f'defect {defect}')

    def test_different_curves(self):
        """Test non-isomorphic base curves"""
        self.assertIsNone(total_spaces_biholomorphic(dps(1, 1j), dps(1, 2j)))

    def test_transport_witness(self):
        """Test (lambda z, xi) intertwines E and E written over M tau"""
        E = TypeIII((rat(1, 3), rat(1, 2)), 0.5, 2 + 1j, TAU)
        moved, witness = transport(E, ModularMatrix(2, 1, 1, 1))
        self.assertIsInstance(moved.tau, Tau)
        ok, defect = verify_witness(witness)
        self.assertTrue(ok, msg=f'defect {defect}')


class AdmitsTest(SimpleTestCase):
    """Test the metric existence classifiers"""

    def test_flat_kahler(self):
        """Test only Type I carries flat Kahler metrics"""
        self.assertTrue(admits_flat_kahler(TypeI(line(0), line(0))))
        self.assertFalse(admits_flat_kahler(dps()))
        self.assertFalse(admits_flat_kahler(TypeII(line(1), line(-1))))

    @settings(max_examples=1000, deadline=None)
    @given(
        st.builds(complex, st.floats(-2, 2), st.floats(0.1, 3)),
        angles(), angles(),
        st.builds(complex, st.floats(-2, 2), st.floats(-2, 2)),
        st.floats(0.01, 3), st.floats(0, 2 * np.pi), st.booleans(),
    )
    def test_flat_kahler_iff_split(self, tau, theta1, theta2, b1, offset, direction, split):
        """Test flat Kahler metrics exist exactly for split representations"""
        b2 = b1 * tau if split else b1 * tau + offset * np.exp(1j * direction)
        E = classify(theta1, theta2, b1, b2, tau)
        self.assertEqual(admits_flat_kahler(E), split)

    def test_bi_nonneg(self):
        """Test degree, rational and irrational flat lines"""
        self.assertEqual(admits_bi_nonneg(line(1)), (False, None))
        ok, family = admits_bi_nonneg(line(0, (rat(1, 2), rat(1, 3))))
        self.assertTrue(ok)
        self.assertEqual(family, BIFamily('rational', 6))
        ok, family = admits_bi_nonneg(line(0, (AngleParam.irrational(0.3), rat(0))))
        self.assertTrue(ok)
        self.assertTrue(family.rotationally_symmetric)
